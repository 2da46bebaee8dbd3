#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lexrag {

enum class FieldScope { any, title, content };
enum class BoolOp { and_op, or_op };

/// One node of a parsed logical query.
///
/// Leaves are terms and phrases, each carrying a field scope and a
/// multiplicative boost; And/Or hold two or more children and Not exactly
/// one. Parser output is canonical: an And never has an And child and an Or
/// never has an Or child, and leaf tokens are analyzer-normalized.
struct QueryAst {
    enum class Kind { term, phrase, and_op, or_op, not_op };

    Kind kind = Kind::term;
    FieldScope field = FieldScope::any; // term, phrase
    std::string token;                  // term
    std::vector<std::string> tokens;    // phrase
    double boost = 1.0;                 // term, phrase
    std::vector<QueryAst> children;     // and_op, or_op (>= 2), not_op (== 1)

    bool operator==(const QueryAst&) const = default;
};

inline QueryAst make_term(std::string token, FieldScope scope = FieldScope::any,
                          double boost = 1.0) {
    QueryAst n;
    n.kind = QueryAst::Kind::term;
    n.token = std::move(token);
    n.field = scope;
    n.boost = boost;
    return n;
}

inline QueryAst make_phrase(std::vector<std::string> tokens, FieldScope scope = FieldScope::any,
                            double boost = 1.0) {
    QueryAst n;
    n.kind = QueryAst::Kind::phrase;
    n.tokens = std::move(tokens);
    n.field = scope;
    n.boost = boost;
    return n;
}

inline QueryAst make_and(std::vector<QueryAst> children) {
    QueryAst n;
    n.kind = QueryAst::Kind::and_op;
    n.children = std::move(children);
    return n;
}

inline QueryAst make_or(std::vector<QueryAst> children) {
    QueryAst n;
    n.kind = QueryAst::Kind::or_op;
    n.children = std::move(children);
    return n;
}

inline QueryAst make_not(QueryAst child) {
    QueryAst n;
    n.kind = QueryAst::Kind::not_op;
    n.children.push_back(std::move(child));
    return n;
}

} // namespace lexrag
