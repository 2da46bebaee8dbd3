#pragma once

#include "lexrag/query_ast.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lexrag {

struct ParseOptions {
    BoolOp default_operator = BoolOp::or_op;
    /// Ablation toggle: when false the accepted language is exactly bare
    /// terms, phrases, field prefixes, and juxtaposition.
    bool allow_boolean_ops = true;
};

/// Parse failure with the byte offset in the raw query where it occurred.
class QueryParseError : public std::runtime_error {
public:
    QueryParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what), position_(position) {}

    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Parses the query-string language:
///
///   expression := units joined by AND / OR / juxtaposition
///   unit       := [title:|content:] (term | "phrase" | (expression)) [^N]
///   NOT        := unary prefix on the following unit
///
/// Precedence NOT > AND > OR; juxtaposition joins with opts.default_operator
/// at AND precedence. Operators are case-sensitive upper-case. Terms and
/// phrase contents are analyzer-normalized. Unknown field prefixes are plain
/// text. A boost or field prefix on a parenthesized group distributes over
/// the group's leaves. Queries whose every top-level unit sits under NOT are
/// rejected. Throws QueryParseError on malformed input; never crashes.
QueryAst parse_query(std::string_view query, const ParseOptions& opts = {});

/// Renders an AST back to a string that reparses to the same structure
/// (for parser-canonical ASTs, under the same options). With boolean
/// operators disabled, And/Or joins matching opts.default_operator render
/// as juxtaposition.
std::string render_query(const QueryAst& ast, const ParseOptions& opts = {});

} // namespace lexrag
