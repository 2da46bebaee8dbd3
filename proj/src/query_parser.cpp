#include "lexrag/query_parser.hpp"

#include "lexrag/analyzer.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

namespace lexrag {
namespace {

enum class TokKind { word, quoted, lparen, rparen, caret, and_kw, or_kw, not_kw, end };

struct Token {
    TokKind kind;
    std::string text;
    std::size_t offset;
};

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::vector<Token> lex(std::string_view query, const ParseOptions& opts) {
    std::vector<Token> toks;
    std::size_t i = 0;
    while (i < query.size()) {
        const char c = query[i];
        if (is_space(c)) {
            ++i;
            continue;
        }
        if (c == '(' || c == ')' || c == '^') {
            if (!opts.allow_boolean_ops)
                throw QueryParseError(c == '^' ? "term boosting is disabled"
                                               : "grouping parentheses are disabled",
                                      i);
            toks.push_back({c == '(' ? TokKind::lparen : c == ')' ? TokKind::rparen : TokKind::caret,
                            std::string(1, c), i});
            ++i;
            continue;
        }
        if (c == '"') {
            const std::size_t open = i;
            const std::size_t close = query.find('"', i + 1);
            if (close == std::string_view::npos)
                throw QueryParseError("unterminated quoted phrase", open);
            toks.push_back({TokKind::quoted, std::string(query.substr(open + 1, close - open - 1)),
                            open});
            i = close + 1;
            continue;
        }
        const std::size_t start = i;
        while (i < query.size() && !is_space(query[i]) && query[i] != '(' && query[i] != ')' &&
               query[i] != '"' && query[i] != '^')
            ++i;
        std::string word(query.substr(start, i - start));
        TokKind kind = TokKind::word;
        if (word == "AND")
            kind = TokKind::and_kw;
        else if (word == "OR")
            kind = TokKind::or_kw;
        else if (word == "NOT")
            kind = TokKind::not_kw;
        if (kind != TokKind::word && !opts.allow_boolean_ops)
            throw QueryParseError("boolean operator " + word + " is disabled", start);
        toks.push_back({kind, std::move(word), start});
    }
    toks.push_back({TokKind::end, "", query.size()});
    return toks;
}

void splice_child(std::vector<QueryAst>& dst, QueryAst node, QueryAst::Kind kind) {
    if (node.kind == kind) {
        for (auto& c : node.children)
            dst.push_back(std::move(c));
    } else {
        dst.push_back(std::move(node));
    }
}

// Joins two subtrees under op, keeping And/Or nodes flat.
QueryAst join(BoolOp op, QueryAst left, QueryAst right) {
    const auto kind = op == BoolOp::and_op ? QueryAst::Kind::and_op : QueryAst::Kind::or_op;
    std::vector<QueryAst> children;
    splice_child(children, std::move(left), kind);
    splice_child(children, std::move(right), kind);
    QueryAst node;
    node.kind = kind;
    node.children = std::move(children);
    return node;
}

void apply_scope(QueryAst& node, FieldScope scope) {
    if (node.kind == QueryAst::Kind::term || node.kind == QueryAst::Kind::phrase) {
        if (node.field == FieldScope::any)
            node.field = scope;
        return;
    }
    for (auto& c : node.children)
        apply_scope(c, scope);
}

void apply_boost(QueryAst& node, double factor) {
    if (node.kind == QueryAst::Kind::term || node.kind == QueryAst::Kind::phrase) {
        node.boost *= factor;
        return;
    }
    for (auto& c : node.children)
        apply_boost(c, factor);
}

class Parser {
public:
    Parser(std::vector<Token> toks, const ParseOptions& opts)
        : toks_(std::move(toks)), opts_(opts) {}

    std::optional<QueryAst> parse_or() {
        auto acc = parse_and();
        while (peek().kind == TokKind::or_kw) {
            advance();
            auto rhs = parse_and();
            if (!rhs)
                continue;
            acc = acc ? join(BoolOp::or_op, std::move(*acc), std::move(*rhs)) : std::move(rhs);
        }
        return acc;
    }

    const Token& peek() const { return toks_[pos_]; }

private:
    std::optional<QueryAst> parse_and() {
        auto acc = parse_unary();
        for (;;) {
            BoolOp op;
            if (peek().kind == TokKind::and_kw) {
                advance();
                op = BoolOp::and_op;
            } else if (starts_unit(peek().kind)) {
                op = opts_.default_operator;
            } else {
                break;
            }
            auto rhs = parse_unary();
            if (!rhs)
                continue;
            acc = acc ? join(op, std::move(*acc), std::move(*rhs)) : std::move(rhs);
        }
        return acc;
    }

    std::optional<QueryAst> parse_unary() {
        if (peek().kind == TokKind::not_kw) {
            advance();
            auto operand = parse_unary();
            if (!operand)
                return std::nullopt; // excluding nothing is a no-op
            return make_not(std::move(*operand));
        }
        return parse_unit();
    }

    std::optional<QueryAst> parse_unit() {
        const Token& tok = peek();
        std::optional<QueryAst> node;
        switch (tok.kind) {
        case TokKind::word: {
            advance();
            FieldScope scope = FieldScope::any;
            std::string body = tok.text;
            const auto colon = tok.text.find(':');
            if (colon != std::string::npos) {
                const std::string prefix = tok.text.substr(0, colon);
                if (prefix == "title" || prefix == "content") {
                    scope = prefix == "title" ? FieldScope::title : FieldScope::content;
                    body = tok.text.substr(colon + 1);
                    if (body.empty()) {
                        node = parse_scoped_body(scope);
                        break;
                    }
                }
            }
            node = terms_from(body, scope);
            break;
        }
        case TokKind::quoted:
            advance();
            node = phrase_from(tok.text, FieldScope::any);
            break;
        case TokKind::lparen:
            node = parse_paren();
            break;
        case TokKind::rparen:
            throw QueryParseError("unexpected )", tok.offset);
        case TokKind::caret:
            throw QueryParseError("unexpected ^", tok.offset);
        case TokKind::and_kw:
        case TokKind::or_kw:
            throw QueryParseError("dangling operator " + tok.text, tok.offset);
        case TokKind::not_kw: // unreachable: handled by parse_unary
        case TokKind::end:
            throw QueryParseError("unexpected end of query", tok.offset);
        }
        parse_boosts(node);
        return node;
    }

    // Body of a bare "title:" / "content:" prefix: the next token.
    std::optional<QueryAst> parse_scoped_body(FieldScope scope) {
        const Token& tok = peek();
        switch (tok.kind) {
        case TokKind::word:
            advance();
            return terms_from(tok.text, scope);
        case TokKind::quoted:
            advance();
            return phrase_from(tok.text, scope);
        case TokKind::lparen: {
            auto group = parse_paren();
            if (group)
                apply_scope(*group, scope);
            return group;
        }
        default:
            throw QueryParseError("expected a term after field prefix", tok.offset);
        }
    }

    std::optional<QueryAst> parse_paren() {
        const Token open = peek();
        advance();
        auto inner = parse_or();
        if (peek().kind != TokKind::rparen) {
            if (peek().kind == TokKind::end)
                throw QueryParseError("unbalanced parenthesis: missing )", open.offset);
            throw QueryParseError("expected )", peek().offset);
        }
        advance();
        return inner;
    }

    void parse_boosts(std::optional<QueryAst>& node) {
        while (peek().kind == TokKind::caret) {
            advance();
            const Token& num = peek();
            if (num.kind != TokKind::word)
                throw QueryParseError("expected a number after ^", num.offset);
            double value = 0.0;
            const char* begin = num.text.data();
            const char* end = begin + num.text.size();
            const auto [ptr, ec] = std::from_chars(begin, end, value);
            if (ec != std::errc{} || ptr != end || !(value > 0.0) || !std::isfinite(value))
                throw QueryParseError("invalid boost value '" + num.text + "'", num.offset);
            advance();
            if (node)
                apply_boost(*node, value);
        }
    }

    std::optional<QueryAst> terms_from(const std::string& text, FieldScope scope) {
        const auto tokens = analyze(text);
        if (tokens.empty())
            return std::nullopt;
        if (tokens.size() == 1)
            return make_term(tokens[0], scope);
        // A single word that analyzes to several tokens joins like whitespace-
        // separated terms.
        std::optional<QueryAst> acc;
        for (const auto& t : tokens) {
            auto term = make_term(t, scope);
            acc = acc ? join(opts_.default_operator, std::move(*acc), std::move(term))
                      : std::move(term);
        }
        return acc;
    }

    std::optional<QueryAst> phrase_from(const std::string& text, FieldScope scope) {
        auto tokens = analyze(text);
        if (tokens.empty())
            return std::nullopt;
        return make_phrase(std::move(tokens), scope);
    }

    static bool starts_unit(TokKind k) {
        return k == TokKind::word || k == TokKind::quoted || k == TokKind::lparen ||
               k == TokKind::not_kw;
    }

    void advance() { ++pos_; }

    std::vector<Token> toks_;
    const ParseOptions& opts_;
    std::size_t pos_ = 0;
};

bool all_children_negative(const QueryAst& node) {
    for (const auto& c : node.children)
        if (c.kind != QueryAst::Kind::not_op)
            return false;
    return true;
}

std::string shortest_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string scope_prefix(FieldScope scope) {
    switch (scope) {
    case FieldScope::title:
        return "title:";
    case FieldScope::content:
        return "content:";
    case FieldScope::any:
        break;
    }
    return "";
}

std::string render_node(const QueryAst& node, const ParseOptions& opts, bool parenthesize);

std::string render_join(const QueryAst& node, const ParseOptions& opts) {
    const bool is_and = node.kind == QueryAst::Kind::and_op;
    const bool matches_default =
        (is_and && opts.default_operator == BoolOp::and_op) ||
        (!is_and && opts.default_operator == BoolOp::or_op);
    const std::string joiner =
        (!opts.allow_boolean_ops && matches_default) ? " " : (is_and ? " AND " : " OR ");
    std::string out;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const QueryAst& c = node.children[i];
        const bool needs_parens =
            c.kind == QueryAst::Kind::or_op || (is_and && c.kind == QueryAst::Kind::and_op);
        if (i > 0)
            out += joiner;
        out += render_node(c, opts, needs_parens);
    }
    return out;
}

std::string render_node(const QueryAst& node, const ParseOptions& opts, bool parenthesize) {
    std::string out;
    switch (node.kind) {
    case QueryAst::Kind::term:
        out = scope_prefix(node.field) + node.token;
        if (node.boost != 1.0)
            out += "^" + shortest_double(node.boost);
        return out;
    case QueryAst::Kind::phrase: {
        out = scope_prefix(node.field) + "\"";
        for (std::size_t i = 0; i < node.tokens.size(); ++i) {
            if (i > 0)
                out += " ";
            out += node.tokens[i];
        }
        out += "\"";
        if (node.boost != 1.0)
            out += "^" + shortest_double(node.boost);
        return out;
    }
    case QueryAst::Kind::not_op: {
        const QueryAst& child = node.children.at(0);
        const bool child_parens =
            child.kind == QueryAst::Kind::and_op || child.kind == QueryAst::Kind::or_op;
        return "NOT " + render_node(child, opts, child_parens);
    }
    case QueryAst::Kind::and_op:
    case QueryAst::Kind::or_op:
        out = render_join(node, opts);
        if (parenthesize)
            out = "(" + out + ")";
        return out;
    }
    return out;
}

} // namespace

QueryAst parse_query(std::string_view query, const ParseOptions& opts) {
    Parser parser(lex(query, opts), opts);
    if (parser.peek().kind == TokKind::end)
        throw QueryParseError("empty query", 0);
    auto ast = parser.parse_or();
    if (parser.peek().kind != TokKind::end)
        throw QueryParseError("unexpected )", parser.peek().offset);
    if (!ast)
        throw QueryParseError("query has no searchable terms", 0);
    if (ast->kind == QueryAst::Kind::not_op ||
        ((ast->kind == QueryAst::Kind::and_op || ast->kind == QueryAst::Kind::or_op) &&
         all_children_negative(*ast)))
        throw QueryParseError("query has no positive clause", 0);
    return std::move(*ast);
}

std::string render_query(const QueryAst& ast, const ParseOptions& opts) {
    return render_node(ast, opts, false);
}

} // namespace lexrag
