#include "lexrag/query_parser.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <random>
#include <string>
#include <vector>

using namespace lexrag;

namespace {

const ParseOptions and_default{BoolOp::and_op, true};
const ParseOptions no_bools{BoolOp::and_op, false};

QueryAst term(const char* t, FieldScope scope = FieldScope::any, double boost = 1.0) {
    return make_term(t, scope, boost);
}

} // namespace

TEST_CASE("representative queries parse to the documented shapes") {
    CHECK(parse_query("title:\"Antonio Vivaldi\" AND opera") ==
          make_and({make_phrase({"antonio", "vivaldi"}, FieldScope::title), term("opera")}));

    CHECK(parse_query("born 4 March 1678", and_default) ==
          make_and({term("born"), term("4"), term("march"), term("1678")}));
    CHECK(parse_query("born 4 March 1678") ==
          make_or({term("born"), term("4"), term("march"), term("1678")}));

    // Juxtaposition joins with the default operator; an Or child splices
    // into an Or join but stays nested under And.
    CHECK(parse_query("(opera OR concerto) NOT griselda") ==
          make_or({term("opera"), term("concerto"), make_not(term("griselda"))}));
    CHECK(parse_query("(opera OR concerto) NOT griselda", and_default) ==
          make_and({make_or({term("opera"), term("concerto")}), make_not(term("griselda"))}));

    CHECK(parse_query("vivaldi^2") == term("vivaldi", FieldScope::any, 2.0));
}

TEST_CASE("AND binds tighter than OR and NOT binds tightest") {
    CHECK(parse_query("a OR b AND c") ==
          make_or({term("a"), make_and({term("b"), term("c")})}));
    CHECK(parse_query("NOT a AND b", and_default) ==
          make_and({make_not(term("a")), term("b")}));
    CHECK(parse_query("NOT (a OR b) AND c", and_default) ==
          make_and({make_not(make_or({term("a"), term("b")})), term("c")}));
    CHECK(parse_query("a NOT b") == make_or({term("a"), make_not(term("b"))}));
}

TEST_CASE("same-operator chains flatten to one node") {
    CHECK(parse_query("a AND b AND c") == make_and({term("a"), term("b"), term("c")}));
    CHECK(parse_query("a OR b OR c") == make_or({term("a"), term("b"), term("c")}));
    CHECK(parse_query("(a AND b) AND c") == make_and({term("a"), term("b"), term("c")}));
    CHECK(parse_query("(a OR b) OR c") == make_or({term("a"), term("b"), term("c")}));
    // Opposite-operator nesting is preserved.
    CHECK(parse_query("(a AND b) OR c") ==
          make_or({make_and({term("a"), term("b")}), term("c")}));
}

TEST_CASE("field prefixes scope leaves and distribute over groups") {
    CHECK(parse_query("title:vivaldi") == term("vivaldi", FieldScope::title));
    CHECK(parse_query("content:\"four seasons\"") ==
          make_phrase({"four", "seasons"}, FieldScope::content));
    // A detached prefix scopes the following unit.
    CHECK(parse_query("title: vivaldi") == term("vivaldi", FieldScope::title));
    CHECK(parse_query("title:(opera concerto)", and_default) ==
          make_and({term("opera", FieldScope::title), term("concerto", FieldScope::title)}));
    // An inner explicit scope wins over the distributed one.
    CHECK(parse_query("title:(content:x y)", and_default) ==
          make_and({term("x", FieldScope::content), term("y", FieldScope::title)}));
    // Unknown prefixes are plain text; the colon splits into terms.
    CHECK(parse_query("foo:bar", and_default) == make_and({term("foo"), term("bar")}));
}

TEST_CASE("boosts multiply and distribute over groups") {
    CHECK(parse_query("\"four seasons\"^3") ==
          make_phrase({"four", "seasons"}, FieldScope::any, 3.0));
    CHECK(parse_query("vivaldi^2^3") == term("vivaldi", FieldScope::any, 6.0));
    CHECK(parse_query("vivaldi^0.5") == term("vivaldi", FieldScope::any, 0.5));
    CHECK(parse_query("(a b)^2", and_default) ==
          make_and({term("a", FieldScope::any, 2.0), term("b", FieldScope::any, 2.0)}));
}

TEST_CASE("operator words are case-sensitive; a bare word may fan out") {
    CHECK(parse_query("a and b", and_default) ==
          make_and({term("a"), term("and"), term("b")}));
    CHECK(parse_query("anti-war", and_default) == make_and({term("anti"), term("war")}));
    // Excluding an empty phrase excludes nothing.
    CHECK(parse_query("a NOT \"\"") == term("a"));
}

TEST_CASE("malformed queries report a message and byte position") {
    const struct {
        const char* input;
        const char* message;
        std::size_t position;
    } cases[] = {
        {"", "empty query", 0},
        {"AND opera", "dangling operator AND", 0},
        {"opera AND", "unexpected end of query", 9},
        {"(opera", "unbalanced parenthesis: missing )", 0},
        {"opera)", "unexpected )", 5},
        {"\"abc", "unterminated quoted phrase", 0},
        {"vivaldi^x", "invalid boost value 'x'", 8},
        {"NOT vivaldi", "query has no positive clause", 0},
        {"NOT a NOT b", "query has no positive clause", 0},
        {"title:", "expected a term after field prefix", 6},
        {"\"\"", "query has no searchable terms", 0},
    };
    for (const auto& c : cases) {
        CAPTURE(c.input);
        try {
            parse_query(c.input);
            FAIL_CHECK("no error for ", c.input);
        } catch (const QueryParseError& error) {
            CHECK(std::string(error.what()) == c.message);
            CHECK(error.position() == c.position);
        }
    }
}

TEST_CASE("disabling boolean syntax narrows the accepted language") {
    CHECK(parse_query("opera concerto", no_bools) ==
          make_and({term("opera"), term("concerto")}));
    CHECK(parse_query("title:\"four seasons\" venice", no_bools) ==
          make_and({make_phrase({"four", "seasons"}, FieldScope::title), term("venice")}));

    const struct {
        const char* input;
        const char* message;
        std::size_t position;
    } rejected[] = {
        {"a AND b", "boolean operator AND is disabled", 2},
        {"a OR b", "boolean operator OR is disabled", 2},
        {"NOT b", "boolean operator NOT is disabled", 0},
        {"(a b)", "grouping parentheses are disabled", 0},
        {"a^2", "term boosting is disabled", 1},
    };
    for (const auto& c : rejected) {
        CAPTURE(c.input);
        try {
            parse_query(c.input, no_bools);
            FAIL_CHECK("no error for ", c.input);
        } catch (const QueryParseError& error) {
            CHECK(std::string(error.what()) == c.message);
            CHECK(error.position() == c.position);
        }
    }
}

TEST_CASE("render produces the documented strings") {
    CHECK(render_query(term("opera")) == "opera");
    CHECK(render_query(make_phrase({"antonio", "vivaldi"}, FieldScope::title)) ==
          "title:\"antonio vivaldi\"");
    CHECK(render_query(make_and({term("a"), make_not(term("b"))})) == "a AND NOT b");
    CHECK(render_query(term("vivaldi", FieldScope::any, 2.0)) == "vivaldi^2");
    CHECK(render_query(make_and({make_or({term("a"), term("b")}), term("c")})) ==
          "(a OR b) AND c");
    // Joins matching the default operator render as juxtaposition when
    // boolean syntax is off.
    CHECK(render_query(make_and({term("a"), term("b")}), no_bools) == "a b");
}

TEST_CASE("random canonical asts survive a render-parse round trip") {
    std::mt19937 rng(17);
    const auto vocab = lexrag::testing::make_vocab(30);
    for (int i = 0; i < 2000; ++i) {
        const QueryAst ast = lexrag::testing::random_ast(rng, vocab, 3);
        const std::string rendered = render_query(ast);
        CAPTURE(rendered);
        const QueryAst reparsed = parse_query(rendered);
        CHECK(reparsed == ast);
    }
}

TEST_CASE("arbitrary byte strings either parse or throw a positioned error") {
    std::mt19937 rng(18);
    std::uniform_int_distribution<int> len(1, 40);
    // Bias toward syntax-relevant characters so operators and quotes meet.
    const std::string alphabet = "ab(\")^ AND OR NOT:\"^2.";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    for (int i = 0; i < 5000; ++i) {
        std::string q;
        const int n = len(rng);
        for (int j = 0; j < n; ++j)
            q.push_back(alphabet[pick(rng)]);
        try {
            (void)parse_query(q);
        } catch (const QueryParseError& error) {
            CHECK(error.position() <= q.size());
        }
    }
}
