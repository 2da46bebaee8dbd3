#pragma once

#include "lexrag/index.hpp"
#include "lexrag/query_ast.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lexrag {

inline constexpr double k_bm25_k1 = 1.2;
inline constexpr double k_bm25_b = 0.75;

struct Bm25Params {
    double k1 = k_bm25_k1;
    double b = k_bm25_b;
};

struct SearchHit {
    std::string doc_id;
    std::string title;
    std::string snippet;
    double score = 0.0;
};

struct SearchResult {
    std::vector<SearchHit> hits;
    std::size_t total_candidates = 0;
};

// Boolean candidate evaluation over the inverted index. Returns the matching
// document ordinals in ascending order, before any scoring.
//
// Semantics per node:
//   term    docs whose scoped field contains the token (any = title or content)
//   phrase  docs where the tokens appear at consecutive positions in one field
//   and     intersection of positive children minus the union of NOT children;
//           empty when there is no positive child
//   or      union of positive children minus the union of NOT children
//   not     subtracts its operand from the sibling positive set; a NOT with no
//           positive siblings matches nothing
std::vector<std::uint32_t> evaluate_candidates(const IndexSnapshot& index, const QueryAst& query);

// BM25 score of one candidate document. Sums contributions of every positive
// term and phrase leaf (NOT subtrees score zero); a leaf with field scope any
// contributes separately for title and content, each with its own df, tf, and
// length normalization. idf = ln(1 + (N - df + 0.5) / (df + 0.5)). A phrase
// leaf uses the sum of its member-token idfs and its occurrence count as tf.
// Leaf boosts multiply the leaf contribution.
double score_bm25(const IndexSnapshot& index, const QueryAst& query, std::uint32_t ordinal,
                  const Bm25Params& params = {});

// Evaluates candidates, scores them, and returns the top k hits ordered by
// score descending with doc_id ascending as the tiebreak. total_candidates is
// the full candidate count before truncation.
SearchResult search_topk(const IndexSnapshot& index, const QueryAst& query, std::size_t k,
                         const Bm25Params& params = {});

// UTF-8-safe prefix of the stored content used as the hit snippet.
std::string make_snippet(const std::string& content);

} // namespace lexrag
