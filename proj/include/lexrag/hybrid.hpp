#pragma once

#include "lexrag/dense.hpp"
#include "lexrag/embedding.hpp"
#include "lexrag/index.hpp"
#include "lexrag/search.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace lexrag {

class HybridError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FusionConfig {
    double rrf_k = 60.0;
    std::size_t per_list_depth = 50;
};

struct FusedHit {
    std::string doc_id;
    double score = 0.0;
};

// Reciprocal rank fusion: score(d) = sum over lists containing d of
// 1/(rrf_k + rank) with rank 1-based. Output sorted by score descending,
// doc_id ascending on ties, so the result is invariant to list order.
// Throws HybridError when no lists are given or a list repeats a doc_id.
std::vector<FusedHit> rrf_fuse(const std::vector<std::vector<std::string>>& ranked_lists,
                               const FusionConfig& config = {});

struct HybridPhaseTimings {
    double sparse_ms = 0.0;
    double embed_ms = 0.0;
    double dense_ms = 0.0;
    double fuse_ms = 0.0;
    double fetch_ms = 0.0;
};

// Sparse + dense retrieval fused by RRF. The query text is treated as an OR
// bag of analyzed terms for the sparse leg and embedded whole for the dense
// leg; each leg contributes its top per_list_depth ids. Hit scores are fused
// RRF scores and total_candidates counts the distinct ids entering fusion.
// Embedding failures propagate as EmbeddingError for the caller to surface.
SearchResult hybrid_search(const std::string& query_text, const IndexSnapshot& snapshot,
                           const DenseIndex& dense_index, EmbeddingClient& embed_client,
                           const FusionConfig& config, std::size_t k,
                           HybridPhaseTimings* timings = nullptr);

} // namespace lexrag
