#include "lexrag/hybrid.hpp"

#include "lexrag/analyzer.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>
#include <unordered_set>

namespace lexrag {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

} // namespace

std::vector<FusedHit> rrf_fuse(const std::vector<std::vector<std::string>>& ranked_lists,
                               const FusionConfig& config) {
    if (ranked_lists.empty())
        throw HybridError("rrf_fuse requires at least one ranked list");
    std::unordered_map<std::string, double> scores;
    for (const auto& list : ranked_lists) {
        std::unordered_set<std::string> seen;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (!seen.insert(list[i]).second)
                throw HybridError("duplicate doc_id " + list[i] + " in ranked list");
            scores[list[i]] += 1.0 / (config.rrf_k + static_cast<double>(i + 1));
        }
    }
    std::vector<FusedHit> fused;
    fused.reserve(scores.size());
    for (auto& [id, score] : scores)
        fused.push_back({id, score});
    std::sort(fused.begin(), fused.end(), [](const FusedHit& a, const FusedHit& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    return fused;
}

SearchResult hybrid_search(const std::string& query_text, const IndexSnapshot& snapshot,
                           const DenseIndex& dense_index, EmbeddingClient& embed_client,
                           const FusionConfig& config, std::size_t k,
                           HybridPhaseTimings* timings) {
    HybridPhaseTimings local;

    auto start = Clock::now();
    std::vector<std::string> sparse_ids;
    const auto tokens = analyze(query_text);
    if (!tokens.empty()) {
        QueryAst bag;
        if (tokens.size() == 1) {
            bag = make_term(tokens[0]);
        } else {
            bag.kind = QueryAst::Kind::or_op;
            bag.children.reserve(tokens.size());
            for (const auto& t : tokens)
                bag.children.push_back(make_term(t));
        }
        const SearchResult sparse = search_topk(snapshot, bag, config.per_list_depth);
        sparse_ids.reserve(sparse.hits.size());
        for (const auto& hit : sparse.hits)
            sparse_ids.push_back(hit.doc_id);
    }
    local.sparse_ms = ms_since(start);

    start = Clock::now();
    const auto vectors = embed_client.embed({query_text}, EmbedKind::query);
    if (vectors.size() != 1)
        throw EmbeddingError("embedding backend returned " + std::to_string(vectors.size()) +
                             " vectors for one query");
    local.embed_ms = ms_since(start);

    start = Clock::now();
    std::vector<std::string> dense_ids;
    const auto dense_hits = dense_search(dense_index, vectors[0], config.per_list_depth);
    dense_ids.reserve(dense_hits.size());
    for (const auto& hit : dense_hits)
        dense_ids.push_back(hit.doc_id);
    local.dense_ms = ms_since(start);

    start = Clock::now();
    const auto fused = rrf_fuse({sparse_ids, dense_ids}, config);
    local.fuse_ms = ms_since(start);

    start = Clock::now();
    SearchResult result;
    result.total_candidates = fused.size();
    result.hits.reserve(std::min(k, fused.size()));
    for (std::size_t i = 0; i < fused.size() && i < k; ++i) {
        const auto ord = snapshot.ordinal_of(fused[i].doc_id);
        if (!ord)
            throw HybridError("dense index references unknown doc_id " + fused[i].doc_id);
        const StoredDocument& doc = snapshot.doc(*ord);
        result.hits.push_back({doc.doc_id, doc.title, make_snippet(doc.content), fused[i].score});
    }
    local.fetch_ms = ms_since(start);

    if (timings)
        *timings = local;
    return result;
}

} // namespace lexrag
