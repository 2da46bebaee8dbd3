#include "lexrag/hybrid.hpp"

#include "lexrag/dense.hpp"
#include "lexrag/embedding.hpp"
#include "lexrag/index.hpp"

#include <doctest.h>

#include <string>
#include <vector>

using namespace lexrag;

namespace {

// Corpus with clear token overlap structure for the hashed embedder.
const std::vector<Document> fixture_docs{
    {"vivaldi", "Antonio Vivaldi", "antonio vivaldi baroque composer venice concerto"},
    {"bach", "Johann Bach", "johann bach baroque composer organ fugue"},
    {"seasons", "Four Seasons", "four seasons violin concerto vivaldi"},
    {"venice", "Venice", "venice city canals lagoon"},
    {"cooking", "Pasta", "pasta recipe tomato basil dinner"},
};

struct HybridFixture {
    IndexSnapshot snapshot;
    HashedEmbeddingClient embedder{64};
    DenseIndex dense;

    HybridFixture() : snapshot(build_index(fixture_docs)) {
        std::vector<std::string> ids;
        std::vector<std::string> texts;
        for (const auto& doc : fixture_docs) {
            ids.push_back(doc.doc_id);
            texts.push_back(doc.title + "\n" + doc.content);
        }
        const auto vectors = embedder.embed(texts, EmbedKind::passage);
        std::vector<float> flat;
        for (const auto& v : vectors)
            flat.insert(flat.end(), v.begin(), v.end());
        dense = build_dense_index(ids, flat, 64);
    }
};

class FailingEmbedder : public EmbeddingClient {
public:
    std::vector<std::vector<float>> embed(const std::vector<std::string>&, EmbedKind) override {
        throw EmbeddingError("backend unavailable");
    }
};

} // namespace

TEST_CASE("rrf scores are reciprocal shifted ranks summed across lists") {
    const auto fused = rrf_fuse({{"a"}, {"a"}, {"b", "c", "d"}});
    REQUIRE(fused.size() == 4);
    CHECK(fused[0].doc_id == "a");
    CHECK(fused[0].score == 2.0 / 61.0);
    CHECK(fused[1].doc_id == "b");
    CHECK(fused[1].score == 1.0 / 61.0);
    CHECK(fused[2].doc_id == "c");
    CHECK(fused[2].score == 1.0 / 62.0);
    CHECK(fused[3].doc_id == "d");
    CHECK(fused[3].score == 1.0 / 63.0);
}

TEST_CASE("rrf ties break by doc_id and k is configurable") {
    const auto tied = rrf_fuse({{"zed"}, {"amy"}});
    REQUIRE(tied.size() == 2);
    CHECK(tied[0].doc_id == "amy");
    CHECK(tied[1].doc_id == "zed");

    const FusionConfig sharp{10.0, 50};
    const auto fused = rrf_fuse({{"x", "y"}}, sharp);
    CHECK(fused[0].score == 1.0 / 11.0);
    CHECK(fused[1].score == 1.0 / 12.0);
}

TEST_CASE("rrf rejects empty input and duplicate ids within a list") {
    CHECK_THROWS_WITH_AS(rrf_fuse({}), "rrf_fuse requires at least one ranked list", HybridError);
    CHECK_THROWS_WITH_AS(rrf_fuse({{"a", "b", "a"}}), "duplicate doc_id a in ranked list",
                         HybridError);
    // An empty list is fine; it just contributes nothing.
    const auto fused = rrf_fuse({{}, {"a"}});
    REQUIRE(fused.size() == 1);
    CHECK(fused[0].score == 1.0 / 61.0);
}

TEST_CASE("hybrid results equal fusing the sparse and dense legs directly") {
    HybridFixture fx;
    const FusionConfig config{};
    const std::string query = "vivaldi concerto";

    // Sparse leg: OR bag over the analyzed tokens.
    QueryAst bag = make_or({make_term("vivaldi"), make_term("concerto")});
    std::vector<std::string> sparse_ids;
    for (const auto& hit : search_topk(fx.snapshot, bag, config.per_list_depth).hits)
        sparse_ids.push_back(hit.doc_id);

    // Dense leg: embedded query against the stored vectors.
    const auto query_vec = fx.embedder.embed({query}, EmbedKind::query);
    std::vector<std::string> dense_ids;
    for (const auto& hit : dense_search(fx.dense, query_vec[0], config.per_list_depth))
        dense_ids.push_back(hit.doc_id);

    const auto fused = rrf_fuse({sparse_ids, dense_ids}, config);

    HybridPhaseTimings timings;
    const SearchResult got =
        hybrid_search(query, fx.snapshot, fx.dense, fx.embedder, config, 10, &timings);

    CHECK(got.total_candidates == fused.size());
    REQUIRE(got.hits.size() == std::min<std::size_t>(10, fused.size()));
    for (std::size_t i = 0; i < got.hits.size(); ++i) {
        CHECK(got.hits[i].doc_id == fused[i].doc_id);
        CHECK(got.hits[i].score == fused[i].score);
    }

    CHECK(timings.sparse_ms >= 0.0);
    CHECK(timings.embed_ms >= 0.0);
    CHECK(timings.dense_ms >= 0.0);
    CHECK(timings.fuse_ms >= 0.0);
    CHECK(timings.fetch_ms >= 0.0);
}

TEST_CASE("hybrid hits carry stored titles and snippets") {
    HybridFixture fx;
    const SearchResult got = hybrid_search("antonio vivaldi venice", fx.snapshot, fx.dense,
                                           fx.embedder, {}, 3);
    REQUIRE(!got.hits.empty());
    CHECK(got.hits[0].doc_id == "vivaldi"); // strongest overlap on both legs
    CHECK(got.hits[0].title == "Antonio Vivaldi");
    CHECK(got.hits[0].snippet == "antonio vivaldi baroque composer venice concerto");
    // Repeatable: the whole pipeline is deterministic.
    const SearchResult again = hybrid_search("antonio vivaldi venice", fx.snapshot, fx.dense,
                                             fx.embedder, {}, 3);
    REQUIRE(again.hits.size() == got.hits.size());
    for (std::size_t i = 0; i < got.hits.size(); ++i) {
        CHECK(again.hits[i].doc_id == got.hits[i].doc_id);
        CHECK(again.hits[i].score == got.hits[i].score);
    }
}

TEST_CASE("per_list_depth caps each leg before fusion") {
    HybridFixture fx;
    const FusionConfig shallow{60.0, 1};
    const SearchResult got =
        hybrid_search("vivaldi concerto", fx.snapshot, fx.dense, fx.embedder, shallow, 10);
    // One id per leg, so at most two distinct candidates.
    CHECK(got.total_candidates <= 2);
    CHECK(got.hits.size() <= 2);
}

TEST_CASE("a query with no indexable tokens still searches the dense leg") {
    HybridFixture fx;
    const SearchResult got = hybrid_search("!!!", fx.snapshot, fx.dense, fx.embedder, {}, 3);
    // The sparse leg is empty; every hit comes from dense ranks.
    CHECK(got.hits.size() == 3);
    for (const auto& hit : got.hits)
        CHECK(hit.score <= 1.0 / 61.0);
}

TEST_CASE("k truncates hits but not total_candidates") {
    HybridFixture fx;
    const SearchResult got =
        hybrid_search("baroque composer", fx.snapshot, fx.dense, fx.embedder, {}, 2);
    CHECK(got.hits.size() == 2);
    CHECK(got.total_candidates >= 2);
}

TEST_CASE("a dense id missing from the corpus fails the fetch") {
    HybridFixture fx;
    std::vector<std::string> ids{"ghost"};
    const auto vec = fx.embedder.embed({"ghost text"}, EmbedKind::passage);
    const DenseIndex ghost = build_dense_index(ids, vec[0], 64);
    CHECK_THROWS_WITH_AS(hybrid_search("ghost", fx.snapshot, ghost, fx.embedder, {}, 5),
                         "dense index references unknown doc_id ghost", HybridError);
}

TEST_CASE("embedding failures propagate to the caller") {
    HybridFixture fx;
    FailingEmbedder broken;
    CHECK_THROWS_AS(hybrid_search("vivaldi", fx.snapshot, fx.dense, broken, {}, 5),
                    EmbeddingError);
}
