#include "lexrag/retriever.hpp"

namespace lexrag {
namespace {

std::vector<RetrievedPassage> passages_from(const IndexSnapshot& snapshot,
                                            const std::vector<SearchHit>& hits) {
    std::vector<RetrievedPassage> out;
    out.reserve(hits.size());
    for (const SearchHit& hit : hits) {
        const auto ord = snapshot.ordinal_of(hit.doc_id);
        const std::string& content = ord ? snapshot.doc(*ord).content : hit.snippet;
        out.push_back({hit.doc_id, hit.title, content, hit.score});
    }
    return out;
}

// Byte offset of the first standalone AND/OR/NOT word, if any.
std::optional<std::size_t> find_boolean_operator(const std::string& query) {
    std::size_t i = 0;
    while (i < query.size()) {
        while (i < query.size() && std::isspace(static_cast<unsigned char>(query[i])))
            ++i;
        const std::size_t start = i;
        while (i < query.size() && !std::isspace(static_cast<unsigned char>(query[i])))
            ++i;
        const std::string_view word(query.data() + start, i - start);
        if (word == "AND" || word == "OR" || word == "NOT")
            return start;
    }
    return std::nullopt;
}

} // namespace

LogicalRetriever::LogicalRetriever(const IndexSnapshot& snapshot, bool allow_boolean_ops)
    : snapshot_(snapshot), allow_boolean_ops_(allow_boolean_ops) {}

RetrievalOutcome LogicalRetriever::retrieve(const std::string& query, std::size_t max_results,
                                            BoolOp default_op) {
    RetrievalOutcome outcome;
    try {
        const QueryAst ast = parse_query(query, {default_op, allow_boolean_ops_});
        const SearchResult result = search_topk(snapshot_, ast, max_results);
        outcome.passages = passages_from(snapshot_, result.hits);
        outcome.total_candidates = result.total_candidates;
    } catch (const QueryParseError& e) {
        outcome.ok = false;
        outcome.error = e.what();
        outcome.error_position = e.position();
    }
    return outcome;
}

HybridRetriever::HybridRetriever(const IndexSnapshot& snapshot, const DenseIndex& dense_index,
                                 EmbeddingClient& embed_client, FusionConfig config)
    : snapshot_(snapshot), dense_index_(dense_index), embed_client_(embed_client),
      config_(config) {}

RetrievalOutcome HybridRetriever::retrieve(const std::string& query, std::size_t max_results,
                                           BoolOp) {
    RetrievalOutcome outcome;
    if (const auto pos = find_boolean_operator(query)) {
        outcome.ok = false;
        outcome.error = "Boolean operators are not supported by this tool";
        outcome.error_position = *pos;
        return outcome;
    }
    try {
        const SearchResult result =
            hybrid_search(query, snapshot_, dense_index_, embed_client_, config_, max_results);
        outcome.passages = passages_from(snapshot_, result.hits);
        outcome.total_candidates = result.total_candidates;
    } catch (const std::runtime_error& e) {
        outcome.ok = false;
        outcome.error = e.what();
    }
    return outcome;
}

} // namespace lexrag
