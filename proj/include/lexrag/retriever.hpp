#pragma once

#include "lexrag/hybrid.hpp"
#include "lexrag/prompts.hpp"
#include "lexrag/query_parser.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lexrag {

struct RetrievedPassage {
    std::string doc_id;
    std::string title;
    std::string content;
    double score = 0.0;
};

// Result of one search tool call. ok=false marks a failed turn whose error
// text is fed back to the model as the tool result.
struct RetrievalOutcome {
    bool ok = true;
    std::string error;
    std::optional<std::size_t> error_position;
    std::vector<RetrievedPassage> passages;
    std::size_t total_candidates = 0;
};

class Retriever {
public:
    virtual ~Retriever() = default;

    virtual Backend backend() const = 0;
    virtual RetrievalOutcome retrieve(const std::string& query, std::size_t max_results,
                                      BoolOp default_op) = 0;
};

// Executes Boolean queries exactly over the inverted index. Parse errors
// become failed turns carrying the parser's message and byte position.
class LogicalRetriever : public Retriever {
public:
    explicit LogicalRetriever(const IndexSnapshot& snapshot, bool allow_boolean_ops = true);

    Backend backend() const override { return Backend::logical; }
    RetrievalOutcome retrieve(const std::string& query, std::size_t max_results,
                              BoolOp default_op) override;

private:
    const IndexSnapshot& snapshot_;
    bool allow_boolean_ops_;
};

// Sparse+dense fusion over natural-language queries. Boolean operator words
// (AND/OR/NOT) are rejected per the tool contract; embedding or index
// failures become failed turns, and default_op is ignored.
class HybridRetriever : public Retriever {
public:
    HybridRetriever(const IndexSnapshot& snapshot, const DenseIndex& dense_index,
                    EmbeddingClient& embed_client, FusionConfig config = {});

    Backend backend() const override { return Backend::hybrid; }
    RetrievalOutcome retrieve(const std::string& query, std::size_t max_results,
                              BoolOp default_op) override;

private:
    const IndexSnapshot& snapshot_;
    const DenseIndex& dense_index_;
    EmbeddingClient& embed_client_;
    FusionConfig config_;
};

} // namespace lexrag
