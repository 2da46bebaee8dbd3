#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lexrag {

class EmbeddingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Queries are embedded with a retrieval instruction; passages are embedded
// bare. Instruction-aware embedding backends receive this string verbatim.
inline constexpr const char* k_query_instruction =
    "Given a web search query, retrieve relevant passages that answer the query";

enum class EmbedKind { query, passage };

class EmbeddingClient {
public:
    virtual ~EmbeddingClient() = default;

    // Returns one vector per input text, in input order. Throws
    // EmbeddingError when the backend fails or returns a malformed reply.
    virtual std::vector<std::vector<float>> embed(const std::vector<std::string>& texts,
                                                  EmbedKind kind) = 0;
};

struct HttpEmbeddingConfig {
    std::string base_url;
    std::string model;
    std::string api_key;
    int timeout_seconds = 30;
};

// Client for an OpenAI-style POST /v1/embeddings endpoint.
class HttpEmbeddingClient : public EmbeddingClient {
public:
    explicit HttpEmbeddingClient(HttpEmbeddingConfig config);
    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts,
                                          EmbedKind kind) override;

private:
    HttpEmbeddingConfig config_;
};

// Deterministic offline embedder: hashed bag of analyzed tokens. Texts that
// share tokens get correlated vectors, which is enough for fixtures and for
// exercising the dense path without a model server.
class HashedEmbeddingClient : public EmbeddingClient {
public:
    explicit HashedEmbeddingClient(std::uint32_t dim = 64);
    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts,
                                          EmbedKind kind) override;

    std::uint32_t dim() const { return dim_; }

private:
    std::uint32_t dim_;
};

} // namespace lexrag
