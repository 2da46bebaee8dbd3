#include "lexrag/embedding.hpp"

#include "binary_io.hpp"
#include "lexrag/analyzer.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace lexrag {
namespace {

using nlohmann::json;

std::string body_excerpt(const std::string& body) {
    constexpr std::size_t limit = 200;
    if (body.size() <= limit)
        return body;
    return body.substr(0, limit) + "...";
}

} // namespace

HttpEmbeddingClient::HttpEmbeddingClient(HttpEmbeddingConfig config)
    : config_(std::move(config)) {
    if (config_.base_url.empty())
        throw EmbeddingError("embedding base_url is empty");
}

std::vector<std::vector<float>> HttpEmbeddingClient::embed(const std::vector<std::string>& texts,
                                                           EmbedKind kind) {
    if (texts.empty())
        return {};
    httplib::Client cli(config_.base_url);
    cli.set_connection_timeout(config_.timeout_seconds);
    cli.set_read_timeout(config_.timeout_seconds);

    json body{{"model", config_.model}, {"input", texts}};
    if (kind == EmbedKind::query)
        body["instruction"] = k_query_instruction;

    httplib::Headers headers;
    if (!config_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config_.api_key);

    auto res = cli.Post("/v1/embeddings", headers, body.dump(), "application/json");
    if (!res)
        throw EmbeddingError("embedding request failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw EmbeddingError("embedding request failed with status " +
                             std::to_string(res->status) + ": " + body_excerpt(res->body));

    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("data") || !reply["data"].is_array())
        throw EmbeddingError("embedding reply is not a JSON object with a data array");
    const auto& data = reply["data"];
    if (data.size() != texts.size())
        throw EmbeddingError("embedding reply has " + std::to_string(data.size()) +
                             " vectors for " + std::to_string(texts.size()) + " inputs");

    std::vector<std::vector<float>> out(texts.size());
    std::size_t position = 0;
    for (const auto& item : data) {
        if (!item.contains("embedding") || !item["embedding"].is_array())
            throw EmbeddingError("embedding reply entry lacks an embedding array");
        const std::size_t slot =
            item.contains("index") && item["index"].is_number_unsigned()
                ? item["index"].get<std::size_t>()
                : position;
        if (slot >= out.size() || !out[slot].empty())
            throw EmbeddingError("embedding reply indexes do not cover the inputs");
        out[slot] = item["embedding"].get<std::vector<float>>();
        if (out[slot].empty())
            throw EmbeddingError("embedding reply contains an empty vector");
        ++position;
    }
    for (const auto& v : out)
        if (v.empty())
            throw EmbeddingError("embedding reply indexes do not cover the inputs");
    return out;
}

HashedEmbeddingClient::HashedEmbeddingClient(std::uint32_t dim) : dim_(dim) {
    if (dim_ == 0)
        throw EmbeddingError("hashed embedding dimension must be positive");
}

std::vector<std::vector<float>> HashedEmbeddingClient::embed(const std::vector<std::string>& texts,
                                                             EmbedKind) {
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        std::vector<float> v(dim_, 0.0f);
        for (const auto& token : analyze(text)) {
            const std::uint64_t h = detail::fnv1a(token);
            const std::uint32_t bucket = static_cast<std::uint32_t>(h % dim_);
            const float sign = ((h >> 32) & 1) ? 1.0f : -1.0f;
            v[bucket] += sign;
        }
        bool all_zero = true;
        for (float x : v)
            if (x != 0.0f) {
                all_zero = false;
                break;
            }
        if (all_zero)
            v[0] = 1.0f;
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace lexrag
