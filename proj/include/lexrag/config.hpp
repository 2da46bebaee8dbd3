#pragma once

#include "lexrag/agent.hpp"
#include "lexrag/embedding.hpp"
#include "lexrag/eval.hpp"
#include "lexrag/hybrid.hpp"
#include "lexrag/llm_client.hpp"
#include "lexrag/search.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace lexrag {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ListenConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
};

struct EmbeddingConfig {
    std::string transport = "hashed"; // hashed | http
    std::string base_url;
    std::string model;
    std::string api_key; // overridable via LEXRAG_EMBEDDING_API_KEY
    std::uint32_t dim = 64;
    int timeout_seconds = 30;
};

struct LlmConfig {
    std::string transport = "http"; // http | script
    std::string base_url;
    std::string model;
    std::string api_key; // overridable via LEXRAG_LLM_API_KEY
    int timeout_seconds = 120;
    int max_attempts = 3;
    std::string script_path; // script transport: JSONL of scripted replies
};

// Declarative JSON config covering every retrieval/generation setting: index
// paths, bm25 k1/b, rrf K and depth, agent loop bounds and decoding, judge
// decoding, and the external endpoints. API keys may come from the
// environment instead of the file.
struct ServiceConfig {
    ListenConfig listen;
    std::string index_path;
    std::string dense_index_path; // empty = hybrid backend disabled
    std::optional<EmbeddingConfig> embedding;
    std::optional<LlmConfig> llm;
    std::optional<LlmConfig> judge_llm;
    Bm25Params bm25;
    FusionConfig rrf;
    AgentConfig agent;
    JudgeOptions judge;
};

// Parses and validates a config file. A dense index path requires an
// embedding section; unknown enum values and malformed JSON are errors.
ServiceConfig load_config(const std::filesystem::path& path);

std::unique_ptr<EmbeddingClient> make_embedding_client(const EmbeddingConfig& config);

// script transport: replies come from a JSONL file of {"text": ...} or
// {"tool": name, "arguments": {...}} lines.
std::unique_ptr<LlmClient> make_llm_client(const LlmConfig& config);

} // namespace lexrag
