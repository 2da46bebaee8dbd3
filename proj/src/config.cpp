#include "lexrag/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace lexrag {
namespace {

using nlohmann::json;

std::string env_or(const char* name, std::string fallback) {
    const char* value = std::getenv(name);
    return value && *value ? std::string(value) : std::move(fallback);
}

BoolOp parse_operator(const std::string& value, const char* where) {
    if (value == "AND")
        return BoolOp::and_op;
    if (value == "OR")
        return BoolOp::or_op;
    throw ConfigError(std::string(where) + " must be AND or OR");
}

EmbeddingConfig parse_embedding(const json& obj) {
    EmbeddingConfig config;
    config.transport = obj.value("transport", config.transport);
    if (config.transport != "hashed" && config.transport != "http")
        throw ConfigError("embedding.transport must be hashed or http");
    config.base_url = obj.value("base_url", "");
    config.model = obj.value("model", "");
    config.api_key = env_or("LEXRAG_EMBEDDING_API_KEY", obj.value("api_key", ""));
    config.dim = obj.value("dim", config.dim);
    config.timeout_seconds = obj.value("timeout_seconds", config.timeout_seconds);
    if (config.transport == "http" && config.base_url.empty())
        throw ConfigError("embedding.base_url is required for the http transport");
    if (config.dim == 0)
        throw ConfigError("embedding.dim must be positive");
    return config;
}

LlmConfig parse_llm(const json& obj, const char* section) {
    LlmConfig config;
    config.transport = obj.value("transport", config.transport);
    if (config.transport != "http" && config.transport != "script")
        throw ConfigError(std::string(section) + ".transport must be http or script");
    config.base_url = obj.value("base_url", "");
    config.model = obj.value("model", "");
    config.api_key = env_or("LEXRAG_LLM_API_KEY", obj.value("api_key", ""));
    config.timeout_seconds = obj.value("timeout_seconds", config.timeout_seconds);
    config.max_attempts = obj.value("max_attempts", config.max_attempts);
    config.script_path = obj.value("script_path", "");
    if (config.transport == "http" && config.base_url.empty())
        throw ConfigError(std::string(section) + ".base_url is required for the http transport");
    if (config.transport == "script" && config.script_path.empty())
        throw ConfigError(std::string(section) +
                          ".script_path is required for the script transport");
    return config;
}

} // namespace

ServiceConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    json obj = json::parse(buffer.str(), nullptr, false);
    if (obj.is_discarded())
        throw ConfigError(path.string() + ": malformed JSON");

    ServiceConfig config;
    if (obj.contains("listen")) {
        config.listen.host = obj["listen"].value("host", config.listen.host);
        config.listen.port = obj["listen"].value("port", config.listen.port);
        if (config.listen.port < 0 || config.listen.port > 65535)
            throw ConfigError("listen.port must be in [0, 65535]");
    }
    config.index_path = obj.value("index_path", "");
    config.dense_index_path = obj.value("dense_index_path", "");
    if (obj.contains("embedding"))
        config.embedding = parse_embedding(obj["embedding"]);
    if (obj.contains("llm"))
        config.llm = parse_llm(obj["llm"], "llm");
    if (obj.contains("judge_llm"))
        config.judge_llm = parse_llm(obj["judge_llm"], "judge_llm");
    if (obj.contains("bm25")) {
        config.bm25.k1 = obj["bm25"].value("k1", config.bm25.k1);
        config.bm25.b = obj["bm25"].value("b", config.bm25.b);
        if (config.bm25.k1 < 0.0)
            throw ConfigError("bm25.k1 must be non-negative");
        if (config.bm25.b < 0.0 || config.bm25.b > 1.0)
            throw ConfigError("bm25.b must be in [0, 1]");
    }
    if (obj.contains("rrf")) {
        config.rrf.rrf_k = obj["rrf"].value("k", config.rrf.rrf_k);
        config.rrf.per_list_depth = obj["rrf"].value("per_list_depth", config.rrf.per_list_depth);
        if (config.rrf.rrf_k < 1.0)
            throw ConfigError("rrf.k must be at least 1");
        if (config.rrf.per_list_depth < 1)
            throw ConfigError("rrf.per_list_depth must be at least 1");
    }
    if (obj.contains("agent")) {
        const json& agent = obj["agent"];
        const std::string backend = agent.value("backend", "logical");
        if (backend == "logical")
            config.agent.backend = Backend::logical;
        else if (backend == "hybrid")
            config.agent.backend = Backend::hybrid;
        else
            throw ConfigError("agent.backend must be logical or hybrid");
        config.agent.max_turns = agent.value("max_turns", config.agent.max_turns);
        if (config.agent.max_turns < 1)
            throw ConfigError("agent.max_turns must be at least 1");
        config.agent.temperature = agent.value("temperature", config.agent.temperature);
        config.agent.top_p = agent.value("top_p", config.agent.top_p);
        const std::string variant = agent.value("tool_description_variant", "full");
        if (variant == "full")
            config.agent.tool_description_variant = ToolDescriptionVariant::full;
        else if (variant == "syntax_only")
            config.agent.tool_description_variant = ToolDescriptionVariant::syntax_only;
        else
            throw ConfigError("agent.tool_description_variant must be full or syntax_only");
        config.agent.allow_boolean_ops =
            agent.value("allow_boolean_ops", config.agent.allow_boolean_ops);
        config.agent.max_results = agent.value("max_results", config.agent.max_results);
        if (config.agent.max_results < 1)
            throw ConfigError("agent.max_results must be at least 1");
        config.agent.default_operator = parse_operator(
            agent.value("default_operator", "OR"), "agent.default_operator");
    }
    if (obj.contains("judge")) {
        config.judge.model = obj["judge"].value("model", "");
        config.judge.temperature = obj["judge"].value("temperature", config.judge.temperature);
        config.judge.top_p = obj["judge"].value("top_p", config.judge.top_p);
    }
    if (config.llm)
        config.agent.model = config.llm->model;
    if (config.judge.model.empty() && config.judge_llm)
        config.judge.model = config.judge_llm->model;

    if (!config.dense_index_path.empty() && !config.embedding)
        throw ConfigError("dense_index_path requires an embedding section");
    return config;
}

std::unique_ptr<EmbeddingClient> make_embedding_client(const EmbeddingConfig& config) {
    if (config.transport == "hashed")
        return std::make_unique<HashedEmbeddingClient>(config.dim);
    HttpEmbeddingConfig http;
    http.base_url = config.base_url;
    http.model = config.model;
    http.api_key = config.api_key;
    http.timeout_seconds = config.timeout_seconds;
    return std::make_unique<HttpEmbeddingClient>(std::move(http));
}

std::unique_ptr<LlmClient> make_llm_client(const LlmConfig& config) {
    if (config.transport == "http") {
        HttpLlmConfig http;
        http.base_url = config.base_url;
        http.api_key = config.api_key;
        http.timeout_seconds = config.timeout_seconds;
        http.max_attempts = config.max_attempts;
        return std::make_unique<HttpLlmClient>(std::move(http));
    }
    std::ifstream in(config.script_path);
    if (!in)
        throw ConfigError("cannot open llm script " + config.script_path);
    auto client = std::make_unique<ScriptedLlmClient>();
    std::string line;
    std::size_t line_no = 0;
    using nlohmann::json;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded()) {
            std::ostringstream os;
            os << config.script_path << " line " << line_no << ": malformed JSON";
            throw ConfigError(os.str());
        }
        if (obj.contains("tool")) {
            const json args = obj.value("arguments", json::object());
            client->enqueue_tool_call(obj["tool"].get<std::string>(), args.dump());
        } else if (obj.contains("text")) {
            client->enqueue_text(obj["text"].get<std::string>());
        } else {
            std::ostringstream os;
            os << config.script_path << " line " << line_no
               << ": each reply needs a text or tool field";
            throw ConfigError(os.str());
        }
    }
    return client;
}

} // namespace lexrag
