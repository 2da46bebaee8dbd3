#include "lexrag/llm_client.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <thread>

namespace lexrag {
namespace {

using nlohmann::json;

json message_to_json(const ChatMessage& m) {
    json obj{{"role", m.role}, {"content", m.content}};
    if (!m.tool_calls.empty()) {
        json calls = json::array();
        for (const ToolCall& c : m.tool_calls)
            calls.push_back({{"id", c.id},
                             {"type", "function"},
                             {"function", {{"name", c.name}, {"arguments", c.arguments}}}});
        obj["tool_calls"] = std::move(calls);
    }
    if (!m.tool_call_id.empty())
        obj["tool_call_id"] = m.tool_call_id;
    return obj;
}

LlmReply parse_reply(const std::string& body) {
    json reply = json::parse(body, nullptr, false);
    if (reply.is_discarded())
        throw LlmError("chat reply is not valid JSON");
    const auto choices = reply.find("choices");
    if (choices == reply.end() || !choices->is_array() || choices->empty())
        throw LlmError("chat reply has no choices");
    const json& message = choices->front().value("message", json::object());

    LlmReply out;
    if (message.contains("content") && message["content"].is_string())
        out.content = message["content"].get<std::string>();
    if (message.contains("tool_calls") && message["tool_calls"].is_array()) {
        for (const auto& call : message["tool_calls"]) {
            ToolCall tc;
            tc.id = call.value("id", "");
            const json& fn = call.value("function", json::object());
            tc.name = fn.value("name", "");
            const auto args = fn.find("arguments");
            if (args != fn.end())
                tc.arguments = args->is_string() ? args->get<std::string>() : args->dump();
            out.tool_calls.push_back(std::move(tc));
        }
    }
    return out;
}

} // namespace

void ScriptedLlmClient::enqueue(LlmReply reply) { replies_.push_back(std::move(reply)); }

void ScriptedLlmClient::enqueue_text(std::string content) {
    replies_.push_back({std::move(content), {}});
}

void ScriptedLlmClient::enqueue_tool_call(std::string name, std::string arguments_json) {
    LlmReply reply;
    reply.tool_calls.push_back(
        {"call_" + std::to_string(requests_.size() + replies_.size() + 1), std::move(name),
         std::move(arguments_json)});
    replies_.push_back(std::move(reply));
}

LlmReply ScriptedLlmClient::chat(const std::vector<ChatMessage>& messages,
                                 const std::string& tools_json, const ChatOptions&) {
    (void)tools_json;
    requests_.push_back(messages);
    if (replies_.empty())
        throw LlmError("scripted client has no reply left");
    LlmReply reply = std::move(replies_.front());
    replies_.pop_front();
    return reply;
}

HttpLlmClient::HttpLlmClient(HttpLlmConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty())
        throw LlmError("llm base_url is empty");
    if (config_.max_attempts < 1)
        throw LlmError("llm max_attempts must be at least 1");
}

LlmReply HttpLlmClient::chat(const std::vector<ChatMessage>& messages,
                             const std::string& tools_json, const ChatOptions& options) {
    json body{{"model", options.model},
              {"temperature", options.temperature},
              {"top_p", options.top_p}};
    json msgs = json::array();
    for (const ChatMessage& m : messages)
        msgs.push_back(message_to_json(m));
    body["messages"] = std::move(msgs);
    if (!tools_json.empty()) {
        json tools = json::parse(tools_json, nullptr, false);
        if (tools.is_discarded())
            throw LlmError("tool schema is not valid JSON");
        body["tools"] = std::move(tools);
    }
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!config_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config_.api_key);

    std::string last_error;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        httplib::Client cli(config_.base_url);
        cli.set_connection_timeout(config_.timeout_seconds);
        cli.set_read_timeout(config_.timeout_seconds);
        auto res = cli.Post("/v1/chat/completions", headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
        } else if (res->status == 200) {
            return parse_reply(res->body);
        } else {
            last_error = "status " + std::to_string(res->status);
            const bool retryable = res->status == 429 || res->status >= 500;
            if (!retryable)
                throw LlmError("chat request failed with " + last_error);
        }
        if (attempt < config_.max_attempts)
            std::this_thread::sleep_for(std::chrono::milliseconds(100 * attempt));
    }
    throw LlmError("chat request failed after " + std::to_string(config_.max_attempts) +
                   " attempts: " + last_error);
}

} // namespace lexrag
