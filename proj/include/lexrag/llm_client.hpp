#pragma once

#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

namespace lexrag {

class LlmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ToolCall {
    std::string id;
    std::string name;
    std::string arguments; // raw JSON object text
};

struct ChatMessage {
    std::string role; // system | user | assistant | tool
    std::string content;
    std::vector<ToolCall> tool_calls; // assistant messages only
    std::string tool_call_id;         // tool messages only
};

struct ChatOptions {
    std::string model;
    double temperature = 0.6;
    double top_p = 0.95;
};

// One assistant step: either tool calls or final text.
struct LlmReply {
    std::string content;
    std::vector<ToolCall> tool_calls;
};

class LlmClient {
public:
    virtual ~LlmClient() = default;

    // tools_json is the serialized tool-schema array for the request, empty
    // for a plain completion. Throws LlmError on unrecoverable failure.
    virtual LlmReply chat(const std::vector<ChatMessage>& messages, const std::string& tools_json,
                          const ChatOptions& options) = 0;
};

// Deterministic mock that replays a fixed reply sequence and records every
// request it sees. Throws LlmError when the script runs out.
class ScriptedLlmClient : public LlmClient {
public:
    void enqueue(LlmReply reply);
    void enqueue_text(std::string content);
    void enqueue_tool_call(std::string name, std::string arguments_json);

    LlmReply chat(const std::vector<ChatMessage>& messages, const std::string& tools_json,
                  const ChatOptions& options) override;

    const std::vector<std::vector<ChatMessage>>& requests() const { return requests_; }
    std::size_t remaining() const { return replies_.size(); }

private:
    std::deque<LlmReply> replies_;
    std::vector<std::vector<ChatMessage>> requests_;
};

struct HttpLlmConfig {
    std::string base_url;
    std::string api_key;
    int timeout_seconds = 120;
    int max_attempts = 3;
};

// Chat-completions client: POST /v1/chat/completions with
// {model, messages, tools, temperature, top_p}. Transport errors and 5xx/429
// responses are retried up to max_attempts, then raised as LlmError.
class HttpLlmClient : public LlmClient {
public:
    explicit HttpLlmClient(HttpLlmConfig config);

    LlmReply chat(const std::vector<ChatMessage>& messages, const std::string& tools_json,
                  const ChatOptions& options) override;

private:
    HttpLlmConfig config_;
};

} // namespace lexrag
