#include "lexrag/agent.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace lexrag {
namespace {

using nlohmann::json;

constexpr const char* k_answer_protocol =
    "Begin with a short plan of the searches you intend to run. Use the search "
    "tool to gather evidence. When you have enough, call the answer tool with "
    "a short final answer; if the documents cannot answer the question, call "
    "the answer tool with refuse set to true instead of guessing.";

const char* op_name(BoolOp op) { return op == BoolOp::and_op ? "AND" : "OR"; }

json turn_arguments(const Trajectory& traj, const AgentTurn& turn) {
    json args{{"query", turn.query}, {"max_results", turn.max_results}};
    if (traj.backend == Backend::logical)
        args["default_operator"] = op_name(turn.default_op);
    return args;
}

ChatMessage tool_call_message(std::string content, ToolCall call) {
    ChatMessage msg;
    msg.role = "assistant";
    msg.content = std::move(content);
    msg.tool_calls.push_back(std::move(call));
    return msg;
}

ChatMessage tool_result_message(std::string call_id, const json& payload) {
    ChatMessage msg;
    msg.role = "tool";
    msg.tool_call_id = std::move(call_id);
    msg.content = payload.dump();
    return msg;
}

} // namespace

const char* outcome_name(AgentOutcome outcome) {
    switch (outcome) {
    case AgentOutcome::answer:
        return "answer";
    case AgentOutcome::refusal:
        return "refusal";
    case AgentOutcome::turn_limit:
        return "turn_limit";
    }
    return "turn_limit";
}

std::string tool_schemas_json(Backend backend) {
    json query_props{{"query", {{"type", "string"}, {"description", "search query"}}},
                     {"max_results",
                      {{"type", "integer"},
                       {"minimum", 1},
                       {"maximum", 100},
                       {"description", "number of documents to return"}}}};
    if (backend == Backend::logical)
        query_props["default_operator"] = {
            {"type", "string"},
            {"enum", {"AND", "OR"}},
            {"description", "how bare terms combine when no operator is written"}};
    json tools = json::array(
        {{{"type", "function"},
          {"function",
           {{"name", "search"},
            {"description", "Search the document collection."},
            {"parameters",
             {{"type", "object"},
              {"properties", query_props},
              {"required", json::array({"query"})}}}}}},
         {{"type", "function"},
          {"function",
           {{"name", "answer"},
            {"description",
             "Finish with a short final answer, or set refuse to true when the "
             "documents cannot answer the question."},
            {"parameters",
             {{"type", "object"},
              {"properties",
               {{"answer", {{"type", "string"}}}, {"refuse", {{"type", "boolean"}}}}},
              {"required", json::array()}}}}}}});
    return tools.dump();
}

std::vector<ChatMessage> build_context(const Trajectory& so_far,
                                       const std::string& tool_description,
                                       const std::string& question) {
    std::vector<ChatMessage> messages;
    messages.push_back({"system", tool_description + "\n\n" + k_answer_protocol, {}, ""});
    messages.push_back({"user", question, {}, ""});
    if (!so_far.plan.empty())
        messages.push_back({"assistant", so_far.plan, {}, ""});
    for (const AgentTurn& turn : so_far.turns) {
        const std::string call_id = "call_" + std::to_string(turn.turn_index);
        messages.push_back(tool_call_message(
            "", ToolCall{call_id, "search", turn_arguments(so_far, turn).dump()}));
        json payload;
        if (turn.parse_ok) {
            json hits = json::array();
            for (const RetrievedDoc& doc : turn.retrieved)
                hits.push_back({{"doc_id", doc.doc_id}, {"title", doc.title}});
            payload = {{"ok", true}, {"hits", std::move(hits)}};
        } else {
            payload = {{"ok", false}, {"error", turn.error}};
        }
        messages.push_back(tool_result_message(call_id, payload));
    }
    return messages;
}

Trajectory run_agent(const AgentQuestion& question, const AgentConfig& config,
                     Retriever& retriever, LlmClient& llm) {
    Trajectory traj;
    traj.question_id = question.id;
    traj.backend = config.backend;

    const std::string& description =
        tool_description(config.backend, config.tool_description_variant);
    std::vector<ChatMessage> messages = build_context(traj, description, question.text);
    const std::string tools = tool_schemas_json(config.backend);
    const ChatOptions options{config.model, config.temperature, config.top_p};

    bool plan_requested = false;
    for (;;) {
        if (static_cast<int>(traj.turns.size()) >= config.max_turns) {
            traj.outcome = AgentOutcome::turn_limit;
            return traj;
        }
        const LlmReply reply = llm.chat(messages, tools, options);

        if (reply.tool_calls.empty()) {
            if (!plan_requested && traj.turns.empty()) {
                // First plain reply is the plan; later plain text is final.
                traj.plan = reply.content;
                plan_requested = true;
                messages.push_back({"assistant", reply.content, {}, ""});
                continue;
            }
            traj.outcome = AgentOutcome::answer;
            traj.answer = reply.content;
            return traj;
        }

        ToolCall call = reply.tool_calls.front();
        if (call.id.empty())
            call.id = "call_" + std::to_string(traj.turns.size() + 1);
        json args = json::parse(call.arguments.empty() ? "{}" : call.arguments, nullptr, false);

        if (call.name == "answer" && args.is_object() &&
            (args.contains("answer") || args.contains("refuse"))) {
            const bool refuse = args.value("refuse", false);
            traj.outcome = refuse ? AgentOutcome::refusal : AgentOutcome::answer;
            traj.answer = args.value("answer", "");
            return traj;
        }

        // Anything else consumes a turn: a search, or misuse fed back as an
        // error observation the model can repair from.
        AgentTurn turn;
        turn.turn_index = static_cast<int>(traj.turns.size()) + 1;
        turn.default_op = config.default_operator;
        turn.max_results = config.max_results;
        json payload;
        if (call.name != "search") {
            turn.parse_ok = false;
            turn.error = call.name == "answer" ? "invalid answer arguments"
                                               : "unknown tool " + call.name;
            payload = {{"ok", false}, {"error", turn.error}};
        } else if (!args.is_object() || !args.contains("query") || !args["query"].is_string()) {
            turn.parse_ok = false;
            turn.error = "invalid search arguments: query must be a string";
            payload = {{"ok", false}, {"error", turn.error}};
        } else {
            turn.query = args["query"].get<std::string>();
            if (args.contains("max_results") && args["max_results"].is_number_integer()) {
                const auto requested = args["max_results"].get<long long>();
                turn.max_results = static_cast<std::size_t>(std::clamp<long long>(requested, 1, 100));
            }
            if (config.backend == Backend::logical && args.contains("default_operator") &&
                args["default_operator"].is_string()) {
                const auto op = args["default_operator"].get<std::string>();
                if (op == "AND")
                    turn.default_op = BoolOp::and_op;
                else if (op == "OR")
                    turn.default_op = BoolOp::or_op;
            }
            RetrievalOutcome outcome =
                retriever.retrieve(turn.query, turn.max_results, turn.default_op);
            turn.parse_ok = outcome.ok;
            if (outcome.ok) {
                json hits = json::array();
                for (const RetrievedPassage& p : outcome.passages) {
                    turn.retrieved.push_back({p.doc_id, p.title});
                    hits.push_back({{"doc_id", p.doc_id},
                                    {"title", p.title},
                                    {"content", p.content},
                                    {"score", p.score}});
                }
                payload = {{"ok", true},
                           {"hits", std::move(hits)},
                           {"total_candidates", outcome.total_candidates}};
            } else {
                turn.error = outcome.error;
                payload = {{"ok", false}, {"error", outcome.error}};
                if (outcome.error_position)
                    payload["position"] = *outcome.error_position;
            }
        }
        traj.turns.push_back(turn);
        messages.push_back(tool_call_message(reply.content, call));
        messages.push_back(tool_result_message(call.id, payload));
    }
}

} // namespace lexrag
