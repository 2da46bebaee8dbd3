#pragma once

#include "lexrag/llm_client.hpp"
#include "lexrag/prompts.hpp"
#include "lexrag/query_parser.hpp"
#include "lexrag/retriever.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace lexrag {

struct AgentConfig {
    Backend backend = Backend::logical;
    int max_turns = 8;
    double temperature = 0.6;
    double top_p = 0.95;
    ToolDescriptionVariant tool_description_variant = ToolDescriptionVariant::full;
    bool allow_boolean_ops = true;
    std::size_t max_results = 5;
    BoolOp default_operator = BoolOp::or_op;
    std::string model;
};

struct RetrievedDoc {
    std::string doc_id;
    std::string title;
};

struct AgentTurn {
    int turn_index = 1; // 1-based, strictly increasing
    std::string query;
    bool parse_ok = true;
    std::string error; // tool-visible error text when parse_ok is false
    BoolOp default_op = BoolOp::or_op;
    std::size_t max_results = 5;
    std::vector<RetrievedDoc> retrieved;
};

enum class AgentOutcome { answer, refusal, turn_limit };

const char* outcome_name(AgentOutcome outcome);

struct Trajectory {
    std::string question_id;
    Backend backend = Backend::logical;
    std::string plan;
    std::vector<AgentTurn> turns;
    AgentOutcome outcome = AgentOutcome::turn_limit;
    std::string answer; // final answer text when outcome is answer
};

struct AgentQuestion {
    std::string id;
    std::string text;
};

// Tool-schema JSON array offered to the model: a search tool (with
// default_operator control on the logical backend only) plus an answer tool
// whose refuse flag expresses a machine-readable refusal.
std::string tool_schemas_json(Backend backend);

// Deterministic message sequence for a (possibly partial) trajectory:
// system (tool description + answer protocol), user question, optional plan,
// then one assistant tool call and one tool result per recorded turn. Tool
// results rebuilt from a trajectory carry doc ids and titles; live runs
// additionally show full passage content.
std::vector<ChatMessage> build_context(const Trajectory& so_far,
                                       const std::string& tool_description,
                                       const std::string& question);

// Plan, then search/observe until the model answers, refuses, or max_turns
// searches have run (turn_limit is recorded without a further model call).
// Failed parses and tool misuse are fed back as tool-result errors and count
// as turns; LLM transport failure propagates as LlmError.
Trajectory run_agent(const AgentQuestion& question, const AgentConfig& config,
                     Retriever& retriever, LlmClient& llm);

class TrajectoryIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// JSONL with schema_version 1, one trajectory per line; lossless round-trip.
void export_trajectories(const std::vector<Trajectory>& trajectories,
                         const std::filesystem::path& path);
std::vector<Trajectory> import_trajectories(const std::filesystem::path& path);

} // namespace lexrag
