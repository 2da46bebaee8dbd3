#include "lexrag/agent.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace lexrag {
namespace {

using nlohmann::json;

constexpr int k_schema_version = 1;

json turn_to_json(const AgentTurn& turn) {
    json retrieved = json::array();
    for (const RetrievedDoc& doc : turn.retrieved)
        retrieved.push_back({{"doc_id", doc.doc_id}, {"title", doc.title}});
    return json{{"turn_index", turn.turn_index},
                {"query", turn.query},
                {"parse_ok", turn.parse_ok},
                {"error", turn.error},
                {"default_operator", turn.default_op == BoolOp::and_op ? "AND" : "OR"},
                {"max_results", turn.max_results},
                {"retrieved", std::move(retrieved)}};
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    std::ostringstream os;
    os << "line " << line_no << ": " << what;
    throw TrajectoryIoError(os.str());
}

const json& require(const json& obj, const char* key, std::size_t line_no) {
    const auto it = obj.find(key);
    if (it == obj.end())
        fail(line_no, std::string("missing field ") + key);
    return *it;
}

AgentTurn turn_from_json(const json& obj, std::size_t line_no) {
    AgentTurn turn;
    turn.turn_index = require(obj, "turn_index", line_no).get<int>();
    turn.query = require(obj, "query", line_no).get<std::string>();
    turn.parse_ok = require(obj, "parse_ok", line_no).get<bool>();
    turn.error = obj.value("error", "");
    const auto op = require(obj, "default_operator", line_no).get<std::string>();
    if (op != "AND" && op != "OR")
        fail(line_no, "default_operator must be AND or OR");
    turn.default_op = op == "AND" ? BoolOp::and_op : BoolOp::or_op;
    turn.max_results = require(obj, "max_results", line_no).get<std::size_t>();
    for (const auto& doc : require(obj, "retrieved", line_no))
        turn.retrieved.push_back({require(doc, "doc_id", line_no).get<std::string>(),
                                  require(doc, "title", line_no).get<std::string>()});
    return turn;
}

} // namespace

void export_trajectories(const std::vector<Trajectory>& trajectories,
                         const std::filesystem::path& path) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw TrajectoryIoError("cannot write " + path.string());
    for (const Trajectory& traj : trajectories) {
        json turns = json::array();
        for (const AgentTurn& turn : traj.turns)
            turns.push_back(turn_to_json(turn));
        const json obj{{"schema_version", k_schema_version},
                       {"question_id", traj.question_id},
                       {"backend", backend_name(traj.backend)},
                       {"plan", traj.plan},
                       {"turns", std::move(turns)},
                       {"outcome", outcome_name(traj.outcome)},
                       {"answer", traj.answer}};
        out << obj.dump() << "\n";
    }
    if (!out)
        throw TrajectoryIoError("write failed for " + path.string());
}

std::vector<Trajectory> import_trajectories(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw TrajectoryIoError("cannot open " + path.string());
    std::vector<Trajectory> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded())
            fail(line_no, "malformed JSON");
        const int version = require(obj, "schema_version", line_no).get<int>();
        if (version != k_schema_version)
            fail(line_no, "unsupported schema_version " + std::to_string(version));
        Trajectory traj;
        traj.question_id = require(obj, "question_id", line_no).get<std::string>();
        const auto backend = require(obj, "backend", line_no).get<std::string>();
        if (backend != "logical" && backend != "hybrid")
            fail(line_no, "unknown backend " + backend);
        traj.backend = backend == "logical" ? Backend::logical : Backend::hybrid;
        traj.plan = obj.value("plan", "");
        for (const auto& turn : require(obj, "turns", line_no))
            traj.turns.push_back(turn_from_json(turn, line_no));
        const auto outcome = require(obj, "outcome", line_no).get<std::string>();
        if (outcome == "answer")
            traj.outcome = AgentOutcome::answer;
        else if (outcome == "refusal")
            traj.outcome = AgentOutcome::refusal;
        else if (outcome == "turn_limit")
            traj.outcome = AgentOutcome::turn_limit;
        else
            fail(line_no, "unknown outcome " + outcome);
        traj.answer = obj.value("answer", "");
        out.push_back(std::move(traj));
    }
    return out;
}

} // namespace lexrag
