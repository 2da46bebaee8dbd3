#include "lexrag/analyzer.hpp"
#include "lexrag/eval.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

namespace lexrag {
namespace {

std::vector<IntentTurn> turns_from(const Trajectory& trajectory,
                                   const std::vector<bool>& success_flags) {
    if (success_flags.size() != trajectory.turns.size())
        throw EvalError("success flags do not match the trajectory's turn count");
    std::vector<IntentTurn> turns;
    turns.reserve(trajectory.turns.size());
    for (std::size_t i = 0; i < trajectory.turns.size(); ++i) {
        const AgentTurn& t = trajectory.turns[i];
        IntentTurn turn;
        turn.turn_index = t.turn_index;
        turn.query = t.query;
        for (const RetrievedDoc& doc : t.retrieved)
            turn.retrieved_ids.push_back(doc.doc_id);
        turn.success = success_flags[i];
        turns.push_back(std::move(turn));
    }
    return turns;
}

} // namespace

std::vector<std::pair<int, std::string>>
ExactMatchGrouper::assign(const std::vector<IntentTurn>& turns) {
    std::vector<std::pair<int, std::string>> out;
    out.reserve(turns.size());
    for (const IntentTurn& turn : turns) {
        std::string label;
        for (const auto& token : analyze(turn.query)) {
            if (!label.empty())
                label += ' ';
            label += token;
        }
        out.emplace_back(turn.turn_index, std::move(label));
    }
    return out;
}

GroupingResult group_intents(const Trajectory& trajectory, const std::vector<bool>& success_flags,
                             IntentGrouper& grouper) {
    const auto turns = turns_from(trajectory, success_flags);
    if (turns.empty())
        throw EvalError("trajectory has no retrieval turns to group");

    GroupingResult result;
    std::vector<std::pair<int, std::string>> assignments;
    try {
        assignments = grouper.assign(turns);
    } catch (const std::exception&) {
        result.fallback_used = true;
        ExactMatchGrouper fallback;
        assignments = fallback.assign(turns);
    }

    // Repair to a total partition: first assignment per turn wins, unknown
    // turn indexes are dropped, unassigned turns become singletons.
    std::map<int, std::string> label_by_turn;
    std::unordered_set<int> valid;
    for (const IntentTurn& turn : turns)
        valid.insert(turn.turn_index);
    for (const auto& [turn_index, label] : assignments) {
        if (!valid.count(turn_index))
            continue;
        label_by_turn.emplace(turn_index, label);
    }
    for (const IntentTurn& turn : turns)
        if (!label_by_turn.count(turn.turn_index))
            label_by_turn.emplace(turn.turn_index,
                                  "__singleton_" + std::to_string(turn.turn_index));

    std::map<std::string, IntentGroup> by_label;
    std::vector<std::string> order;
    for (const IntentTurn& turn : turns) {
        const std::string& label = label_by_turn.at(turn.turn_index);
        auto [it, inserted] = by_label.try_emplace(label);
        if (inserted) {
            it->second.intent_id = label;
            order.push_back(label);
        }
        it->second.turns.push_back(turn);
    }
    for (const std::string& label : order)
        result.groups.push_back(std::move(by_label.at(label)));
    return result;
}

std::vector<bool> success_from_gold(const Trajectory& trajectory, const QaExample& example) {
    const std::unordered_set<std::string> gold(example.gold_passage_ids.begin(),
                                               example.gold_passage_ids.end());
    std::vector<bool> flags;
    flags.reserve(trajectory.turns.size());
    for (const AgentTurn& turn : trajectory.turns) {
        bool hit = false;
        for (const RetrievedDoc& doc : turn.retrieved)
            if (gold.count(doc.doc_id)) {
                hit = true;
                break;
            }
        flags.push_back(hit);
    }
    return flags;
}

double same_intent_overlap(const std::vector<IntentGroup>& groups) {
    double macro_sum = 0.0;
    std::size_t repeated_groups = 0;
    for (const IntentGroup& group : groups) {
        if (group.turns.size() < 2)
            continue;
        double pair_sum = 0.0;
        for (std::size_t i = 0; i + 1 < group.turns.size(); ++i) {
            const std::set<std::string> a(group.turns[i].retrieved_ids.begin(),
                                          group.turns[i].retrieved_ids.end());
            const std::set<std::string> b(group.turns[i + 1].retrieved_ids.begin(),
                                          group.turns[i + 1].retrieved_ids.end());
            if (a.empty() && b.empty()) {
                pair_sum += 1.0; // identical (empty) result sets
                continue;
            }
            std::size_t shared = 0;
            for (const auto& id : a)
                shared += b.count(id);
            pair_sum += static_cast<double>(shared) /
                        static_cast<double>(std::max(a.size(), b.size()));
        }
        macro_sum += pair_sum / static_cast<double>(group.turns.size() - 1);
        ++repeated_groups;
    }
    if (repeated_groups == 0)
        throw EvalError("no repeated intents");
    return macro_sum / static_cast<double>(repeated_groups);
}

double intent_recovery(const std::vector<IntentGroup>& groups) {
    std::size_t recoverable = 0;
    std::size_t recovered = 0;
    for (const IntentGroup& group : groups) {
        if (group.turns.size() < 2 || group.turns.front().success)
            continue;
        ++recoverable;
        const bool later_success =
            std::any_of(group.turns.begin() + 1, group.turns.end(),
                        [](const IntentTurn& t) { return t.success; });
        if (later_success)
            ++recovered;
    }
    if (recoverable == 0)
        throw EvalError("no recoverable intents");
    return static_cast<double>(recovered) / static_cast<double>(recoverable);
}

} // namespace lexrag
