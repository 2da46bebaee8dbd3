#pragma once

#include "lexrag/agent.hpp"
#include "lexrag/document.hpp"
#include "lexrag/llm_client.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lexrag {

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QaExample {
    std::string question_id;
    std::string question;
    std::vector<std::string> gold_answers; // never empty
    std::vector<std::string> gold_passage_ids;
};

// JSONL: {id, question, answers: [..], gold_passage_ids: [..]} per line.
std::vector<QaExample> load_qa_jsonl(const std::filesystem::path& path);

// Lowercase, delete punctuation, drop the articles a/an/the, split on
// whitespace. Idempotent.
std::vector<std::string> normalize_answer(std::string_view text);

// EM = 1 iff the normalized prediction equals some normalized gold.
int exact_match(const std::string& prediction, const std::vector<std::string>& gold_answers);

// Token-multiset F1, maximized over golds. Empty vs empty scores 1, empty vs
// non-empty scores 0.
double word_f1(const std::string& prediction, const std::vector<std::string>& gold_answers);

enum class JudgeVerdict { correct, incorrect };

struct JudgeResult {
    JudgeVerdict verdict = JudgeVerdict::incorrect;
    // True when the judge reply was unparseable twice and the verdict fell
    // back to incorrect.
    bool warning = false;
};

struct JudgeOptions {
    std::string model;
    double temperature = 0.3;
    double top_p = 0.95;
};

// Constrained one-word judgment (correct/incorrect). An unparseable reply is
// retried once, then scored incorrect with warning set. Transport failures
// propagate as LlmError.
JudgeResult judge_answer(const std::string& question, const std::string& prediction,
                         const std::vector<std::string>& gold_answers, LlmClient& judge,
                         const JudgeOptions& options = {});

enum class UnavailableClass { refusal, hallucination, gold_leak };

const char* unavailable_class_name(UnavailableClass c);

struct UnavailableSet {
    std::vector<Document> pruned_corpus;
    std::vector<QaExample> examples;
    std::size_t skipped_without_gold = 0;
};

// Selects `count` examples that carry gold passage annotations and removes
// their gold passages from the corpus. Examples without annotations are
// skipped and counted; asking for more than the annotated pool is an error,
// as is a gold passage id absent from the corpus.
UnavailableSet build_unavailable_set(const std::vector<QaExample>& examples,
                                     const std::vector<Document>& corpus, std::size_t count);

// refusal when the agent refused or hit the turn limit without answering;
// otherwise the answer is judged: correct → gold_leak, incorrect →
// hallucination.
UnavailableClass classify_unavailable(const Trajectory& trajectory, const QaExample& example,
                                      LlmClient& judge, const JudgeOptions& options = {});

struct UnavailableRates {
    double refusal = 0.0;
    double hallucination = 0.0;
    double gold_leak = 0.0;
};

// Class counts over total; the three rates sum to 1. Errors on zero records.
UnavailableRates unavailable_rates(const std::vector<UnavailableClass>& classes);

struct EvalRecord {
    std::string question_id;
    int em = 0;
    double f1 = 0.0;
    JudgeVerdict judge = JudgeVerdict::incorrect;
    bool judge_warning = false;
    std::optional<UnavailableClass> unavailable_class;
    bool error = false; // judge transport failure; excluded from rates
    std::string error_text;
};

// One retrieval turn as seen by the trajectory metrics.
struct IntentTurn {
    int turn_index = 1;
    std::string query;
    std::vector<std::string> retrieved_ids;
    bool success = false;
};

struct IntentGroup {
    std::string intent_id;
    std::vector<IntentTurn> turns; // ordered by turn_index
};

// Assigns intent labels to turns. Assignments may be partial, duplicated, or
// inconsistent; group_intents repairs them into a total partition.
class IntentGrouper {
public:
    virtual ~IntentGrouper() = default;
    virtual std::vector<std::pair<int, std::string>>
    assign(const std::vector<IntentTurn>& turns) = 0;
};

// Deterministic fallback: turns with the same normalized query share an
// intent.
class ExactMatchGrouper : public IntentGrouper {
public:
    std::vector<std::pair<int, std::string>> assign(const std::vector<IntentTurn>& turns) override;
};

struct GroupingResult {
    std::vector<IntentGroup> groups;
    bool fallback_used = false; // grouper threw; ExactMatchGrouper used instead
};

// success flags run parallel to trajectory.turns. Every turn lands in exactly
// one group: the first assignment for a turn wins, unassigned turns become
// singletons, and a throwing grouper is replaced by the fallback.
GroupingResult group_intents(const Trajectory& trajectory, const std::vector<bool>& success_flags,
                             IntentGrouper& grouper);

// Fixture-label relevance: a turn succeeds when it retrieved any gold passage.
std::vector<bool> success_from_gold(const Trajectory& trajectory, const QaExample& example);

// Mean over adjacent same-group pairs of |A∩B| / max(|A|,|B|), macro-averaged
// across groups with ≥2 turns. Two empty adjacent sets count as 1. Errors
// when no group has ≥2 turns.
double same_intent_overlap(const std::vector<IntentGroup>& groups);

// recovered / recoverable, where recoverable groups have ≥2 turns and a
// failed first turn, and recovery means any later turn succeeded. Errors when
// nothing is recoverable.
double intent_recovery(const std::vector<IntentGroup>& groups);

} // namespace lexrag
