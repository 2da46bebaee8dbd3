#include "lexrag/eval.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

using namespace lexrag;
namespace fs = std::filesystem;

namespace {

using Tokens = std::vector<std::string>;

fs::path temp_file(const char* stem) {
    static std::mt19937_64 rng(std::random_device{}());
    return fs::temp_directory_path() / (std::string(stem) + "_" + std::to_string(rng()));
}

IntentTurn turn(int index, std::string query, std::vector<std::string> ids, bool success) {
    return {index, std::move(query), std::move(ids), success};
}

Trajectory trajectory_with_queries(const std::vector<std::string>& queries) {
    Trajectory traj;
    traj.question_id = "t";
    for (std::size_t i = 0; i < queries.size(); ++i) {
        AgentTurn t;
        t.turn_index = static_cast<int>(i) + 1;
        t.query = queries[i];
        traj.turns.push_back(std::move(t));
    }
    return traj;
}

} // namespace

TEST_CASE("answer normalization lowercases, strips punctuation and articles") {
    CHECK(normalize_answer("The Four Seasons!") == Tokens{"four", "seasons"});
    CHECK(normalize_answer("Vivaldi's   operas") == Tokens{"vivaldis", "operas"});
    CHECK(normalize_answer("A an the") == Tokens{});
    CHECK(normalize_answer("1678") == Tokens{"1678"});
    // Non-ASCII bytes pass through untouched.
    CHECK(normalize_answer("Caf\xC3\xA9") == Tokens{"caf\xC3\xA9"});
    // Idempotent under re-joining.
    CHECK(normalize_answer("four seasons") == normalize_answer("  FOUR, seasons."));
}

TEST_CASE("exact match compares normalized token sequences against any gold") {
    CHECK(exact_match("The Red Priest", {"red priest", "il Prete Rosso"}) == 1);
    CHECK(exact_match("Antonio Vivaldi", {"Antonio Lucio Vivaldi"}) == 0);
    CHECK(exact_match("VIVALDI!", {"vivaldi"}) == 1);
    // Degenerate: both sides normalize to nothing.
    CHECK(exact_match("the", {"a"}) == 1);
}

TEST_CASE("word f1 is a token-multiset score maximized over golds") {
    CHECK(word_f1("Antonio Vivaldi", {"Antonio Lucio Vivaldi"}) == doctest::Approx(0.8));
    CHECK(word_f1("exact phrase", {"exact phrase"}) == doctest::Approx(1.0));
    CHECK(word_f1("nothing related", {"four seasons"}) == 0.0);
    CHECK(word_f1("", {"four seasons"}) == 0.0);
    CHECK(word_f1("the", {"an"}) == doctest::Approx(1.0)); // empty vs empty
    // Multiset counting: repeated tokens only match as many times as gold
    // has them.
    CHECK(word_f1("x x y", {"x y y"}) == doctest::Approx(2.0 / 3.0));
    // Best gold wins.
    CHECK(word_f1("four seasons", {"unrelated", "the four seasons"}) == doctest::Approx(1.0));
}

TEST_CASE("the judge parses one-word verdicts with incorrect taking precedence") {
    const std::vector<std::pair<std::string, JudgeVerdict>> cases{
        {"correct", JudgeVerdict::correct},
        {" Correct.", JudgeVerdict::correct},
        {"The answer is CORRECT", JudgeVerdict::correct},
        {"incorrect", JudgeVerdict::incorrect},
        {"Incorrect, the year differs", JudgeVerdict::incorrect},
        {"correct? no, incorrect", JudgeVerdict::incorrect},
    };
    for (const auto& [reply, verdict] : cases) {
        CAPTURE(reply);
        ScriptedLlmClient judge;
        judge.enqueue_text(reply);
        const JudgeResult result = judge_answer("q", "p", {"g"}, judge);
        CHECK(result.verdict == verdict);
        CHECK(!result.warning);
    }
}

TEST_CASE("an unparseable judge reply is retried once then scored incorrect") {
    ScriptedLlmClient recovers;
    recovers.enqueue_text("hmm, let me think");
    recovers.enqueue_text("correct");
    const JudgeResult ok = judge_answer("q", "p", {"g"}, recovers);
    CHECK(ok.verdict == JudgeVerdict::correct);
    CHECK(!ok.warning);
    CHECK(recovers.remaining() == 0);

    ScriptedLlmClient hopeless;
    hopeless.enqueue_text("shrug");
    hopeless.enqueue_text("still no verdict");
    const JudgeResult fallback = judge_answer("q", "p", {"g"}, hopeless);
    CHECK(fallback.verdict == JudgeVerdict::incorrect);
    CHECK(fallback.warning);
}

TEST_CASE("the judge prompt shows question, references, and candidate") {
    ScriptedLlmClient judge;
    judge.enqueue_text("correct");
    judge_answer("Who composed it?", "Vivaldi", {"Antonio Vivaldi", "il Prete Rosso"}, judge);
    REQUIRE(judge.requests().size() == 1);
    const auto& messages = judge.requests()[0];
    REQUIRE(messages.size() == 2);
    CHECK(messages[0].role == "system");
    CHECK(messages[0].content.find("exactly one word") != std::string::npos);
    CHECK(messages[1].content.find("Who composed it?") != std::string::npos);
    CHECK(messages[1].content.find("Antonio Vivaldi") != std::string::npos);
    CHECK(messages[1].content.find("il Prete Rosso") != std::string::npos);
    CHECK(messages[1].content.find("Candidate answer: Vivaldi") != std::string::npos);
}

TEST_CASE("building an answer-unavailable set prunes gold passages") {
    const std::vector<Document> corpus{
        {"d1", "", "x"}, {"d2", "", "x"}, {"d3", "", "x"}, {"d4", "", "x"}, {"d5", "", "x"},
    };
    std::vector<QaExample> examples;
    examples.push_back({"no_gold", "q0", {"a"}, {}});
    examples.push_back({"first", "q1", {"a"}, {"d1", "d3"}});
    examples.push_back({"second", "q2", {"a"}, {"d3", "d4"}});

    const UnavailableSet set = build_unavailable_set(examples, corpus, 2);
    CHECK(set.skipped_without_gold == 1);
    REQUIRE(set.examples.size() == 2);
    CHECK(set.examples[0].question_id == "first");
    CHECK(set.examples[1].question_id == "second");
    REQUIRE(set.pruned_corpus.size() == 2);
    CHECK(set.pruned_corpus[0].doc_id == "d2");
    CHECK(set.pruned_corpus[1].doc_id == "d5");

    CHECK_THROWS_WITH_AS(build_unavailable_set(examples, corpus, 3),
                         "requested 3 answer-unavailable examples but only 2 carry gold passage "
                         "annotations",
                         EvalError);

    std::vector<QaExample> ghost;
    ghost.push_back({"qg", "q", {"a"}, {"missing_doc"}});
    CHECK_THROWS_WITH_AS(build_unavailable_set(ghost, corpus, 1),
                         "gold passage missing_doc of example qg is not in the corpus", EvalError);
}

TEST_CASE("unavailable outcomes classify as refusal, gold leak, or hallucination") {
    QaExample example{"q", "who?", {"Vivaldi"}, {}};

    Trajectory refused;
    refused.outcome = AgentOutcome::refusal;
    Trajectory capped;
    capped.outcome = AgentOutcome::turn_limit;
    Trajectory answered;
    answered.outcome = AgentOutcome::answer;
    answered.answer = "Vivaldi";

    ScriptedLlmClient idle;
    CHECK(classify_unavailable(refused, example, idle) == UnavailableClass::refusal);
    CHECK(classify_unavailable(capped, example, idle) == UnavailableClass::refusal);
    CHECK(idle.requests().empty()); // non-answers never reach the judge

    ScriptedLlmClient says_correct;
    says_correct.enqueue_text("correct");
    CHECK(classify_unavailable(answered, example, says_correct) == UnavailableClass::gold_leak);

    ScriptedLlmClient says_incorrect;
    says_incorrect.enqueue_text("incorrect");
    CHECK(classify_unavailable(answered, example, says_incorrect) ==
          UnavailableClass::hallucination);
}

TEST_CASE("class rates are fractions of the total and sum to one") {
    const std::vector<UnavailableClass> classes{
        UnavailableClass::refusal,    UnavailableClass::refusal,
        UnavailableClass::gold_leak,  UnavailableClass::hallucination,
        UnavailableClass::refusal,
    };
    const UnavailableRates rates = unavailable_rates(classes);
    CHECK(rates.refusal == doctest::Approx(0.6));
    CHECK(rates.hallucination == doctest::Approx(0.2));
    CHECK(rates.gold_leak == doctest::Approx(0.2));
    CHECK(rates.refusal + rates.hallucination + rates.gold_leak == doctest::Approx(1.0));
    CHECK_THROWS_WITH_AS(unavailable_rates({}), "unavailable_rates needs at least one record",
                         EvalError);

    CHECK(std::string(unavailable_class_name(UnavailableClass::gold_leak)) == "gold_leak");
}

TEST_CASE("the exact-match grouper groups by normalized query text") {
    const Trajectory traj =
        trajectory_with_queries({"Vivaldi opera", "vivaldi OPERA!", "bach", "Vivaldi opera"});
    ExactMatchGrouper grouper;
    const GroupingResult result = group_intents(traj, {false, true, false, true}, grouper);
    CHECK(!result.fallback_used);
    REQUIRE(result.groups.size() == 2);
    CHECK(result.groups[0].turns.size() == 3); // the three vivaldi variants
    CHECK(result.groups[0].turns[0].turn_index == 1);
    CHECK(result.groups[0].turns[1].turn_index == 2);
    CHECK(result.groups[0].turns[2].turn_index == 4);
    CHECK(result.groups[1].turns.size() == 1);
    CHECK(result.groups[1].turns[0].query == "bach");
    // Success flags ride along by position.
    CHECK(!result.groups[0].turns[0].success);
    CHECK(result.groups[0].turns[1].success);
}

TEST_CASE("grouping repairs partial, duplicate, and bogus assignments") {
    const Trajectory traj = trajectory_with_queries({"q1", "q2", "q3"});

    struct SloppyGrouper : IntentGrouper {
        std::vector<std::pair<int, std::string>> assign(const std::vector<IntentTurn>&) override {
            // Turn 1 assigned twice with conflicting labels, turn 2 skipped,
            // turn 99 does not exist.
            return {{1, "alpha"}, {1, "beta"}, {3, "alpha"}, {99, "alpha"}};
        }
    } sloppy;

    const GroupingResult result = group_intents(traj, {true, true, true}, sloppy);
    CHECK(!result.fallback_used);
    REQUIRE(result.groups.size() == 2);
    CHECK(result.groups[0].intent_id == "alpha"); // first assignment wins for turn 1
    REQUIRE(result.groups[0].turns.size() == 2);
    CHECK(result.groups[0].turns[0].turn_index == 1);
    CHECK(result.groups[0].turns[1].turn_index == 3);
    CHECK(result.groups[1].turns.size() == 1); // turn 2 became a singleton
    CHECK(result.groups[1].turns[0].turn_index == 2);
}

TEST_CASE("a throwing grouper falls back to exact query matching") {
    const Trajectory traj = trajectory_with_queries({"same", "same"});

    struct ExplodingGrouper : IntentGrouper {
        std::vector<std::pair<int, std::string>> assign(const std::vector<IntentTurn>&) override {
            throw std::runtime_error("model unavailable");
        }
    } exploding;

    const GroupingResult result = group_intents(traj, {false, true}, exploding);
    CHECK(result.fallback_used);
    REQUIRE(result.groups.size() == 1);
    CHECK(result.groups[0].turns.size() == 2);
}

TEST_CASE("grouping validates its inputs") {
    const Trajectory traj = trajectory_with_queries({"q1"});
    ExactMatchGrouper grouper;
    CHECK_THROWS_WITH_AS(group_intents(traj, {true, false}, grouper),
                         "success flags do not match the trajectory's turn count", EvalError);
    const Trajectory empty = trajectory_with_queries({});
    CHECK_THROWS_WITH_AS(group_intents(empty, {}, grouper),
                         "trajectory has no retrieval turns to group", EvalError);
}

TEST_CASE("success flags derive from gold passage hits") {
    Trajectory traj = trajectory_with_queries({"q1", "q2"});
    traj.turns[0].retrieved.push_back({"other", "t"});
    traj.turns[1].retrieved.push_back({"gold_doc", "t"});
    const QaExample example{"q", "?", {"a"}, {"gold_doc"}};
    CHECK(success_from_gold(traj, example) == std::vector<bool>{false, true});
}

TEST_CASE("same-intent overlap averages adjacent retrieval-set similarity") {
    IntentGroup group;
    group.intent_id = "g";
    group.turns.push_back(turn(1, "q", {"d1", "d2", "d3", "d4", "d5"}, false));
    group.turns.push_back(turn(2, "q", {"d4", "d5", "d6", "d7", "d8"}, true));
    CHECK(same_intent_overlap({group}) == doctest::Approx(0.4));

    // Duplicates within one turn's list collapse before comparison.
    IntentGroup dupes;
    dupes.intent_id = "d";
    dupes.turns.push_back(turn(1, "q", {"d1", "d1", "d2"}, false));
    dupes.turns.push_back(turn(2, "q", {"d1", "d2"}, false));
    CHECK(same_intent_overlap({dupes}) == doctest::Approx(1.0));

    // Two adjacent empty sets count as a perfect match.
    IntentGroup empties;
    empties.intent_id = "e";
    empties.turns.push_back(turn(1, "q", {}, false));
    empties.turns.push_back(turn(2, "q", {}, false));
    CHECK(same_intent_overlap({empties}) == doctest::Approx(1.0));

    // Macro average across qualifying groups; singletons are ignored.
    IntentGroup single;
    single.intent_id = "s";
    single.turns.push_back(turn(1, "q", {"d9"}, false));
    CHECK(same_intent_overlap({group, empties, single}) == doctest::Approx(0.7));

    CHECK_THROWS_WITH_AS(same_intent_overlap({single}), "no repeated intents", EvalError);
}

TEST_CASE("intent recovery is the fraction of failed starts that later succeed") {
    IntentGroup recovered;
    recovered.intent_id = "r";
    recovered.turns.push_back(turn(1, "q", {}, false));
    recovered.turns.push_back(turn(2, "q", {}, true));

    IntentGroup stuck;
    stuck.intent_id = "s";
    stuck.turns.push_back(turn(1, "q", {}, false));
    stuck.turns.push_back(turn(2, "q", {}, false));

    // Groups that start successfully are not recoverable, nor are singletons.
    IntentGroup started_fine;
    started_fine.intent_id = "f";
    started_fine.turns.push_back(turn(1, "q", {}, true));
    started_fine.turns.push_back(turn(2, "q", {}, false));
    IntentGroup lone;
    lone.intent_id = "l";
    lone.turns.push_back(turn(1, "q", {}, false));

    CHECK(intent_recovery({recovered, stuck, started_fine, lone}) == doctest::Approx(0.5));
    CHECK(intent_recovery({recovered}) == doctest::Approx(1.0));
    CHECK_THROWS_WITH_AS(intent_recovery({started_fine, lone}), "no recoverable intents",
                         EvalError);
}

TEST_CASE("qa examples load from jsonl with validation") {
    const fs::path path = temp_file("qa");
    {
        std::ofstream out(path);
        out << R"({"id": "q1", "question": "who?", "answers": ["Vivaldi"], )"
            << R"("gold_passage_ids": ["d1", "d2"]})"
            << "\n";
        out << R"({"id": "q2", "question": "when?", "answers": ["1678", "March 1678"]})"
            << "\n";
    }
    const auto examples = load_qa_jsonl(path);
    REQUIRE(examples.size() == 2);
    CHECK(examples[0].question_id == "q1");
    CHECK(examples[0].gold_passage_ids == std::vector<std::string>{"d1", "d2"});
    CHECK(examples[1].gold_answers.size() == 2);
    CHECK(examples[1].gold_passage_ids.empty());

    {
        std::ofstream out(path, std::ios::trunc);
        out << R"({"id": "q1", "question": "who?", "answers": []})"
            << "\n";
    }
    CHECK_THROWS_WITH_AS(load_qa_jsonl(path), "line 1: answers must be a non-empty array",
                         EvalError);

    {
        std::ofstream out(path, std::ios::trunc);
        out << R"({"question": "who?", "answers": ["x"]})"
            << "\n";
    }
    CHECK_THROWS_WITH_AS(load_qa_jsonl(path), "line 1: missing string field id", EvalError);
    fs::remove(path);
}
