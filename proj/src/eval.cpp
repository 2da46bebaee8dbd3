#include "lexrag/eval.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

namespace lexrag {
namespace {

using nlohmann::json;

bool is_ascii_punct(unsigned char c) { return std::ispunct(c) != 0; }

double multiset_f1(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
    if (pred.empty() && gold.empty())
        return 1.0;
    if (pred.empty() || gold.empty())
        return 0.0;
    std::map<std::string, std::size_t> gold_counts;
    for (const auto& t : gold)
        ++gold_counts[t];
    std::size_t common = 0;
    for (const auto& t : pred) {
        auto it = gold_counts.find(t);
        if (it != gold_counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    if (common == 0)
        return 0.0;
    const double precision = static_cast<double>(common) / static_cast<double>(pred.size());
    const double recall = static_cast<double>(common) / static_cast<double>(gold.size());
    return 2.0 * precision * recall / (precision + recall);
}

std::optional<JudgeVerdict> parse_verdict(const std::string& reply) {
    std::string lower;
    lower.reserve(reply.size());
    for (char c : reply)
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    // "incorrect" contains "correct", so test it first.
    if (lower.find("incorrect") != std::string::npos)
        return JudgeVerdict::incorrect;
    if (lower.find("correct") != std::string::npos)
        return JudgeVerdict::correct;
    return std::nullopt;
}

std::vector<ChatMessage> judge_messages(const std::string& question, const std::string& prediction,
                                        const std::vector<std::string>& gold_answers) {
    std::ostringstream user;
    user << "Question: " << question << "\n";
    user << "Reference answers:";
    for (const auto& gold : gold_answers)
        user << " | " << gold;
    user << "\n";
    user << "Candidate answer: " << prediction << "\n";
    user << "Does the candidate answer mean the same thing as a reference answer?";
    return {{"system",
             "You grade question-answering output. Reply with exactly one word: "
             "correct or incorrect.",
             {},
             ""},
            {"user", user.str(), {}, ""}};
}

} // namespace

std::vector<QaExample> load_qa_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw EvalError("cannot open " + path.string());
    std::vector<QaExample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::ostringstream at;
        at << "line " << line_no << ": ";
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded())
            throw EvalError(at.str() + "malformed JSON");
        QaExample example;
        if (!obj.contains("id") || !obj["id"].is_string())
            throw EvalError(at.str() + "missing string field id");
        example.question_id = obj["id"].get<std::string>();
        if (!obj.contains("question") || !obj["question"].is_string())
            throw EvalError(at.str() + "missing string field question");
        example.question = obj["question"].get<std::string>();
        if (!obj.contains("answers") || !obj["answers"].is_array() || obj["answers"].empty())
            throw EvalError(at.str() + "answers must be a non-empty array");
        for (const auto& a : obj["answers"]) {
            if (!a.is_string())
                throw EvalError(at.str() + "answers must contain strings");
            example.gold_answers.push_back(a.get<std::string>());
        }
        if (obj.contains("gold_passage_ids")) {
            if (!obj["gold_passage_ids"].is_array())
                throw EvalError(at.str() + "gold_passage_ids must be an array");
            for (const auto& id : obj["gold_passage_ids"]) {
                if (!id.is_string())
                    throw EvalError(at.str() + "gold_passage_ids must contain strings");
                example.gold_passage_ids.push_back(id.get<std::string>());
            }
        }
        out.push_back(std::move(example));
    }
    return out;
}

std::vector<std::string> normalize_answer(std::string_view text) {
    std::string cleaned;
    cleaned.reserve(text.size());
    for (char c : text) {
        const auto uc = static_cast<unsigned char>(c);
        if (uc < 0x80 && is_ascii_punct(uc))
            continue;
        cleaned.push_back(static_cast<char>(uc < 0x80 ? std::tolower(uc) : uc));
    }
    std::vector<std::string> tokens;
    std::istringstream stream(cleaned);
    std::string token;
    while (stream >> token) {
        if (token == "a" || token == "an" || token == "the")
            continue;
        tokens.push_back(token);
    }
    return tokens;
}

int exact_match(const std::string& prediction, const std::vector<std::string>& gold_answers) {
    const auto pred = normalize_answer(prediction);
    for (const auto& gold : gold_answers)
        if (pred == normalize_answer(gold))
            return 1;
    return 0;
}

double word_f1(const std::string& prediction, const std::vector<std::string>& gold_answers) {
    const auto pred = normalize_answer(prediction);
    double best = 0.0;
    for (const auto& gold : gold_answers)
        best = std::max(best, multiset_f1(pred, normalize_answer(gold)));
    return best;
}

JudgeResult judge_answer(const std::string& question, const std::string& prediction,
                         const std::vector<std::string>& gold_answers, LlmClient& judge,
                         const JudgeOptions& options) {
    const auto messages = judge_messages(question, prediction, gold_answers);
    const ChatOptions chat{options.model, options.temperature, options.top_p};
    for (int attempt = 0; attempt < 2; ++attempt) {
        const LlmReply reply = judge.chat(messages, "", chat);
        if (const auto verdict = parse_verdict(reply.content))
            return {*verdict, false};
    }
    return {JudgeVerdict::incorrect, true};
}

const char* unavailable_class_name(UnavailableClass c) {
    switch (c) {
    case UnavailableClass::refusal:
        return "refusal";
    case UnavailableClass::hallucination:
        return "hallucination";
    case UnavailableClass::gold_leak:
        return "gold_leak";
    }
    return "refusal";
}

UnavailableSet build_unavailable_set(const std::vector<QaExample>& examples,
                                     const std::vector<Document>& corpus, std::size_t count) {
    std::unordered_set<std::string> corpus_ids;
    for (const auto& doc : corpus)
        corpus_ids.insert(doc.doc_id);

    UnavailableSet out;
    std::unordered_set<std::string> removed;
    for (const auto& example : examples) {
        if (out.examples.size() == count)
            break;
        if (example.gold_passage_ids.empty()) {
            ++out.skipped_without_gold;
            continue;
        }
        for (const auto& id : example.gold_passage_ids)
            if (!corpus_ids.count(id))
                throw EvalError("gold passage " + id + " of example " + example.question_id +
                                " is not in the corpus");
        for (const auto& id : example.gold_passage_ids)
            removed.insert(id);
        out.examples.push_back(example);
    }
    if (out.examples.size() < count) {
        std::ostringstream os;
        os << "requested " << count << " answer-unavailable examples but only "
           << out.examples.size() << " carry gold passage annotations";
        throw EvalError(os.str());
    }
    for (const auto& doc : corpus)
        if (!removed.count(doc.doc_id))
            out.pruned_corpus.push_back(doc);
    return out;
}

UnavailableClass classify_unavailable(const Trajectory& trajectory, const QaExample& example,
                                      LlmClient& judge, const JudgeOptions& options) {
    if (trajectory.outcome != AgentOutcome::answer)
        return UnavailableClass::refusal;
    const JudgeResult result =
        judge_answer(example.question, trajectory.answer, example.gold_answers, judge, options);
    return result.verdict == JudgeVerdict::correct ? UnavailableClass::gold_leak
                                                   : UnavailableClass::hallucination;
}

UnavailableRates unavailable_rates(const std::vector<UnavailableClass>& classes) {
    if (classes.empty())
        throw EvalError("unavailable_rates needs at least one record");
    UnavailableRates rates;
    for (UnavailableClass c : classes) {
        switch (c) {
        case UnavailableClass::refusal:
            rates.refusal += 1.0;
            break;
        case UnavailableClass::hallucination:
            rates.hallucination += 1.0;
            break;
        case UnavailableClass::gold_leak:
            rates.gold_leak += 1.0;
            break;
        }
    }
    const double total = static_cast<double>(classes.size());
    rates.refusal /= total;
    rates.hallucination /= total;
    rates.gold_leak /= total;
    return rates;
}

} // namespace lexrag
