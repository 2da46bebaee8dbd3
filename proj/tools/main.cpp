// lexrag: one binary exposing index construction, search, the HTTP service,
// the agent loop, evaluation, and the bench harness as subcommands.

#include "lexrag/agent.hpp"
#include "lexrag/bench.hpp"
#include "lexrag/config.hpp"
#include "lexrag/dense.hpp"
#include "lexrag/embedding.hpp"
#include "lexrag/eval.hpp"
#include "lexrag/hybrid.hpp"
#include "lexrag/index_io.hpp"
#include "lexrag/query_parser.hpp"
#include "lexrag/retriever.hpp"
#include "lexrag/search.hpp"
#include "lexrag/service.hpp"

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace lexrag;

BoolOp parse_default_op(const std::string& text) {
    if (text == "AND") return BoolOp::and_op;
    if (text == "OR") return BoolOp::or_op;
    throw std::runtime_error("default operator must be AND or OR (got " + text + ")");
}

void write_jsonl(const std::string& path, const std::vector<json>& lines) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    for (const auto& line : lines) {
        out << line.dump() << '\n';
    }
    if (!out) {
        throw std::runtime_error("failed while writing " + path);
    }
}

json phase_report_json(const ConstructionReport& report) {
    json phases = json::array();
    for (const auto& phase : report.phases) {
        phases.push_back({{"name", phase.name}, {"seconds", phase.seconds}});
    }
    return json{{"backend", report.backend},
                {"phases", std::move(phases)},
                {"total_seconds", report.total_seconds}};
}

struct JudgeFlags {
    std::string script_path;
    std::string base_url;
    std::string model;
};

// Builds a judge client from CLI flags; empty flags mean no judge.
std::unique_ptr<LlmClient> make_judge(const JudgeFlags& flags) {
    if (!flags.script_path.empty()) {
        LlmConfig config;
        config.transport = "script";
        config.script_path = flags.script_path;
        return make_llm_client(config);
    }
    if (!flags.base_url.empty()) {
        LlmConfig config;
        config.transport = "http";
        config.base_url = flags.base_url;
        config.model = flags.model;
        if (const char* key = std::getenv("LEXRAG_LLM_API_KEY")) {
            config.api_key = key;
        }
        return make_llm_client(config);
    }
    return nullptr;
}

int run_index_build(const std::string& corpus_path, const std::string& out_dir,
                    const std::string& dense_out, std::uint32_t dim) {
    const std::vector<Document> docs = ingest_jsonl(corpus_path);
    const auto started = std::chrono::steady_clock::now();
    IndexSnapshot snapshot = build_index(docs);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
    snapshot.set_build_seconds(elapsed.count());
    save_index(snapshot, out_dir);
    std::cout << "indexed " << snapshot.doc_count() << " documents into " << out_dir << " in "
              << elapsed.count() << "s\n";

    if (!dense_out.empty()) {
        HashedEmbeddingClient embedder(dim);
        std::vector<std::string> ids;
        std::vector<std::string> passages;
        ids.reserve(docs.size());
        passages.reserve(docs.size());
        for (const auto& doc : docs) {
            ids.push_back(doc.doc_id);
            passages.push_back(doc.title + "\n" + doc.content);
        }
        std::vector<float> flat;
        flat.reserve(static_cast<std::size_t>(dim) * docs.size());
        for (const auto& row : embedder.embed(passages, EmbedKind::passage)) {
            flat.insert(flat.end(), row.begin(), row.end());
        }
        const DenseIndex dense = build_dense_index(ids, flat, dim);
        save_dense_index(dense, dense_out);
        std::cout << "wrote " << ids.size() << " dense vectors (dim " << dim << ") to " << dense_out
                  << "\n";
    }
    return 0;
}

int run_search(const std::string& index_dir, const std::string& query_text,
               const std::string& default_op, std::size_t k) {
    const IndexSnapshot snapshot = load_index(index_dir);
    const ParseOptions options{parse_default_op(default_op), true};
    const QueryAst ast = parse_query(query_text, options);
    const SearchResult result = search_topk(snapshot, ast, k);
    std::cout << result.total_candidates << " candidate(s)\n";
    std::size_t rank = 1;
    for (const auto& hit : result.hits) {
        std::cout << rank++ << ". " << hit.doc_id << "  score=" << hit.score << "  " << hit.title
                  << "\n   " << hit.snippet << "\n";
    }
    return 0;
}

ServiceState state_from_config(const ServiceConfig& config,
                               std::shared_ptr<EmbeddingClient>& embedder_out) {
    ServiceState state;
    state.bm25 = config.bm25;
    state.rrf = config.rrf;
    state.snapshot = std::make_shared<IndexSnapshot>(load_index(config.index_path));
    if (!config.dense_index_path.empty()) {
        state.dense_index =
            std::make_shared<DenseIndex>(load_dense_index(config.dense_index_path));
        embedder_out = make_embedding_client(*config.embedding);
        state.embed_client = embedder_out;
    }
    return state;
}

int run_serve(const std::string& config_path) {
    const ServiceConfig config = load_config(config_path);
    std::shared_ptr<EmbeddingClient> embedder;
    SearchService service(state_from_config(config, embedder));
    std::cout << "listening on " << config.listen.host << ":" << config.listen.port << "\n";
    if (!service.listen(config.listen.host, config.listen.port)) {
        throw std::runtime_error("failed to listen on " + config.listen.host + ":" +
                                 std::to_string(config.listen.port));
    }
    return 0;
}

int run_agent_batch(const std::string& config_path, const std::string& questions_path,
                    const std::string& out_path) {
    const ServiceConfig config = load_config(config_path);
    if (!config.llm) {
        throw std::runtime_error("agent run requires an llm section in the config");
    }
    const IndexSnapshot snapshot = load_index(config.index_path);

    std::unique_ptr<DenseIndex> dense;
    std::unique_ptr<EmbeddingClient> embedder;
    std::unique_ptr<Retriever> retriever;
    if (config.agent.backend == Backend::hybrid) {
        if (config.dense_index_path.empty()) {
            throw std::runtime_error("hybrid agent requires dense_index_path in the config");
        }
        dense = std::make_unique<DenseIndex>(load_dense_index(config.dense_index_path));
        embedder = make_embedding_client(*config.embedding);
        retriever = std::make_unique<HybridRetriever>(snapshot, *dense, *embedder, config.rrf);
    } else {
        retriever =
            std::make_unique<LogicalRetriever>(snapshot, config.agent.allow_boolean_ops);
    }

    const std::unique_ptr<LlmClient> llm = make_llm_client(*config.llm);
    const std::vector<QaExample> examples = load_qa_jsonl(questions_path);

    std::vector<Trajectory> trajectories;
    trajectories.reserve(examples.size());
    for (const auto& example : examples) {
        const AgentQuestion question{example.question_id, example.question};
        Trajectory trajectory = run_agent(question, config.agent, *retriever, *llm);
        std::cout << trajectory.question_id << ": " << outcome_name(trajectory.outcome) << " after "
                  << trajectory.turns.size() << " turn(s)\n";
        trajectories.push_back(std::move(trajectory));
    }
    export_trajectories(trajectories, out_path);
    std::cout << "wrote " << trajectories.size() << " trajectories to " << out_path << "\n";
    return 0;
}

int run_eval_score(const std::string& questions_path, const std::string& trajectories_path,
                   const JudgeFlags& judge_flags, const std::string& judge_model,
                   const std::string& out_path) {
    const std::vector<QaExample> examples = load_qa_jsonl(questions_path);
    const std::vector<Trajectory> trajectories = import_trajectories(trajectories_path);
    std::map<std::string, const QaExample*> by_id;
    for (const auto& example : examples) {
        by_id[example.question_id] = &example;
    }
    const std::unique_ptr<LlmClient> judge = make_judge(judge_flags);
    JudgeOptions judge_options;
    judge_options.model = judge_model;

    std::vector<json> records;
    double em_sum = 0.0;
    double f1_sum = 0.0;
    std::size_t judged = 0;
    std::size_t judged_correct = 0;
    std::size_t scored = 0;
    for (const auto& trajectory : trajectories) {
        const auto found = by_id.find(trajectory.question_id);
        if (found == by_id.end()) {
            throw EvalError("trajectory question " + trajectory.question_id +
                            " has no entry in the questions file");
        }
        const QaExample& example = *found->second;
        const std::string answer =
            trajectory.outcome == AgentOutcome::answer ? trajectory.answer : std::string();
        const int em = exact_match(answer, example.gold_answers);
        const double f1 = word_f1(answer, example.gold_answers);
        em_sum += em;
        f1_sum += f1;
        ++scored;
        json record{{"question_id", trajectory.question_id},
                    {"outcome", outcome_name(trajectory.outcome)},
                    {"em", em},
                    {"f1", f1}};
        if (judge) {
            try {
                const JudgeResult result =
                    judge_answer(example.question, answer, example.gold_answers, *judge,
                                 judge_options);
                record["judge"] =
                    result.verdict == JudgeVerdict::correct ? "correct" : "incorrect";
                record["judge_warning"] = result.warning;
                ++judged;
                if (result.verdict == JudgeVerdict::correct) {
                    ++judged_correct;
                }
            } catch (const LlmError& error) {
                record["judge_error"] = error.what();
            }
        }
        records.push_back(std::move(record));
    }
    json summary{{"count", scored},
                 {"em", scored ? em_sum / static_cast<double>(scored) : 0.0},
                 {"f1", scored ? f1_sum / static_cast<double>(scored) : 0.0}};
    if (judge && judged > 0) {
        summary["judge_accuracy"] = static_cast<double>(judged_correct) / static_cast<double>(judged);
        summary["judged"] = judged;
    }
    if (!out_path.empty()) {
        std::vector<json> lines = records;
        lines.push_back(json{{"summary", summary}});
        write_jsonl(out_path, lines);
    }
    for (const auto& record : records) {
        std::cout << record.dump() << "\n";
    }
    std::cout << summary.dump() << "\n";
    return 0;
}

int run_eval_unavailable(const std::string& questions_path, const std::string& corpus_path,
                         std::size_t count, const std::string& out_dir,
                         const std::string& trajectories_path, const JudgeFlags& judge_flags,
                         const std::string& judge_model) {
    const std::vector<QaExample> examples = load_qa_jsonl(questions_path);

    if (trajectories_path.empty()) {
        // Build mode: select annotated examples and prune their gold passages.
        const std::vector<Document> corpus = ingest_jsonl(corpus_path);
        const UnavailableSet set = build_unavailable_set(examples, corpus, count);
        std::filesystem::create_directories(out_dir);
        std::vector<json> corpus_lines;
        for (const auto& doc : set.pruned_corpus) {
            corpus_lines.push_back(
                {{"id", doc.doc_id}, {"title", doc.title}, {"contents", doc.content}});
        }
        write_jsonl((std::filesystem::path(out_dir) / "pruned_corpus.jsonl").string(),
                    corpus_lines);
        std::vector<json> question_lines;
        for (const auto& example : set.examples) {
            question_lines.push_back({{"id", example.question_id},
                                      {"question", example.question},
                                      {"answers", example.gold_answers},
                                      {"gold_passage_ids", example.gold_passage_ids}});
        }
        write_jsonl((std::filesystem::path(out_dir) / "questions.jsonl").string(), question_lines);
        std::cout << json{{"selected", set.examples.size()},
                          {"skipped_without_gold", set.skipped_without_gold},
                          {"pruned_corpus_size", set.pruned_corpus.size()}}
                         .dump()
                  << "\n";
        return 0;
    }

    // Classify mode: judge each recorded trajectory against the protocol.
    const std::unique_ptr<LlmClient> judge = make_judge(judge_flags);
    if (!judge) {
        throw std::runtime_error(
            "classifying trajectories requires --judge-script or --judge-url");
    }
    JudgeOptions judge_options;
    judge_options.model = judge_model;
    const std::vector<Trajectory> trajectories = import_trajectories(trajectories_path);
    std::map<std::string, const QaExample*> by_id;
    for (const auto& example : examples) {
        by_id[example.question_id] = &example;
    }
    std::vector<UnavailableClass> classes;
    std::vector<json> records;
    for (const auto& trajectory : trajectories) {
        const auto found = by_id.find(trajectory.question_id);
        if (found == by_id.end()) {
            throw EvalError("trajectory question " + trajectory.question_id +
                            " has no entry in the questions file");
        }
        const UnavailableClass cls =
            classify_unavailable(trajectory, *found->second, *judge, judge_options);
        classes.push_back(cls);
        records.push_back({{"question_id", trajectory.question_id},
                           {"class", unavailable_class_name(cls)}});
    }
    const UnavailableRates rates = unavailable_rates(classes);
    for (const auto& record : records) {
        std::cout << record.dump() << "\n";
    }
    std::cout << json{{"count", classes.size()},
                      {"refusal_rate", rates.refusal},
                      {"hallucination_rate", rates.hallucination},
                      {"gold_leak_rate", rates.gold_leak}}
                     .dump()
              << "\n";
    return 0;
}

int run_eval_trajectory(const std::string& trajectories_path, const std::string& questions_path) {
    const std::vector<Trajectory> trajectories = import_trajectories(trajectories_path);
    const std::vector<QaExample> examples = load_qa_jsonl(questions_path);
    std::map<std::string, const QaExample*> by_id;
    for (const auto& example : examples) {
        by_id[example.question_id] = &example;
    }
    ExactMatchGrouper grouper;
    std::vector<IntentGroup> all_groups;
    std::size_t fallbacks = 0;
    for (const auto& trajectory : trajectories) {
        const auto found = by_id.find(trajectory.question_id);
        if (found == by_id.end()) {
            throw EvalError("trajectory question " + trajectory.question_id +
                            " has no entry in the questions file");
        }
        const std::vector<bool> flags = success_from_gold(trajectory, *found->second);
        GroupingResult grouping = group_intents(trajectory, flags, grouper);
        fallbacks += grouping.fallback_used ? 1 : 0;
        for (auto& group : grouping.groups) {
            all_groups.push_back(std::move(group));
        }
    }
    json report{{"trajectories", trajectories.size()},
                {"groups", all_groups.size()},
                {"fallback_used", fallbacks}};
    try {
        report["same_intent_overlap"] = same_intent_overlap(all_groups);
    } catch (const EvalError& error) {
        report["same_intent_overlap"] = nullptr;
        report["overlap_note"] = error.what();
    }
    try {
        report["intent_recovery"] = intent_recovery(all_groups);
    } catch (const EvalError& error) {
        report["intent_recovery"] = nullptr;
        report["recovery_note"] = error.what();
    }
    std::cout << report.dump() << "\n";
    return 0;
}

int run_bench_construct(const std::string& corpus_path, const std::string& backend,
                        std::uint32_t dim) {
    const std::vector<Document> docs = ingest_jsonl(corpus_path);
    if (backend == "logical") {
        std::cout << phase_report_json(measure_construction(docs, Backend::logical)).dump() << "\n";
        return 0;
    }
    if (backend == "hybrid") {
        HashedEmbeddingClient embedder(dim);
        std::cout << phase_report_json(measure_construction(docs, Backend::hybrid, &embedder)).dump()
                  << "\n";
        return 0;
    }
    throw std::runtime_error("backend must be logical or hybrid (got " + backend + ")");
}

int run_bench_workload(const std::string& trajectories_path, const std::string& out_path) {
    const std::vector<Trajectory> trajectories = import_trajectories(trajectories_path);
    const ReplayWorkload workload = workload_from_trajectories(trajectories);
    save_workload_jsonl(workload, out_path);
    std::cout << "wrote " << workload.queries.size() << " replay queries to " << out_path << "\n";
    return 0;
}

int run_bench_replay(const std::string& workload_path, const std::string& url, std::size_t warmup,
                     const std::vector<int>& concurrency) {
    ReplayWorkload workload = load_workload_jsonl(workload_path);
    workload.warmup_count = warmup;
    if (!concurrency.empty()) {
        workload.concurrency_levels = concurrency;
    }
    const RequestFn request = [&url](const ReplayQuery& query) {
        // One client per request keeps the function trivially thread-safe.
        httplib::Client client(url);
        client.set_connection_timeout(10);
        client.set_read_timeout(30);
        const json body{{"query", query.query},
                        {"max_results", query.max_results},
                        {"default_operator", query.default_op == BoolOp::and_op ? "AND" : "OR"},
                        {"backend", query.backend}};
        const auto res = client.Post("/v1/search", body.dump(), "application/json");
        return static_cast<bool>(res) && res->status == 200;
    };
    for (const auto& report : replay_load(workload, request)) {
        std::cout << json{{"backend", report.backend},
                          {"concurrency", report.concurrency},
                          {"qps", report.qps},
                          {"mean_ms", report.mean_ms},
                          {"p95_ms", report.p95_ms},
                          {"count", report.count},
                          {"failed", report.failed}}
                         .dump()
                  << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lexical retrieval engine with an agentic RAG harness"};
    app.require_subcommand(1);

    // index build
    auto* index_cmd = app.add_subcommand("index", "Build and persist indexes");
    index_cmd->require_subcommand(1);
    auto* index_build = index_cmd->add_subcommand("build", "Build an inverted index from JSONL");
    std::string corpus_path;
    std::string out_dir;
    std::string dense_out;
    std::uint32_t dense_dim = 64;
    index_build->add_option("corpus", corpus_path, "Corpus JSONL (id, title, contents)")
        ->required();
    index_build->add_option("out", out_dir, "Output index directory")->required();
    index_build->add_option("--dense-out", dense_out, "Also write a dense index to this file");
    index_build->add_option("--dim", dense_dim, "Dense embedding dimension");

    // search
    auto* search_cmd = app.add_subcommand("search", "Run a Boolean query against an index");
    std::string search_index;
    std::string search_query;
    std::string search_op = "OR";
    std::size_t search_k = 10;
    search_cmd->add_option("index", search_index, "Index directory")->required();
    search_cmd->add_option("query", search_query, "Query string")->required();
    search_cmd->add_option("--default-op", search_op, "Default operator: AND or OR");
    search_cmd->add_option("--k", search_k, "Result count");

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP search API");
    std::string serve_config;
    serve_cmd->add_option("config", serve_config, "Service config JSON")->required();

    // agent run
    auto* agent_cmd = app.add_subcommand("agent", "Agentic retrieval loops");
    agent_cmd->require_subcommand(1);
    auto* agent_run = agent_cmd->add_subcommand("run", "Answer a question file with the agent");
    std::string agent_config;
    std::string agent_questions;
    std::string agent_out;
    agent_run->add_option("config", agent_config, "Service config JSON")->required();
    agent_run->add_option("questions", agent_questions, "Questions JSONL")->required();
    agent_run->add_option("out", agent_out, "Output trajectories JSONL")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Score answers and trajectories");
    eval_cmd->require_subcommand(1);
    JudgeFlags judge_flags;
    std::string judge_model;

    auto* eval_score = eval_cmd->add_subcommand("score", "EM/F1 (and optional judge) per answer");
    std::string score_questions;
    std::string score_trajectories;
    std::string score_out;
    eval_score->add_option("questions", score_questions, "Questions JSONL")->required();
    eval_score->add_option("trajectories", score_trajectories, "Trajectories JSONL")->required();
    eval_score->add_option("--judge-script", judge_flags.script_path,
                           "Scripted judge replies JSONL");
    eval_score->add_option("--judge-url", judge_flags.base_url, "Judge chat endpoint base URL");
    eval_score->add_option("--judge-model", judge_model, "Judge model name");
    eval_score->add_option("--out", score_out, "Also write records to this JSONL file");

    auto* eval_unavailable =
        eval_cmd->add_subcommand("unavailable", "Answer-unavailable set builder and classifier");
    std::string unavailable_questions;
    std::string unavailable_corpus;
    std::size_t unavailable_count = 10;
    std::string unavailable_out_dir = "unavailable";
    std::string unavailable_trajectories;
    eval_unavailable->add_option("questions", unavailable_questions, "Questions JSONL")->required();
    eval_unavailable->add_option("corpus", unavailable_corpus, "Corpus JSONL")->required();
    eval_unavailable->add_option("--count", unavailable_count, "Examples to select (build mode)");
    eval_unavailable->add_option("--out-dir", unavailable_out_dir, "Output directory (build mode)");
    eval_unavailable->add_option("--trajectories", unavailable_trajectories,
                                 "Classify these trajectories instead of building the set");
    eval_unavailable->add_option("--judge-script", judge_flags.script_path,
                                 "Scripted judge replies JSONL");
    eval_unavailable->add_option("--judge-url", judge_flags.base_url,
                                 "Judge chat endpoint base URL");
    eval_unavailable->add_option("--judge-model", judge_model, "Judge model name");

    auto* eval_trajectory =
        eval_cmd->add_subcommand("trajectory", "Intent overlap and recovery metrics");
    std::string trajectory_file;
    std::string trajectory_questions;
    eval_trajectory->add_option("trajectories", trajectory_file, "Trajectories JSONL")->required();
    eval_trajectory->add_option("questions", trajectory_questions, "Questions JSONL")->required();

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Construction and latency measurements");
    bench_cmd->require_subcommand(1);

    auto* bench_construct = bench_cmd->add_subcommand("construct", "Measure index build phases");
    std::string bench_corpus;
    std::string bench_backend = "logical";
    std::uint32_t bench_dim = 64;
    bench_construct->add_option("corpus", bench_corpus, "Corpus JSONL")->required();
    bench_construct->add_option("--backend", bench_backend, "logical or hybrid");
    bench_construct->add_option("--dim", bench_dim, "Hybrid embedding dimension");

    auto* bench_workload =
        bench_cmd->add_subcommand("workload", "Convert trajectories into a replay workload");
    std::string workload_trajectories;
    std::string workload_out;
    bench_workload->add_option("trajectories", workload_trajectories, "Trajectories JSONL")
        ->required();
    bench_workload->add_option("out", workload_out, "Output workload JSONL")->required();

    auto* bench_replay = bench_cmd->add_subcommand("replay", "Replay a workload against a service");
    std::string replay_workload;
    std::string replay_url = "http://127.0.0.1:8080";
    std::size_t replay_warmup = 0;
    std::vector<int> replay_concurrency;
    bench_replay->add_option("workload", replay_workload, "Workload JSONL")->required();
    bench_replay->add_option("--url", replay_url, "Service base URL");
    bench_replay->add_option("--warmup", replay_warmup, "Requests to discard from stats");
    bench_replay->add_option("--concurrency", replay_concurrency,
                             "Concurrency levels (repeatable)");

    int status = 0;
    index_build->callback(
        [&] { status = run_index_build(corpus_path, out_dir, dense_out, dense_dim); });
    search_cmd->callback([&] { status = run_search(search_index, search_query, search_op, search_k); });
    serve_cmd->callback([&] { status = run_serve(serve_config); });
    agent_run->callback([&] { status = run_agent_batch(agent_config, agent_questions, agent_out); });
    eval_score->callback([&] {
        status = run_eval_score(score_questions, score_trajectories, judge_flags, judge_model,
                                score_out);
    });
    eval_unavailable->callback([&] {
        status = run_eval_unavailable(unavailable_questions, unavailable_corpus, unavailable_count,
                                      unavailable_out_dir, unavailable_trajectories, judge_flags,
                                      judge_model);
    });
    eval_trajectory->callback(
        [&] { status = run_eval_trajectory(trajectory_file, trajectory_questions); });
    bench_construct->callback(
        [&] { status = run_bench_construct(bench_corpus, bench_backend, bench_dim); });
    bench_workload->callback(
        [&] { status = run_bench_workload(workload_trajectories, workload_out); });
    bench_replay->callback([&] {
        status = run_bench_replay(replay_workload, replay_url, replay_warmup, replay_concurrency);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::CallForAllHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& error) {
        std::cerr << error.what() << "\n\n" << app.help() << std::flush;
        return 2;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
    return status;
}
