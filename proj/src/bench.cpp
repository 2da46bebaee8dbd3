#include "lexrag/bench.hpp"

#include "lexrag/dense.hpp"
#include "lexrag/index.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace lexrag {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::size_t k_embed_batch = 32;

struct Sample {
    std::size_t query_index = 0;
    double ms = 0.0;
    bool ok = false;
    Clock::time_point start;
    Clock::time_point end;
};

LatencyReport summarize(const std::string& backend, int concurrency,
                        const std::vector<Sample>& samples, std::size_t warmup_count) {
    LatencyReport report;
    report.backend = backend;
    report.concurrency = concurrency;

    std::vector<double> latencies;
    Clock::time_point window_start = Clock::time_point::max();
    Clock::time_point window_end = Clock::time_point::min();
    for (const Sample& s : samples) {
        if (s.query_index < warmup_count)
            continue;
        if (!s.ok) {
            ++report.failed;
            continue;
        }
        latencies.push_back(s.ms);
        window_start = std::min(window_start, s.start);
        window_end = std::max(window_end, s.end);
    }
    report.count = latencies.size();
    if (latencies.empty())
        return report;
    double sum = 0.0;
    for (double v : latencies)
        sum += v;
    report.mean_ms = sum / static_cast<double>(latencies.size());
    report.p95_ms = percentile(latencies, 95.0);
    const double elapsed_s =
        std::chrono::duration<double>(window_end - window_start).count();
    report.qps = elapsed_s > 0.0 ? static_cast<double>(latencies.size()) / elapsed_s : 0.0;
    return report;
}

const char* op_name(BoolOp op) { return op == BoolOp::and_op ? "AND" : "OR"; }

} // namespace

double percentile(std::vector<double> samples, double p) {
    if (samples.empty())
        throw BenchError("percentile of empty samples");
    if (!(p > 0.0) || p > 100.0)
        throw BenchError("percentile p must be in (0, 100]");
    std::sort(samples.begin(), samples.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil(p / 100.0 * static_cast<double>(samples.size())));
    return samples[rank - 1];
}

ReplayWorkload workload_from_trajectories(const std::vector<Trajectory>& trajectories) {
    ReplayWorkload workload;
    for (const Trajectory& traj : trajectories)
        for (const AgentTurn& turn : traj.turns) {
            if (!turn.parse_ok)
                continue;
            workload.queries.push_back({backend_name(traj.backend), turn.query,
                                        turn.max_results, turn.default_op});
        }
    return workload;
}

void save_workload_jsonl(const ReplayWorkload& workload, const std::filesystem::path& path) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw BenchError("cannot write " + path.string());
    for (const ReplayQuery& q : workload.queries) {
        const json obj{{"backend", q.backend},
                       {"query", q.query},
                       {"max_results", q.max_results},
                       {"default_operator", op_name(q.default_op)}};
        out << obj.dump() << "\n";
    }
    if (!out)
        throw BenchError("write failed for " + path.string());
}

ReplayWorkload load_workload_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw BenchError("cannot open " + path.string());
    ReplayWorkload workload;
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
            throw BenchError(at.str() + "malformed JSON");
        ReplayQuery q;
        q.backend = obj.value("backend", "logical");
        if (q.backend != "logical" && q.backend != "hybrid")
            throw BenchError(at.str() + "unknown backend " + q.backend);
        if (!obj.contains("query") || !obj["query"].is_string())
            throw BenchError(at.str() + "missing string field query");
        q.query = obj["query"].get<std::string>();
        q.max_results = obj.value("max_results", std::size_t{5});
        const std::string op = obj.value("default_operator", "OR");
        if (op != "AND" && op != "OR")
            throw BenchError(at.str() + "default_operator must be AND or OR");
        q.default_op = op == "AND" ? BoolOp::and_op : BoolOp::or_op;
        workload.queries.push_back(std::move(q));
    }
    return workload;
}

std::vector<LatencyReport> replay_load(const ReplayWorkload& workload, const RequestFn& request) {
    if (workload.queries.empty())
        throw BenchError("replay workload has no queries");
    for (int level : workload.concurrency_levels)
        if (level < 1)
            throw BenchError("concurrency level must be at least 1");

    std::vector<std::string> backends;
    for (const ReplayQuery& q : workload.queries)
        if (std::find(backends.begin(), backends.end(), q.backend) == backends.end())
            backends.push_back(q.backend);

    std::vector<LatencyReport> reports;
    for (const std::string& backend : backends) {
        std::vector<const ReplayQuery*> queries;
        for (const ReplayQuery& q : workload.queries)
            if (q.backend == backend)
                queries.push_back(&q);

        for (int level : workload.concurrency_levels) {
            std::atomic<std::size_t> next{0};
            std::mutex sink_mutex;
            std::vector<Sample> samples;
            samples.reserve(queries.size());

            auto client = [&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= queries.size())
                        return;
                    Sample s;
                    s.query_index = i;
                    s.start = Clock::now();
                    s.ok = request(*queries[i]);
                    s.end = Clock::now();
                    s.ms = std::chrono::duration<double, std::milli>(s.end - s.start).count();
                    std::lock_guard<std::mutex> lock(sink_mutex);
                    samples.push_back(s);
                }
            };

            std::vector<std::thread> clients;
            clients.reserve(static_cast<std::size_t>(level));
            for (int t = 0; t < level; ++t)
                clients.emplace_back(client);
            for (std::thread& t : clients)
                t.join();

            reports.push_back(summarize(backend, level, samples, workload.warmup_count));
        }
    }
    return reports;
}

ConstructionReport measure_construction(const std::vector<Document>& corpus, Backend backend,
                                        EmbeddingClient* embed_client) {
    ConstructionReport report;
    report.backend = backend_name(backend);

    auto timed = [&report](const std::string& name, const auto& fn) {
        const auto start = Clock::now();
        fn();
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        report.phases.push_back({name, seconds});
    };

    timed("inverted_index", [&] { build_index(corpus); });

    if (backend == Backend::hybrid) {
        if (!embed_client)
            throw BenchError("hybrid construction needs an embedding client");
        std::vector<std::vector<float>> vectors;
        timed("embedding", [&] {
            vectors.reserve(corpus.size());
            std::vector<std::string> batch;
            for (std::size_t i = 0; i < corpus.size(); ++i) {
                batch.push_back(corpus[i].title + "\n" + corpus[i].content);
                if (batch.size() == k_embed_batch || i + 1 == corpus.size()) {
                    auto embedded = embed_client->embed(batch, EmbedKind::passage);
                    for (auto& v : embedded)
                        vectors.push_back(std::move(v));
                    batch.clear();
                }
            }
        });
        timed("dense_index", [&] {
            if (vectors.empty())
                throw BenchError("embedding produced no vectors");
            const auto dim = static_cast<std::uint32_t>(vectors.front().size());
            std::vector<std::string> ids;
            ids.reserve(corpus.size());
            for (const Document& doc : corpus)
                ids.push_back(doc.doc_id);
            std::vector<float> flat;
            flat.reserve(vectors.size() * dim);
            for (const auto& v : vectors) {
                if (v.size() != dim)
                    throw BenchError("embedding returned vectors of mixed dimensions");
                flat.insert(flat.end(), v.begin(), v.end());
            }
            build_dense_index(std::move(ids), std::move(flat), dim);
        });
    }

    for (const ConstructionPhase& phase : report.phases)
        report.total_seconds += phase.seconds;
    return report;
}

} // namespace lexrag
