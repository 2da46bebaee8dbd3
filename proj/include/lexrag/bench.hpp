#pragma once

#include "lexrag/agent.hpp"
#include "lexrag/document.hpp"
#include "lexrag/embedding.hpp"

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lexrag {

class BenchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Nearest-rank percentile: the value at index ceil(p/100 * n) of the sorted
// samples. Requires non-empty samples and 0 < p <= 100.
double percentile(std::vector<double> samples, double p);

struct ReplayQuery {
    std::string backend; // "logical" or "hybrid"
    std::string query;
    std::size_t max_results = 5;
    BoolOp default_op = BoolOp::or_op;
};

struct ReplayWorkload {
    std::vector<ReplayQuery> queries;
    std::size_t warmup_count = 0;
    std::vector<int> concurrency_levels{1, 16};
};

// Replay queries harvested from recorded trajectories, in turn order.
ReplayWorkload workload_from_trajectories(const std::vector<Trajectory>& trajectories);

// JSONL: {backend, query, max_results, default_operator} per line.
void save_workload_jsonl(const ReplayWorkload& workload, const std::filesystem::path& path);
ReplayWorkload load_workload_jsonl(const std::filesystem::path& path);

struct LatencyReport {
    std::string backend;
    int concurrency = 1;
    double qps = 0.0;
    double mean_ms = 0.0;
    double p95_ms = 0.0;
    std::size_t count = 0;  // successful post-warmup requests
    std::size_t failed = 0; // failures, excluded from latency stats
};

// Executes one replay query; returns false on failure. Must be callable from
// multiple threads at once.
using RequestFn = std::function<bool(const ReplayQuery&)>;

// Closed-loop load generation. For each backend tag and each concurrency
// level c, c clients pull that backend's queries round-robin until
// exhaustion; the first warmup_count requests are issued but discarded from
// the stats, and qps counts successful measured requests over the measured
// wall-clock window.
std::vector<LatencyReport> replay_load(const ReplayWorkload& workload, const RequestFn& request);

struct ConstructionPhase {
    std::string name;
    double seconds = 0.0;
};

struct ConstructionReport {
    std::string backend;
    std::vector<ConstructionPhase> phases;
    double total_seconds = 0.0; // exact sum of the phases
};

// Offline build cost. The logical backend has the single inverted_index
// phase; hybrid adds embedding and dense_index phases and requires an
// embedding client.
ConstructionReport measure_construction(const std::vector<Document>& corpus, Backend backend,
                                        EmbeddingClient* embed_client = nullptr);

} // namespace lexrag
