#pragma once

#include "lexrag/dense.hpp"
#include "lexrag/embedding.hpp"
#include "lexrag/hybrid.hpp"
#include "lexrag/index.hpp"
#include "lexrag/search.hpp"

#include <memory>
#include <string>

namespace lexrag {

// Artifacts a running service serves from. A missing snapshot disables the
// logical backend; a missing dense index or embedding client disables the
// hybrid backend (requests to a disabled backend get 503).
struct ServiceState {
    std::shared_ptr<const IndexSnapshot> snapshot;
    std::shared_ptr<const DenseIndex> dense_index;
    std::shared_ptr<EmbeddingClient> embed_client;
    Bm25Params bm25;
    FusionConfig rrf;
};

// HTTP/1.1 JSON search service.
//
//   POST /v1/search  {query, max_results?, default_operator?, backend?}
//     200 {hits: [{doc_id, score, title, snippet}], total_candidates, took_ms}
//     400 {error, position?} for malformed requests and query parse errors
//     503 {error} when the requested backend is not loaded
//     502 {error} when the embedding upstream fails
//   GET /v1/health → 200 {status: "ok"}
//
// Identical requests against the same sealed state produce identical
// responses apart from took_ms.
class SearchService {
public:
    explicit SearchService(ServiceState state);
    ~SearchService();

    SearchService(const SearchService&) = delete;
    SearchService& operator=(const SearchService&) = delete;

    // Blocking serve loop on a fixed port.
    bool listen(const std::string& host, int port);

    // Binds an ephemeral port and returns it (-1 on failure); serve with
    // listen_after_bind on another thread.
    int bind_any_port(const std::string& host);
    bool listen_after_bind();

    bool is_running() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace lexrag
