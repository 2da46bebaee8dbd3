#include "lexrag/service.hpp"

#include "lexrag/query_parser.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <utility>

namespace lexrag {
namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, json{{"error", message}});
}

json hits_to_json(const SearchResult& result, double took_ms) {
    json hits = json::array();
    for (const auto& hit : result.hits) {
        hits.push_back({{"doc_id", hit.doc_id},
                        {"score", hit.score},
                        {"title", hit.title},
                        {"snippet", hit.snippet}});
    }
    return json{{"hits", std::move(hits)},
                {"total_candidates", result.total_candidates},
                {"took_ms", took_ms}};
}

} // namespace

struct SearchService::Impl {
    ServiceState state;
    httplib::Server server;

    explicit Impl(ServiceState s) : state(std::move(s)) {
        // The default pool is sized for a handful of clients; replays drive
        // 16 concurrent connections plus headroom.
        server.new_task_queue = [] { return new httplib::ThreadPool(32); };
        server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, json{{"status", "ok"}});
        });
        server.Post("/v1/search", [this](const httplib::Request& req, httplib::Response& res) {
            handle_search(req, res);
        });
    }

    void handle_search(const httplib::Request& req, httplib::Response& res) {
        const auto started = std::chrono::steady_clock::now();

        json body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object()) {
            send_error(res, 400, "request body must be a JSON object");
            return;
        }
        if (!body.contains("query") || !body["query"].is_string()) {
            send_error(res, 400, "query must be a string");
            return;
        }
        const std::string query = body["query"].get<std::string>();

        std::size_t max_results = 10;
        if (body.contains("max_results")) {
            if (!body["max_results"].is_number_integer() || body["max_results"].get<long long>() < 1) {
                send_error(res, 400, "max_results must be a positive integer");
                return;
            }
            max_results = body["max_results"].get<std::size_t>();
        }

        BoolOp default_op = BoolOp::or_op;
        if (body.contains("default_operator")) {
            const std::string op = body["default_operator"].is_string()
                                       ? body["default_operator"].get<std::string>()
                                       : std::string();
            if (op == "AND") {
                default_op = BoolOp::and_op;
            } else if (op == "OR") {
                default_op = BoolOp::or_op;
            } else {
                send_error(res, 400, "default_operator must be AND or OR");
                return;
            }
        }

        std::string backend = "logical";
        if (body.contains("backend")) {
            if (!body["backend"].is_string()) {
                send_error(res, 400, "backend must be a string");
                return;
            }
            backend = body["backend"].get<std::string>();
        }

        const auto took_ms = [&] {
            const auto elapsed = std::chrono::steady_clock::now() - started;
            return std::chrono::duration<double, std::milli>(elapsed).count();
        };

        if (backend == "logical") {
            if (!state.snapshot) {
                send_error(res, 503, "index not loaded");
                return;
            }
            QueryAst ast;
            try {
                ast = parse_query(query, ParseOptions{default_op, true});
            } catch (const QueryParseError& error) {
                send_json(res, 400, json{{"error", error.what()}, {"position", error.position()}});
                return;
            }
            const SearchResult result = search_topk(*state.snapshot, ast, max_results, state.bm25);
            send_json(res, 200, hits_to_json(result, took_ms()));
            return;
        }
        if (backend == "hybrid") {
            if (!state.snapshot || !state.dense_index || !state.embed_client) {
                send_error(res, 503, "hybrid backend not loaded");
                return;
            }
            try {
                const SearchResult result = hybrid_search(query, *state.snapshot, *state.dense_index,
                                                          *state.embed_client, state.rrf, max_results);
                send_json(res, 200, hits_to_json(result, took_ms()));
            } catch (const EmbeddingError& error) {
                send_error(res, 502, std::string("embedding upstream failure: ") + error.what());
            } catch (const std::runtime_error& error) {
                send_error(res, 500, error.what());
            }
            return;
        }
        send_error(res, 400, "unknown backend " + backend);
    }
};

SearchService::SearchService(ServiceState state) : impl_(std::make_unique<Impl>(std::move(state))) {}

SearchService::~SearchService() {
    stop();
}

bool SearchService::listen(const std::string& host, int port) {
    return impl_->server.listen(host, port);
}

int SearchService::bind_any_port(const std::string& host) {
    return impl_->server.bind_to_any_port(host);
}

bool SearchService::listen_after_bind() {
    return impl_->server.listen_after_bind();
}

bool SearchService::is_running() const {
    return impl_->server.is_running();
}

void SearchService::stop() {
    if (impl_ && impl_->server.is_running()) {
        impl_->server.stop();
    }
}

} // namespace lexrag
