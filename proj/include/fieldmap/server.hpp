#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <future>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fieldmap/corpus.hpp"
#include "fieldmap/pipeline.hpp"

namespace httplib {
class Server;
}

namespace fieldmap {

struct ServiceConfig {
    std::size_t cache_entries = 64;
    std::chrono::milliseconds soft_deadline{10'000};
    std::vector<std::string> cors_allowlist;  // "*" allows any origin
    /// Settings not carried by the query string (edge rule default, growth
    /// basis, period convention, budget, filter and log base defaults).
    RunConfig defaults;
};

struct ServiceResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
    std::vector<std::pair<std::string, std::string>> headers;

    const std::string* header(std::string_view name) const;
};

using QueryParams = std::map<std::string, std::string>;

/// Read-only JSON query service over one immutable store. Thread safe.
///
///   /healthz                                store fingerprint
///   /terms?prefix=                          labels by descending total
///   /neighbors?term=&alpha=&s=&y1=&y2=      ranked neighborhood
///   /fields?alpha=&s=&k=&y1=&y2=&edge_rule= paradigmatic fields
///   /map?...&min=&max=&log_base=            macro map
///
/// /fields and /map are cached (LRU) by their full parameter tuple. A
/// computation outlasting the soft deadline answers 202 with Retry-After and
/// keeps running; its result lands in the cache.
class QueryService {
public:
    explicit QueryService(CorpusStore store, ServiceConfig config = {});
    ~QueryService();
    QueryService(const QueryService&) = delete;
    QueryService& operator=(const QueryService&) = delete;

    ServiceResponse handle(std::string_view path, const QueryParams& params,
                           std::string_view origin = {});

    const CorpusStore& store() const { return store_; }
    const std::string& fingerprint() const { return fingerprint_; }
    std::size_t cache_size() const;

private:
    struct Outcome {
        int status = 200;
        std::string body;
    };

    ServiceResponse terms(const QueryParams& params) const;
    ServiceResponse neighbors(const QueryParams& params) const;
    ServiceResponse fields(const QueryParams& params);
    ServiceResponse map(const QueryParams& params);
    ServiceResponse cached(const std::string& key, std::function<std::string()> compute);

    std::optional<std::string> cache_get(const std::string& key);
    void cache_put(const std::string& key, std::string body);
    void prune_workers();

    const CorpusStore store_;
    const ServiceConfig config_;
    const std::string fingerprint_;

    mutable std::mutex mutex_;
    std::list<std::pair<std::string, std::string>> lru_;
    std::unordered_map<std::string, std::list<std::pair<std::string, std::string>>::iterator> index_;
    std::unordered_map<std::string, std::shared_future<Outcome>> inflight_;
    std::list<std::pair<std::shared_ptr<std::atomic<bool>>, std::jthread>> workers_;
};

/// HTTP/1.1 front end (GET only) for a QueryService, optionally serving a
/// static asset directory at "/".
class HttpServer {
public:
    HttpServer(QueryService& service, std::string static_dir = {});
    ~HttpServer();

    /// Binds to `port` (0 picks a free port) and returns the bound port,
    /// or -1 on failure.
    int bind(const std::string& host, int port);
    /// Blocks serving requests until stop() is called.
    bool serve();
    void stop();

private:
    QueryService& service_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace fieldmap
