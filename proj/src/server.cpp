#include "fieldmap/server.hpp"

#include <algorithm>
#include <charconv>

#include <httplib.h>

#include "fieldmap/error.hpp"

namespace fieldmap {

const std::string* ServiceResponse::header(std::string_view name) const {
    for (const auto& [key, value] : headers)
        if (key == name) return &value;
    return nullptr;
}

namespace {

int http_status(const Error& e) {
    if (dynamic_cast<const UnknownTermError*>(&e) || dynamic_cast<const UndefinedTermError*>(&e)) return 404;
    switch (e.kind()) {
        case ErrorKind::resource: return 503;
        case ErrorKind::query: return 404;
        default: return 400;
    }
}

std::string error_body(int status, const std::string& message, const ojson& extra = nullptr) {
    ojson body = {{"status", status}, {"error", message}};
    if (!extra.is_null())
        for (const auto& [key, value] : extra.items()) body[key] = value;
    return body.dump() + "\n";
}

ServiceResponse json_response(int status, std::string body) {
    ServiceResponse r;
    r.status = status;
    r.body = std::move(body);
    return r;
}

const std::string* lookup(const QueryParams& params, const std::string& key) {
    auto it = params.find(key);
    return it == params.end() || it->second.empty() ? nullptr : &it->second;
}

double number_param(const QueryParams& params, const std::string& key, double fallback) {
    const std::string* text = lookup(params, key);
    if (!text) return fallback;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
    if (ec != std::errc() || ptr != text->data() + text->size())
        throw ParameterError("parameter '" + key + "' must be a number, got '" + *text + "'");
    return v;
}

long long integer_param(const QueryParams& params, const std::string& key, long long fallback) {
    const std::string* text = lookup(params, key);
    if (!text) return fallback;
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
    if (ec != std::errc() || ptr != text->data() + text->size())
        throw ParameterError("parameter '" + key + "' must be an integer, got '" + *text + "'");
    return v;
}

TimeWindow window_param(const CorpusStore& store, const QueryParams& params) {
    const TimeWindow full = store.full_range();
    TimeWindow w{static_cast<int>(integer_param(params, "y1", full.y1)),
                 static_cast<int>(integer_param(params, "y2", full.y2))};
    store.check_window(w);
    return w;
}

// Query-string parameters shared by /fields and /map, resolved into a RunConfig.
RunConfig meso_config(const CorpusStore& store, const RunConfig& defaults, const QueryParams& params) {
    RunConfig c = defaults;
    c.window = window_param(store, params);
    c.alpha = number_param(params, "alpha", defaults.alpha);
    c.threshold = number_param(params, "s", defaults.threshold.value_or(0.1));
    const long long k = integer_param(params, "k", static_cast<long long>(defaults.k));
    if (k < 3) throw ParameterError("k must be at least 3");
    c.k = static_cast<std::size_t>(k);
    if (const std::string* rule = lookup(params, "edge_rule")) c.edge_rule = parse_edge_rule(*rule);
    ProximityParams{c.alpha, *c.threshold, *c.window}.validate();
    return c;
}

std::string meso_key(const RunConfig& c) {
    return format_number(c.alpha) + "|" + format_number(*c.threshold) + "|" + std::to_string(c.k) + "|" +
           to_string(*c.window) + "|" + std::string(to_string(c.edge_rule)) + "|" +
           std::string(to_string(c.growth_basis)) + "|" +
           (c.convention == PeriodConvention::adjacent ? "adjacent" : "shared") + "|" + std::to_string(c.budget);
}

}  // namespace

QueryService::QueryService(CorpusStore store, ServiceConfig config)
    : store_(std::move(store)), config_(std::move(config)), fingerprint_(store_fingerprint(store_)) {}

QueryService::~QueryService() {
    std::list<std::pair<std::shared_ptr<std::atomic<bool>>, std::jthread>> workers;
    {
        std::lock_guard lock(mutex_);
        workers.swap(workers_);
    }
    workers.clear();  // joins
}

std::size_t QueryService::cache_size() const {
    std::lock_guard lock(mutex_);
    return lru_.size();
}

ServiceResponse QueryService::handle(std::string_view path, const QueryParams& params, std::string_view origin) {
    ServiceResponse response;
    try {
        if (path == "/healthz") {
            ojson body = {{"status", "ok"},
                          {"fingerprint", fingerprint_},
                          {"terms", store_.term_count()},
                          {"years", store_.empty() ? ojson(nullptr)
                                                   : ojson::array({store_.first_year(), store_.last_year()})}};
            response = json_response(200, body.dump() + "\n");
        } else if (path == "/terms") {
            response = terms(params);
        } else if (path == "/neighbors") {
            response = neighbors(params);
        } else if (path == "/fields") {
            response = fields(params);
        } else if (path == "/map") {
            response = map(params);
        } else {
            response = json_response(404, error_body(404, "no such endpoint '" + std::string(path) + "'"));
        }
    } catch (const UnknownTermError& e) {
        ojson extra = {{"suggestions", closest_labels(store_, e.label())}};
        response = json_response(404, error_body(404, e.what(), extra));
    } catch (const Error& e) {
        const int status = http_status(e);
        response = json_response(status, error_body(status, e.what()));
    }

    if (!origin.empty()) {
        const auto& allow = config_.cors_allowlist;
        const bool any = std::find(allow.begin(), allow.end(), "*") != allow.end();
        if (any || std::find(allow.begin(), allow.end(), origin) != allow.end()) {
            response.headers.emplace_back("Access-Control-Allow-Origin", any ? "*" : std::string(origin));
            response.headers.emplace_back("Vary", "Origin");
        }
    }
    return response;
}

ServiceResponse QueryService::terms(const QueryParams& params) const {
    const std::string* raw = lookup(params, "prefix");
    const std::string prefix = raw ? normalize_label(*raw) : std::string();
    std::vector<std::pair<Count, std::string>> matches;
    const TimeWindow full = store_.empty() ? TimeWindow{} : store_.full_range();
    const WindowCounts counts = store_.empty() ? WindowCounts({}, {}, {}) : store_.window_counts(full);
    for (std::size_t i = 0; i < store_.term_count(); ++i) {
        const std::string& label = store_.vocabulary()[i];
        if (label.compare(0, prefix.size(), prefix) != 0) continue;
        matches.emplace_back(store_.empty() ? 0 : counts.occurrences(TermId(static_cast<std::uint32_t>(i))), label);
    }
    std::sort(matches.begin(), matches.end(), [](const auto& l, const auto& r) {
        return l.first != r.first ? l.first > r.first : l.second < r.second;
    });
    ojson list = ojson::array();
    for (const auto& [total, label] : matches) list.push_back({{"label", label}, {"total_occurrences", total}});
    return json_response(200, list.dump() + "\n");
}

ServiceResponse QueryService::neighbors(const QueryParams& params) const {
    const std::string* term = lookup(params, "term");
    if (!term) throw ParameterError("parameter 'term' is required");
    const TermId id = store_.require(*term);
    ProximityParams p{number_param(params, "alpha", 1.0), number_param(params, "s", 0.0),
                      window_param(store_, params)};
    p.validate();
    const WindowCounts counts = store_.window_counts(p.window);
    ojson body = neighbors_json(store_, id, p, ranked_neighborhood(counts, store_, id, p));
    body["dual_alpha"] = 1.0 / p.alpha;
    return json_response(200, body.dump(2) + "\n");
}

ServiceResponse QueryService::fields(const QueryParams& params) {
    const RunConfig c = meso_config(store_, config_.defaults, params);
    return cached("fields|" + meso_key(c), [this, c] {
        const MesoResult meso = run_meso(store_, c);
        ojson list = ojson::array();
        for (const auto& f : meso.fields) list.push_back(field_json(store_, f));
        ojson body = {{"window", ojson::array({meso.params.window.y1, meso.params.window.y2})},
                      {"alpha", meso.params.alpha},
                      {"threshold", meso.params.threshold},
                      {"k", c.k},
                      {"edge_rule", std::string(to_string(c.edge_rule))},
                      {"fields", std::move(list)}};
        return body.dump(2) + "\n";
    });
}

ServiceResponse QueryService::map(const QueryParams& params) {
    RunConfig c = meso_config(store_, config_.defaults, params);
    const long long min = integer_param(params, "min", static_cast<long long>(c.filter.min_terms));
    const long long max = integer_param(params, "max", static_cast<long long>(c.filter.max_terms));
    if (min < 0 || max < 0) throw ParameterError("filter bounds must be non-negative");
    c.filter = {static_cast<std::size_t>(min), static_cast<std::size_t>(max)};
    c.filter.validate();
    c.log_base = number_param(params, "log_base", c.log_base);
    if (!(c.log_base > 1.0)) throw ParameterError("log_base must exceed 1");
    const std::string key = "map|" + meso_key(c) + "|" + std::to_string(min) + ":" + std::to_string(max) + "|" +
                            format_number(c.log_base);
    return cached(key, [this, c] {
        const MesoResult meso = run_meso(store_, c);
        return macro_map_document(run_macro(store_, meso.fields, c));
    });
}

std::optional<std::string> QueryService::cache_get(const std::string& key) {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    lru_.splice(lru_.begin(), lru_, it->second);
    return it->second->second;
}

void QueryService::cache_put(const std::string& key, std::string body) {
    if (config_.cache_entries == 0) return;
    if (auto it = index_.find(key); it != index_.end()) {
        it->second->second = std::move(body);
        lru_.splice(lru_.begin(), lru_, it->second);
        return;
    }
    lru_.emplace_front(key, std::move(body));
    index_[key] = lru_.begin();
    while (lru_.size() > config_.cache_entries) {
        index_.erase(lru_.back().first);
        lru_.pop_back();
    }
}

void QueryService::prune_workers() {
    for (auto it = workers_.begin(); it != workers_.end();) {
        if (it->first->load()) it = workers_.erase(it);  // already finished; join is immediate
        else ++it;
    }
}

ServiceResponse QueryService::cached(const std::string& key, std::function<std::string()> compute) {
    std::shared_future<Outcome> pending;
    {
        std::lock_guard lock(mutex_);
        if (auto body = cache_get(key)) {
            ServiceResponse r = json_response(200, std::move(*body));
            r.headers.emplace_back("X-Cache", "hit");
            return r;
        }
        if (auto it = inflight_.find(key); it != inflight_.end()) {
            pending = it->second;
        } else {
            prune_workers();
            auto promise = std::make_shared<std::promise<Outcome>>();
            pending = promise->get_future().share();
            inflight_.emplace(key, pending);
            auto done = std::make_shared<std::atomic<bool>>(false);
            workers_.emplace_back(done, std::jthread([this, key, compute, promise, done] {
                Outcome outcome;
                try {
                    outcome.body = compute();
                } catch (const Error& e) {
                    outcome.status = http_status(e);
                    outcome.body = error_body(outcome.status, e.what());
                } catch (const std::exception& e) {
                    outcome.status = 500;
                    outcome.body = error_body(500, e.what());
                }
                {
                    std::lock_guard lock(mutex_);
                    if (outcome.status == 200) cache_put(key, outcome.body);
                    inflight_.erase(key);
                }
                promise->set_value(std::move(outcome));
                done->store(true);
            }));
        }
    }

    if (pending.wait_for(config_.soft_deadline) != std::future_status::ready) {
        ServiceResponse r = json_response(202, ojson({{"status", 202}, {"pending", true}}).dump() + "\n");
        r.headers.emplace_back("Retry-After", "1");
        return r;
    }
    const Outcome& outcome = pending.get();
    ServiceResponse r = json_response(outcome.status, outcome.body);
    if (outcome.status == 200) r.headers.emplace_back("X-Cache", "miss");
    return r;
}

// --- HTTP binding ------------------------------------------------------------------

HttpServer::HttpServer(QueryService& service, std::string static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        QueryParams params;
        for (const auto& [key, value] : req.params) params.emplace(key, value);  // first value wins
        const ServiceResponse r = service_.handle(req.path, params, req.get_header_value("Origin"));
        res.status = r.status;
        for (const auto& [key, value] : r.headers) res.set_header(key, value);
        res.set_content(r.body, (r.content_type + "; charset=utf-8").c_str());
    };
    for (const char* path : {"/healthz", "/terms", "/neighbors", "/fields", "/map"}) server_->Get(path, handler);
    if (!static_dir.empty()) server_->set_mount_point("/", static_dir);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::serve() { return server_->listen_after_bind(); }

void HttpServer::stop() {
    if (server_) server_->stop();
}

}  // namespace fieldmap
