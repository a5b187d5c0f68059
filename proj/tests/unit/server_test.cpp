#include <gtest/gtest.h>

#include <thread>

#include <httplib.h>

#include "fieldmap/pipeline.hpp"
#include "fieldmap/server.hpp"
#include "support.hpp"

using namespace fieldmap;

namespace {

QueryService make_service(ServiceConfig config = {}) { return QueryService(fmtest::fixture_store(), config); }

ojson body(const ServiceResponse& r) { return ojson::parse(r.body); }

const QueryParams fixture_params{{"alpha", "2"}, {"s", "0.1"}, {"k", "3"}, {"y1", "2002"}, {"y2", "2005"}};

}  // namespace

TEST(Service, Healthz) {
    auto service = make_service();
    const auto r = service.handle("/healthz", {});
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(body(r)["fingerprint"], store_fingerprint(fmtest::fixture_store()));
    EXPECT_EQ(service.handle("/nope", {}).status, 404);
}

TEST(Service, TermsByPrefix) {
    auto service = make_service();
    const auto all = body(service.handle("/terms", {}));
    EXPECT_EQ(all.size(), 30u);
    for (std::size_t i = 1; i < all.size(); ++i)
        EXPECT_GE(all[i - 1]["total_occurrences"].get<Count>(), all[i]["total_occurrences"].get<Count>());
    const auto kno = body(service.handle("/terms", {{"prefix", "kno"}}));
    ASSERT_EQ(kno.size(), 1u);
    EXPECT_EQ(kno[0]["label"], "knowledge discovery");
    EXPECT_EQ(body(service.handle("/terms", {{"prefix", "Kno"}})), kno);
    EXPECT_TRUE(body(service.handle("/terms", {{"prefix", "zzz"}})).empty());
}

TEST(Service, NeighborsPayload) {
    auto service = make_service();
    const auto r = service.handle("/neighbors", {{"term", "complex systems"}, {"alpha", "10"}, {"s", "0.01"}});
    ASSERT_EQ(r.status, 200);
    const auto doc = body(r);
    EXPECT_EQ(doc["dual_alpha"].get<double>(), 0.1);
    EXPECT_EQ(doc["neighbors"].size(), 5u);
    EXPECT_EQ(doc["window"], ojson::parse("[1996,2005]"));

    const auto none = body(service.handle("/neighbors", {{"term", "complex systems"}, {"s", "1"}}));
    EXPECT_TRUE(none["neighbors"].empty());
}

TEST(Service, NeighborsSymmetricAtAlphaOne) {
    auto service = make_service();
    auto value = [&](const std::string& from, const std::string& to) {
        const auto doc = body(service.handle("/neighbors", {{"term", from}, {"alpha", "1"}}));
        for (const auto& n : doc["neighbors"])
            if (n["label"] == to) return n["value"].get<double>();
        return -1.0;
    };
    EXPECT_EQ(value("data mining", "clustering"), value("clustering", "data mining"));
    EXPECT_GT(value("data mining", "clustering"), 0.0);
}

// Pivoting from term A to neighbor B with alpha -> 1/alpha shows A at the same value.
TEST(Service, PivotPreservesDistance) {
    auto service = make_service();
    const auto a = body(service.handle("/neighbors", {{"term", "knowledge discovery"}, {"alpha", "10"}}));
    ASSERT_FALSE(a["neighbors"].empty());
    for (const auto& n : a["neighbors"]) {
        const auto b = body(service.handle(
            "/neighbors", {{"term", n["label"].get<std::string>()}, {"alpha", format_number(a["dual_alpha"].get<double>())}}));
        bool found = false;
        for (const auto& m : b["neighbors"]) {
            if (m["label"] != "knowledge discovery") continue;
            found = true;
            EXPECT_TRUE(fmtest::close(m["value"].get<double>(), n["value"].get<double>()));
        }
        EXPECT_TRUE(found) << n["label"];
    }
}

TEST(Service, NeighborsErrors) {
    auto service = make_service();
    const auto unknown = service.handle("/neighbors", {{"term", "complex sytems"}});
    EXPECT_EQ(unknown.status, 404);
    EXPECT_EQ(body(unknown)["suggestions"][0], "complex systems");
    EXPECT_EQ(service.handle("/neighbors", {}).status, 400);
    EXPECT_EQ(service.handle("/neighbors", {{"term", "emergence"}, {"alpha", "0"}}).status, 400);
    EXPECT_EQ(service.handle("/neighbors", {{"term", "emergence"}, {"alpha", "abc"}}).status, 400);
    EXPECT_EQ(service.handle("/neighbors", {{"term", "emergence"}, {"s", "2"}}).status, 400);
    EXPECT_EQ(service.handle("/neighbors", {{"term", "emergence"}, {"y1", "1980"}}).status, 400);
    EXPECT_EQ(service.handle("/neighbors", {{"term", "emergence"}, {"y1", "2004"}, {"y2", "2001"}}).status, 400);
}

TEST(Service, FieldsCachedByParameterTuple) {
    auto service = make_service();
    const auto first = service.handle("/fields", fixture_params);
    ASSERT_EQ(first.status, 200);
    ASSERT_TRUE(first.header("X-Cache"));
    EXPECT_EQ(*first.header("X-Cache"), "miss");
    const auto second = service.handle("/fields", fixture_params);
    EXPECT_EQ(*second.header("X-Cache"), "hit");
    EXPECT_EQ(second.body, first.body);
    EXPECT_EQ(body(first)["fields"].size(), 5u);
    EXPECT_EQ(service.cache_size(), 1u);

    auto other = fixture_params;
    other["k"] = "4";
    EXPECT_EQ(*service.handle("/fields", other).header("X-Cache"), "miss");
    EXPECT_EQ(body(service.handle("/fields", other))["fields"].size(), 4u);
}

TEST(Service, FieldsErrors) {
    auto service = make_service();
    auto p = fixture_params;
    p["y2"] = "2012";
    EXPECT_EQ(service.handle("/fields", p).status, 400);
    p = fixture_params;
    p["k"] = "2";
    EXPECT_EQ(service.handle("/fields", p).status, 400);
    p = fixture_params;
    p["edge_rule"] = "xor";
    EXPECT_EQ(service.handle("/fields", p).status, 400);
}

TEST(Service, BudgetExceededIs503) {
    ServiceConfig config;
    config.defaults.budget = 2;
    auto service = make_service(config);
    const auto r = service.handle("/fields", fixture_params);
    EXPECT_EQ(r.status, 503);
    EXPECT_EQ(service.cache_size(), 0u);
}

TEST(Service, MapEqualsBatchDocument) {
    auto service = make_service();
    const auto r = service.handle("/map", fixture_params);
    ASSERT_EQ(r.status, 200);
    const auto store = fmtest::fixture_store();
    RunConfig c;
    c.window = TimeWindow{2002, 2005};
    c.alpha = 2.0;
    c.threshold = 0.1;
    EXPECT_EQ(r.body, macro_map_document(run_macro(store, run_meso(store, c).fields, c)));

    auto wide = fixture_params;
    wide["min"] = "3";
    const auto all = body(service.handle("/map", wide));
    EXPECT_EQ(all["nodes"].size(), 5u);
    wide["min"] = "30";
    EXPECT_EQ(service.handle("/map", wide).status, 400);
}

TEST(Service, LruEviction) {
    ServiceConfig config;
    config.cache_entries = 2;
    auto service = make_service(config);
    for (const char* k : {"3", "4", "5"}) {
        auto p = fixture_params;
        p["k"] = k;
        service.handle("/fields", p);
    }
    EXPECT_EQ(service.cache_size(), 2u);
    auto p = fixture_params;
    p["k"] = "3";
    EXPECT_EQ(*service.handle("/fields", p).header("X-Cache"), "miss");
    p["k"] = "5";
    EXPECT_EQ(*service.handle("/fields", p).header("X-Cache"), "hit");
}

TEST(Service, SoftDeadlineAnswers202ThenCaches) {
    ServiceConfig config;
    config.soft_deadline = std::chrono::milliseconds(0);
    auto service = make_service(config);
    const auto first = service.handle("/map", fixture_params);
    EXPECT_EQ(first.status, 202);
    ASSERT_TRUE(first.header("Retry-After"));
    ServiceResponse later;
    for (int i = 0; i < 500; ++i) {
        later = service.handle("/map", fixture_params);
        if (later.status == 200) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ASSERT_EQ(later.status, 200);
    EXPECT_EQ(*later.header("X-Cache"), "hit");
    EXPECT_EQ(later.body, make_service().handle("/map", fixture_params).body);
}

TEST(Service, ConcurrentRequestsShareOneComputation) {
    auto service = make_service();
    std::vector<std::string> bodies(8);
    {
        std::vector<std::jthread> threads;
        for (std::size_t i = 0; i < bodies.size(); ++i)
            threads.emplace_back([&, i] { bodies[i] = service.handle("/fields", fixture_params).body; });
    }
    for (const auto& b : bodies) EXPECT_EQ(b, bodies.front());
    EXPECT_EQ(service.cache_size(), 1u);
}

TEST(Service, Cors) {
    ServiceConfig config;
    config.cors_allowlist = {"http://localhost:5173"};
    auto service = make_service(config);
    const auto allowed = service.handle("/healthz", {}, "http://localhost:5173");
    ASSERT_TRUE(allowed.header("Access-Control-Allow-Origin"));
    EXPECT_EQ(*allowed.header("Access-Control-Allow-Origin"), "http://localhost:5173");
    EXPECT_FALSE(service.handle("/healthz", {}, "http://evil.example").header("Access-Control-Allow-Origin"));

    ServiceConfig open;
    open.cors_allowlist = {"*"};
    auto any = make_service(open);
    EXPECT_EQ(*any.handle("/healthz", {}, "http://x").header("Access-Control-Allow-Origin"), "*");
}

TEST(Http, ServesJsonOverLoopback) {
    ServiceConfig config;
    config.cors_allowlist = {"*"};
    auto service = make_service(config);
    HttpServer server(service);
    const int port = server.bind("127.0.0.1", 0);
    ASSERT_GT(port, 0);
    std::jthread loop([&] { server.serve(); });

    httplib::Client client("127.0.0.1", port);
    httplib::Result health;
    for (int i = 0; i < 100 && !health; ++i) {
        health = client.Get("/healthz");
        if (!health) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ASSERT_TRUE(health);
    EXPECT_EQ(health->status, 200);
    EXPECT_NE(health->get_header_value("Content-Type").find("application/json"), std::string::npos);

    const auto n = client.Get("/neighbors?term=complex%20systems&alpha=10&s=0.01", {{"Origin", "http://viewer"}});
    ASSERT_TRUE(n);
    EXPECT_EQ(n->status, 200);
    EXPECT_EQ(n->get_header_value("Access-Control-Allow-Origin"), "*");
    EXPECT_EQ(ojson::parse(n->body)["neighbors"].size(), 5u);

    const auto missing = client.Get("/neighbors?term=nothing");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);

    const auto post = client.Post("/fields", "", "application/json");
    ASSERT_TRUE(post);
    EXPECT_NE(post->status, 200);

    const auto map = client.Get("/map?alpha=2&s=0.1&k=3&y1=2002&y2=2005");
    ASSERT_TRUE(map);
    EXPECT_EQ(map->body, service.handle("/map", fixture_params).body);
    server.stop();
}
