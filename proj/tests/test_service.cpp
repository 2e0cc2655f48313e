#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "seabedkit/service.hpp"
#include "support/common.hpp"
#include "support/glb_reader.hpp"

using namespace seabed;

namespace {

std::shared_ptr<const DatasetBundle> fixture_bundle() {
    static const auto b = std::make_shared<const DatasetBundle>(load_dataset(testsupport::ocean()));
    return b;
}

std::unique_ptr<Service> loaded_service(std::size_t cache = 64) {
    ServiceConfig config;
    config.cache_size = cache;
    auto s = std::make_unique<Service>(config);
    s->set_dataset(fixture_bundle());
    return s;
}

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

// Strata present in at least three boreholes, counted straight from the CSV.
std::size_t strata_with_three_boreholes(const std::filesystem::path& csv) {
    std::ifstream in(csv);
    std::map<std::string, std::set<std::string>> holes;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        // interval rows have a non-numeric second cell
        if (cells.size() == 4 && !cells[1].empty() && std::isalpha(static_cast<unsigned char>(cells[1][0])))
            holes[cells[1]].insert(cells[0]);
    }
    std::size_t n = 0;
    for (const auto& [s, ids] : holes) n += ids.size() >= 3;
    return n;
}

} // namespace

TEST(Service, UnavailableBeforeLoad) {
    Service s(ServiceConfig{});
    EXPECT_EQ(s.handle_get("/api/v1/dataset", {}).status, 503);
    EXPECT_EQ(s.handle_post("/api/v1/spill/config", "{}").status, 503);
}

TEST(Service, DatasetSummary) {
    auto service = loaded_service();
    auto& s = *service;
    const auto r = s.handle_get("/api/v1/dataset", {});
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.content_type, "application/json");
    const auto j = nlohmann::json::parse(r.body);
    EXPECT_EQ(j["boreholes"].size(), 3u);
    EXPECT_EQ(j["strata"].size(), 2u);
    s.clear_cache();
    EXPECT_EQ(s.handle_get("/api/v1/dataset", {}).body, r.body);
}

TEST(Service, Isosurface) {
    auto service = loaded_service();
    auto& s = *service;
    const auto r = s.handle_get("/api/v1/isosurface", {{"field", "temp"}, {"iso", "20"}});
    ASSERT_EQ(r.status, 200) << r.body;
    EXPECT_EQ(r.content_type, "model/gltf-binary");
    EXPECT_EQ(bytes_of(r.body), products::isosurface_glb(*fixture_bundle(), "temp", 20));
    EXPECT_GT(testing_glb::triangle_count(testing_glb::parse(bytes_of(r.body))), 0u);

    EXPECT_EQ(s.handle_get("/api/v1/isosurface", {{"field", "temp"}, {"iso", "9999"}}).status, 422);
    EXPECT_EQ(s.handle_get("/api/v1/isosurface", {{"field", "temp"}, {"iso", "abc"}}).status, 400);
    EXPECT_EQ(s.handle_get("/api/v1/isosurface", {{"field", "temp"}, {"iso", "nan"}}).status, 400);
    EXPECT_EQ(s.handle_get("/api/v1/isosurface", {{"field", "salinity"}, {"iso", "20"}}).status, 404);
    EXPECT_EQ(s.handle_get("/api/v1/isosurface", {{"field", "temp"}}).status, 400);
}

TEST(Service, Slice) {
    auto service = loaded_service();
    auto& s = *service;
    const auto r = s.handle_get("/api/v1/slice", {{"field", "temp"}, {"axis", "y"}, {"coord", "0.5"}});
    ASSERT_EQ(r.status, 200) << r.body;
    EXPECT_EQ(r.content_type, "image/png");
    ASSERT_EQ(r.headers.size(), 1u);
    EXPECT_EQ(r.headers[0].first, "X-Geo-Extent");
    EXPECT_EQ(r.headers[0].second, "lon:0,1;depth:0,200");
    const auto img = decode_png(bytes_of(r.body));
    ASSERT_EQ(img.width, 21u);
    for (std::uint32_t row = 0; row < img.height; ++row) EXPECT_EQ(img.pixels[4 * (row * img.width + 3) + 3], 0);

    EXPECT_EQ(s.handle_get("/api/v1/slice", {{"field", "temp"}, {"axis", "w"}, {"coord", "0.5"}}).status, 400);
    EXPECT_EQ(s.handle_get("/api/v1/slice", {{"field", "temp"}, {"axis", "y"}, {"coord", "north"}}).status, 400);
    EXPECT_EQ(s.handle_get("/api/v1/slice", {{"field", "temp"}, {"axis", "y"}, {"coord", "5"}}).status, 416);
    EXPECT_EQ(s.handle_get("/api/v1/slice", {{"field", "nope"}, {"axis", "y"}, {"coord", "0.5"}}).status, 404);
}

TEST(Service, MeshEndpoints) {
    auto service = loaded_service();
    auto& s = *service;
    const auto fence = s.handle_get("/api/v1/fence/A", {});
    ASSERT_EQ(fence.status, 200);
    EXPECT_EQ(bytes_of(fence.body), products::fence_glb(*fixture_bundle(), "A"));
    EXPECT_EQ(s.handle_get("/api/v1/fence/Z", {}).status, 404);

    const auto horizons = s.handle_get("/api/v1/horizons", {});
    ASSERT_EQ(horizons.status, 200);
    std::size_t mesh_nodes = 0;
    for (const auto& n : testing_glb::parse(bytes_of(horizons.body)).nodes) mesh_nodes += n.mesh >= 0;
    EXPECT_EQ(mesh_nodes, strata_with_three_boreholes(testsupport::ocean() / "boreholes.csv"));

    EXPECT_EQ(s.handle_get("/api/v1/horizons/sand", {}).status, 200);
    EXPECT_EQ(s.handle_get("/api/v1/horizons/granite", {}).status, 404);
    EXPECT_EQ(s.handle_get("/api/v1/horizons/mud", {}).status, 422); // only two boreholes
    EXPECT_EQ(s.handle_get("/api/v1/terrain", {}).status, 200);
    EXPECT_EQ(s.handle_get("/api/v1/nothing", {}).status, 404);
    EXPECT_EQ(s.handle_get("/elsewhere", {}).status, 404);
}

TEST(Service, CacheKeysAreCanonicalAndTransparent) {
    auto service = loaded_service();
    auto& s = *service;
    const auto a = s.handle_get("/api/v1/isosurface", {{"field", "temp"}, {"iso", "20"}});
    EXPECT_EQ(s.cache_entries(), 1u);
    const auto b = s.handle_get("/api/v1/isosurface", {{"iso", "20.0"}, {"field", "temp"}});
    EXPECT_EQ(s.cache_entries(), 1u);
    EXPECT_EQ(a.body, b.body);
    s.clear_cache();
    EXPECT_EQ(s.cache_entries(), 0u);
    const auto c = s.handle_get("/api/v1/isosurface", {{"field", "temp"}, {"iso", "2e1"}});
    EXPECT_EQ(c.body, a.body);
    // failures are not memoized
    s.handle_get("/api/v1/isosurface", {{"field", "temp"}, {"iso", "9999"}});
    EXPECT_EQ(s.cache_entries(), 1u);
}

TEST(Service, CacheEvictsLeastRecentlyUsed) {
    auto service = loaded_service(2);
    auto& s = *service;
    const auto first = s.handle_get("/api/v1/slice", {{"field", "temp"}, {"axis", "z"}, {"coord", "0"}});
    s.handle_get("/api/v1/slice", {{"field", "temp"}, {"axis", "z"}, {"coord", "10"}});
    s.handle_get("/api/v1/slice", {{"field", "temp"}, {"axis", "z"}, {"coord", "20"}});
    EXPECT_EQ(s.cache_entries(), 2u);
    EXPECT_EQ(s.handle_get("/api/v1/slice", {{"field", "temp"}, {"axis", "z"}, {"coord", "0"}}).body, first.body);
}

TEST(Service, SpillFrames) {
    auto service = loaded_service();
    auto& s = *service;
    const auto a = s.handle_get("/api/v1/spill/frames", {{"from", "0"}, {"count", "3"}});
    ASSERT_EQ(a.status, 200);
    EXPECT_EQ(a.content_type, "application/octet-stream");
    EXPECT_EQ(decode_frame_stream(bytes_of(a.body)).size(), 3u);
    EXPECT_EQ(s.handle_get("/api/v1/spill/frames", {{"from", "0"}, {"count", "3"}}).body, a.body);

    // two batches concatenate to one
    const auto all = s.handle_get("/api/v1/spill/frames", {{"from", "0"}, {"count", "100"}}).body;
    const auto head = s.handle_get("/api/v1/spill/frames", {{"from", "0"}, {"count", "37"}}).body;
    const auto tail = s.handle_get("/api/v1/spill/frames", {{"from", "37"}, {"count", "63"}}).body;
    EXPECT_EQ(head + tail, all);
    EXPECT_EQ(bytes_of(all), products::spill_frames(*fixture_bundle(), fixture_bundle()->spill, 0, 100));

    EXPECT_EQ(s.handle_get("/api/v1/spill/frames", {{"from", "-1"}}).status, 416);
    EXPECT_EQ(s.handle_get("/api/v1/spill/frames", {{"from", "x"}}).status, 400);
    EXPECT_EQ(s.handle_get("/api/v1/spill/frames", {{"count", "1.5"}}).status, 400);
    EXPECT_EQ(s.handle_get("/api/v1/spill/frames", {{"count", "-2"}}).status, 400);
}

TEST(Service, SpillConfigPost) {
    auto service = loaded_service();
    auto& s = *service;
    const auto before = s.handle_get("/api/v1/spill/frames", {{"from", "0"}, {"count", "1"}}).body;
    const auto r = s.handle_post("/api/v1/spill/config", R"({"seed": 1234})");
    EXPECT_EQ(r.status, 204);
    const auto cfg = nlohmann::json::parse(s.handle_get("/api/v1/spill/config", {}).body);
    EXPECT_EQ(cfg["seed"], 1234);
    const auto after = s.handle_get("/api/v1/spill/frames", {{"from", "0"}, {"count", "1"}}).body;
    EXPECT_NE(after, before);

    EXPECT_EQ(s.handle_post("/api/v1/spill/config", R"({"dt": -1})").status, 400);
    EXPECT_EQ(s.handle_post("/api/v1/spill/config", "not json").status, 400);
    EXPECT_EQ(s.handle_post("/api/v1/spill/config", R"({"field": "nowhere"})").status, 400);
    EXPECT_EQ(s.handle_post("/api/v1/elsewhere", "{}").status, 404);
    // a rejected config leaves the accepted one in place
    EXPECT_EQ(s.handle_get("/api/v1/spill/frames", {{"from", "0"}, {"count", "1"}}).body, after);

    // reloading the dataset restores the dataset's own config
    s.set_dataset(fixture_bundle());
    EXPECT_EQ(s.handle_get("/api/v1/spill/frames", {{"from", "0"}, {"count", "1"}}).body, before);
}

TEST(Service, ConcurrentRequestsAgree) {
    auto service = loaded_service(4);
    auto& s = *service;
    const auto expected = s.handle_get("/api/v1/spill/frames", {{"from", "5"}, {"count", "4"}}).body;
    const auto iso = s.handle_get("/api/v1/isosurface", {{"field", "temp"}, {"iso", "15"}}).body;
    std::vector<std::thread> threads;
    std::atomic<int> mismatches{0};
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 10; ++i) {
                if (t % 2) {
                    if (s.handle_get("/api/v1/spill/frames", {{"from", "5"}, {"count", "4"}}).body != expected) ++mismatches;
                } else {
                    if (i % 3 == 0) s.clear_cache();
                    if (s.handle_get("/api/v1/isosurface", {{"field", "temp"}, {"iso", "15.0"}}).body != iso) ++mismatches;
                }
            }
        });
    }
    for (auto& th : threads) th.join();
    EXPECT_EQ(mismatches.load(), 0);
}

TEST(Service, HttpWithCors) {
    ServiceConfig config;
    config.cors = true;
    Service s(config);
    s.set_dataset(fixture_bundle());
    httplib::Server server;
    s.bind(server);
    const int port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    const auto r = client.Get("/api/v1/dataset");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "*");
    EXPECT_EQ(r->body, s.handle_get("/api/v1/dataset", {}).body);

    const auto slice = client.Get("/api/v1/slice?field=temp&axis=y&coord=0.5");
    ASSERT_TRUE(slice);
    EXPECT_EQ(slice->status, 200);
    EXPECT_EQ(slice->get_header_value("X-Geo-Extent"), "lon:0,1;depth:0,200");
    EXPECT_EQ(slice->get_header_value("Content-Type"), "image/png");

    EXPECT_EQ(client.Get("/api/v1/isosurface?field=temp&iso=abc")->status, 400);
    EXPECT_EQ(client.Options("/api/v1/spill/config")->status, 204);
    const auto post = client.Post("/api/v1/spill/config", R"({"seed": 9})", "application/json");
    ASSERT_TRUE(post);
    EXPECT_EQ(post->status, 204);

    server.stop();
    th.join();
}
