#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <sstream>
#include <thread>

#include "geosplit/cli.hpp"
#include "geosplit/service.hpp"
#include "support.hpp"

using namespace geosplit;
using testsupport::slurp;
using testsupport::spit;
using testsupport::TempDir;

namespace {

constexpr const char* kStamp = "2026-03-03T00:00:00Z";

struct Harness {
  TempDir tmp;
  std::shared_ptr<const Dataset> ds;
  std::unique_ptr<SplitService> service;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  explicit Harness(std::size_t n = 600, std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    auto data = testsupport::random_dataset(rng, n, 2, 1000.0, true);
    std::ostringstream ss;
    write_samples(ss, data, SampleFormat::jsonl);
    spit(tmp / "samples.jsonl", ss.str());
    ds = std::make_shared<const Dataset>(std::move(data));
    ServiceOptions opts;
    opts.samples_path = tmp / "samples.jsonl";
    opts.project_dir = tmp.path();
    opts.timestamp = kStamp;
    opts.ui_dir = tmp / "ui";
    std::filesystem::create_directories(opts.ui_dir);
    spit(opts.ui_dir / "index.html", "<html>designer</html>");
    service = std::make_unique<SplitService>(ds, opts);
    service->mount(server);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~Harness() {
    server.stop();
    thread.join();
  }

  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

std::string regions_body(std::uint64_t base, const json& regions) {
  return json{{"base_revision", base}, {"regions", regions}}.dump();
}

json square(const std::string& name, const std::string& map, const std::string& set, int prio, double x0, double y0,
            double x1, double y1) {
  return {{"name", name}, {"map_id", map}, {"set", set}, {"priority", prio},
          {"polygon", {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}}};
}

json cover_all(const std::string& set) {
  return json::array({square("m0all", "m0", set, 0, -5000, -5000, 5000, 5000),
                      square("m1all", "m1", set, 1, -5000, -5000, 5000, 5000)});
}

json get_json(httplib::Client& c, const std::string& path, int expected) {
  auto res = c.Get(path);
  REQUIRE(res);
  CHECK(res->status == expected);
  return json::parse(res->body);
}

}  // namespace

TEST_CASE("project, regions and stats over HTTP") {
  Harness h;
  auto c = h.client();
  const auto project = get_json(c, "/api/project", 200);
  CHECK(project["revision"] == 1);
  CHECK(project["samples"] == h.ds->size());
  CHECK(project["maps"] == json::array({"m0", "m1"}));
  CHECK(get_json(c, "/api/regions", 200)["regions"].empty());

  auto put = c.Put("/api/regions", regions_body(1, cover_all("train")), "application/json");
  REQUIRE(put);
  CHECK(put->status == 200);
  CHECK(json::parse(put->body)["revision"] == 2);
  CHECK(h.service->wait_for_stats(2));
  const auto stats = get_json(c, "/api/stats?revision=2", 200);
  CHECK(stats["state"] == "done");
  CHECK(stats["revision"] == 2);
  CHECK(stats["stats"]["proportions"]["train"] == 1.0);
  CHECK(stats["stats"]["proportions"]["val"] == 0.0);
  CHECK(stats["stats"]["proportions"]["test"] == 0.0);
  CHECK(stats["stats"]["cut_sequences"] == 0);
  CHECK(stats["stats"]["validation"]["checks"].is_array());

  CHECK(get_json(c, "/api/stats?revision=1", 409)["current_revision"] == 2);
  get_json(c, "/api/stats?revision=9", 404);
  get_json(c, "/api/stats?revision=x", 400);
  CHECK(get_json(c, "/api/stats", 200)["revision"] == 2);
  CHECK(get_json(c, "/api/regions", 200)["regions"].size() == 2);

  auto ui = c.Get("/index.html");
  REQUIRE(ui);
  CHECK(ui->body == "<html>designer</html>");
}

TEST_CASE("mutations are validated") {
  Harness h;
  auto c = h.client();
  auto put = [&](const std::string& body) {
    auto r = c.Put("/api/regions", body, "application/json");
    REQUIRE(r);
    return r->status;
  };
  CHECK(put("{oops") == 400);
  CHECK(put(R"({"regions":[]})") == 400);
  CHECK(put(regions_body(1, json::array({{{"name", "bow"}, {"map_id", "m0"}, {"set", "val"}, {"priority", 0},
                                          {"polygon", {{0, 0}, {10, 10}, {10, 0}, {0, 10}}}}}))) == 400);
  CHECK(put(regions_body(1, json::array({square("a", "m0", "train", 0, 0, 0, 1, 1),
                                         square("b", "m0", "val", 0, 2, 2, 3, 3)}))) == 400);
  CHECK(put(regions_body(1, json::array({square("a", "nowhere", "train", 0, 0, 0, 1, 1)}))) == 404);
  CHECK(put(regions_body(2, json::array())) == 409);
  CHECK(h.service->revision() == 1);
  CHECK(put(regions_body(1, json::array())) == 200);
  CHECK(put(regions_body(1, json::array())) == 409);
  CHECK(h.service->revision() == 2);
}

TEST_CASE("concurrent PUTs with the same base revision") {
  Harness h;
  for (int round = 0; round < 5; ++round) {
    const auto base = h.service->revision();
    std::atomic<int> ok{0}, conflict{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 2; ++t) {
      threads.emplace_back([&, t] {
        auto c = h.client();
        auto r = c.Put("/api/regions", regions_body(base, cover_all(t == 0 ? "val" : "test")), "application/json");
        if (r && r->status == 200) ++ok;
        if (r && r->status == 409) ++conflict;
      });
    }
    for (auto& th : threads) th.join();
    CHECK(ok == 1);
    CHECK(conflict == 1);
    CHECK(h.service->revision() == base + 1);
  }
}

TEST_CASE("stats follow the newest revision and never mix") {
  Harness h(3000);
  std::uint64_t rev = 1;
  const char* sets[] = {"train", "val", "test"};
  for (int k = 0; k < 12; ++k) {
    const auto reply = h.service->put_regions(regions_body(rev, cover_all(sets[k % 3])));
    REQUIRE(reply.status == 200);
    rev = reply.body["revision"];
    const auto now = h.service->get_stats(rev);
    CHECK((now.status == 200 || now.status == 202));
  }
  REQUIRE(h.service->wait_for_stats(rev));
  const auto final_stats = h.service->get_stats(rev);
  CHECK(final_stats.status == 200);
  CHECK(final_stats.body["revision"] == rev);
  // last write was sets[11 % 3] = "test"
  CHECK(final_stats.body["stats"]["proportions"]["test"] == 1.0);
}

TEST_CASE("sample decimation") {
  Harness h(3000);
  auto c = h.client();
  const auto full = get_json(c, "/api/samples?map_id=m0", 200);
  CHECK(full["returned"] == full["total"]);
  const auto few = get_json(c, "/api/samples?map_id=m0&max_points=50", 200);
  CHECK(few["returned"].get<int>() <= 50);
  CHECK(few["returned"].get<int>() > 0);
  CHECK(few == get_json(c, "/api/samples?map_id=m0&max_points=50", 200));
  for (const auto& p : few["points"]) CHECK(p["set"] == "unassigned");
  get_json(c, "/api/samples?map_id=atlantis", 404);
  get_json(c, "/api/samples?map_id=m0&max_points=0", 400);
  get_json(c, "/api/samples?map_id=m0&max_points=lots", 400);
  get_json(c, "/api/samples", 400);
}

TEST_CASE("export is byte-identical to CLI assign") {
  Harness h;
  auto c = h.client();
  const json regions = json::array({square("west", "m0", "train", 0, -600, -600, 0, 600),
                                    square("east", "m0", "val", 1, 0, -600, 600, 600),
                                    square("all1", "m1", "test", 2, -600, -600, 600, 600),
                                    square("core", "m1", "train", 3, -100, -100, 100, 100)});
  REQUIRE(c.Put("/api/regions", regions_body(1, regions), "application/json")->status == 200);
  REQUIRE(c.Put("/api/regions", regions_body(2, json::array({regions[0], regions[1], regions[2]})), "application/json")
              ->status == 200);
  auto exp = c.Post("/api/export", "", "application/json");
  REQUIRE(exp);
  REQUIRE(exp->status == 200);
  const auto dir = h.tmp / "export";
  for (const char* f : {"regions.json", "split.csv", "manifest.json", "cuts.json"}) {
    CHECK(std::filesystem::exists(dir / f));
  }

  std::ostringstream out, err;
  const int code = run({"--timestamp", kStamp, "assign", "--samples", (h.tmp / "samples.jsonl").string(), "--regions",
                        (dir / "regions.json").string(), "--out-dir", (h.tmp / "cli").string()},
                       out, err);
  REQUIRE(code == 0);
  for (const char* f : {"split.csv", "manifest.json", "cuts.json"}) {
    CHECK(slurp(dir / f) == slurp(h.tmp / "cli" / f));
  }

  const auto custom = h.tmp / "elsewhere";
  auto exp2 = c.Post("/api/export", json{{"dir", custom.string()}}.dump(), "application/json");
  REQUIRE(exp2);
  CHECK(exp2->status == 200);
  CHECK(slurp(custom / "split.csv") == slurp(dir / "split.csv"));
  auto bad = c.Post("/api/export", "{", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
}
