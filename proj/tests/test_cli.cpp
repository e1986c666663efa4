#include <doctest.h>

#include <sstream>

#include "geosplit/cli.hpp"
#include "geosplit/json_io.hpp"
#include "geosplit/leakage.hpp"
#include "geosplit/split.hpp"
#include "support.hpp"

using namespace geosplit;
using testsupport::slurp;
using testsupport::spit;
using testsupport::TempDir;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

void write_dataset(const std::filesystem::path& p, const Dataset& ds) {
  std::ostringstream ss;
  write_samples(ss, ds, sample_format_for(p));
  spit(p, ss.str());
}

std::string write_planted(const TempDir& tmp, std::size_t val, std::size_t near) {
  const auto p = testsupport::planted_leakage(val, near, 20, 5, 42);
  write_dataset(tmp / "samples.jsonl", p.ds);
  spit(tmp / "split.csv", split_csv_string(p.ds, p.split));
  return (tmp / "samples.jsonl").string();
}

}  // namespace

TEST_CASE("audit on planted 80% leakage") {
  TempDir tmp;
  const auto samples = write_planted(tmp, 500, 400);
  const auto r = cli({"audit", "--samples", samples, "--split", (tmp / "split.csv").string(), "--thresholds", "5"});
  CHECK(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["val"]["ratios"][0].get<double>() == 0.8);

  const auto c = cli({"audit", "--samples", samples, "--split", (tmp / "split.csv").string(), "--curve", "20:5",
                      "--csv", (tmp / "leak.csv").string(), "--curve-csv", (tmp / "curve.csv").string(), "--out",
                      (tmp / "audit.json").string()});
  CHECK(c.code == 0);
  CHECK(c.out.empty());
  CHECK(json::parse(slurp(tmp / "audit.json"))["distance_curve"].size() == 4);
  CHECK(slurp(tmp / "leak.csv").rfind("set,threshold,ratio\nval,5,0.8\n", 0) == 0);
  CHECK(slurp(tmp / "curve.csv").rfind("set,threshold,ratio\n", 0) == 0);
}

TEST_CASE("usage errors exit 2, module errors exit 1") {
  TempDir tmp;
  const auto samples = write_planted(tmp, 10, 0);
  const auto split = (tmp / "split.csv").string();
  CHECK(cli({}).code == 2);
  CHECK(cli({"audit", "--samples", samples}).code == 2);
  CHECK(cli({"audit", "--samples", (tmp / "missing.jsonl").string(), "--split", split}).code == 2);
  CHECK(cli({"audit", "--samples", samples, "--split", split, "--thresholds", "five"}).code == 2);
  CHECK(cli({"audit", "--samples", samples, "--split", split, "--curve", "20"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"partition", "--samples", samples, "--out-dir", tmp.path().string(), "--targets", "0.5,0.5"}).code == 2);

  spit(tmp / "broken.jsonl", "{\"id\":\n");
  const auto broken = cli({"histogram", "--samples", (tmp / "broken.jsonl").string()});
  CHECK(broken.code == 2);
  CHECK(broken.err.rfind("geosplit: parse-error", 0) == 0);
  CHECK(std::count(broken.err.begin(), broken.err.end(), '\n') == 1);

  const auto unknown = cli({"histogram", "--samples", samples, "--heatmap", "atlantis"});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("unknown-map") != std::string::npos);

  spit(tmp / "notrain.csv", "sample_id,set\n");
  CHECK(cli({"audit", "--samples", samples, "--split", (tmp / "notrain.csv").string()}).code == 1);
}

TEST_CASE("help lists every flag with its default") {
  const auto top = cli({"--help"});
  CHECK(top.code == 0);
  for (const char* sub : {"audit", "histogram", "assign", "partition", "folds", "filter", "eval", "validate", "serve"}) {
    CHECK(top.out.find(sub) != std::string::npos);
    const auto h = cli({sub, "--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("Usage: geosplit " + std::string(sub)) != std::string::npos);
  }
  CHECK(cli({"histogram", "--help"}).out.find("[60]") != std::string::npos);
  CHECK(cli({"filter", "--help"}).out.find("[60]") != std::string::npos);
  CHECK(cli({"eval", "--help"}).out.find("[0.5,1.0,1.5]") != std::string::npos);
  CHECK(cli({"partition", "--help"}).out.find("[0.70,0.15,0.15]") != std::string::npos);
  CHECK(cli({"serve", "--help"}).out.find("[8642]") != std::string::npos);
  CHECK(cli({"audit", "--help"}).out.find("[5]") != std::string::npos);
  CHECK(cli({"--version"}).out == "0.1.0\n");
}

TEST_CASE("folds preset") {
  TempDir tmp;
  std::vector<Sample> s;
  int n = 0;
  for (const char* m : {"boston-seaport", "singapore-onenorth", "singapore-queenstown", "singapore-hollandvillage"}) {
    for (int i = 0; i < 5; ++i, ++n) s.push_back(testsupport::sample("p" + std::to_string(n), "q" + std::to_string(n), m, i, 0, 0));
  }
  write_dataset(tmp / "s.csv", Dataset(s));
  const auto r = cli({"folds", "--samples", (tmp / "s.csv").string(), "--preset", "nuscenes", "--out-dir",
                      tmp.path().string()});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  REQUIRE(j["folds"].size() == 2);
  CHECK(j["folds"][0]["train"] == 10);
  CHECK(j["folds"][1]["val"] == 5);
  CHECK(std::filesystem::exists(tmp / "fold_A.csv"));
  CHECK(cli({"folds", "--samples", (tmp / "s.csv").string()}).code == 2);
  CHECK(cli({"folds", "--samples", (tmp / "s.csv").string(), "--preset", "argoverse2"}).code == 1);  // unknown maps
}

TEST_CASE("eval with predictions identical to GT") {
  TempDir tmp;
  spit(tmp / "gt.jsonl",
       "{\"frame_id\":\"f\",\"class\":\"divider\",\"points\":[[0,0],[10,0]]}\n"
       "{\"frame_id\":\"f\",\"class\":\"crossing\",\"points\":[[0,0],[0,4],[4,4]]}\n");
  spit(tmp / "pred.jsonl",
       "{\"frame_id\":\"f\",\"class\":\"divider\",\"points\":[[0,0],[10,0]],\"confidence\":0.9}\n"
       "{\"frame_id\":\"f\",\"class\":\"crossing\",\"points\":[[0,0],[0,4],[4,4]],\"confidence\":0.4}\n");
  const auto r = cli({"eval", "--preds", (tmp / "pred.jsonl").string(), "--gts", (tmp / "gt.jsonl").string(), "--iou"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["mean"].get<double>() == 1.0);
  CHECK(j["iou"]["mean"].get<double>() == 1.0);
  // GT lacks confidence, so it is not a valid prediction file
  CHECK(cli({"eval", "--preds", (tmp / "gt.jsonl").string(), "--gts", (tmp / "gt.jsonl").string()}).code == 2);
}

TEST_CASE("validate exit codes") {
  TempDir tmp;
  const auto samples = write_planted(tmp, 100, 80);
  const auto r = cli({"validate", "--samples", samples, "--split", (tmp / "split.csv").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("disjointness") != std::string::npos);
  CHECK(json::parse(r.out)["checks"].is_array());

  // Generous bounds on a leak-free split pass.
  TempDir tmp2;
  const auto clean = write_planted(tmp2, 100, 0);
  const auto p = testsupport::planted_leakage(100, 0, 20, 0, 42);
  spit(tmp2 / "split.csv", split_csv_string(p.ds, p.split));
  write_dataset(tmp2 / "samples.jsonl", p.ds);
  const auto ok = cli({"validate", "--samples", clean, "--split", (tmp2 / "split.csv").string(),
                       "--proportion-tolerance", "1", "--balance-tolerance", "1"});
  CHECK(ok.code == 0);
}

TEST_CASE("filter then re-audit at 60 m") {
  TempDir tmp;
  std::mt19937_64 rng(3);
  const auto ds = testsupport::random_dataset(rng, 600, 2, 2000.0);
  write_dataset(tmp / "s.jsonl", ds);
  spit(tmp / "split.csv", split_csv_string(ds, SplitAssignment::from_labels(ds, testsupport::random_sequence_labels(rng, ds), "")));
  const auto f = cli({"filter", "--samples", (tmp / "s.jsonl").string(), "--split", (tmp / "split.csv").string(),
                      "--out", (tmp / "filtered.csv").string()});
  REQUIRE(f.code == 0);
  const auto a = cli({"audit", "--samples", (tmp / "s.jsonl").string(), "--split", (tmp / "filtered.csv").string(),
                      "--thresholds", "60"});
  REQUIRE(a.code == 0);
  const auto j = json::parse(a.out);
  REQUIRE(json::parse(a.out)["val"]["evaluated"].get<int>() > 0);
  CHECK(j["val"]["ratios"][0].get<double>() == 0.0);
  CHECK(j["test"]["ratios"][0].get<double>() == 0.0);
}

TEST_CASE("partition and assign agree; runs are deterministic") {
  TempDir tmp;
  std::mt19937_64 rng(8);
  write_dataset(tmp / "s.csv", testsupport::random_dataset(rng, 1500, 2, 3000.0, true));
  const auto s = (tmp / "s.csv").string();
  for (const char* dir : {"p1", "p2"}) {
    REQUIRE(cli({"--timestamp", "2026-01-01T00:00:00Z", "partition", "--samples", s, "--seed", "7", "--out-dir",
                 (tmp / dir).string()})
                .code == 0);
  }
  for (const char* f : {"regions.json", "split.csv", "manifest.json", "cuts.json"}) {
    CHECK(slurp(tmp / "p1" / f) == slurp(tmp / "p2" / f));
  }
  REQUIRE(cli({"assign", "--samples", s, "--regions", (tmp / "p1" / "regions.json").string(), "--out-dir",
               (tmp / "a").string(), "--timestamp", "2026-01-01T00:00:00Z"})
              .code == 0);
  CHECK(slurp(tmp / "a" / "split.csv") == slurp(tmp / "p1" / "split.csv"));
  const auto m = json::parse(slurp(tmp / "a" / "manifest.json"));
  CHECK(m["created"] == "2026-01-01T00:00:00Z");
  CHECK(m["inputs"][1]["name"] == "regions.json");

  REQUIRE(cli({"assign", "--samples", s, "--regions", (tmp / "p1" / "regions.json").string(), "--mode", "per_sequence",
               "--out-dir", (tmp / "b").string()})
              .code == 0);
  CHECK(json::parse(slurp(tmp / "b" / "cuts.json"))["cut_sequences"] == 0);
  CHECK(cli({"assign", "--samples", s, "--regions", (tmp / "p1" / "regions.json").string(), "--mode", "majority",
             "--out-dir", (tmp / "c").string()})
            .code == 2);
}

TEST_CASE("report commands, bundle and verify") {
  TempDir tmp;
  const auto samples = write_planted(tmp, 50, 10);
  const auto split = (tmp / "split.csv").string();
  const std::vector<std::vector<std::string>> cmds{
      {"audit", "--samples", samples, "--split", split, "--curve", "30:10"},
      {"histogram", "--samples", samples},
      {"balance", "--samples", samples, "--split", split},
  };
  std::vector<std::string> outputs;
  for (const auto& c : cmds) {
    const auto a = cli(c), b = cli(c);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    outputs.push_back(a.out);
  }
  spit(tmp / "audit.json", outputs[0]);
  spit(tmp / "hist.json", outputs[1]);
  spit(tmp / "bal.json", outputs[2]);
  const std::vector<std::string> bundle_args{"--timestamp", "2026-02-02T00:00:00Z", "bundle", "--audit",
                                             (tmp / "audit.json").string(), "--histogram", (tmp / "hist.json").string(),
                                             "--balance", (tmp / "bal.json").string(), "--input", samples, "--input",
                                             split, "--out", (tmp / "bundle.json").string()};
  REQUIRE(cli(bundle_args).code == 0);
  const auto first = slurp(tmp / "bundle.json");
  REQUIRE(cli(bundle_args).code == 0);
  CHECK(first == slurp(tmp / "bundle.json"));
  const auto j = json::parse(first);
  CHECK(j["sections"].size() == 4);  // leakage, distance_curve, histogram, balance
  CHECK(cli({"verify", "--bundle", (tmp / "bundle.json").string()}).code == 0);
  spit(split, slurp(split) + "\n");
  const auto v = cli({"verify", "--bundle", (tmp / "bundle.json").string()});
  CHECK(v.code == 1);
  CHECK(v.err.find("digest mismatch") != std::string::npos);
}

TEST_CASE("resample and threads") {
  TempDir tmp;
  std::mt19937_64 rng(2);
  const auto ds = testsupport::random_dataset(rng, 300, 1);
  write_dataset(tmp / "s.jsonl", ds);
  const auto r = cli({"--threads", "2", "resample", "--samples", (tmp / "s.jsonl").string(), "--mode", "every_nth",
                      "--n", "4", "--out", (tmp / "thin.csv").string()});
  REQUIRE(r.code == 0);
  const auto thin = load_samples(tmp / "thin.csv", SampleFormat::csv);
  CHECK(thin == resample_sequences(ds, ResampleMode::every_nth(4)));
}
