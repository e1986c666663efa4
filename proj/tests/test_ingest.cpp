#include <doctest.h>

#include <sstream>

#include "geosplit/error.hpp"
#include "geosplit/geometry.hpp"
#include "geosplit/ingest.hpp"
#include "geosplit/text.hpp"
#include "support.hpp"

using namespace geosplit;
using testsupport::sample;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::io;
}

Dataset parse_jsonl(const std::string& text) {
  std::istringstream in(text);
  return parse_samples(in, SampleFormat::jsonl);
}

}  // namespace

TEST_CASE("cell_coord follows mathematical floor") {
  CHECK(cell_coord(0.0, 50.0) == 0);
  CHECK(cell_coord(49.9, 50.0) == 0);
  CHECK(cell_coord(50.0, 50.0) == 1);
  CHECK(cell_coord(-0.1, 50.0) == -1);
  CHECK(cell_coord(-50.0, 50.0) == -1);
  CHECK(cell_coord(-50.0000001, 50.0) == -2);
  // Values where v / cell rounds across an integer.
  for (double cell : {0.1, 0.3, 60.0, 7.7}) {
    for (int k = -50; k <= 50; ++k) {
      const double v = k * cell;
      const auto i = cell_coord(v, cell);
      CHECK(static_cast<double>(i) * cell <= v);
      CHECK(v < static_cast<double>(i + 1) * cell);
    }
  }
}

TEST_CASE("polygon containment, even-odd with inclusive edges") {
  const std::vector<Point2> sq{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
  CHECK(polygon_contains(sq, {5, 5}));
  CHECK(polygon_contains(sq, {0, 5}));
  CHECK(polygon_contains(sq, {10, 10}));
  CHECK(polygon_contains(sq, {5, 0}));
  CHECK_FALSE(polygon_contains(sq, {10.0001, 5}));
  CHECK_FALSE(polygon_contains(sq, {-1, -1}));
  // Concave U shape: notch is outside.
  const std::vector<Point2> u{{0, 0}, {30, 0}, {30, 30}, {20, 30}, {20, 10}, {10, 10}, {10, 30}, {0, 30}};
  CHECK(polygon_contains(u, {5, 20}));
  CHECK_FALSE(polygon_contains(u, {15, 20}));
  CHECK(polygon_contains(u, {15, 10}));
  CHECK(is_simple_polygon(u));
  CHECK_FALSE(is_simple_polygon(std::vector<Point2>{{0, 0}, {10, 10}, {10, 0}, {0, 10}}));
  CHECK_FALSE(is_simple_polygon(std::vector<Point2>{{0, 0}, {1, 1}}));
  CHECK(polygon_area(sq) == doctest::Approx(100.0));
}

TEST_CASE("text helpers") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(60.0) == "60");
  CHECK(parse_double("1e3").value() == 1000.0);
  CHECK_FALSE(parse_double("abc"));
  CHECK_FALSE(parse_double("1.5x"));
  CHECK(parse_int64("-42").value() == -42);
  auto rec = split_csv_record(R"(a,"b,c","d""e",)").value();
  REQUIRE(rec.size() == 4);
  CHECK(rec[1] == "b,c");
  CHECK(rec[2] == "d\"e");
  CHECK(rec[3].empty());
  CHECK(csv_field("x,y") == "\"x,y\"");
  CHECK(split_list("0.5, 1.0,1.5") == std::vector<std::string>{"0.5", "1.0", "1.5"});
}

TEST_CASE("three rows, two sequences") {
  const auto ds = parse_jsonl(
      R"({"id":"a","sequence_id":"q1","map_id":"m","x":0,"y":0,"t":1,"keyframe":true,"attrs":{}}
{"id":"b","sequence_id":"q1","map_id":"m","x":1,"y":0,"t":2,"keyframe":false,"attrs":{"weather":"rain"}}
{"id":"c","sequence_id":"q2","map_id":"m","x":5,"y":5,"t":1,"keyframe":true,"attrs":{}}
)");
  CHECK(ds.size() == 3);
  CHECK(ds.sequences().size() == 2);
  CHECK(ds[1].attrs.at("weather") == "rain");
  CHECK(ds.attribute_keys() == std::vector<std::string>{"weather"});
}

TEST_CASE("duplicate id is rejected with its name") {
  try {
    parse_jsonl(R"({"id":"s1","sequence_id":"q","map_id":"m","x":0,"y":0,"t":1,"keyframe":true,"attrs":{}}
{"id":"s1","sequence_id":"q","map_id":"m","x":0,"y":0,"t":2,"keyframe":true,"attrs":{}}
)");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::duplicate_id);
    CHECK(e.subject() == "s1");
  }
}

TEST_CASE("empty input gives an empty dataset") {
  CHECK(parse_jsonl("").size() == 0);
  std::istringstream csv("id,sequence_id,map_id,x,y,t,keyframe\n");
  CHECK(parse_samples(csv, SampleFormat::csv).size() == 0);
}

TEST_CASE("malformed samples") {
  CHECK(kind_of([] { parse_jsonl("{not json}\n"); }) == ErrorKind::parse);
  CHECK(kind_of([] {
          parse_jsonl(R"({"id":"a","sequence_id":"q","map_id":"m","x":0,"y":0,"t":1.5,"keyframe":true,"attrs":{}})");
        }) == ErrorKind::parse);
  CHECK(kind_of([] {
          Dataset({sample("a", "q", "m", 0, 0, 5), sample("b", "q", "m", 0, 0, 5)});
        }) == ErrorKind::non_monotone_time);
  CHECK(kind_of([] {
          Dataset({sample("a", "q", "m", 0, 0, 5), sample("b", "q", "n", 0, 0, 6)});
        }) == ErrorKind::parse);
  CHECK(kind_of([] { Dataset({sample("a", "q", "m", NAN, 0, 5)}); }) == ErrorKind::parse);
  std::istringstream bad_header("id,map_id,sequence_id,x,y,t,keyframe\n");
  CHECK(kind_of([&] { parse_samples(bad_header, SampleFormat::csv); }) == ErrorKind::parse);
}

TEST_CASE("errors carry the input line") {
  try {
    parse_jsonl(R"({"id":"a","sequence_id":"q","map_id":"m","x":0,"y":0,"t":1,"keyframe":true,"attrs":{}}
{"id":"b","sequence_id":"q","map_id":"m","x":"zero","y":0,"t":2,"keyframe":true,"attrs":{}}
)");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("csv attributes fold into attrs, empty cells are absent") {
  std::istringstream in(
      "id,sequence_id,map_id,x,y,t,keyframe,weather,tod\n"
      "a,q,m,1.5,2,10,true,rain,\n"
      "b,q,m,2.5,2,20,false,,night\n");
  const auto ds = parse_samples(in, SampleFormat::csv);
  CHECK(ds[0].attrs == std::map<std::string, std::string>{{"weather", "rain"}});
  CHECK(ds[1].attrs == std::map<std::string, std::string>{{"tod", "night"}});
  CHECK_FALSE(ds[1].keyframe);
}

TEST_CASE("round trip through both formats") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto ds = testsupport::random_dataset(rng, 200, 3, 500.0, true);
    for (auto fmt : {SampleFormat::jsonl, SampleFormat::csv}) {
      std::stringstream buf;
      write_samples(buf, ds, fmt);
      const auto back = parse_samples(buf, fmt);
      CHECK(back == ds);
    }
  }
}

TEST_CASE("resampling") {
  std::vector<Sample> s;
  for (int i = 0; i < 10; ++i) s.push_back(sample("a" + std::to_string(i), "q", "m", i, 0, i, i % 3 == 0));
  const Dataset ds(s);
  const auto nth = resample_sequences(ds, ResampleMode::every_nth(4));
  REQUIRE(nth.size() == 3);
  CHECK(nth[0].id == "a0");
  CHECK(nth[1].id == "a4");
  CHECK(nth[2].id == "a8");
  CHECK(resample_sequences(ds, ResampleMode::every_nth(1)) == ds);
  CHECK(resample_sequences(ds, ResampleMode::all()) == ds);

  std::vector<Sample> k;
  for (int i = 0; i < 20; ++i) k.push_back(sample("k" + std::to_string(i), "q", "m", 0, 0, i, i < 8));
  CHECK(resample_sequences(Dataset(k), ResampleMode::keyframes_only()).size() == 8);
}

TEST_CASE("every_nth keeps ceil(L/n) per sequence") {
  std::mt19937_64 rng(3);
  const auto ds = testsupport::random_dataset(rng, 500, 2);
  for (std::size_t n : {1u, 2u, 3u, 4u, 7u}) {
    const auto out = resample_sequences(ds, ResampleMode::every_nth(n));
    for (const auto& [seq, idx] : ds.sequences()) {
      const auto it = out.sequences().find(seq);
      REQUIRE(it != out.sequences().end());
      CHECK(it->second.size() == (idx.size() + n - 1) / n);
    }
  }
}

TEST_CASE("map elements") {
  std::istringstream in(
      R"({"frame_id":"f1","class":"divider","points":[[0,0],[1,0]]}
{"frame_id":"f1","class":"crossing","points":[[0,0],[0,1],[1,1]]}
{"frame_id":"f2","class":"boundary","points":[[0,0],[2,0]]}
)");
  const auto el = parse_map_elements(in, false);
  REQUIRE(el.size() == 2);
  CHECK(el.at("f1").size() == 2);
  CHECK(el.at("f2").size() == 1);
  CHECK(el.at("f1")[1].cls == ElementClass::crossing);

  std::istringstream one_point(R"({"frame_id":"f","class":"divider","points":[[0,0]]})");
  CHECK(kind_of([&] { parse_map_elements(one_point, false); }) == ErrorKind::degenerate_polyline);
  std::istringstream no_conf(R"({"frame_id":"f","class":"divider","points":[[0,0],[1,1]]})");
  CHECK(kind_of([&] { parse_map_elements(no_conf, true); }) == ErrorKind::missing_confidence);
  std::istringstream bad_class(R"({"frame_id":"f","class":"lane","points":[[0,0],[1,1]]})");
  CHECK(kind_of([&] { parse_map_elements(bad_class, false); }) == ErrorKind::parse);

  std::stringstream buf;
  write_map_elements(buf, el);
  CHECK(parse_map_elements(buf, false) == el);
}
