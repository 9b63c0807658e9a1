#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"
#include "mpal/harness.hpp"

using namespace mpal;

namespace {

// Scratch directory unique to this process, removed eagerly by each test
// that writes files.
std::filesystem::path scratch_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("mpal_harness_" + std::to_string(::getpid())) / leaf;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

ExperimentConfig parse_text(const std::string& text) {
  return parse_config(Json::parse(text));
}

}  // namespace

// ---------- canonical JSON ----------

TEST_CASE("json emission is canonical and stable under a round trip") {
  Json j = Json::object();
  j["b_first"] = 1;
  j["a_second"] = Json::array({1.5, Json(nullptr), true, "text"});
  j["nested"] = Json::object();
  j["nested"]["x"] = 0.1;
  j["empty_obj"] = Json::object();
  j["empty_arr"] = Json::array();

  const std::string text = dump_json(j);
  // Insertion order is preserved, floats carry 17 significant digits, empty
  // containers stay inline, and the document ends with a newline.
  CHECK(text.find("\"b_first\"") < text.find("\"a_second\""));
  CHECK(text.find("0.10000000000000001") != std::string::npos);
  CHECK(text.find("\"empty_obj\": {}") != std::string::npos);
  CHECK(text.find("\"empty_arr\": []") != std::string::npos);
  CHECK(text.back() == '\n');
  CHECK(text.find('\t') == std::string::npos);

  const std::string again = dump_json(Json::parse(text));
  CHECK(again == text);
}

TEST_CASE("json emission spells nonfinite values as strings") {
  Json j = Json::object();
  j["inf"] = kInfinity;
  j["neg"] = -kInfinity;
  j["nan"] = std::nan("");
  const std::string text = dump_json(j);
  CHECK(text.find("\"inf\": \"inf\"") != std::string::npos);
  CHECK(text.find("\"neg\": \"-inf\"") != std::string::npos);
  CHECK(text.find("\"nan\": \"nan\"") != std::string::npos);
}

TEST_CASE("json strings escape control characters and quotes") {
  Json j = Json::object();
  j["s"] = std::string("a\"b\\c\nd\te") + '\x01';
  const std::string text = dump_json(j);
  CHECK(text.find("a\\\"b\\\\c\\nd\\te\\u0001") != std::string::npos);
}

// ---------- CSV ----------

TEST_CASE("csv emission uses comma, LF, and a header row") {
  const std::string text =
      csv_string({"a", "b"}, {{csv_cell(1), csv_cell(0.5)}, {csv_cell(2), csv_cell(kInfinity)}});
  CHECK(text == "a,b\n1,0.5\n2,inf\n");
  CHECK(text.find('\r') == std::string::npos);

  CHECK(csv_string({"only"}, {}) == "only\n");
  CHECK_THROWS_AS(csv_string({"a"}, {{"x", "y"}}), InternalError);
  CHECK_THROWS_AS(csv_string({"a"}, {{"with,comma"}}), InternalError);
}

// ---------- disorder round trip ----------

TEST_CASE("disorder realizations round trip through json bit for bit") {
  const std::vector<int> sites{-3, -1, 0, 2, 7};
  const auto piecewise =
      Distribution::piecewise_linear(1.0, {0.0, 0.25, 1.0}, {0.5, 2.0, 0.1});
  for (const Distribution& dist : {Distribution::uniform(1.0), piecewise}) {
    const DisorderRealization real = sample_disorder(977, sites, dist);
    const Json j = disorder_to_json(real);
    const DisorderRealization back = disorder_from_json(j);
    REQUIRE(back.site_values.size() == real.site_values.size());
    for (const auto& [site, value] : real.site_values) {
      REQUIRE(back.site_values.count(site) == 1);
      CHECK(back.site_values.at(site) == value);  // exact, not approximate
    }
    CHECK(back.seed == real.seed);
    // The serialized form parses back to the identical document.
    CHECK(dump_json(disorder_to_json(back)) == dump_json(j));
  }
}

TEST_CASE("disorder import rejects foreign documents") {
  const DisorderRealization real = sample_disorder(1, {0, 1}, Distribution::uniform(1.0));
  Json j = disorder_to_json(real);
  Json wrong_schema = j;
  wrong_schema["schema"] = "mpal.disorder.v9";
  CHECK_THROWS_AS(disorder_from_json(wrong_schema), ConfigError);
  Json extra = j;
  extra["surprise"] = 1;
  CHECK_THROWS_AS(disorder_from_json(extra), ConfigError);
  Json bad_kind = j;
  bad_kind["distribution"]["kind"] = "gaussian";
  CHECK_THROWS_AS(disorder_from_json(bad_kind), ConfigError);
}

// ---------- config parsing ----------

namespace {

const char* kLocalizeText = R"({
  "model": {"particles": 1, "lambdas": [0.0, 10.0], "distribution": {"kind": "uniform", "v_max": 1.0}},
  "geometry": {"center": [0], "L": [3.0]},
  "run": {"experiment": "localize", "trials": 8, "base_seed": 42, "workers": 2, "out": "unused"}
})";

const char* kEmsaText = R"({
  "model": {"particles": 1, "lambda": 5000.0, "distribution": {"kind": "uniform", "v_max": 1.0}},
  "geometry": {"center": [0], "ell": 4.0},
  "msa": {"m": 0.5},
  "run": {"experiment": "emsa", "trials": 2, "base_seed": 7, "out": "unused"}
})";

}  // namespace

TEST_CASE("a full localize config parses with defaults applied") {
  const ExperimentConfig c = parse_text(kLocalizeText);
  CHECK(c.run.kind == ExperimentKind::localize);
  CHECK(c.model.particles == 1);
  REQUIRE(c.model.lambdas.size() == 2);
  CHECK(c.model.lambdas[1] == 10.0);
  REQUIRE(c.geometry.big_l.size() == 1);
  CHECK(c.geometry.big_l[0] == 3.0);
  CHECK(c.run.trials == 8);
  CHECK(c.run.base_seed == 42);
  CHECK(c.run.workers == 2);
  CHECK(c.run.cap == kDefaultDenseCap);
  CHECK(c.msa.beta == 0.3);   // default
  CHECK(c.msa.gamma == 1.5);  // default
  CHECK(c.ell_min == kDefaultEllMin);
}

TEST_CASE("config parsing rejects malformed documents") {
  auto mutate = [](const char* base, auto fn) {
    Json j = Json::parse(base);
    fn(j);
    return j;
  };
  // Unknown keys anywhere are errors.
  CHECK_THROWS_AS(parse_config(mutate(kLocalizeText, [](Json& j) { j["extra"] = 1; })),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config(mutate(kLocalizeText, [](Json& j) { j["model"]["extra"] = 1; })),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config(mutate(kLocalizeText, [](Json& j) { j["run"]["extra"] = 1; })),
      ConfigError);
  // lambda and lambdas are mutually exclusive, and one is required.
  CHECK_THROWS_AS(
      parse_config(mutate(kLocalizeText, [](Json& j) { j["model"]["lambda"] = 1.0; })),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config(mutate(kLocalizeText, [](Json& j) { j["model"].erase("lambdas"); })),
      ConfigError);
  // Trial counts must be positive integers.
  CHECK_THROWS_AS(
      parse_config(mutate(kLocalizeText, [](Json& j) { j["run"]["trials"] = 0; })),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config(mutate(kLocalizeText, [](Json& j) { j["run"]["trials"] = 1.5; })),
      ConfigError);
  // The center must match the particle count.
  CHECK_THROWS_AS(
      parse_config(mutate(kLocalizeText, [](Json& j) { j["geometry"]["center"] = {0, 0}; })),
      ConfigError);
  // MSA parameters go through the usual validation.
  CHECK_THROWS_AS(
      parse_config(mutate(kLocalizeText, [](Json& j) { j["msa"] = {{"gamma", 2.5}}; })),
      ConfigError);
  // Unknown distribution kinds are rejected.
  CHECK_THROWS_AS(parse_config(mutate(kLocalizeText,
                                      [](Json& j) {
                                        j["model"]["distribution"] = {{"kind", "gaussian"}};
                                      })),
                  ConfigError);
  // Interaction displacements must be integer strings.
  CHECK_THROWS_AS(parse_config(mutate(kLocalizeText,
                                      [](Json& j) {
                                        j["model"]["interaction"] = {{"1.5", 0.5}};
                                      })),
                  ConfigError);
  // The experiment name must be known.
  CHECK_THROWS_AS(
      parse_config(mutate(kLocalizeText, [](Json& j) { j["run"]["experiment"] = "solve"; })),
      ConfigError);
}

TEST_CASE("emsa configs derive the big scale and reject an explicit L") {
  const ExperimentConfig c = parse_text(kEmsaText);
  CHECK(c.run.kind == ExperimentKind::emsa);
  CHECK(c.geometry.ell == 4.0);
  CHECK(c.geometry.big_l.empty());
  CHECK(c.emsa.stop_distance == -1.0);
  CHECK(c.emsa.trace_cap == 1000);

  Json with_l = Json::parse(kEmsaText);
  with_l["geometry"]["L"] = 8.0;
  CHECK_THROWS_AS(parse_config(with_l), ConfigError);

  Json two_lambdas = Json::parse(kEmsaText);
  two_lambdas["model"].erase("lambda");
  two_lambdas["model"]["lambdas"] = {1.0, 2.0};
  CHECK_THROWS_AS(parse_config(two_lambdas), ConfigError);
}

TEST_CASE("load_config reports the path on parse and io failures") {
  const auto dir = scratch_dir("load_config");
  const auto good = dir / "good.json";
  write_file(good, kLocalizeText);
  CHECK(load_config(good).run.kind == ExperimentKind::localize);

  const auto bad = dir / "bad.json";
  write_file(bad, "{ not json");
  CHECK_THROWS_WITH(load_config(bad), Catch::Matchers::ContainsSubstring("bad.json"));
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  std::filesystem::remove_all(dir.parent_path());
}

// ---------- worker pool ----------

TEST_CASE("run_indexed is deterministic in the worker count") {
  auto produce = [](std::size_t i) { return static_cast<int>(i * i); };
  const std::vector<int> serial = run_indexed<int>(25, 1, produce);
  for (int workers : {2, 3, 8}) {
    CHECK(run_indexed<int>(25, workers, produce) == serial);
  }
  CHECK(run_indexed<int>(0, 4, produce).empty());
  CHECK_THROWS_AS(run_indexed<int>(4, 0, produce), UsageError);
}

TEST_CASE("run_indexed rethrows the failure of the lowest index") {
  auto failing = [](std::size_t i) -> int {
    if (i % 7 == 3) {
      throw NumericalError("boom at " + std::to_string(i));
    }
    return static_cast<int>(i);
  };
  CHECK_THROWS_WITH(run_indexed<int>(30, 4, failing),
                    Catch::Matchers::ContainsSubstring("boom at 3"));
}
