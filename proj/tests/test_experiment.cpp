#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "taxruin/errors.hpp"
#include "taxruin/experiment.hpp"

using namespace taxruin;

namespace {

const char* kMinimal = R"({"model": {"type": "CL", "c": 1.5, "lambda": 1, "mu": 1},
  "policy": {"type": "constant", "gamma": 0}, "u": [2], "estimator": "crude", "n": 10000, "seed": 5})";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("minimal config") {
  const ExperimentConfig cfg = parse_config(kMinimal);
  const ValidationReport r = run_experiment(cfg, 2);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].quantity == "ruin");
  CHECK(r.rows[0].predicted == doctest::Approx((2.0 / 3.0) * std::exp(-2.0 / 3.0)));
  CHECK(r.rows[0].status == "pass");
  CHECK(report_csv(r) == report_csv(run_experiment(cfg, 1)));
  CHECK(report_json(r) == report_json(run_experiment(cfg, 3)));
}

TEST_CASE("report schema is stable") {
  const ExperimentConfig cfg = parse_config(R"({"model": {"type": "CL", "c": 1.5, "lambda": 1, "mu": 1},
    "policy": {"type": "constant", "gamma": 0.5}, "u": [3], "estimator": "tilted", "n": 200, "seed": "0x10",
    "outputs": ["ruin", "tax"]})");
  const std::string golden = read_file(std::filesystem::path(TAXRUIN_TEST_DATA) / "golden_report.json");
  CHECK(report_json(run_experiment(cfg, 1)) == golden);
}

TEST_CASE("reflected case") {
  ExperimentConfig cfg = parse_config(R"({"model": {"type": "CL", "c": 1.5, "lambda": 1, "mu": 1},
    "policy": {"type": "constant", "gamma": 1}, "u": [1], "estimator": "crude", "n": 200, "truncation": 20})");
  const ValidationReport r = run_experiment(cfg, 1);
  REQUIRE_FALSE(r.rows.empty());
  CHECK(r.rows[0].status == "reflected");
  CHECK(r.rows[0].note.find("reflected case") != std::string::npos);
  CHECK(r.all_passed());
}

TEST_CASE("divergent prediction is flagged") {
  const ExperimentConfig cfg = parse_config(R"({"model": {"type": "CL", "c": 1.5, "lambda": 1, "mu": 1},
    "policy": {"type": "example41", "beta": 3}, "u": [2], "n": 200})");
  const ValidationReport r = run_experiment(cfg, 1);
  CHECK(r.rows[0].status == "divergent");
  CHECK(report_csv(r).find(",inf,") != std::string::npos);
}

TEST_CASE("config errors name the field") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const std::string model = R"("model": {"type": "CL", "c": 1.5, "lambda": 1, "mu": 1})";
  CHECK(message("{" + model + R"(, "u": [3, 2]})").find("'u'") != std::string::npos);
  CHECK(message("{" + model + R"(, "u": [1], "n": 50})").find("'n'") != std::string::npos);
  CHECK(message("{" + model + R"(, "u": [1], "seed": "0xZZ"})").find("'seed'") != std::string::npos);
  CHECK(message(R"({"model": {"type": "CL", "c": 1.5, "lambda": 1}, "u": [1]})").find("'model.mu'") !=
        std::string::npos);
  CHECK(message("{" + model + R"(, "u": [1], "policy": {"type": "constant", "gamma": 2}})").find("'policy'") !=
        std::string::npos);
  CHECK(message("not json").find("JSON") != std::string::npos);
  CHECK(parse_config("{" + model + R"(, "u": 1, "seed": "0xffffffffffffffff"})").seed == ~0ull);
}

TEST_CASE("record csv round trip") {
  RunOptions o;
  o.measure = Measure::Q;
  const auto recs = run_batch(ModelSpec::cl(1.5, 1.0, 1.0), TaxPolicy::example41(1.0), 2.0, o, 300, 3, 1);
  std::stringstream s;
  write_records_csv(s, recs);
  CHECK(read_records_csv(s) == recs);
}

TEST_CASE("outputs on disk") {
  ExperimentConfig cfg = parse_config(R"({"model": {"type": "CL", "c": 1.5, "lambda": 1, "mu": 1},
    "policy": {"type": "constant", "gamma": 0.5}, "u": [4], "n": 500, "outputs": ["ruin", "joint"]})");
  const auto dir = std::filesystem::temp_directory_path() / "taxruin_outputs_test";
  std::filesystem::remove_all(dir);
  write_outputs(run_experiment(cfg, 1), dir);
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(read_file(dir / "table.csv").rfind("u,quantity,predicted,estimate,stderr,n,z\n", 0) == 0);
  CHECK(std::filesystem::exists(dir / "hist_u4_overshoot.csv"));
  std::filesystem::remove_all(dir);
}
