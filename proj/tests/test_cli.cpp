#include <algorithm>
#include <stdexcept>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rsim/config_io.hpp"
#include "rsim/results_io.hpp"

using namespace rsim;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

MetricsReport short_run(Strategy s, std::size_t users = 2) {
  ExperimentConfig c;
  c.strategy = s;
  c.s_users = users;
  c.t_slots = 2000;
  c.seed = 5;
  return run(c);
}

}  // namespace

TEST_CASE("config file parsing") {
  const auto f = parse_config(
      "# comment line\n"
      "strategy = genie   # trailing comment\n"
      "\n"
      "s_users=4\n"
      "rho = 0.5\n"
      "rho1_encoding_fix = true\n"
      "axis = rho\n"
      "values = 0, 0.5, 1\n"
      "seeds = 7,8\n"
      "strategies = nca, fixed_rate\n");
  CHECK(f.config.strategy == Strategy::genie);
  CHECK(f.config.s_users == 4);
  CHECK(f.config.rho == 0.5);
  CHECK(f.config.rho1_encoding_fix);
  CHECK(f.has_axis);
  CHECK(f.sweep.axis == SweepAxis::rho);
  CHECK(f.sweep.values == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(f.sweep.seeds == std::vector<std::uint64_t>{7, 8});
  CHECK(f.config.seed == 7);
  CHECK(f.sweep.strategies == std::vector<Strategy>{Strategy::nca, Strategy::fixed_rate});
}

TEST_CASE("config errors name the problem") {
  CHECK_THROWS_WITH_AS(parse_config("bogus = 1\n"), doctest::Contains("unknown config key"),
                       std::invalid_argument);
  CHECK_THROWS_AS(parse_config("rho 0.5\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("rho = abc\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("s_users = -2\n"), std::invalid_argument);
  CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), std::runtime_error);
}

TEST_CASE("overrides apply after the file and the last one wins") {
  auto f = parse_config("rho = 0.2\nv = 5\n");
  apply_overrides(f, {"rho=0.4", "v=7", "rho=0.9"});
  CHECK(f.config.rho == 0.9);
  CHECK(*f.config.v == 7.0);
  CHECK_THROWS_AS(apply_overrides(f, {"nonsense=1"}), std::invalid_argument);
  CHECK_THROWS_AS(apply_overrides(f, {"rho"}), std::invalid_argument);
}

TEST_CASE("CSV layout") {
  const std::vector<MetricsReport> reps{short_run(Strategy::nca)};
  const std::string csv = results_csv(reps);
  std::stringstream ss(csv);
  std::string header, row, extra;
  std::getline(ss, header);
  std::getline(ss, row);
  CHECK_FALSE(std::getline(ss, extra));
  const auto cols = split(header);
  const std::vector<std::string> leading{
      "strategy", "s_users", "v", "l_av", "rho", "seed", "t_slots", "total_utility",
      "spectral_efficiency_total", "throughput_1", "throughput_2", "avg_power",
      "avg_block_size_1", "avg_block_size_2", "ack_fraction", "max_queue_1",
      "max_queue_2", "violations"};
  REQUIRE(cols.size() > leading.size());
  CHECK(std::vector<std::string>(cols.begin(), cols.begin() + leading.size()) == leading);
  const auto cells = split(row);
  CHECK(cells[0] == "nca");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", reps[0].total_utility);
  CHECK(cells[7] == buf);
}

TEST_CASE("CSV pads rows with fewer users") {
  const std::vector<MetricsReport> reps{short_run(Strategy::nca, 1), short_run(Strategy::genie, 3)};
  std::stringstream ss(results_csv(reps));
  std::string header, row1;
  std::getline(ss, header);
  std::getline(ss, row1);
  const auto cols = split(header);
  const auto it = std::find(cols.begin(), cols.end(), "throughput_3");
  REQUIRE(it != cols.end());
  std::vector<std::string> cells;
  std::stringstream rs(row1);
  for (std::string c; std::getline(rs, c, ',');) cells.push_back(c);
  CHECK(cells[it - cols.begin()].empty());
}

TEST_CASE("JSON round trip is exact") {
  const std::vector<MetricsReport> reps{short_run(Strategy::nca), short_run(Strategy::fixed_rate)};
  const auto text = results_json(reps).dump();
  const auto back = reports_from_json(nlohmann::ordered_json::parse(text));
  REQUIRE(back.size() == reps.size());
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& a = reps[i];
    const auto& b = back[i];
    CHECK(a.total_utility == b.total_utility);
    CHECK(a.per_user_throughput == b.per_user_throughput);
    CHECK(a.delivered_throughput == b.delivered_throughput);
    CHECK(a.avg_block_size == b.avg_block_size);
    CHECK(a.max_queue == b.max_queue);
    CHECK(a.avg_power == b.avg_power);
    CHECK(a.ack_fraction == b.ack_fraction);
    CHECK(a.spectral_efficiency_total == b.spectral_efficiency_total);
    CHECK(a.max_z == b.max_z);
    CHECK(a.ack_count == b.ack_count);
    CHECK(a.violations() == b.violations());
    CHECK(a.config.strategy == b.config.strategy);
    CHECK(a.config.seed == b.config.seed);
    CHECK(*a.config.v == *b.config.v);
    CHECK(*a.config.p_peak == *b.config.p_peak);
    CHECK(*a.config.delta == *b.config.delta);
    // The echoed config reproduces the run.
    const auto rerun = run(b.config);
    CHECK(rerun.total_utility == a.total_utility);
  }
  // Column order in the JSON mirrors the CSV.
  const auto obj = results_json(reps)[0];
  std::vector<std::string> keys;
  for (auto it = obj.begin(); it != obj.end(); ++it) keys.push_back(it.key());
  CHECK(keys == result_columns(2));
}

TEST_CASE("write_results errors") {
  CHECK_THROWS_AS(write_results({}, "/tmp/x.csv", OutputFormat::csv), std::invalid_argument);
  CHECK_THROWS_AS(write_results({short_run(Strategy::nca)}, "/nonexistent/dir/x.csv",
                                OutputFormat::csv),
                  std::runtime_error);
}
