#include <stdexcept>
#include <cmath>
#include <cstring>

#include "doctest.h"
#include "rsim/engine.hpp"

using namespace rsim;

namespace {

bool same_report(const MetricsReport& a, const MetricsReport& b) {
  return a.total_utility == b.total_utility && a.per_user_throughput == b.per_user_throughput &&
         a.delivered_throughput == b.delivered_throughput &&
         a.spectral_efficiency_total == b.spectral_efficiency_total &&
         a.avg_power == b.avg_power && a.avg_block_size == b.avg_block_size &&
         a.ack_fraction == b.ack_fraction && a.max_queue == b.max_queue &&
         a.max_z == b.max_z && a.ack_count == b.ack_count &&
         a.scheduled_count == b.scheduled_count && a.outage_count == b.outage_count &&
         a.violations() == b.violations() && a.failed == b.failed;
}

}  // namespace

TEST_CASE("derived defaults") {
  const auto c = ExperimentConfig{}.resolved();
  CHECK(*c.v == 1e4 * c.k);
  CHECK(*c.p_peak == doctest::Approx(4.0 * std::pow(10.0, 1.2)));
  CHECK(*c.delta == doctest::Approx(0.05 * c.i_max * c.l_av * c.k));
  CHECK(*c.eps_power == doctest::Approx(1e-3 * *c.p_peak));
  CHECK(*c.d_cap == c.i_max * c.k);
  CHECK(*c.utility_scale == c.k);
  CHECK(c.utility_spec().slope_at_zero() == doctest::Approx(1.0 / c.k));
}

TEST_CASE("invalid configs are rejected") {
  ExperimentConfig c;
  c.rho = 1.2;
  CHECK_THROWS_AS(c.resolved(), std::invalid_argument);
  c = {};
  c.p_peak = 1.0;
  CHECK_THROWS_AS(c.resolved(), std::invalid_argument);
  c = {};
  c.warmup_fraction = 1.0;
  CHECK_THROWS_AS(c.resolved(), std::invalid_argument);
  CHECK_THROWS_AS(strategy_from_string("hybrid"), std::invalid_argument);
  CHECK_THROWS_AS(utility_kind_from_string("sqrt"), std::invalid_argument);
}

TEST_CASE("empty horizon gives an empty report") {
  ExperimentConfig c;
  c.t_slots = 0;
  const auto rep = run(c);
  CHECK(rep.total_utility == 0.0);
  CHECK(rep.avg_power == 0.0);
  CHECK(rep.ack_fraction == 0.0);
  CHECK(rep.per_user_throughput == std::vector<double>(3, 0.0));
  CHECK_FALSE(rep.failed);
}

TEST_CASE("runs are deterministic, down to the slot log") {
  ExperimentConfig c;
  c.t_slots = 10000;
  c.seed = 99;
  auto logged = [&] {
    std::vector<double> log;
    auto rep = run(c, [&](const SlotRecord& r) {
      log.push_back(r.result->decision.power);
      log.push_back(r.result->decision.scheduled_user ? double(*r.result->decision.scheduled_user) : -1.0);
      log.push_back(r.result->ack.delivered_bits);
      for (const auto& u : r.state->users) {
        log.push_back(u.q);
        log.push_back(u.r);
        log.push_back(u.m);
        log.push_back(u.w);
      }
      log.push_back(r.state->virt.z);
    });
    return std::make_pair(rep, log);
  };
  const auto [a, log_a] = logged();
  const auto [b, log_b] = logged();
  CHECK(same_report(a, b));
  REQUIRE(log_a.size() == log_b.size());
  CHECK(std::memcmp(log_a.data(), log_b.data(), log_a.size() * sizeof(double)) == 0);
}

TEST_CASE("NCA run respects the invariants and the constraints") {
  ExperimentConfig c;
  c.t_slots = 200000;
  const auto rep = run(c);
  CHECK_FALSE(rep.failed);
  CHECK(rep.violations() == 0);
  CHECK(rep.avg_power <= 1.02 * c.p_av);
  CHECK(rep.ack_fraction <= 1.0 / c.l_av + 0.01);
  const double bound = 0.5 * *c.resolved().v / c.k;
  for (std::size_t s = 0; s < 3; ++s) {
    CHECK(rep.max_queue[s] <= bound);
    CHECK(std::abs(rep.avg_block_size[s] - c.l_av) / c.l_av <= 0.05);
  }
  CHECK(rep.max_z > 0.0);
}

TEST_CASE("queue, code index and W replay from the slot log") {
  ExperimentConfig c;
  c.t_slots = 20000;
  c.l_av = 5;
  std::vector<double> q(3, 0.0), w(3, 0.0), delivered(3, 0.0);
  std::vector<std::uint64_t> n(3, 0);
  run(c, [&](const SlotRecord& r) {
    const auto& res = *r.result;
    for (std::size_t s = 0; s < 3; ++s) {
      const bool acked = res.ack.acks(s);
      q[s] = std::max(q[s] - (acked ? res.ack.delivered_bits : 0.0), 0.0) + res.decision.admitted[s];
      if (acked) {
        ++n[s];
        w[s] += double(*res.ack.recorded_block_size) - 5.0;
        delivered[s] += res.ack.delivered_bits;
      }
      const auto& u = r.state->users[s];
      REQUIRE(u.q == q[s]);
      REQUIRE(u.n == n[s]);
      REQUIRE(std::abs(u.w - w[s]) <= 1e-9);
    }
  });
  CHECK(delivered[0] > 0.0);
}

TEST_CASE("sweep cardinality and ordering") {
  ExperimentConfig base;
  base.t_slots = 500;
  SweepSpec spec;
  spec.axis = SweepAxis::rho;
  spec.values = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  spec.seeds = {1, 2};
  spec.strategies = {Strategy::nca, Strategy::genie, Strategy::fixed_rate};
  spec.threads = 2;
  const auto reps = sweep(base, spec);
  REQUIRE(reps.size() == 3 * 6 * 2);
  std::size_t i = 0;
  for (double v : spec.values)
    for (auto seed : spec.seeds)
      for (auto st : spec.strategies) {
        CHECK(reps[i].config.rho == v);
        CHECK(reps[i].axis_value == v);
        CHECK(reps[i].axis == "rho");
        CHECK(reps[i].config.seed == seed);
        CHECK(reps[i].config.strategy == st);
        ++i;
      }
  spec.threads = 1;
  const auto again = sweep(base, spec);
  for (std::size_t j = 0; j < reps.size(); ++j) CHECK(same_report(reps[j], again[j]));
}

TEST_CASE("sweep rejects bad axes and values") {
  CHECK_THROWS_AS(sweep_axis_from_string("k"), std::invalid_argument);
  SweepSpec spec;
  spec.axis = SweepAxis::s_users;
  spec.values = {1.5};
  CHECK_THROWS_AS(sweep(ExperimentConfig{}, spec), std::invalid_argument);
  spec.axis = SweepAxis::rho;
  spec.values = {2.0};
  CHECK_THROWS_AS(sweep(ExperimentConfig{}, spec), std::invalid_argument);
}
