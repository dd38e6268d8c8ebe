// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every run uses the default 1e6-slot horizon.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rsim/engine.hpp"
#include "rsim/results_io.hpp"
#include "rsim/selftest.hpp"

using namespace rsim;

namespace {

const std::vector<std::uint64_t> kSeeds{1, 2, 3};
constexpr double kK = 10.0;

struct Outcome {
  std::string id;
  bool pass;
  std::string detail;
};

std::vector<Outcome> outcomes;
std::vector<MetricsReport> all_runs;
std::string csv_dir;

void report(const std::string& id, bool pass, const std::string& detail) {
  outcomes.push_back({id, pass, detail});
  std::cout << (pass ? "PASS " : "FAIL ") << id << ": " << detail << std::endl;
}

unsigned threads() {
  const char* env = std::getenv("RATELESS_SIM_THREADS");
  return env && *env ? static_cast<unsigned>(std::stoul(env)) : 0;
}

ExperimentConfig base_config() {
  ExperimentConfig c;
  c.s_users = 3;
  c.rho = 0.8;
  c.l_av = 10;
  c.k = kK;
  c.v = 1e4 * kK;
  c.t_slots = 1000000;
  return c;
}

std::vector<MetricsReport> do_sweep(const std::string& name, const ExperimentConfig& base,
                                    SweepAxis axis, std::vector<double> values,
                                    std::vector<Strategy> strategies) {
  SweepSpec spec;
  spec.axis = axis;
  spec.values = std::move(values);
  spec.seeds = kSeeds;
  spec.strategies = std::move(strategies);
  spec.threads = threads();
  auto reps = sweep(base, spec);
  all_runs.insert(all_runs.end(), reps.begin(), reps.end());
  if (!csv_dir.empty()) {
    std::ofstream(csv_dir + "/" + name + ".csv") << results_csv(reps);
  }
  return reps;
}

// Seed-mean of a metric keyed by (strategy, axis value).
template <class F>
std::map<std::pair<Strategy, double>, double> seed_mean(const std::vector<MetricsReport>& reps,
                                                        F metric) {
  std::map<std::pair<Strategy, double>, double> sum;
  std::map<std::pair<Strategy, double>, int> n;
  for (const auto& r : reps) {
    const auto key = std::make_pair(r.config.strategy, r.axis_value);
    sum[key] += metric(r);
    ++n[key];
  }
  for (auto& [key, v] : sum) v /= n[key];
  return sum;
}

double utility_of(const MetricsReport& r) { return r.total_utility; }

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

bool same_report(const MetricsReport& a, const MetricsReport& b) {
  return a.total_utility == b.total_utility && a.per_user_throughput == b.per_user_throughput &&
         a.delivered_throughput == b.delivered_throughput &&
         a.spectral_efficiency_total == b.spectral_efficiency_total &&
         a.avg_power == b.avg_power && a.avg_block_size == b.avg_block_size &&
         a.ack_fraction == b.ack_fraction && a.max_queue == b.max_queue &&
         a.max_z == b.max_z && a.ack_count == b.ack_count &&
         a.scheduled_count == b.scheduled_count && a.outage_count == b.outage_count &&
         a.queue_bound_violations == b.queue_bound_violations &&
         a.power_support_violations == b.power_support_violations &&
         a.negativity_violations == b.negativity_violations && a.failed == b.failed &&
         results_csv({a}) == results_csv({b});
}

void block_size_runs() {
  const std::vector<double> l_values{1, 2, 5, 10, 20};
  const auto nca = do_sweep("fig2_nca", base_config(), SweepAxis::l_av, l_values, {Strategy::nca});
  // Fixed-rate coding has no block-size parameter, so one run per seed
  // serves every L_av point.
  auto fixed_base = base_config();
  fixed_base.strategy = Strategy::fixed_rate;
  const auto fixed = do_sweep("fig2_fixed_rate", fixed_base, SweepAxis::l_av, {10},
                              {Strategy::fixed_rate});

  double worst_block = 0.0, worst_ack = -1.0, worst_power = 0.0, worst_feedback = 0.0;
  for (const auto& r : nca) {
    const double l = r.config.l_av;
    if (l < 2) continue;
    for (double b : r.avg_block_size) worst_block = std::max(worst_block, std::abs(b - l) / l);
    worst_ack = std::max(worst_ack, r.ack_fraction - (1.0 / l + 0.01));
    worst_power = std::max(worst_power, r.avg_power / r.config.p_av);
    worst_feedback = std::max(worst_feedback, static_cast<double>(r.ack_count) /
                                                  (static_cast<double>(r.scheduled_count) / l));
  }
  report("block_size_convergence", worst_block <= 0.02,
         "max |avg block - L_av| / L_av = " + num(worst_block) + " (limit 0.02)");
  report("ack_fraction", worst_ack <= 0.0,
         "max ack_fraction - (1/L_av + 0.01) = " + num(worst_ack) + " (limit 0)");
  report("power_constraint", worst_power <= 1.02,
         "max avg_power / P_av = " + num(worst_power) + " (limit 1.02)");
  report("feedback_accounting", worst_feedback <= 1.05,
         "max ack_count / (scheduled / L_av) = " + num(worst_feedback) + " (limit 1.05)");

  const auto u = seed_mean(nca, utility_of);
  double fixed_u = 0.0;
  for (const auto& r : fixed) fixed_u += r.total_utility / fixed.size();
  bool monotone = true, beats_fixed = true;
  std::string curve;
  for (std::size_t i = 0; i < l_values.size(); ++i) {
    const double cur = u.at({Strategy::nca, l_values[i]});
    curve += (i ? ", " : "") + num(cur);
    if (i > 0) {
      const double prev = u.at({Strategy::nca, l_values[i - 1]});
      monotone = monotone && cur >= prev - 0.01 * std::abs(prev);
    }
    if (l_values[i] >= 2) beats_fixed = beats_fixed && cur >= fixed_u;
  }
  report("fig2_shape", monotone && beats_fixed,
         "NCA utility over L_av {1,2,5,10,20}: " + curve + "; fixed-rate " + num(fixed_u));
}

void fig1() {
  const std::vector<double> v_values{1e2 * kK, 1e3 * kK, 1e4 * kK, 1e5 * kK};
  const auto reps = do_sweep("fig1", base_config(), SweepAxis::v, v_values,
                             {Strategy::nca, Strategy::genie, Strategy::fixed_rate});
  const auto u = seed_mean(reps, utility_of);
  auto nca = [&](int i) { return u.at({Strategy::nca, v_values[i]}); };
  const bool rising = nca(0) < nca(1) && nca(1) < nca(2);
  const double plateau = std::abs(nca(3) - nca(2)) / std::abs(nca(2));
  const double g = u.at({Strategy::genie, v_values[3]});
  const double f = u.at({Strategy::fixed_rate, v_values[3]});
  const bool order = g >= nca(3) && nca(3) >= f;
  report("fig1_shape", rising && plateau < 0.03 && order,
         "NCA utility over V/K {1e2,1e3,1e4,1e5}: " + num(nca(0)) + ", " + num(nca(1)) + ", " +
             num(nca(2)) + ", " + num(nca(3)) + "; change 1e4K->1e5K " + num(plateau) +
             "; at 1e5K genie " + num(g) + " >= NCA " + num(nca(3)) + " >= fixed " + num(f));
}

void fig3() {
  auto base = base_config();
  base.rho1_encoding_fix = true;
  const auto reps = do_sweep("fig3", base, SweepAxis::rho, {0.0, 1.0},
                             {Strategy::nca, Strategy::genie, Strategy::fixed_rate});
  const auto se = seed_mean(reps, [](const MetricsReport& r) { return r.spectral_efficiency_total; });
  const double ratio = se.at({Strategy::nca, 0.0}) / se.at({Strategy::fixed_rate, 0.0});
  const auto u = seed_mean(reps, utility_of);
  const double a = u.at({Strategy::nca, 1.0});
  const double b = u.at({Strategy::genie, 1.0});
  const double c = u.at({Strategy::fixed_rate, 1.0});
  const double spread = std::max({a, b, c}) / std::min({a, b, c}) - 1.0;
  report("fig3_endpoints", ratio >= 1.4 && ratio <= 2.0 && spread <= 0.02,
         "rho=0 spectral efficiency NCA " + num(se.at({Strategy::nca, 0.0})) + " / fixed " +
             num(se.at({Strategy::fixed_rate, 0.0})) + " = " + num(ratio) +
             " (range [1.4, 2.0]); rho=1 utilities NCA " + num(a) + ", genie " + num(b) +
             ", fixed " + num(c) + ", spread " + num(spread) + " (limit 0.02)");
}

void fig4() {
  const std::vector<double> s_values{1, 2, 4, 8};
  const auto reps = do_sweep("fig4", base_config(), SweepAxis::s_users, s_values,
                             {Strategy::nca, Strategy::genie, Strategy::fixed_rate});
  const auto u = seed_mean(reps, utility_of);
  bool ok = true;
  std::string detail;
  for (auto st : {Strategy::nca, Strategy::genie, Strategy::fixed_rate}) {
    detail += std::string(detail.empty() ? "" : "; ") + to_string(st) + ":";
    for (std::size_t i = 0; i < s_values.size(); ++i) {
      detail += " " + num(u.at({st, s_values[i]}));
      if (i > 0) ok = ok && u.at({st, s_values[i]}) >= u.at({st, s_values[i - 1]});
    }
  }
  report("fig4_shape", ok, "utility over S {1,2,4,8} " + detail);
}

void determinism() {
  bool ok = true;
  for (auto st : {Strategy::nca, Strategy::genie, Strategy::fixed_rate}) {
    auto c = base_config();
    c.strategy = st;
    c.seed = 7;
    const auto a = run(c);
    const auto b = run(c);
    all_runs.push_back(a);
    ok = ok && same_report(a, b);
  }
  report("determinism", ok, "three strategies re-run with seed 7 give identical reports");
}

void selftest() {
  SelftestOptions opt;
  bool ok = true;
  std::string detail;
  for (const auto& r : run_selftest(opt)) {
    ok = ok && r.passed;
    detail += std::string(detail.empty() ? "" : "; ") + (r.passed ? "" : "FAILED ") + r.name +
              " (" + r.detail + ")";
  }
  report("selftest_oracles", ok, detail);
}

void queue_bound() {
  std::uint64_t bound = 0, other = 0, failed = 0;
  for (const auto& r : all_runs) {
    bound += r.queue_bound_violations;
    other += r.power_support_violations + r.negativity_violations;
    failed += r.failed;
  }
  report("queue_bound", bound == 0 && other == 0 && failed == 0,
         std::to_string(all_runs.size()) + " runs, " + std::to_string(bound) +
             " queue-bound violations, " + std::to_string(other) + " other violations, " +
             std::to_string(failed) + " failed runs");
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--csv-dir") == 0 && i + 1 < argc) {
      csv_dir = argv[++i];
      std::filesystem::create_directories(csv_dir);
    } else {
      std::cerr << "usage: acceptance [--csv-dir DIR]\n";
      return 2;
    }
  }
  try {
    selftest();
    block_size_runs();
    fig1();
    fig3();
    fig4();
    determinism();
    queue_bound();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  const auto failed = std::count_if(outcomes.begin(), outcomes.end(),
                                    [](const Outcome& o) { return !o.pass; });
  std::cout << outcomes.size() - failed << "/" << outcomes.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
