#include "rsim/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "rsim/baselines.hpp"
#include "rsim/channel.hpp"
#include "rsim/controller.hpp"
#include "rsim/engine.hpp"

namespace rsim {
namespace {

constexpr double kPav = 15.848931924611133;
constexpr double kPpeak = 4.0 * kPav;
constexpr double kImax = 8.0;

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

SuiteResult rate_control_suite(const SelftestOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int kGrid = 1000000;
  double worst = 0.0;
  double worst_bisect = 0.0;
  for (int i = 0; i < opt.instances; ++i) {
    const double k = log_uniform(rng, 1.0, 200.0);
    const double v = log_uniform(rng, 1e2 * k, 1e5 * k);
    const bool linear = i % 4 == 3;
    const Utility u{linear ? UtilityKind::linear : UtilityKind::log, linear ? 1.0 / k : k};
    const double q = unit(rng) * 1.2 * u.slope_at_zero() * v / 2.0;
    const double d_cap = kImax * k;
    const double x = rate_control(q, v, u, d_cap);
    const double xb = rate_control_bisection(q, v, u, d_cap);
    double best_x = 0.0;
    double best = -INFINITY;
    for (int j = 0; j < kGrid; ++j) {
      const double xj = d_cap * j / (kGrid - 1);
      const double f = v * u.value(xj) - xj * xj - 2.0 * q * xj;
      if (f > best) {
        best = f;
        best_x = xj;
      }
    }
    worst = std::max(worst, std::abs(x - best_x) / d_cap);
    worst_bisect = std::max(worst_bisect, std::abs(x - xb) / d_cap);
  }
  const bool ok = worst <= 1e-3 && worst_bisect <= 1e-3;
  return {"rate_control vs 1e6-point grid", ok,
          fmt("max |x - x_grid| / d_cap = %.3g, vs bisection %.3g", worst, worst_bisect)};
}

SuiteResult power_suite(const SelftestOptions& opt) {
  std::mt19937_64 rng(opt.seed + 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int kGrid = 10000;
  const double k = 10.0;
  const auto imperfect = RateSurface::shared({0.8, kImax, kPpeak, 64});
  const auto perfect = RateSurface::shared({1.0, kImax, kPpeak, 64});
  double worst = 0.0;
  for (int i = 0; i < opt.instances; ++i) {
    const auto& surface = i % 2 ? *perfect : *imperfect;
    const double q = unit(rng) * 5000.0;
    const double z = i % 10 == 0 ? 0.0 : log_uniform(rng, 1.0, 1e5);
    const double a = 3.0 * unit(rng);
    auto rate = [&](double p) { return surface.expected_rate(a, p); };
    const double p = power_for_user(q, z, k, kPpeak, rate);
    const double f = service_value(q, z, k, p, rate);
    double best = -INFINITY;
    for (int j = 0; j < kGrid; ++j)
      best = std::max(best, service_value(q, z, k, kPpeak * j / (kGrid - 1), rate));
    const double scale =
        std::max(std::abs(best), 1e-12 * (q * k * kImax + z * kPpeak));
    worst = std::max(worst, (best - f) / scale);
  }
  return {"power_for_user vs 1e4-point grid", worst <= 1e-6,
          fmt("max relative objective shortfall = %.3g", worst)};
}

SuiteResult fixed_rate_suite(const SelftestOptions& opt) {
  std::mt19937_64 rng(opt.seed + 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int kGrid = 100000;
  const double k = 10.0;
  double worst = 0.0;
  for (double rho : {0.0, 0.8}) {
    const auto surface = RateSurface::shared({rho, kImax, kPpeak, 64});
    const double mean_scale = std::sqrt(rho);
    for (int i = 0; i < opt.instances / 2; ++i) {
      const double a = 4.0 * unit(rng);
      const double p = log_uniform(rng, 1e-3 * kPpeak, kPpeak);
      auto goodput = [&](double r) {
        return r * rician_tail(std::expm1(r / k * std::numbers::ln2) / p,
                               mean_scale * a, 1.0 - rho);
      };
      const double r_star = fixed_rate_select({a, 0.0}, p, *surface, k);
      double best = 0.0;
      for (int j = 1; j < kGrid; ++j)
        best = std::max(best, goodput(kImax * k * j / (kGrid - 1)));
      worst = std::max(worst, (best - goodput(r_star)) / best);
    }
  }
  return {"fixed_rate_select vs 1e5-point grid", worst <= 1e-4,
          fmt("max relative goodput shortfall = %.3g", worst)};
}

SuiteResult monte_carlo_suite(const SelftestOptions& opt) {
  const double rho = 0.8;
  const double mags[] = {0.0, 0.5, 1.0, 2.0, 3.0};
  const double powers[] = {0.5, 2.0, 8.0, kPav, kPpeak};
  std::mt19937_64 rng(opt.seed + 3);
  std::normal_distribution<double> normal(0.0, std::sqrt((1.0 - rho) / 2.0));
  double worst = 0.0;
  for (double a : mags)
    for (double p : powers) {
      double sum = 0.0;
      double sum2 = 0.0;
      for (std::uint64_t n = 0; n < opt.mc_samples; ++n) {
        const double re = std::sqrt(rho) * a + normal(rng);
        const double im = normal(rng);
        const double i = mutual_info_gain(re * re + im * im, p, kImax);
        sum += i;
        sum2 += i * i;
      }
      const double n = static_cast<double>(opt.mc_samples);
      const double mean = sum / n;
      const double se = std::sqrt(std::max(sum2 / n - mean * mean, 0.0) / n);
      const double quad = expected_mutual_info_mag(a, p, rho, kImax);
      worst = std::max(worst, std::abs(quad - mean) / se);
    }
  return {"expected_mutual_info vs 1e7-sample Monte Carlo (5x5 grid)", worst <= 3.0,
          fmt("max |quadrature - MC| = %.3g standard errors", worst)};
}

SuiteResult surface_suite(const SelftestOptions& opt) {
  std::mt19937_64 rng(opt.seed + 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto surface = RateSurface::shared({0.8, kImax, kPpeak, 64});
  double worst = 0.0;
  for (int i = 0; i < opt.instances; ++i) {
    const double a = 4.0 * unit(rng);
    const double p = log_uniform(rng, 1e-4 * kPpeak, kPpeak);
    worst = std::max(worst, std::abs(surface->expected_rate(a, p) -
                                     expected_mutual_info_mag(a, p, 0.8, kImax)));
  }
  return {"tabulated rate surface vs direct quadrature", worst <= 1e-4,
          fmt("max abs error = %.3g bits/symbol", worst)};
}

SuiteResult replay_suite(const SelftestOptions& opt) {
  ExperimentConfig c;
  c.t_slots = 10000;
  c.seed = opt.seed;
  c.rho = 0.8;
  const ExperimentConfig r = c.resolved();
  const double l_av = r.l_av;
  std::vector<double> q(r.s_users, 0.0);
  std::vector<double> w(r.s_users, 0.0);
  std::vector<std::uint64_t> acks(r.s_users, 0);
  std::uint64_t mismatches = 0;
  run(c, [&](const SlotRecord& rec) {
    const auto& res = *rec.result;
    for (std::size_t s = 0; s < q.size(); ++s) {
      const double served = res.ack.acks(s) ? res.ack.delivered_bits : 0.0;
      q[s] = std::max(q[s] - served, 0.0) + res.decision.admitted[s];
      if (res.ack.acks(s)) {
        ++acks[s];
        w[s] += static_cast<double>(*res.ack.recorded_block_size) - l_av;
      }
      const auto& u = rec.state->users[s];
      if (u.q != q[s] || u.n != acks[s] || std::abs(u.w - w[s]) > 1e-9) ++mismatches;
    }
  });
  return {"encoder/decoder queue replay", mismatches == 0,
          fmt("%.0f mismatching user-slots", static_cast<double>(mismatches))};
}

}  // namespace

std::vector<SuiteResult> run_selftest(const SelftestOptions& options) {
  std::vector<SuiteResult> out;
  for (auto suite : {rate_control_suite, power_suite, fixed_rate_suite,
                     monte_carlo_suite, surface_suite, replay_suite}) {
    out.push_back(suite(options));
    if (options.on_suite) options.on_suite(out.back());
  }
  return out;
}

}  // namespace rsim
