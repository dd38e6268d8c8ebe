#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "rsim/quadrature.hpp"

namespace rsim {

/// A code rate (bits/symbol) and its expected goodput r * Pr{success}.
struct RateChoice {
  double rate = 0.0;
  double goodput = 0.0;
};

/// Maximizes r * tail((2^r - 1) / power) over r in [0, i_max] with a dense
/// grid followed by golden-section refinement around the best grid point.
/// The goodput is not concave in r in general, hence the grid.
template <class Tail>
RateChoice maximize_goodput(Tail&& tail, double power, double i_max,
                            int grid = 2048) {
  if (!(power > 0.0)) return {};
  auto goodput = [&](double r) {
    return r * tail(std::expm1(r * std::numbers::ln2) / power);
  };
  const double step = i_max / (grid - 1);
  int best = 0;
  double best_val = 0.0;
  for (int k = 1; k < grid; ++k) {
    const double v = goodput(k * step);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  if (best == 0) return {};
  const double lo = (best - 1) * step;
  const double hi = best + 1 < grid ? (best + 1) * step : i_max;
  const double r = golden_section_max(goodput, lo, hi, 1e-9 * i_max);
  const double v = goodput(r);
  if (v >= best_val) return {r, v};
  return {best * step, best_val};
}

struct RateSurfaceKey {
  double rho = 0.8;
  double i_max = 8.0;
  double p_peak = 63.4;
  int nodes = 64;

  auto operator<=>(const RateSurfaceKey&) const = default;
};

/// Per-run tabulation of the conditional rate functions over
/// (|h_hat|, ln P), built from the exact quadrature and tail so that the
/// per-slot power searches stay cheap. Immutable once built; safe to share
/// between concurrent runs.
///
/// rho = 1 bypasses the tables and uses the degenerate closed forms.
class RateSurface {
 public:
  explicit RateSurface(const RateSurfaceKey& key);

  /// Shared instance per key, built on first use.
  static std::shared_ptr<const RateSurface> shared(const RateSurfaceKey& key);

  const RateSurfaceKey& key() const { return key_; }

  /// E{min(log2(1 + |h|^2 P), i_max) | h_hat}, bits/symbol.
  double expected_rate(double estimate_magnitude, double power) const;
  /// Pr{|h|^2 > x | h_hat}.
  double tail(double estimate_magnitude, double x) const;
  /// max_r r Pr{log2(1 + |h|^2 P) >= r | h_hat}, bits/symbol.
  double goodput(double estimate_magnitude, double power) const;
  /// Goodput-optimal fixed code rate, bits/symbol.
  RateChoice best_rate(double estimate_magnitude, double power,
                       int grid = 2048) const;

  static constexpr double kMaxMagnitude = 5.0;
  static constexpr double kMagnitudeStep = 0.02;
  static constexpr double kLogPowerStep = 0.02;
  static constexpr double kMinPowerFraction = 1e-5;
  static constexpr int kTailColumns = 4096;
  static constexpr double kMinTailArg = 1e-6;

 private:
  bool perfect() const { return key_.rho >= 1.0; }
  double table_lookup(const std::vector<double>& table, double a,
                      double log_power) const;
  double tail_lookup(double a, double x) const;
  double tail_lookup_log(double a, double log_x) const;
  RateChoice grid_best_rate(double a, double power,
                            const std::vector<double>& log_x0) const;

  RateSurfaceKey key_;
  int rows_ = 0;
  int cols_ = 0;
  double log_p_lo_ = 0.0;
  double log_p_hi_ = 0.0;
  std::vector<double> rate_table_;
  std::vector<double> goodput_table_;
  double log_x_lo_ = 0.0;
  double log_x_step_ = 0.0;
  std::vector<double> tail_table_;
  // log(2^r - 1) on the 128-, 512- and 2048-point rate grids.
  std::vector<double> log_x0_128_;
  std::vector<double> log_x0_512_;
  std::vector<double> log_x0_2048_;
};

}  // namespace rsim
