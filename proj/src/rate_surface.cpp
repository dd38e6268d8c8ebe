#include "rsim/rate_surface.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

#include "rsim/channel.hpp"

namespace rsim {
namespace {

struct CubicWeights {
  double w[4];
};

// Catmull-Rom weights for offsets -1, 0, 1, 2 at fraction t.
CubicWeights catmull_rom(double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return {{0.5 * (-t3 + 2.0 * t2 - t), 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
           0.5 * (-3.0 * t3 + 4.0 * t2 + t), 0.5 * (t3 - t2)}};
}

// Row index with mirroring at a = 0 (the surfaces depend on |h_hat|^2, so
// they are even in the magnitude) and clamping at the far edge.
int mirror_row(int i, int rows) {
  if (i < 0) return -i;
  return std::min(i, rows - 1);
}

}  // namespace

RateSurface::RateSurface(const RateSurfaceKey& key) : key_(key) {
  if (!(key.rho >= 0.0 && key.rho <= 1.0))
    throw std::invalid_argument("csi accuracy rho must lie in [0, 1]");
  if (!(key.i_max > 0.0) || !(key.p_peak > 0.0))
    throw std::invalid_argument("i_max and p_peak must be positive");
  if (perfect()) return;

  // Two spare rows past kMaxMagnitude give the cubic a full stencil there.
  rows_ = static_cast<int>(std::lround(kMaxMagnitude / kMagnitudeStep)) + 3;
  log_p_hi_ = std::log(key.p_peak);
  log_p_lo_ = std::log(key.p_peak * kMinPowerFraction);
  cols_ = static_cast<int>(std::ceil((log_p_hi_ - log_p_lo_) / kLogPowerStep)) + 1;

  const double mean_scale = std::sqrt(key.rho);
  const double variance = 1.0 - key.rho;
  const double x_hi =
      std::pow(mean_scale * (rows_ - 1) * kMagnitudeStep + 10.0 * std::sqrt(variance), 2) +
      1.0;
  log_x_lo_ = std::log(kMinTailArg);
  log_x_step_ = (std::log(x_hi) - log_x_lo_) / (kTailColumns - 1);

  tail_table_.resize(static_cast<std::size_t>(rows_) * kTailColumns);
  rate_table_.resize(static_cast<std::size_t>(rows_) * cols_);
  goodput_table_.resize(static_cast<std::size_t>(rows_) * cols_);
  const double log_p_step = (log_p_hi_ - log_p_lo_) / (cols_ - 1);

  for (int grid : {128, 512, 2048}) {
    auto& v = grid == 128 ? log_x0_128_ : grid == 512 ? log_x0_512_ : log_x0_2048_;
    v.resize(grid);
    const double step = key.i_max / (grid - 1);
    for (int k = 0; k < grid; ++k)
      v[k] = std::log(std::expm1(k * step * std::numbers::ln2));
  }

  for (int i = 0; i < rows_; ++i) {
    const double a = i * kMagnitudeStep;
    double* tail_row = &tail_table_[static_cast<std::size_t>(i) * kTailColumns];
    for (int k = 0; k < kTailColumns; ++k)
      tail_row[k] =
          rician_tail(std::exp(log_x_lo_ + k * log_x_step_), mean_scale * a, variance);
  }
  for (int i = 0; i < rows_; ++i) {
    const double a = i * kMagnitudeStep;
    for (int j = 0; j < cols_; ++j) {
      const double p = std::exp(log_p_lo_ + j * log_p_step);
      const std::size_t idx = static_cast<std::size_t>(i) * cols_ + j;
      rate_table_[idx] =
          expected_mutual_info_mag(a, p, key.rho, key.i_max, key.nodes);
      goodput_table_[idx] = grid_best_rate(a, p, log_x0_128_).goodput;
    }
  }
}

std::shared_ptr<const RateSurface> RateSurface::shared(const RateSurfaceKey& key) {
  static std::mutex mu;
  static std::map<RateSurfaceKey, std::shared_ptr<const RateSurface>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[key];
  if (!slot) slot = std::make_shared<const RateSurface>(key);
  return slot;
}

double RateSurface::table_lookup(const std::vector<double>& table, double a,
                                 double log_power) const {
  const double fa = a / kMagnitudeStep;
  const int ia = std::min(static_cast<int>(fa), rows_ - 2);
  const double ta = fa - ia;
  const double log_p_step = (log_p_hi_ - log_p_lo_) / (cols_ - 1);
  const double fp = (log_power - log_p_lo_) / log_p_step;
  const int ip = std::clamp(static_cast<int>(fp), 0, cols_ - 2);
  const double tp = fp - ip;
  const auto wa = catmull_rom(ta);
  const auto wp = catmull_rom(tp);

  auto at = [&](int r, int c) {
    // Linear extrapolation for the ghost columns beyond the power range.
    if (c < 0)
      return 2.0 * table[static_cast<std::size_t>(r) * cols_] -
             table[static_cast<std::size_t>(r) * cols_ + 1];
    if (c >= cols_)
      return 2.0 * table[static_cast<std::size_t>(r) * cols_ + cols_ - 1] -
             table[static_cast<std::size_t>(r) * cols_ + cols_ - 2];
    return table[static_cast<std::size_t>(r) * cols_ + c];
  };

  double value = 0.0;
  for (int di = 0; di < 4; ++di) {
    const int r = mirror_row(ia + di - 1, rows_);
    double row = 0.0;
    for (int dj = 0; dj < 4; ++dj) row += wp.w[dj] * at(r, ip + dj - 1);
    value += wa.w[di] * row;
  }
  return value;
}

double RateSurface::tail_lookup_log(double a, double log_x) const {
  const double fa = a / kMagnitudeStep;
  const int ia = std::min(static_cast<int>(fa), rows_ - 2);
  const auto wa = catmull_rom(fa - ia);
  const double lx = (log_x - log_x_lo_) / log_x_step_;
  double value = 0.0;
  if (lx < 0.0) {
    // Below the first column the tail is linear in x down to 1 at x = 0.
    const double frac = std::exp(log_x) / kMinTailArg;
    for (int di = 0; di < 4; ++di) {
      const double first =
          tail_table_[static_cast<std::size_t>(mirror_row(ia + di - 1, rows_)) *
                      kTailColumns];
      value += wa.w[di] * (1.0 - (1.0 - first) * frac);
    }
    return std::clamp(value, 0.0, 1.0);
  }
  const int k = static_cast<int>(lx);
  if (k >= kTailColumns - 1) return 0.0;
  const double t = lx - k;
  for (int di = 0; di < 4; ++di) {
    const double* row =
        &tail_table_[static_cast<std::size_t>(mirror_row(ia + di - 1, rows_)) *
                     kTailColumns];
    value += wa.w[di] * ((1.0 - t) * row[k] + t * row[k + 1]);
  }
  return std::clamp(value, 0.0, 1.0);
}

double RateSurface::tail_lookup(double a, double x) const {
  if (x <= 0.0) return 1.0;
  return tail_lookup_log(a, std::log(x));
}

RateChoice RateSurface::grid_best_rate(double a, double power,
                                       const std::vector<double>& log_x0) const {
  const int grid = static_cast<int>(log_x0.size());
  const double step = key_.i_max / (grid - 1);
  const double log_p = std::log(power);

  const double fa = a / kMagnitudeStep;
  const int ia = std::min(static_cast<int>(fa), rows_ - 2);
  const auto wa = catmull_rom(fa - ia);
  const double* rows[4];
  for (int di = 0; di < 4; ++di)
    rows[di] = &tail_table_[static_cast<std::size_t>(mirror_row(ia + di - 1, rows_)) *
                            kTailColumns];

  int best = 0;
  double best_val = 0.0;
  for (int k = 1; k < grid; ++k) {
    const double lx = (log_x0[k] - log_p - log_x_lo_) / log_x_step_;
    double tail_value;
    if (lx < 0.0) {
      tail_value = tail_lookup_log(a, log_x0[k] - log_p);
    } else {
      const int c = static_cast<int>(lx);
      if (c >= kTailColumns - 1) break;  // tail is zero from here on
      const double t = lx - c;
      double v = 0.0;
      for (int di = 0; di < 4; ++di)
        v += wa.w[di] * (rows[di][c] + t * (rows[di][c + 1] - rows[di][c]));
      tail_value = std::clamp(v, 0.0, 1.0);
    }
    const double v = k * step * tail_value;
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  if (best == 0) return {};
  auto goodput = [&](double r) {
    return r * tail(a, std::expm1(r * std::numbers::ln2) / power);
  };
  const double lo = (best - 1) * step;
  const double hi = best + 1 < grid ? (best + 1) * step : key_.i_max;
  const double r = golden_section_max(goodput, lo, hi, 1e-9 * key_.i_max);
  const double v = goodput(r);
  if (v >= best_val) return {r, v};
  return {best * step, best_val};
}

double RateSurface::expected_rate(double a, double power) const {
  if (!(power >= 0.0)) throw std::invalid_argument("power must be >= 0");
  if (power == 0.0) return 0.0;
  if (perfect()) return mutual_info_gain(a * a, power, key_.i_max);
  if (a > kMaxMagnitude || power > key_.p_peak * (1.0 + 1e-12))
    return expected_mutual_info_mag(a, power, key_.rho, key_.i_max, key_.nodes);
  const double lp = std::log(power);
  if (lp < log_p_lo_) {
    // Below the tabulated range the rate is linear in P to first order.
    return table_lookup(rate_table_, a, log_p_lo_) * power /
           std::exp(log_p_lo_);
  }
  return std::max(0.0, table_lookup(rate_table_, a, lp));
}

double RateSurface::tail(double a, double x) const {
  if (perfect()) return a * a > x ? 1.0 : 0.0;
  if (a > kMaxMagnitude) return rician_tail(x, std::sqrt(key_.rho) * a, 1.0 - key_.rho);
  return tail_lookup(a, x);
}

double RateSurface::goodput(double a, double power) const {
  if (!(power >= 0.0)) throw std::invalid_argument("power must be >= 0");
  if (power == 0.0) return 0.0;
  if (perfect()) return mutual_info_gain(a * a, power, key_.i_max);
  if (a > kMaxMagnitude || power > key_.p_peak * (1.0 + 1e-12))
    return best_rate(a, power, 512).goodput;
  const double lp = std::log(power);
  if (lp < log_p_lo_)
    return table_lookup(goodput_table_, a, log_p_lo_) * power /
           std::exp(log_p_lo_);
  return std::max(0.0, table_lookup(goodput_table_, a, lp));
}

RateChoice RateSurface::best_rate(double a, double power, int grid) const {
  if (!(power > 0.0)) return {};
  if (perfect()) {
    const double r = mutual_info_gain(a * a, power, key_.i_max);
    return {r, r};
  }
  if (a <= kMaxMagnitude && grid == 2048)
    return grid_best_rate(a, power, log_x0_2048_);
  if (a <= kMaxMagnitude && grid == 512)
    return grid_best_rate(a, power, log_x0_512_);
  return maximize_goodput([&](double x) { return tail(a, x); }, power,
                          key_.i_max, grid);
}

}  // namespace rsim
