#include "rsim/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "rsim/quadrature.hpp"

namespace rsim {

void ChannelParams::validate() const {
  if (!(csi_accuracy >= 0.0 && csi_accuracy <= 1.0))
    throw std::invalid_argument("csi accuracy rho must lie in [0, 1]");
  if (!(ar_old_weight >= 0.0 && ar_old_weight <= 1.0) ||
      !(ar_innovation_weight >= 0.0 && ar_innovation_weight <= 1.0))
    throw std::invalid_argument("AR weights must lie in [0, 1]");
  if (std::abs(ar_old_weight + ar_innovation_weight - 1.0) > 1e-12)
    throw std::invalid_argument("AR weights must sum to 1");
}

ComplexGain draw_unit_gaussian(RandomSource& rng) {
  std::normal_distribution<double> normal(0.0, std::numbers::sqrt2 / 2.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

ChannelDraw step_channel_with(const ChannelDraw* prev,
                              std::span<const ComplexGain> innovations,
                              std::span<const ComplexGain> csi_noise,
                              const ChannelParams& params) {
  params.validate();
  if (innovations.size() != csi_noise.size())
    throw std::invalid_argument("innovation and CSI noise counts differ");
  const std::size_t users = innovations.size();
  if (prev && prev->true_gains.size() != users)
    throw std::invalid_argument("previous draw has a different user count");

  ChannelDraw next;
  next.slot_index = prev ? prev->slot_index + 1 : 0;
  next.true_gains.resize(users);
  next.estimated_gains.resize(users);
  const double keep = std::sqrt(params.ar_old_weight);
  const double innov = std::sqrt(params.ar_innovation_weight);
  const double est = std::sqrt(params.csi_accuracy);
  const double est_noise = std::sqrt(1.0 - params.csi_accuracy);
  for (std::size_t s = 0; s < users; ++s) {
    ComplexGain h;
    if (params.mode == ChannelMode::ar1 && prev)
      h = keep * prev->true_gains[s] + innov * innovations[s];
    else
      h = innovations[s];
    next.true_gains[s] = h;
    next.estimated_gains[s] = est * h + est_noise * csi_noise[s];
  }
  return next;
}

ChannelDraw step_channel(const ChannelDraw* prev, std::size_t users,
                         const ChannelParams& params, RandomSource& rng) {
  std::vector<ComplexGain> innovations(users);
  std::vector<ComplexGain> csi_noise(users);
  for (std::size_t s = 0; s < users; ++s) {
    innovations[s] = draw_unit_gaussian(rng);
    csi_noise[s] = draw_unit_gaussian(rng);
  }
  return step_channel_with(prev, innovations, csi_noise, params);
}

double mutual_info_gain(double gain2, double power, double i_max) {
  if (!(power >= 0.0)) throw std::invalid_argument("power must be >= 0");
  if (!(i_max > 0.0)) throw std::invalid_argument("i_max must be > 0");
  return std::min(std::log1p(gain2 * power) / std::numbers::ln2, i_max);
}

double mutual_info(ComplexGain h, double power, double i_max) {
  return mutual_info_gain(std::norm(h), power, i_max);
}

namespace {

constexpr int kInverseCount = 8192;

// 1 / (j + 1) for the Poisson recurrences.
const std::array<double, kInverseCount>& inverse_table() {
  static const auto table = [] {
    std::array<double, kInverseCount> t{};
    for (int j = 0; j < kInverseCount; ++j) t[j] = 1.0 / (j + 1.0);
    return t;
  }();
  return table;
}

}  // namespace

double rician_tail(double x, double mean_magnitude, double variance) {
  if (!(x > 0.0)) return 1.0;
  const double mean2 = mean_magnitude * mean_magnitude;
  if (variance <= 0.0) return mean2 > x ? 1.0 : 0.0;
  const double y = x / variance;
  const double m = mean2 / variance;
  if (m == 0.0) return std::exp(-y);

  // |h|^2 / variance is a Poisson(m) mixture of Gamma(j + 1, 1) laws, so
  // Pr{|h|^2 > x} = sum_j Pois(j; m) Pr{Pois(y) <= j}.
  const double spread = 12.0 * std::sqrt(m) + 12.0;
  const long jlo = std::max(0L, static_cast<long>(std::floor(m - spread)));
  const long jhi = static_cast<long>(std::ceil(m + spread));
  const double log_y = std::log(y);

  if (y > jhi + 1.0) {
    // Largest Poisson(y) cdf term within the window bounds the result.
    const double log_bound = -y + jhi * log_y - std::lgamma(jhi + 1.0) -
                             std::log1p(-(jhi + 1.0) / y);
    if (log_bound < -745.0) return 0.0;
  }

  double cdf_y = 0.0;
  double pmf_y = 0.0;
  double pmf_m = 0.0;
  if (jlo == 0) {
    pmf_y = std::exp(-y);
    cdf_y = pmf_y;
    pmf_m = std::exp(-m);
  } else {
    const double log_fact = std::lgamma(jlo + 1.0);
    cdf_y = boost::math::gamma_q(static_cast<double>(jlo + 1), y);
    pmf_y = std::exp(-y + jlo * log_y - log_fact);
    pmf_m = std::exp(-m + jlo * std::log(m) - log_fact);
  }
  const auto& inv = inverse_table();
  double sum = 0.0;
  for (long j = jlo; j <= jhi; ++j) {
    sum += pmf_m * cdf_y;
    const double next = j + 1.0;
    // Past 2m the Poisson(m) terms shrink geometrically by at least 1/2.
    if (next > 2.0 * m && pmf_m < 1e-17 * sum) break;
    const double inv_next = j < kInverseCount ? inv[j] : 1.0 / next;
    pmf_m *= m * inv_next;
    if (pmf_y == 0.0 && next <= y)
      pmf_y = std::exp(-y + next * log_y - std::lgamma(next + 1.0));
    else
      pmf_y *= y * inv_next;
    cdf_y = std::min(1.0, cdf_y + pmf_y);
  }
  return std::clamp(sum, 0.0, 1.0);
}

ConditionalLaw::ConditionalLaw(double estimate_magnitude, double rho)
    : mean_(std::sqrt(rho) * estimate_magnitude), var_(1.0 - rho) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw std::invalid_argument("csi accuracy rho must lie in [0, 1]");
  if (!(estimate_magnitude >= 0.0) || !std::isfinite(estimate_magnitude))
    throw std::invalid_argument("estimate magnitude must be finite and >= 0");
}

double ConditionalLaw::tail(double x) const {
  return rician_tail(x, mean_, var_);
}

double expected_mutual_info_mag(double estimate_magnitude, double power,
                                double rho, double i_max, int nodes) {
  if (!(power >= 0.0)) throw std::invalid_argument("power must be >= 0");
  if (!(i_max > 0.0)) throw std::invalid_argument("i_max must be > 0");
  const ConditionalLaw law(estimate_magnitude, rho);
  if (power == 0.0) return 0.0;
  if (law.variance() == 0.0)
    return mutual_info_gain(estimate_magnitude * estimate_magnitude, power,
                            i_max);
  // Beyond (mean + 6.5 sd)^2 the tail is below 1e-18, so the rate axis is cut
  // there; at small P this keeps the nodes where the integrand lives.
  const double x_hi = std::pow(law.mean_magnitude() + 6.5 * std::sqrt(law.variance()), 2);
  const double u_hi = std::min(i_max, std::log1p(x_hi * power) / std::numbers::ln2);
  const auto& rule = gauss_legendre_unit(nodes);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double u = u_hi * rule.nodes[i];
    const double x = std::expm1(u * std::numbers::ln2) / power;
    sum += rule.weights[i] * law.tail(x);
  }
  return u_hi * sum;
}

double expected_mutual_info(ComplexGain estimate, double power, double rho,
                            double i_max, int nodes) {
  return expected_mutual_info_mag(std::abs(estimate), power, rho, i_max,
                                  nodes);
}

}  // namespace rsim
