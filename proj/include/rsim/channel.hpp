#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace rsim {

using ComplexGain = std::complex<double>;

/// Per-slot true and estimated gains of every user.
struct ChannelDraw {
  std::vector<ComplexGain> true_gains;
  std::vector<ComplexGain> estimated_gains;
  std::uint64_t slot_index = 0;
};

enum class ChannelMode { iid, ar1 };

struct ChannelParams {
  double ar_old_weight = 0.1;
  double ar_innovation_weight = 0.9;
  double csi_accuracy = 0.8;  // rho
  ChannelMode mode = ChannelMode::ar1;

  /// Throws std::invalid_argument on out-of-range weights or rho.
  void validate() const;
};

/// Random source owned by exactly one run.
using RandomSource = std::mt19937_64;

/// Circular-symmetric complex Gaussian with unit variance.
ComplexGain draw_unit_gaussian(RandomSource& rng);

/// Advances the fading process by one slot. `prev` is the previous draw of the
/// same run, or nullopt on the first slot (which then starts from the
/// stationary law).
ChannelDraw step_channel(const ChannelDraw* prev, std::size_t users,
                         const ChannelParams& params, RandomSource& rng);

/// Same recursion with explicitly supplied innovations, one pair per user.
ChannelDraw step_channel_with(const ChannelDraw* prev,
                              std::span<const ComplexGain> innovations,
                              std::span<const ComplexGain> csi_noise,
                              const ChannelParams& params);

/// Capped Shannon rate min(log2(1 + |h|^2 P), i_max) in bits/symbol.
double mutual_info(ComplexGain h, double power, double i_max);
double mutual_info_gain(double gain2, double power, double i_max);

/// Law of |h|^2 given the estimate: h | h_hat ~ CN(sqrt(rho) h_hat, 1 - rho).
class ConditionalLaw {
 public:
  ConditionalLaw(double estimate_magnitude, double rho);

  double mean_magnitude() const { return mean_; }
  double variance() const { return var_; }

  /// Pr{|h|^2 > x | h_hat}. Exact (noncentral chi-square tail with two
  /// degrees of freedom) up to ~1e-15 absolute.
  double tail(double x) const;

 private:
  double mean_;
  double var_;
};

/// Pr{|h|^2 > x} for h ~ CN(mean, variance), mean given as a magnitude.
double rician_tail(double x, double mean_magnitude, double variance);

/// E{min(log2(1 + |h|^2 P), i_max) | h_hat} by Gauss-Legendre integration of
/// the tail over the rate axis, int_0^{i_max} Pr{|h|^2 > (2^u - 1)/P} du.
/// Every node is non-decreasing in P, so the result is too.
double expected_mutual_info(ComplexGain estimate, double power, double rho,
                            double i_max, int nodes = 64);
double expected_mutual_info_mag(double estimate_magnitude, double power,
                                double rho, double i_max, int nodes = 64);

}  // namespace rsim
