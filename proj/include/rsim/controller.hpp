#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rsim/channel.hpp"
#include "rsim/quadrature.hpp"
#include "rsim/rate_surface.hpp"
#include "rsim/rateless.hpp"

namespace rsim {

enum class UtilityKind { log, linear };

/// Concave non-decreasing utility with U(0) = 0 and finite U'(0).
///   log:    U(x) = ln(1 + x / scale)
///   linear: U(x) = scale * x
struct Utility {
  UtilityKind kind = UtilityKind::log;
  double scale = 1.0;

  void validate() const;
  double value(double x) const;
  double derivative(double x) const;
  double slope_at_zero() const { return derivative(0.0); }
};

struct NcaParams {
  double v = 1.0;
  double l_av = 10.0;
  double delta = 1.0;
  double eps_power = 1e-3;
  double m_max = 1.0;
  double k = 1.0;
  double p_av = 1.0;
  double p_peak = 4.0;
  double i_max = 8.0;
  double eps_overhead = 0.0;
  /// Perfect-CSI variant: size each message to the first slot's rate.
  bool rho1_encoding_fix = false;

  void validate() const;
};

struct SlotDecision {
  std::optional<std::size_t> scheduled_user;
  double power = 0.0;
  std::vector<double> admitted;
};

/// Message size for the next code given the block-size virtual queue.
double encoding_control(double w, double m, const NcaParams& params);

/// argmax over x in [0, d_cap] of V U(x) - x^2 - 2 q x.
double rate_control(double q, double v, const Utility& utility, double d_cap);

/// Same maximizer found by bisection on V U'(x) = 2x + 2q; any concave
/// utility, used as the cross-check for the closed forms.
double rate_control_bisection(double q, double v, const Utility& utility,
                              double d_cap);

/// Drift-plus-penalty value q K rate(P) - z P.
template <class Rate>
double service_value(double q, double z, double k, double power, Rate&& rate) {
  return q * k * rate(power) - z * power;
}

/// argmax over P in [0, p_peak] of q K rate(P) - z P for a concave,
/// non-decreasing rate(P); golden-section search to 1e-6 p_peak with both
/// endpoints checked.
template <class Rate>
double power_for_user(double q, double z, double k, double p_peak, Rate&& rate) {
  if (q <= 0.0) return 0.0;
  if (z <= 0.0) return p_peak;
  auto objective = [&](double p) { return service_value(q, z, k, p, rate); };
  return golden_section_max(objective, 0.0, p_peak, 1e-6 * p_peak);
}

struct UserCandidate {
  double power = 0.0;
  double value = 0.0;
};

/// Picks the user with the largest candidate value (lowest index on ties);
/// nobody is scheduled when that user's power is below eps_power.
SlotDecision pick_user(std::span<const UserCandidate> candidates,
                       double eps_power);

/// Candidate power and value per user; `rate(a, P)` is the per-symbol
/// service at estimate magnitude a.
template <class Rate>
std::vector<UserCandidate> user_candidates(std::span<const UserState> users,
                                           double z,
                                           std::span<const ComplexGain> estimates,
                                           const NcaParams& params, Rate&& rate) {
  std::vector<UserCandidate> out(users.size());
  for (std::size_t s = 0; s < users.size(); ++s) {
    const double a = std::abs(estimates[s]);
    auto service = [&](double p) { return rate(a, p); };
    const double p = power_for_user(users[s].q, z, params.k, params.p_peak, service);
    out[s] = {p, service_value(users[s].q, z, params.k, p, service)};
  }
  return out;
}

/// Scheduling and power allocation for one slot (admitted left empty).
SlotDecision schedule(std::span<const UserState> users, double z,
                      std::span<const ComplexGain> estimates,
                      const NcaParams& params, const RateSurface& surface);

struct NcaState {
  std::vector<UserState> users;
  VirtualState virt;
};

struct SlotResult {
  SlotDecision decision;
  AckOutcome ack;
  double info_bits = 0.0;  ///< I(h, P) K for the scheduled user
};

/// Initial per-user state: empty queues and the first message at m_max / 2.
NcaState initial_nca_state(std::size_t users, const NcaParams& params,
                           const Utility& utility, double d_cap);

/// One slot of the network control algorithm: rate control, scheduling and
/// power, decoding on the true gain, then the queue updates.
SlotResult nca_slot(NcaState& state, const ChannelDraw& draw,
                    const NcaParams& params, const Utility& utility,
                    const RateSurface& surface);

/// Bits delivered in the slot when every scheduled slot is its own code
/// carrying exactly I(h, P) K bits.
double genie_ack_override(const NcaParams& params, const ChannelDraw& draw,
                          const SlotDecision& decision);

}  // namespace rsim
