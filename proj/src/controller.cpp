#include "rsim/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rsim {

void Utility::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::invalid_argument("utility scale must be positive and finite");
}

double Utility::value(double x) const {
  if (kind == UtilityKind::linear) return scale * x;
  return std::log1p(x / scale);
}

double Utility::derivative(double x) const {
  if (kind == UtilityKind::linear) return scale;
  return 1.0 / (scale + x);
}

void NcaParams::validate() const {
  if (!(v > 0.0)) throw std::invalid_argument("v must be > 0");
  if (!(l_av >= 1.0)) throw std::invalid_argument("l_av must be >= 1");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  if (!(eps_power > 0.0)) throw std::invalid_argument("eps_power must be > 0");
  if (!(k > 0.0)) throw std::invalid_argument("k must be > 0");
  if (!(i_max > 0.0)) throw std::invalid_argument("i_max must be > 0");
  if (!(p_av > 0.0) || !(p_peak >= p_av))
    throw std::invalid_argument("need 0 < p_av <= p_peak");
  if (!(eps_power <= p_peak))
    throw std::invalid_argument("eps_power must not exceed p_peak");
  if (!(eps_overhead >= 0.0))
    throw std::invalid_argument("eps_overhead must be >= 0");
  const double expected = i_max * l_av * k;
  if (!(std::abs(m_max - expected) <= 1e-9 * expected))
    throw std::invalid_argument("m_max must equal i_max * l_av * k");
}

double encoding_control(double w, double m, const NcaParams& params) {
  if (w >= 0.0) return std::max(m - params.delta, 0.0);
  return std::min(m + params.delta, params.m_max);
}

double rate_control(double q, double v, const Utility& utility, double d_cap) {
  if (!(q >= 0.0)) throw std::invalid_argument("backlog must be >= 0");
  const double ceiling = utility.slope_at_zero() * v / 2.0 - q;
  if (ceiling <= 0.0) return 0.0;
  double x;
  if (utility.kind == UtilityKind::linear) {
    x = ceiling;
  } else {
    // Positive root of 2x^2 + 2(c + q)x + 2qc - V = 0, rationalized.
    const double c = utility.scale;
    const double s = std::sqrt((c - q) * (c - q) + 2.0 * v);
    x = (v - 2.0 * q * c) / (s + c + q);
  }
  x = std::clamp(x, 0.0, std::min(d_cap, ceiling));
  // Keep q + x <= bV/2 exact in floating point.
  const double bound = utility.slope_at_zero() * v / 2.0;
  while (x > 0.0 && q + x > bound) x = std::nextafter(x, 0.0);
  return x;
}

double rate_control_bisection(double q, double v, const Utility& utility,
                              double d_cap) {
  auto g = [&](double x) { return v * utility.derivative(x) - 2.0 * x - 2.0 * q; };
  if (g(0.0) <= 0.0) return 0.0;
  if (g(d_cap) >= 0.0) return d_cap;
  double lo = 0.0;
  double hi = d_cap;
  while (hi - lo > 1e-9 * std::max(hi, 1e-300)) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

SlotDecision pick_user(std::span<const UserCandidate> candidates,
                       double eps_power) {
  SlotDecision d;
  if (candidates.empty()) return d;
  std::size_t best = 0;
  for (std::size_t s = 1; s < candidates.size(); ++s)
    if (candidates[s].value > candidates[best].value) best = s;
  if (candidates[best].power < eps_power) return d;
  d.scheduled_user = best;
  d.power = candidates[best].power;
  return d;
}

SlotDecision schedule(std::span<const UserState> users, double z,
                      std::span<const ComplexGain> estimates,
                      const NcaParams& params, const RateSurface& surface) {
  const auto cands = user_candidates(
      users, z, estimates, params,
      [&](double a, double p) { return surface.expected_rate(a, p); });
  return pick_user(cands, params.eps_power);
}

NcaState initial_nca_state(std::size_t users, const NcaParams& params,
                           const Utility& utility, double d_cap) {
  NcaState st;
  st.users.reserve(users);
  for (std::size_t s = 0; s < users; ++s)
    st.users.push_back(initial_user(s, params.m_max / 2.0, utility.slope_at_zero(),
                                    d_cap, params.eps_overhead));
  return st;
}

SlotResult nca_slot(NcaState& state, const ChannelDraw& draw,
                    const NcaParams& params, const Utility& utility,
                    const RateSurface& surface) {
  auto& users = state.users;
  SlotResult out;
  std::vector<double> admitted(users.size());
  for (std::size_t s = 0; s < users.size(); ++s)
    admitted[s] = rate_control(users[s].q, params.v, utility, users[s].d_cap);

  out.decision = schedule(users, state.virt.z, draw.estimated_gains, params, surface);
  out.decision.admitted = admitted;

  if (out.decision.scheduled_user) {
    const std::size_t s = *out.decision.scheduled_user;
    out.info_bits =
        mutual_info(draw.true_gains[s], out.decision.power, params.i_max) * params.k;
    UserState& u = users[s];
    if (params.rho1_encoding_fix && u.packets_in_flight == 0)
      u = start_next_code(u, out.info_bits, params.eps_overhead);
    auto dec = decoder_step(u, true, out.info_bits);
    out.ack = dec.ack;
    u = dec.state;
    if (out.ack.acked_user) {
      u = w_step(u, *out.ack.recorded_block_size, params.l_av);
      const double next_m = params.rho1_encoding_fix
                                 ? u.m
                                 : encoding_control(u.w, u.m, params);
      u = start_next_code(u, next_m, params.eps_overhead);
    }
  }

  for (std::size_t s = 0; s < users.size(); ++s)
    users[s] = encoder_step(users[s], out.ack, admitted[s]);
  state.virt = z_step(state.virt, out.decision.power, params.p_av);
  return out;
}

double genie_ack_override(const NcaParams& params, const ChannelDraw& draw,
                          const SlotDecision& decision) {
  if (!decision.scheduled_user) return 0.0;
  return mutual_info(draw.true_gains[*decision.scheduled_user], decision.power,
                     params.i_max) *
         params.k;
}

}  // namespace rsim
