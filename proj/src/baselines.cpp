#include "rsim/baselines.hpp"

namespace rsim {
namespace {

std::vector<double> admit_all(const NcaState& state, const NcaParams& params,
                              const Utility& utility) {
  std::vector<double> x(state.users.size());
  for (std::size_t s = 0; s < x.size(); ++s)
    x[s] = rate_control(state.users[s].q, params.v, utility, state.users[s].d_cap);
  return x;
}

void finish_slot(NcaState& state, SlotResult& out, const NcaParams& params) {
  for (std::size_t s = 0; s < state.users.size(); ++s)
    state.users[s] = encoder_step(state.users[s], out.ack, out.decision.admitted[s]);
  state.virt = z_step(state.virt, out.decision.power, params.p_av);
}

AckOutcome one_slot_ack(std::size_t user, double bits) {
  AckOutcome ack;
  ack.acked_user = user;
  ack.recorded_block_size = 1;
  ack.delivered_bits = bits;
  return ack;
}

}  // namespace

double fixed_rate_select(ComplexGain estimate, double power,
                         const RateSurface& surface, double k, int grid) {
  if (!(power > 0.0)) return 0.0;
  if (surface.key().rho >= 1.0)
    return mutual_info(estimate, power, surface.key().i_max) * k;
  return surface.best_rate(std::abs(estimate), power, grid).rate * k;
}

SlotResult fixed_rate_slot(NcaState& state, std::vector<FixedRateState>& fixed,
                           const ChannelDraw& draw, const NcaParams& params,
                           const Utility& utility, const RateSurface& surface) {
  SlotResult out;
  const auto admitted = admit_all(state, params, utility);
  const auto cands = user_candidates(
      state.users, state.virt.z, draw.estimated_gains, params,
      [&](double a, double p) { return surface.goodput(a, p); });
  out.decision = pick_user(cands, params.eps_power);
  out.decision.admitted = admitted;

  if (out.decision.scheduled_user) {
    const std::size_t s = *out.decision.scheduled_user;
    const double r_star = fixed_rate_select(draw.estimated_gains[s],
                                            out.decision.power, surface, params.k);
    out.info_bits =
        mutual_info(draw.true_gains[s], out.decision.power, params.i_max) * params.k;
    fixed[s].r_star = r_star;
    if (out.info_bits >= r_star) {
      ++fixed[s].success_count;
      out.ack = one_slot_ack(s, r_star);
    } else {
      ++fixed[s].outage_count;
    }
  }
  finish_slot(state, out, params);
  return out;
}

SlotResult genie_slot(NcaState& state, const ChannelDraw& draw,
                      const NcaParams& params, const Utility& utility,
                      const RateSurface& surface) {
  SlotResult out;
  const auto admitted = admit_all(state, params, utility);
  out.decision = schedule(state.users, state.virt.z, draw.estimated_gains, params,
                          surface);
  out.decision.admitted = admitted;
  if (out.decision.scheduled_user) {
    out.info_bits = genie_ack_override(params, draw, out.decision);
    out.ack = one_slot_ack(*out.decision.scheduled_user, out.info_bits);
  }
  finish_slot(state, out, params);
  return out;
}

}  // namespace rsim
