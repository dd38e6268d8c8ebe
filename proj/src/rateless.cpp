#include "rsim/rateless.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rsim {

UserState initial_user(std::size_t id, double first_message, double b_slope,
                       double d_cap, double eps_overhead) {
  if (!(first_message >= 0.0))
    throw std::invalid_argument("message size must be >= 0");
  UserState u;
  u.id = id;
  u.b_slope = b_slope;
  u.d_cap = d_cap;
  return start_next_code(u, first_message, eps_overhead);
}

DecoderResult decoder_step(const UserState& u, bool scheduled, double info_bits) {
  DecoderResult out{u, {}};
  if (!scheduled) return out;
  if (!(info_bits >= 0.0))
    throw std::invalid_argument("scheduled slot with negative information");
  if (u.r > info_bits) {
    out.state.r = u.r - info_bits;
    ++out.state.packets_in_flight;
    return out;
  }
  out.ack.acked_user = u.id;
  out.ack.recorded_block_size = u.packets_in_flight + 1;
  out.ack.delivered_bits = u.m;
  out.state.n = u.n + 1;
  out.state.packets_in_flight = 0;
  out.state.r = 0.0;
  return out;
}

UserState start_next_code(const UserState& u, double next_message,
                          double eps_overhead) {
  if (!(eps_overhead >= 0.0))
    throw std::invalid_argument("reception overhead must be >= 0");
  UserState next = u;
  next.m = next_message;
  next.r = (1.0 + eps_overhead) * next_message;
  next.packets_in_flight = 0;
  return next;
}

UserState encoder_step(const UserState& u, const AckOutcome& ack, double x) {
  if (!(x >= 0.0 && x <= u.d_cap))
    throw std::invalid_argument("admitted rate outside [0, d_cap]");
  UserState next = u;
  const double served = ack.acks(u.id) ? ack.delivered_bits : 0.0;
  next.q = std::max(u.q - served, 0.0) + x;
  return next;
}

VirtualState z_step(const VirtualState& v, double power, double p_av) {
  if (!(power >= 0.0)) throw std::invalid_argument("power must be >= 0");
  return {std::max(v.z - p_av, 0.0) + power};
}

UserState w_step(const UserState& u, std::uint64_t block_size, double l_av) {
  if (block_size < 1) throw std::invalid_argument("block size must be >= 1");
  UserState next = u;
  next.w = u.w + static_cast<double>(block_size) - l_av;
  return next;
}

}  // namespace rsim
