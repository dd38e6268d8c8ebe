#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

namespace rsim {

/// Transmitter- and receiver-side state of one user's rateless link.
struct UserState {
  std::size_t id = 0;
  double q = 0.0;  ///< encoder backlog, bits
  double r = 0.0;  ///< mutual information still needed to decode, bits
  double m = 0.0;  ///< current message size, bits
  std::uint64_t n = 0;  ///< code index (ACKs so far)
  std::uint64_t packets_in_flight = 0;  ///< scheduled slots of the current code
  double w = 0.0;  ///< block-size virtual queue, slots
  double b_slope = 0.0;  ///< U'(0)
  double d_cap = 0.0;  ///< arrival cap, bits/slot

  /// Q + R - M; analysis-only diagnostic, never read by the controller.
  double auxiliary_backlog() const { return q + r - m; }
};

struct VirtualState {
  double z = 0.0;  ///< power virtual queue
};

struct AckOutcome {
  std::optional<std::size_t> acked_user;
  std::optional<std::uint64_t> recorded_block_size;
  double delivered_bits = 0.0;

  bool acks(std::size_t user) const { return acked_user && *acked_user == user; }
};

struct DecoderResult {
  UserState state;
  AckOutcome ack;
};

/// Fresh user at t = 0 with the first message already loaded.
UserState initial_user(std::size_t id, double first_message, double b_slope,
                       double d_cap, double eps_overhead);

/// One slot of decoder-queue evolution. On decoding the code index advances
/// and the in-flight count resets; `m` still holds the decoded message size
/// and `r` is left at zero until start_next_code loads the next message.
DecoderResult decoder_step(const UserState& u, bool scheduled, double info_bits);

/// Loads the next message: m = next_message, r = (1 + eps_overhead) m.
UserState start_next_code(const UserState& u, double next_message,
                          double eps_overhead);

/// q' = (q - m 1{ACK for this user})^+ + x, with m taken from the outcome.
UserState encoder_step(const UserState& u, const AckOutcome& ack, double x);

/// z' = (z - p_av)^+ + p.
VirtualState z_step(const VirtualState& v, double power, double p_av);

/// w' = w + block_size - l_av; called once per ACK of the user.
UserState w_step(const UserState& u, std::uint64_t block_size, double l_av);

}  // namespace rsim
