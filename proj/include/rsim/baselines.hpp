#pragma once

#include <cstdint>
#include <vector>

#include "rsim/controller.hpp"

namespace rsim {

struct FixedRateState {
  double r_star = 0.0;  ///< bits/packet chosen in the last scheduled slot
  std::uint64_t outage_count = 0;
  std::uint64_t success_count = 0;
};

/// Goodput-optimal fixed code rate in bits/packet:
/// argmax over R in [0, i_max k] of R Pr{I(h, P) k >= R | h_hat}.
double fixed_rate_select(ComplexGain estimate, double power,
                         const RateSurface& surface, double k, int grid = 2048);

/// Fixed-rate coding under the drift-plus-penalty skeleton, with the
/// expected goodput as the service weight. A scheduled slot delivers R* bits
/// when I(h, P) k >= R*, nothing otherwise.
SlotResult fixed_rate_slot(NcaState& state, std::vector<FixedRateState>& fixed,
                           const ChannelDraw& draw, const NcaParams& params,
                           const Utility& utility, const RateSurface& surface);

/// Infinite-block-size reference: NCA's scheduling, power and rate control,
/// with every scheduled slot delivering the realized I(h, P) k bits.
SlotResult genie_slot(NcaState& state, const ChannelDraw& draw,
                      const NcaParams& params, const Utility& utility,
                      const RateSurface& surface);

}  // namespace rsim
