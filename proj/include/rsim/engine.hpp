#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rsim/baselines.hpp"
#include "rsim/channel.hpp"
#include "rsim/controller.hpp"

namespace rsim {

enum class Strategy { nca, genie, fixed_rate };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);
const char* to_string(ChannelMode m);
ChannelMode channel_mode_from_string(const std::string& name);
const char* to_string(UtilityKind k);
UtilityKind utility_kind_from_string(const std::string& name);

/// One simulation run. Optional fields take derived defaults in resolved().
struct ExperimentConfig {
  Strategy strategy = Strategy::nca;
  std::size_t s_users = 3;
  std::optional<double> v;  // default 1e4 k
  double l_av = 10.0;
  double rho = 0.8;
  double k = 10.0;
  double i_max = 8.0;
  double p_av = 15.848931924611133;  // 12 dB
  std::optional<double> p_peak;      // default 4 p_av
  std::optional<double> delta;       // default 0.05 m_max
  std::optional<double> eps_power;   // default 1e-3 p_peak
  double eps_overhead = 0.0;
  std::optional<double> d_cap;  // default i_max k
  std::uint64_t t_slots = 1000000;
  double warmup_fraction = 0.1;
  std::uint64_t seed = 1;
  ChannelMode channel_mode = ChannelMode::ar1;
  bool rho1_encoding_fix = false;  // only takes effect at rho = 1
  UtilityKind utility = UtilityKind::log;
  std::optional<double> utility_scale;  // log: k; linear: 1 / k
  int quadrature_nodes = 64;

  /// Copy with every optional filled in; throws std::invalid_argument on a
  /// constraint violation.
  ExperimentConfig resolved() const;
  void validate() const;

  double m_max() const { return i_max * l_av * k; }
  NcaParams nca_params() const;
  Utility utility_spec() const;
  ChannelParams channel_params() const;
};

struct MetricsReport {
  ExperimentConfig config;  // resolved
  std::string axis;          // sweep axis, empty for single runs
  double axis_value = 0.0;

  double total_utility = 0.0;
  std::vector<double> per_user_throughput;  // admitted, bits/slot
  std::vector<double> delivered_throughput;  // bits/slot
  double spectral_efficiency_total = 0.0;   // admitted bits/symbol
  double avg_power = 0.0;
  std::vector<double> avg_block_size;  // slots per code
  double ack_fraction = 0.0;
  std::vector<double> max_queue;  // bits, whole run
  double max_z = 0.0;
  std::uint64_t ack_count = 0;
  std::uint64_t scheduled_count = 0;
  std::uint64_t outage_count = 0;
  std::uint64_t queue_bound_violations = 0;
  std::uint64_t power_support_violations = 0;
  std::uint64_t negativity_violations = 0;
  bool failed = false;
  std::string failure;

  std::uint64_t violations() const {
    return queue_bound_violations + power_support_violations + negativity_violations;
  }
};

/// Per-slot view handed to a run observer.
struct SlotRecord {
  std::uint64_t slot = 0;
  const ChannelDraw* draw = nullptr;
  const SlotResult* result = nullptr;
  const NcaState* state = nullptr;  // after the slot's updates
};

using SlotObserver = std::function<void(const SlotRecord&)>;

MetricsReport run(const ExperimentConfig& config, const SlotObserver& observer = {});

enum class SweepAxis { v, l_av, rho, s_users };
SweepAxis sweep_axis_from_string(const std::string& name);
const char* to_string(SweepAxis a);

struct SweepSpec {
  SweepAxis axis = SweepAxis::v;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds{1};
  std::vector<Strategy> strategies;  // empty: the base config's strategy
  unsigned threads = 0;              // 0: hardware concurrency
};

ExperimentConfig with_axis(ExperimentConfig base, SweepAxis axis, double value);

/// One report per (value, seed, strategy), in that nesting order regardless of
/// completion order.
std::vector<MetricsReport> sweep(const ExperimentConfig& base, const SweepSpec& spec);

}  // namespace rsim
