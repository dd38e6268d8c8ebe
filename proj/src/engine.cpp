#include "rsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rsim {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::nca: return "nca";
    case Strategy::genie: return "genie";
    case Strategy::fixed_rate: return "fixed_rate";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "nca") return Strategy::nca;
  if (name == "genie") return Strategy::genie;
  if (name == "fixed_rate") return Strategy::fixed_rate;
  throw std::invalid_argument("unknown strategy: " + name);
}

const char* to_string(ChannelMode m) { return m == ChannelMode::iid ? "iid" : "ar1"; }

ChannelMode channel_mode_from_string(const std::string& name) {
  if (name == "iid") return ChannelMode::iid;
  if (name == "ar1") return ChannelMode::ar1;
  throw std::invalid_argument("unknown channel mode: " + name);
}

const char* to_string(UtilityKind k) { return k == UtilityKind::log ? "log" : "linear"; }

UtilityKind utility_kind_from_string(const std::string& name) {
  if (name == "log") return UtilityKind::log;
  if (name == "linear") return UtilityKind::linear;
  throw std::invalid_argument("unsupported utility (log or linear): " + name);
}

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::v: return "v";
    case SweepAxis::l_av: return "l_av";
    case SweepAxis::rho: return "rho";
    case SweepAxis::s_users: return "s_users";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "v") return SweepAxis::v;
  if (name == "l_av") return SweepAxis::l_av;
  if (name == "rho") return SweepAxis::rho;
  if (name == "s_users") return SweepAxis::s_users;
  throw std::invalid_argument("invalid sweep axis: " + name);
}

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig c = *this;
  if (!c.v) c.v = 1e4 * c.k;
  if (!c.p_peak) c.p_peak = 4.0 * c.p_av;
  if (!c.delta) c.delta = 0.05 * c.m_max();
  if (!c.eps_power) c.eps_power = 1e-3 * *c.p_peak;
  if (!c.d_cap) c.d_cap = c.i_max * c.k;
  if (!c.utility_scale) c.utility_scale = c.utility == UtilityKind::log ? c.k : 1.0 / c.k;
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  auto req = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  req(s_users >= 1, "s_users must be >= 1");
  req(!v || *v > 0.0, "v must be > 0");
  req(l_av >= 1.0, "l_av must be >= 1");
  req(rho >= 0.0 && rho <= 1.0, "rho must lie in [0, 1]");
  req(k > 0.0, "k must be > 0");
  req(i_max > 0.0, "i_max must be > 0");
  req(p_av > 0.0, "p_av must be > 0");
  req(!p_peak || *p_peak >= p_av, "p_peak must be >= p_av");
  req(!delta || *delta > 0.0, "delta must be > 0");
  req(!eps_power || *eps_power > 0.0, "eps_power must be > 0");
  req(eps_overhead >= 0.0, "eps_overhead must be >= 0");
  req(!d_cap || *d_cap > 0.0, "d_cap must be > 0");
  req(warmup_fraction >= 0.0 && warmup_fraction < 1.0,
      "warmup_fraction must lie in [0, 1)");
  req(!utility_scale || *utility_scale > 0.0, "utility_scale must be > 0");
  req(quadrature_nodes >= 2, "quadrature_nodes must be >= 2");
}

NcaParams ExperimentConfig::nca_params() const {
  const ExperimentConfig c = resolved();
  NcaParams p;
  p.v = *c.v;
  p.l_av = c.l_av;
  p.delta = *c.delta;
  p.eps_power = *c.eps_power;
  p.m_max = c.m_max();
  p.k = c.k;
  p.p_av = c.p_av;
  p.p_peak = *c.p_peak;
  p.i_max = c.i_max;
  p.eps_overhead = c.eps_overhead;
  p.rho1_encoding_fix = c.rho1_encoding_fix && c.rho >= 1.0;
  p.validate();
  return p;
}

Utility ExperimentConfig::utility_spec() const {
  Utility u{utility, *resolved().utility_scale};
  u.validate();
  return u;
}

ChannelParams ExperimentConfig::channel_params() const {
  ChannelParams p;
  p.csi_accuracy = rho;
  p.mode = channel_mode;
  p.validate();
  return p;
}

namespace {

std::string snapshot(std::uint64_t slot, const NcaState& st) {
  std::ostringstream os;
  os.precision(17);
  os << "slot " << slot << ": z=" << st.virt.z;
  for (const auto& u : st.users)
    os << " | user " << u.id << " q=" << u.q << " r=" << u.r << " m=" << u.m
       << " n=" << u.n << " w=" << u.w;
  return os.str();
}

}  // namespace

MetricsReport run(const ExperimentConfig& config, const SlotObserver& observer) {
  MetricsReport rep;
  rep.config = config.resolved();
  const ExperimentConfig& c = rep.config;
  const NcaParams params = c.nca_params();
  const Utility utility = c.utility_spec();
  const ChannelParams chan = c.channel_params();
  const std::size_t users = c.s_users;

  rep.per_user_throughput.assign(users, 0.0);
  rep.delivered_throughput.assign(users, 0.0);
  rep.avg_block_size.assign(users, 0.0);
  rep.max_queue.assign(users, 0.0);
  if (c.t_slots == 0) return rep;

  const auto surface = RateSurface::shared({c.rho, c.i_max, params.p_peak,
                                            c.quadrature_nodes});
  RandomSource rng(c.seed);
  NcaState state = initial_nca_state(users, params, utility, *c.d_cap);
  std::vector<FixedRateState> fixed(users);

  const auto warmup =
      static_cast<std::uint64_t>(std::floor(c.warmup_fraction * c.t_slots));
  const double q_bound = utility.slope_at_zero() * params.v / 2.0;
  std::vector<double> admitted_sum(users, 0.0);
  std::vector<double> delivered_sum(users, 0.0);
  std::vector<double> block_sum(users, 0.0);
  std::vector<std::uint64_t> block_count(users, 0);
  double power_sum = 0.0;
  std::uint64_t ack_slots = 0;
  std::uint64_t measured = 0;

  ChannelDraw draw;
  for (std::uint64_t t = 0; t < c.t_slots; ++t) {
    draw = step_channel(t == 0 ? nullptr : &draw, users, chan, rng);
    SlotResult res;
    switch (c.strategy) {
      case Strategy::nca:
        res = nca_slot(state, draw, params, utility, *surface);
        break;
      case Strategy::genie:
        res = genie_slot(state, draw, params, utility, *surface);
        break;
      case Strategy::fixed_rate:
        res = fixed_rate_slot(state, fixed, draw, params, utility, *surface);
        break;
    }

    const double p = res.decision.power;
    if (!(p == 0.0 || (p >= params.eps_power && p <= params.p_peak)) ||
        (p == 0.0) != !res.decision.scheduled_user)
      ++rep.power_support_violations;
    if (!(state.virt.z >= 0.0)) ++rep.negativity_violations;
    for (const auto& u : state.users) {
      if (!(u.q >= 0.0)) ++rep.negativity_violations;
      if (u.q > q_bound) ++rep.queue_bound_violations;
      rep.max_queue[u.id] = std::max(rep.max_queue[u.id], u.q);
    }
    rep.max_z = std::max(rep.max_z, state.virt.z);
    if (res.decision.scheduled_user) ++rep.scheduled_count;
    if (res.ack.acked_user) ++rep.ack_count;
    if (c.strategy == Strategy::fixed_rate && res.decision.scheduled_user &&
        !res.ack.acked_user)
      ++rep.outage_count;

    if (t >= warmup) {
      ++measured;
      power_sum += p;
      for (std::size_t s = 0; s < users; ++s)
        admitted_sum[s] += res.decision.admitted[s];
      if (res.ack.acked_user) {
        const std::size_t s = *res.ack.acked_user;
        ++ack_slots;
        delivered_sum[s] += res.ack.delivered_bits;
        block_sum[s] += static_cast<double>(*res.ack.recorded_block_size);
        ++block_count[s];
      }
    }

    if (observer) observer({t, &draw, &res, &state});
    if (rep.violations() > 0) {
      rep.failed = true;
      rep.failure = "invariant violation at " + snapshot(t, state);
      break;
    }
  }

  if (measured > 0) {
    const double n = static_cast<double>(measured);
    double total = 0.0;
    for (std::size_t s = 0; s < users; ++s) {
      rep.per_user_throughput[s] = admitted_sum[s] / n;
      rep.delivered_throughput[s] = delivered_sum[s] / n;
      rep.avg_block_size[s] =
          block_count[s] ? block_sum[s] / static_cast<double>(block_count[s]) : 0.0;
      rep.total_utility += utility.value(rep.per_user_throughput[s]);
      total += rep.per_user_throughput[s];
    }
    rep.spectral_efficiency_total = total / c.k;
    rep.avg_power = power_sum / n;
    rep.ack_fraction = static_cast<double>(ack_slots) / n;
  }
  return rep;
}

ExperimentConfig with_axis(ExperimentConfig base, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::v: base.v = value; break;
    case SweepAxis::l_av: base.l_av = value; break;
    case SweepAxis::rho: base.rho = value; break;
    case SweepAxis::s_users:
      if (!(value >= 1.0) || value != std::floor(value))
        throw std::invalid_argument("s_users values must be positive integers");
      base.s_users = static_cast<std::size_t>(value);
      break;
  }
  return base;
}

std::vector<MetricsReport> sweep(const ExperimentConfig& base, const SweepSpec& spec) {
  const std::vector<Strategy> strategies =
      spec.strategies.empty() ? std::vector<Strategy>{base.strategy} : spec.strategies;
  std::vector<ExperimentConfig> jobs;
  for (double value : spec.values)
    for (auto seed : spec.seeds)
      for (auto strategy : strategies) {
        ExperimentConfig c = with_axis(base, spec.axis, value);
        c.seed = seed;
        c.strategy = strategy;
        c.resolved();  // reject invalid points before any work starts
        jobs.push_back(c);
      }

  std::vector<MetricsReport> out(jobs.size());
  unsigned threads = spec.threads ? spec.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, std::max<std::size_t>(jobs.size(), 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < jobs.size();) {
      try {
        out[i] = run(jobs[i]);
        out[i].axis = to_string(spec.axis);
        out[i].axis_value = spec.values[i / (spec.seeds.size() * strategies.size())];
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace rsim
