#include "rsim/results_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <variant>

namespace rsim {
namespace {

using Cell = std::variant<std::monostate, double, std::uint64_t, std::string>;
using Row = std::vector<std::pair<std::string, Cell>>;

std::string indexed(const char* base, std::size_t s) {
  return std::string(base) + "_" + std::to_string(s + 1);
}

Row flatten(const MetricsReport& r) {
  const auto& c = r.config;
  const std::size_t n = c.s_users;
  Row row;
  auto put = [&](std::string key, Cell v) { row.emplace_back(std::move(key), std::move(v)); };
  auto put_vec = [&](const char* base, const std::vector<double>& v) {
    for (std::size_t s = 0; s < n; ++s) put(indexed(base, s), s < v.size() ? v[s] : 0.0);
  };
  put("strategy", std::string(to_string(c.strategy)));
  put("s_users", std::uint64_t{n});
  put("v", c.v.value_or(0.0));
  put("l_av", c.l_av);
  put("rho", c.rho);
  put("seed", c.seed);
  put("t_slots", c.t_slots);
  put("total_utility", r.total_utility);
  put("spectral_efficiency_total", r.spectral_efficiency_total);
  put_vec("throughput", r.per_user_throughput);
  put("avg_power", r.avg_power);
  put_vec("avg_block_size", r.avg_block_size);
  put("ack_fraction", r.ack_fraction);
  put_vec("max_queue", r.max_queue);
  put("violations", r.violations());
  put_vec("delivered", r.delivered_throughput);
  put("max_z", r.max_z);
  put("ack_count", r.ack_count);
  put("scheduled_count", r.scheduled_count);
  put("outage_count", r.outage_count);
  put("queue_bound_violations", r.queue_bound_violations);
  put("power_support_violations", r.power_support_violations);
  put("negativity_violations", r.negativity_violations);
  put("failed", std::uint64_t{r.failed ? 1u : 0u});
  put("k", c.k);
  put("i_max", c.i_max);
  put("p_av", c.p_av);
  put("p_peak", c.p_peak.value_or(0.0));
  put("delta", c.delta.value_or(0.0));
  put("eps_power", c.eps_power.value_or(0.0));
  put("eps_overhead", c.eps_overhead);
  put("d_cap", c.d_cap.value_or(0.0));
  put("warmup_fraction", c.warmup_fraction);
  put("channel_mode", std::string(to_string(c.channel_mode)));
  put("rho1_encoding_fix", std::uint64_t{c.rho1_encoding_fix ? 1u : 0u});
  put("utility", std::string(to_string(c.utility)));
  put("utility_scale", c.utility_scale.value_or(0.0));
  put("quadrature_nodes", static_cast<std::uint64_t>(c.quadrature_nodes));
  put("axis", r.axis);
  put("axis_value", r.axis_value);
  put("failure", r.failure);
  return row;
}

std::string csv_cell(const Cell& cell) {
  if (std::holds_alternative<std::monostate>(cell)) return {};
  if (auto d = std::get_if<double>(&cell)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", *d);
    return buf;
  }
  if (auto u = std::get_if<std::uint64_t>(&cell)) return std::to_string(*u);
  const auto& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown output format: " + name);
}

std::vector<std::string> result_columns(std::size_t users) {
  MetricsReport probe;
  probe.config.s_users = users;
  std::vector<std::string> cols;
  for (const auto& [key, _] : flatten(probe)) cols.push_back(key);
  return cols;
}

std::string results_csv(const std::vector<MetricsReport>& reports) {
  std::size_t users = 1;
  for (const auto& r : reports) users = std::max(users, r.config.s_users);
  const auto cols = result_columns(users);
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\n";
  for (const auto& r : reports) {
    const Row row = flatten(r);
    std::size_t j = 0;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      Cell cell;
      if (j < row.size() && row[j].first == cols[i]) cell = row[j++].second;
      out += (i ? "," : "") + csv_cell(cell);
    }
    out += "\n";
  }
  return out;
}

nlohmann::ordered_json results_json(const std::vector<MetricsReport>& reports) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    auto& obj = arr.emplace_back(nlohmann::ordered_json::object());
    for (const auto& [key, cell] : flatten(r)) {
      if (auto d = std::get_if<double>(&cell)) obj[key] = *d;
      else if (auto u = std::get_if<std::uint64_t>(&cell)) obj[key] = *u;
      else if (auto s = std::get_if<std::string>(&cell)) obj[key] = *s;
    }
  }
  return arr;
}

MetricsReport report_from_json(const nlohmann::ordered_json& o) {
  MetricsReport r;
  auto& c = r.config;
  c.strategy = strategy_from_string(o.at("strategy").get<std::string>());
  c.s_users = o.at("s_users").get<std::size_t>();
  c.v = o.at("v").get<double>();
  c.l_av = o.at("l_av").get<double>();
  c.rho = o.at("rho").get<double>();
  c.seed = o.at("seed").get<std::uint64_t>();
  c.t_slots = o.at("t_slots").get<std::uint64_t>();
  c.k = o.at("k").get<double>();
  c.i_max = o.at("i_max").get<double>();
  c.p_av = o.at("p_av").get<double>();
  c.p_peak = o.at("p_peak").get<double>();
  c.delta = o.at("delta").get<double>();
  c.eps_power = o.at("eps_power").get<double>();
  c.eps_overhead = o.at("eps_overhead").get<double>();
  c.d_cap = o.at("d_cap").get<double>();
  c.warmup_fraction = o.at("warmup_fraction").get<double>();
  c.channel_mode = channel_mode_from_string(o.at("channel_mode").get<std::string>());
  c.rho1_encoding_fix = o.at("rho1_encoding_fix").get<std::uint64_t>() != 0;
  c.utility = utility_kind_from_string(o.at("utility").get<std::string>());
  c.utility_scale = o.at("utility_scale").get<double>();
  c.quadrature_nodes = o.at("quadrature_nodes").get<int>();

  auto vec = [&](const char* base) {
    std::vector<double> v(c.s_users);
    for (std::size_t s = 0; s < c.s_users; ++s) v[s] = o.at(indexed(base, s)).get<double>();
    return v;
  };
  r.total_utility = o.at("total_utility").get<double>();
  r.spectral_efficiency_total = o.at("spectral_efficiency_total").get<double>();
  r.per_user_throughput = vec("throughput");
  r.avg_power = o.at("avg_power").get<double>();
  r.avg_block_size = vec("avg_block_size");
  r.ack_fraction = o.at("ack_fraction").get<double>();
  r.max_queue = vec("max_queue");
  r.delivered_throughput = vec("delivered");
  r.max_z = o.at("max_z").get<double>();
  r.ack_count = o.at("ack_count").get<std::uint64_t>();
  r.scheduled_count = o.at("scheduled_count").get<std::uint64_t>();
  r.outage_count = o.at("outage_count").get<std::uint64_t>();
  r.queue_bound_violations = o.at("queue_bound_violations").get<std::uint64_t>();
  r.power_support_violations = o.at("power_support_violations").get<std::uint64_t>();
  r.negativity_violations = o.at("negativity_violations").get<std::uint64_t>();
  r.failed = o.at("failed").get<std::uint64_t>() != 0;
  r.axis = o.at("axis").get<std::string>();
  r.axis_value = o.at("axis_value").get<double>();
  r.failure = o.at("failure").get<std::string>();
  return r;
}

std::vector<MetricsReport> reports_from_json(const nlohmann::ordered_json& arr) {
  std::vector<MetricsReport> out;
  for (const auto& o : arr) out.push_back(report_from_json(o));
  return out;
}

void write_results(const std::vector<MetricsReport>& reports, const std::string& path,
                   OutputFormat format) {
  if (reports.empty()) throw std::invalid_argument("no reports to write");
  const std::string text = format == OutputFormat::csv
                               ? results_csv(reports)
                               : results_json(reports).dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write results to " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing results to " + path);
}

}  // namespace rsim
