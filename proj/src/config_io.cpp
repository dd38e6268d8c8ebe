#include "rsim/config_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rsim {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw std::invalid_argument("bad number for " + key + ": '" + v + "'");
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw std::invalid_argument("bad integer for " + key + ": '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("bad boolean for " + key + ": '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "strategy", "s_users", "v", "l_av", "rho", "k", "i_max", "p_av", "p_peak",
      "delta", "eps_power", "eps_overhead", "d_cap", "t_slots", "warmup_fraction",
      "seed", "channel_mode", "rho1_encoding_fix", "utility", "utility_scale",
      "quadrature_nodes", "axis", "values", "seeds", "strategies"};
  return keys;
}

void apply_setting(ConfigFile& f, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  auto& c = f.config;
  if (key == "strategy") c.strategy = strategy_from_string(v);
  else if (key == "s_users") c.s_users = to_uint(key, v);
  else if (key == "v") c.v = to_double(key, v);
  else if (key == "l_av") c.l_av = to_double(key, v);
  else if (key == "rho") c.rho = to_double(key, v);
  else if (key == "k") c.k = to_double(key, v);
  else if (key == "i_max") c.i_max = to_double(key, v);
  else if (key == "p_av") c.p_av = to_double(key, v);
  else if (key == "p_peak") c.p_peak = to_double(key, v);
  else if (key == "delta") c.delta = to_double(key, v);
  else if (key == "eps_power") c.eps_power = to_double(key, v);
  else if (key == "eps_overhead") c.eps_overhead = to_double(key, v);
  else if (key == "d_cap") c.d_cap = to_double(key, v);
  else if (key == "t_slots") c.t_slots = to_uint(key, v);
  else if (key == "warmup_fraction") c.warmup_fraction = to_double(key, v);
  else if (key == "seed") c.seed = to_uint(key, v);
  else if (key == "channel_mode") c.channel_mode = channel_mode_from_string(v);
  else if (key == "rho1_encoding_fix") c.rho1_encoding_fix = to_bool(key, v);
  else if (key == "utility") c.utility = utility_kind_from_string(v);
  else if (key == "utility_scale") c.utility_scale = to_double(key, v);
  else if (key == "quadrature_nodes") c.quadrature_nodes = static_cast<int>(to_uint(key, v));
  else if (key == "axis") {
    f.sweep.axis = sweep_axis_from_string(v);
    f.has_axis = true;
  } else if (key == "values") {
    f.sweep.values.clear();
    for (const auto& item : split_list(v)) f.sweep.values.push_back(to_double(key, item));
    f.has_values = true;
  } else if (key == "seeds") {
    f.sweep.seeds.clear();
    for (const auto& item : split_list(v)) f.sweep.seeds.push_back(to_uint(key, item));
    if (f.sweep.seeds.empty()) throw std::invalid_argument("seeds list is empty");
    c.seed = f.sweep.seeds.front();
  } else if (key == "strategies") {
    f.sweep.strategies.clear();
    for (const auto& item : split_list(v))
      f.sweep.strategies.push_back(strategy_from_string(item));
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

ConfigFile parse_config(const std::string& text) {
  ConfigFile f;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(f, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return f;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_overrides(ConfigFile& f, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("override must be key=value: " + o);
    apply_setting(f, trim(o.substr(0, eq)), o.substr(eq + 1));
  }
}

}  // namespace rsim
