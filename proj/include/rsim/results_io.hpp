#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rsim/engine.hpp"

namespace rsim {

enum class OutputFormat { csv, json };
OutputFormat output_format_from_string(const std::string& name);

/// Column names for reports with up to `users` users. The leading block is
/// strategy, s_users, v, l_av, rho, seed, t_slots, total_utility,
/// spectral_efficiency_total, throughput_<s>, avg_power, avg_block_size_<s>,
/// ack_fraction, max_queue_<s>, violations; the rest echo the remaining
/// config and counters so a row can be re-run exactly.
std::vector<std::string> result_columns(std::size_t users);

/// Header plus one row per report; floats carry 9 significant digits.
std::string results_csv(const std::vector<MetricsReport>& reports);

/// Array of objects keyed like the CSV columns, at full precision.
nlohmann::ordered_json results_json(const std::vector<MetricsReport>& reports);
MetricsReport report_from_json(const nlohmann::ordered_json& obj);
std::vector<MetricsReport> reports_from_json(const nlohmann::ordered_json& arr);

/// Throws std::runtime_error when the path cannot be written and
/// std::invalid_argument on an empty report list.
void write_results(const std::vector<MetricsReport>& reports, const std::string& path,
                   OutputFormat format);

}  // namespace rsim
