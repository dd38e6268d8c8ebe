#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rsim/config_io.hpp"
#include "rsim/engine.hpp"
#include "rsim/results_io.hpp"
#include "rsim/selftest.hpp"

namespace {

unsigned thread_cap() {
  const char* env = std::getenv("RATELESS_SIM_THREADS");
  if (!env || !*env) return 0;
  try {
    return static_cast<unsigned>(std::stoul(env));
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("bad RATELESS_SIM_THREADS: ") + env);
  }
}

int report_failures(const std::vector<rsim::MetricsReport>& reports) {
  int bad = 0;
  for (const auto& r : reports)
    if (r.failed) {
      std::cerr << "run failed (" << rsim::to_string(r.config.strategy)
                << ", seed " << r.config.seed << "): " << r.failure << "\n";
      ++bad;
    }
  return bad ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slot-level simulator for rateless-coded downlink scheduling"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string output = "-";
  std::string format = "csv";
  auto add_io = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value config file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--set", overrides, "override a config key (key=value)");
    cmd->add_option("--output,-o", output, "output path, - for stdout");
    cmd->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };
  auto* run_cmd = app.add_subcommand("run", "simulate one configuration");
  add_io(run_cmd);
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep one axis over values and seeds");
  add_io(sweep_cmd);

  rsim::SelftestOptions st;
  auto* self_cmd = app.add_subcommand("selftest", "run the brute-force oracle suites");
  self_cmd->add_option("--instances", st.instances, "randomized instances per suite");
  self_cmd->add_option("--mc-samples", st.mc_samples, "Monte Carlo samples per point");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*self_cmd) {
      st.on_suite = [](const rsim::SuiteResult& r) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail
                  << std::endl;
      };
      bool ok = true;
      for (const auto& r : rsim::run_selftest(st)) ok = ok && r.passed;
      return ok ? 0 : 1;
    }

    auto file = rsim::load_config(config_path);
    rsim::apply_overrides(file, overrides);
    const auto fmt = rsim::output_format_from_string(format);

    std::vector<rsim::MetricsReport> reports;
    if (*run_cmd) {
      reports.push_back(rsim::run(file.config));
    } else {
      if (!file.has_axis || !file.has_values)
        throw std::invalid_argument("sweep needs axis and values in the config");
      file.sweep.threads = thread_cap();
      reports = rsim::sweep(file.config, file.sweep);
    }
    rsim::write_results(reports, output, fmt);
    return report_failures(reports);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
