#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "marginlab/experiment.hpp"

namespace marginlab {

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Margin-condition ERM simulator and bound calculator"};
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  app.add_option("config", config_path, "experiment configuration file")->required();
  auto* out_opt = app.add_option("--out", out_path, "CSV output path (default: config output, else stdout)");
  auto* seed_opt = app.add_option("--seed", seed, "override the configured seed");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "marginlab: " << e.what() << '\n';
    return 1;
  }

  ExperimentConfig config;
  try {
    config = load_config(config_path);
    if (*seed_opt) {
      config.seed = seed;
    }
    if (*threads_opt) {
      config.threads = threads;
    }
    if (*out_opt) {
      config.output = out_path;
    }
  } catch (const ConfigError& e) {
    err << "marginlab: config error: " << e.what() << '\n';
    return 1;
  }

  try {
    const auto table = run_sweep(config);
    if (config.output.empty() || config.output == "-") {
      write_report(out, table);
    } else {
      emit_report(table, config.output);
    }
  } catch (const ConfigError& e) {
    err << "marginlab: config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "marginlab: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace marginlab
