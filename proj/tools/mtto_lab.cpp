#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mtto/campaign.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

mtto::CampaignConfig load(const std::string& path) {
  mtto::CampaignConfig config = mtto::parse_config(read_file(path));
  if (const char* cap = std::getenv("MTTO_LAB_MAX_GRID")) {
    const long long value = std::atoll(cap);
    if (value < 8 || !mtto::is_power_of_two(value)) {
      throw mtto::ConfigError("MTTO_LAB_MAX_GRID", "must be a power of two >= 8");
    }
    config.max_grid = value;
  }
  return config;
}

void print_summary(const mtto::CampaignReport& report) {
  for (const auto& [name, check] : report.checks) {
    double worst = 0.0;
    for (const auto& [key, value] : check.residuals) worst = std::max(worst, value);
    std::cerr << (check.pass ? "PASS " : "FAIL ") << name;
    if (check.error_kind) {
      std::cerr << "  [" << *check.error_kind << "] " << check.error_message;
    } else {
      std::cerr << "  max residual " << worst << " (threshold " << check.threshold << ")";
    }
    std::cerr << '\n';
  }
  std::cerr << (report.overall_pass ? "overall: PASS" : "overall: FAIL") << "  ("
            << report.wall_time_s << " s)\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model spaces and matrix-valued truncated Toeplitz operators: verification campaigns"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<long long> grid;
  std::optional<std::uint64_t> seed;
  bool json_only = false;
  std::string matrix_name;

  auto* verify = app.add_subcommand("verify", "run the checks listed in a campaign config");
  verify->add_option("config", config_path, "campaign config (JSON)")->required();
  verify->add_option("--out", out_dir, "output directory (overrides the config)");
  verify->add_option("--grid", grid, "fixed grid size M (power of two)");
  verify->add_option("--seed", seed, "seed for every random draw");
  verify->add_flag("--json-only", json_only, "print only the report JSON; write no CSV files");

  auto* dump = app.add_subcommand("dump", "print one operator matrix as CSV");
  dump->add_option("config", config_path, "campaign config (JSON)")->required();
  dump->add_option("--matrix", matrix_name, "shift | tau | mtto:<index>")->required();
  dump->add_option("--grid", grid, "fixed grid size M (power of two)");
  dump->add_option("--seed", seed, "seed for every random draw");

  CLI11_PARSE(app, argc, argv);

  try {
    mtto::CampaignConfig config = load(config_path);
    if (grid) {
      if (*grid < 8 || !mtto::is_power_of_two(*grid)) {
        throw mtto::ConfigError("--grid", "must be a power of two >= 8");
      }
      config.grid = *grid;
    }
    if (seed) {
      config.seed = *seed;
      if (config.random_symbols) config.random_symbols->seed = *seed;
    }

    if (dump->parsed()) {
      std::cout << mtto::matrix_to_csv(mtto::campaign_matrix(config, matrix_name));
      return 0;
    }

    const mtto::CampaignReport report = mtto::run_campaign(config);
    const std::string directory = out_dir.value_or(config.output);
    mtto::write_outputs(report, directory, json_only);
    std::cout << report.to_json().dump(2) << '\n';
    if (!json_only) print_summary(report);
    return report.overall_pass ? 0 : 1;
  } catch (const mtto::Error& e) {
    std::cerr << "mtto-lab: " << e.kind() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mtto-lab: " << e.what() << '\n';
    return 2;
  }
}
