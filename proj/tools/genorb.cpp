#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "genorb/acceptance.hpp"
#include "genorb/errors.hpp"
#include "genorb/report.hpp"

#ifndef GENORB_DEFAULT_FIXTURES
#define GENORB_DEFAULT_FIXTURES ""
#endif

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2 };

struct Flags {
  std::string config_path;
  std::map<std::string, std::string> values;  // config key -> flag text
};

// Registers `--flag` writing into values[key] only when given on the command line.
void flag(CLI::App* cmd, Flags& flags, const std::string& name, const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      name, [&flags, key](const std::string& v) { flags.values[key] = v; }, help);
}

void run_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config_path, "key=value run configuration file");
  flag(cmd, flags, "--frame", "frame", "m1 or barycentric (default)");
  flag(cmd, flags, "--rtol", "rtol", "integrator relative tolerance");
  flag(cmd, flags, "--atol", "atol", "integrator absolute tolerance");
  flag(cmd, flags, "--out", "out", "output CSV path; a .json sidecar is written next to it");
}

void arc_flags(CLI::App* cmd, Flags& flags) {
  flag(cmd, flags, "--theta-deg", "theta_deg", "angle in degrees, or first:last:step");
  flag(cmd, flags, "--I", "I", "index, or first:last");
  flag(cmd, flags, "--rotation", "rotation", "direct (default) or retrograde");
}

genorb::RunConfig resolve(const std::string& command, const Flags& flags) {
  genorb::RunConfig config;
  if (!flags.config_path.empty()) config = genorb::RunConfig::load(flags.config_path);
  if (!config.command.empty() && config.command != command) {
    throw genorb::ConfigError("config file is for '" + config.command + "', not '" + command + "'");
  }
  config.command = command;
  for (const auto& [key, value] : flags.values) config.set(key, value);
  return config;
}

void emit(const genorb::RunConfig& config, const std::string& csv, const std::string& json) {
  if (config.out.empty()) {
    std::cout << csv;
    return;
  }
  std::ofstream out(config.out, std::ios::binary);
  if (!out) throw genorb::ConfigError("cannot write '" + config.out + "'");
  out << csv;
  const std::string sidecar = genorb::sidecar_path(config.out);
  std::ofstream meta(sidecar, std::ios::binary);
  if (!meta) throw genorb::ConfigError("cannot write '" + sidecar + "'");
  meta << json;
  out.close();
  meta.close();
  if (!out || !meta) throw std::runtime_error("write to '" + config.out + "' failed");
}

int gen_table(const genorb::RunConfig& config) {
  const auto table = genorb::generating_table(config);
  std::ostringstream csv;
  genorb::write_generating_csv(csv, table);
  emit(config, csv.str(), genorb::generating_json(table, config));
  return kOk;
}

int continue_table(const genorb::RunConfig& config) {
  const auto table = genorb::continuation_table(config);
  std::ostringstream csv;
  genorb::write_continuation_csv(csv, table);
  emit(config, csv.str(), genorb::continuation_json(table, config));
  return kOk;
}

int dump_orbit(const genorb::RunConfig& config) {
  const auto dump = genorb::orbit_dump(config);
  std::ostringstream csv;
  genorb::write_dump_csv(csv, dump, config.samples);
  emit(config, csv.str(), genorb::dump_json(dump, config));
  return kOk;
}

int run_verify(const genorb::RunConfig& config, const std::vector<int>& only) {
  genorb::AcceptanceOptions options;
  options.fixtures = config.fixtures.empty() ? GENORB_DEFAULT_FIXTURES : config.fixtures;
  if (options.fixtures.empty()) throw genorb::ConfigError("verify needs --fixtures");
  for (int id : only) {
    if (id < 1 || id > genorb::kCriterionCount) throw genorb::ConfigError("--only: no criterion " + std::to_string(id));
  }
  options.only = only;
  bool all = true;
  nlohmann::ordered_json report = nlohmann::ordered_json::array();
  for (const auto& r : genorb::run_acceptance(options)) {
    std::cout << genorb::format_result(r) << std::endl;
    all = all && r.passed;
    report.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"seconds", r.seconds}, {"detail", r.detail}});
  }
  if (!config.out.empty()) {
    std::ofstream out(config.out);
    if (!out) throw genorb::ConfigError("cannot write '" + config.out + "'");
    out << report.dump(2) << '\n';
  }
  std::cout << (all ? "all criteria passed" : "verification failed") << std::endl;
  return all ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-species generating orbits and their continuation in the restricted three-body problem"};
  app.require_subcommand(1);

  Flags flags;
  std::vector<int> only;

  auto* gen = app.add_subcommand("gen-table", "table of generating orbits");
  run_flags(gen, flags);
  arc_flags(gen, flags);
  flag(gen, flags, "--mode", "mode", "fixed-theta-scan, fixed-theta, fixed-b or fixed-energy");
  flag(gen, flags, "--b", "b", "b for fixed-b mode");
  flag(gen, flags, "--c0", "c0", "target energy for fixed-energy mode");

  auto* cont = app.add_subcommand("continue", "continue generating orbits to positive mass ratios");
  run_flags(cont, flags);
  arc_flags(cont, flags);
  flag(cont, flags, "--mode", "mode", "fixed-theta-scan, fixed-theta, fixed-b or fixed-energy");
  flag(cont, flags, "--b", "b", "b for fixed-b mode");
  flag(cont, flags, "--c0", "c0", "target energy for fixed-energy mode");
  flag(cont, flags, "--mu", "mu", "comma-separated mass ratios or sun-jupiter, earth-moon, pluto-charon");

  auto* dump = app.add_subcommand("orbit-dump", "sample one generating or continued orbit");
  run_flags(dump, flags);
  arc_flags(dump, flags);
  flag(dump, flags, "--mu", "mu", "mass ratio (0 dumps the generating orbit)");
  flag(dump, flags, "--samples", "samples", "number of equally spaced samples over one period");

  auto* ver = app.add_subcommand("verify", "run the acceptance criteria");
  run_flags(ver, flags);
  flag(ver, flags, "--fixtures", "fixtures", "directory with the reference table CSVs");
  ver->add_option("--only", only, "run only these criteria (comma-separated ids)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return gen_table(resolve("gen-table", flags));
    if (*cont) return continue_table(resolve("continue", flags));
    if (*dump) return dump_orbit(resolve("orbit-dump", flags));
    if (*ver) return run_verify(resolve("verify", flags), only);
  } catch (const genorb::ConfigError& e) {
    std::cerr << "genorb: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "genorb: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
