// tqm: transactional quantum mechanics simulator.
//
// Exit codes: 0 run passed its checks, 1 a statistical or field check failed,
// 2 bad usage or config, 3 I/O failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tqm/config.hpp"
#include "tqm/parallel.hpp"
#include "tqm/report.hpp"
#include "tqm/runner.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_errors(const std::string& path, const std::vector<tqm::config::ParseError>& errors) {
  for (const tqm::config::ParseError& e : errors) {
    if (e.line > 0) {
      std::cerr << path << ':' << e.line << ": " << e.message << '\n';
    } else {
      std::cerr << path << ": " << e.message << '\n';
    }
  }
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::string> mode;
};

int load_config(const std::string& path, const Overrides& overrides,
                tqm::config::ScenarioConfig& out) {
  const std::optional<std::string> text = read_file(path);
  if (!text.has_value()) {
    std::cerr << "cannot read config file '" << path << "'\n";
    return kExitIoError;
  }
  tqm::config::ParseResult parsed = tqm::config::parse_config(*text);
  if (!parsed.ok()) {
    print_errors(path, parsed.errors);
    return kExitConfigError;
  }
  out = parsed.config;
  if (overrides.seed.has_value()) out.seed = *overrides.seed;
  if (overrides.trials.has_value()) out.trials = *overrides.trials;
  if (overrides.mode.has_value()) {
    if (*overrides.mode == "normalized") {
      out.mode = tqm::engine::Mode::Normalized;
    } else if (*overrides.mode == "absolute") {
      out.mode = tqm::engine::Mode::Absolute;
    } else {
      std::cerr << "--mode must be 'normalized' or 'absolute'\n";
      return kExitConfigError;
    }
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo emitter-absorber transaction simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "tqm-out";
  Overrides overrides;

  CLI::App* run = app.add_subcommand("run", "run a scenario and write its artifacts");
  run->add_option("--config", config_path, "scenario config file")->required();
  run->add_option("--out", out_dir, "output directory (default tqm-out)");
  std::uint64_t seed_value = 0;
  std::uint64_t trials_value = 0;
  std::string mode_value;
  CLI::Option* seed_opt = run->add_option("--seed", seed_value, "override the config seed");
  CLI::Option* trials_opt =
      run->add_option("--trials", trials_value, "override the config trial count");
  CLI::Option* mode_opt =
      run->add_option("--mode", mode_value, "override the config mode (normalized|absolute)");

  CLI::App* validate = app.add_subcommand("validate", "parse a config and echo it canonically");
  validate->add_option("--config", config_path, "scenario config file")->required();

  CLI::App* dump = app.add_subcommand("field-dump", "write the handshake field samples");
  dump->add_option("--config", config_path, "scenario config file")->required();
  dump->add_option("--out", out_dir, "output directory (default tqm-out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfigError;
  }

  if (seed_opt->count() > 0) overrides.seed = seed_value;
  if (trials_opt->count() > 0) overrides.trials = trials_value;
  if (mode_opt->count() > 0) overrides.mode = mode_value;

  const unsigned threads = tqm::thread_count_from_env();

  try {
    if (validate->parsed()) {
      tqm::config::ScenarioConfig cfg;
      const int rc = load_config(config_path, {}, cfg);
      if (rc != kExitPass) return rc;
      std::cout << tqm::config::canonical_text(cfg);
      return kExitPass;
    }
    if (dump->parsed()) {
      tqm::config::ScenarioConfig cfg;
      const int rc = load_config(config_path, {}, cfg);
      if (rc != kExitPass) return rc;
      const std::filesystem::path path = tqm::runner::execute_field_dump(cfg, out_dir);
      std::cout << "wrote " << path.string() << '\n';
      return kExitPass;
    }
    tqm::config::ScenarioConfig cfg;
    const int rc = load_config(config_path, overrides, cfg);
    if (rc != kExitPass) return rc;
    const tqm::runner::RunOutcome outcome = tqm::runner::execute_run(cfg, out_dir, threads);
    std::cout << outcome.summary;
    for (const std::filesystem::path& artifact : outcome.artifacts) {
      std::cout << "wrote " << artifact.string() << '\n';
    }
    return outcome.checks_passed ? kExitPass : kExitCheckFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitIoError;
  }
}
