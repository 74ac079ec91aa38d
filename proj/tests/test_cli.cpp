#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "tqm/config.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kCliPath = TQM_CLI_PATH;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "tqm-cli-tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

// Runs the installed binary through the shell, capturing both streams.
CliResult run_cli(const std::string& args, const fs::path& scratch,
                  const std::string& env_prefix = "") {
  const fs::path out_path = scratch / "stdout.txt";
  const fs::path err_path = scratch / "stderr.txt";
  const std::string command = env_prefix + std::string(kCliPath) + " " + args + " >" +
                              out_path.string() + " 2>" + err_path.string();
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  return result;
}

const char* bubble_text() {
  return
      "scenario = bubble\n"
      "trials = 20000\n"
      "seed = 5\n"
      "[detector]\n"
      "id = near\n"
      "position = 1 0 0\n"
      "[detector]\n"
      "id = far\n"
      "position = 2 0 0\n";
}

}  // namespace

TEST_CASE("validate echoes the canonical form of a good config") {
  const fs::path dir = fresh_dir("validate");
  const fs::path cfg = dir / "run.cfg";
  write_file(cfg, bubble_text());

  const CliResult r = run_cli("validate --config " + cfg.string(), dir);
  CHECK(r.exit_code == 0);
  CHECK(r.err.empty());

  const tqm::config::ParseResult parsed = tqm::config::parse_config(bubble_text());
  REQUIRE(parsed.ok());
  CHECK(r.out == tqm::config::canonical_text(parsed.config));
}

TEST_CASE("config errors name the file and line") {
  const fs::path dir = fresh_dir("bad-config");
  const fs::path cfg = dir / "bad.cfg";
  write_file(cfg,
             "scenario = bubble\n"
             "trials = -1\n"
             "[detector]\nid = d\nposition = 1 0 0\n");
  const CliResult r = run_cli("validate --config " + cfg.string(), dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find(cfg.string() + ":2: 'trials' must be an unsigned integer") !=
        std::string::npos);

  const fs::path headless = dir / "headless.cfg";
  write_file(headless, "trials = 10\n");
  const CliResult r2 = run_cli("validate --config " + headless.string(), dir);
  CHECK(r2.exit_code == 2);
  // whole-file problems carry no line number
  CHECK(r2.err.find(headless.string() + ": missing required key: scenario") != std::string::npos);
}

TEST_CASE("a missing config file is an i/o error") {
  const fs::path dir = fresh_dir("missing");
  const CliResult r = run_cli("validate --config " + (dir / "nope.cfg").string(), dir);
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("cannot read config file") != std::string::npos);
}

TEST_CASE("usage errors exit with the config-error code") {
  const fs::path dir = fresh_dir("usage");
  CHECK(run_cli("", dir).exit_code == 2);                  // a subcommand is required
  CHECK(run_cli("run", dir).exit_code == 2);               // --config is required
  CHECK(run_cli("run --bogus x", dir).exit_code == 2);
}

TEST_CASE("run writes artifacts and reports success") {
  const fs::path dir = fresh_dir("run");
  const fs::path cfg = dir / "run.cfg";
  const fs::path out = dir / "out";
  write_file(cfg, bubble_text());

  const CliResult r =
      run_cli("run --config " + cfg.string() + " --out " + out.string(), dir);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("result: PASS") != std::string::npos);
  CHECK(r.out.find("wrote ") != std::string::npos);
  CHECK(fs::exists(out / "transactions.csv"));
  CHECK(fs::exists(out / "summary.txt"));
  CHECK(count_lines(read_file(out / "transactions.csv")) == 20001);
}

TEST_CASE("command-line overrides replace the config values") {
  const fs::path dir = fresh_dir("overrides");
  const fs::path cfg = dir / "run.cfg";
  const fs::path out = dir / "out";
  // radii picked so the echo strengths also stay a valid absolute split
  write_file(cfg,
             "scenario = bubble\n"
             "trials = 20000\n"
             "seed = 5\n"
             "[detector]\n"
             "id = near\n"
             "position = 2 0 0\n"
             "[detector]\n"
             "id = far\n"
             "position = 4 0 0\n");

  const CliResult r = run_cli("run --config " + cfg.string() + " --out " + out.string() +
                                  " --trials 512 --seed 9 --mode absolute",
                              dir);
  CHECK(r.exit_code == 0);
  const std::string summary = read_file(out / "summary.txt");
  CHECK(summary.find("trials: 512") != std::string::npos);
  CHECK(summary.find("seed: 9") != std::string::npos);
  CHECK(summary.find("mode: absolute") != std::string::npos);

  const CliResult bad = run_cli("run --config " + cfg.string() + " --mode sideways", dir);
  CHECK(bad.exit_code == 2);
  CHECK(bad.err.find("--mode must be 'normalized' or 'absolute'") != std::string::npos);
}

TEST_CASE("the worker count changes nothing but the wall clock") {
  const fs::path dir = fresh_dir("threads");
  const fs::path cfg = dir / "run.cfg";
  write_file(cfg, bubble_text());
  const fs::path out1 = dir / "out1";
  const fs::path out4 = dir / "out4";

  const CliResult r1 = run_cli("run --config " + cfg.string() + " --out " + out1.string(), dir,
                               "TQM_THREADS=1 ");
  const CliResult r4 = run_cli("run --config " + cfg.string() + " --out " + out4.string(), dir,
                               "TQM_THREADS=4 ");
  CHECK(r1.exit_code == 0);
  CHECK(r4.exit_code == 0);
  CHECK(read_file(out1 / "transactions.csv") == read_file(out4 / "transactions.csv"));
  CHECK(read_file(out1 / "summary.txt") == read_file(out4 / "summary.txt"));
}

TEST_CASE("a failed statistical check exits with code 1") {
  const fs::path dir = fresh_dir("strict");
  const fs::path cfg = dir / "strict.cfg";
  const fs::path out = dir / "out";
  write_file(cfg, "alpha = 0.999999\n" + std::string(bubble_text()));

  const CliResult r =
      run_cli("run --config " + cfg.string() + " --out " + out.string(), dir);
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("result: FAIL") != std::string::npos);
}

TEST_CASE("field-dump writes the sample grid") {
  const fs::path dir = fresh_dir("field-dump");
  const fs::path cfg = dir / "field.cfg";
  const fs::path out = dir / "out";
  write_file(cfg,
             "scenario = handshake-field\n"
             "absorb_x = 1\n"
             "absorb_t = 1\n"
             "grid_nx = 9\n"
             "grid_nt = 7\n");

  const CliResult r =
      run_cli("field-dump --config " + cfg.string() + " --out " + out.string(), dir);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("wrote ") != std::string::npos);
  const std::string field = read_file(out / "field.csv");
  CHECK(field.rfind("x,t,re,im,abs\n", 0) == 0);
  CHECK(count_lines(field) == 9 * 7 + 1);

  // the same config refuses to dump under the wrong scenario
  const fs::path wrong = dir / "wrong.cfg";
  write_file(wrong, bubble_text());
  const CliResult bad = run_cli("field-dump --config " + wrong.string(), dir);
  CHECK(bad.exit_code == 2);
}
