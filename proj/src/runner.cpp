#include "tqm/runner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "tqm/report.hpp"
#include "tqm/rng.hpp"
#include "tqm/scenarios.hpp"
#include "tqm/wavefield.hpp"

namespace tqm::runner {

namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

using report::format_real;

std::string common_header(const config::ScenarioConfig& cfg) {
  std::string out;
  out += "scenario: ";
  out += config::scenario_name(cfg.scenario);
  out += '\n';
  out += "mode: ";
  out += cfg.mode == engine::Mode::Normalized ? "normalized" : "absolute";
  out += '\n';
  out += "seed: " + std::to_string(cfg.seed) + '\n';
  out += "trials: " + std::to_string(cfg.trials) + '\n';
  out += "alpha: " + format_real(cfg.alpha) + '\n';
  return out;
}

std::string ledger_line(double max_energy, double max_momentum, bool& pass) {
  const bool ok = max_energy == 0.0 && max_momentum == 0.0;
  pass = pass && ok;
  return "ledger: max_energy_residual=" + format_real(max_energy) +
         " max_momentum_residual=" + format_real(max_momentum) +
         (ok ? " pass=yes\n" : " pass=no\n");
}

void write_artifact(RunOutcome& outcome, const fs::path& path, const std::string& content) {
  report::write_text_file(path, content);
  outcome.artifacts.push_back(path);
}

// Correlation curve over the analyzer offset: right analyzer pinned to 0,
// left swept across [0, pi/2].
std::vector<report::CorrelationPoint> correlation_sweep(const config::ScenarioConfig& cfg,
                                                        unsigned threads, double& max_energy,
                                                        double& max_momentum) {
  std::vector<report::CorrelationPoint> points;
  points.reserve(cfg.curve_points);
  for (std::uint32_t i = 0; i < cfg.curve_points; ++i) {
    const double delta = (kPi / 2.0) * static_cast<double>(i) /
                         static_cast<double>(cfg.curve_points - 1);
    scenarios::EprScenario scenario;
    scenario.theta_left = delta;
    scenario.theta_right = 0.0;
    scenario.arm_length = cfg.arm_length;
    const scenarios::EprReport rep = scenarios::run_epr(
        scenario, cfg.curve_trials, derive_seed(cfg.seed, 0x1000u + i), threads,
        /*keep_log=*/false);
    points.push_back({delta, rep.opposite_fraction, rep.opposite_expected, rep.correlation,
                      rep.correlation_expected});
    max_energy = std::max(max_energy, rep.max_energy_residual);
    max_momentum = std::max(max_momentum, rep.max_momentum_residual);
  }
  return points;
}

RunOutcome run_bubble(const config::ScenarioConfig& cfg, const fs::path& out_dir,
                      unsigned threads) {
  scenarios::BubbleScenario scenario;
  scenario.source = {{0.0, 0.0, 0.0}, 0.0, "source"};
  scenario.mode = cfg.mode;
  for (const config::DetectorConfig& d : cfg.detectors) {
    scenario.detectors.push_back({d.id, {d.x, d.y, d.z}, d.weight, 0.0});
  }
  const scenarios::BubbleReport rep =
      scenarios::run_bubble(scenario, cfg.trials, cfg.seed, threads, /*keep_log=*/true);

  bool pass = true;
  std::string summary = common_header(cfg);
  for (std::size_t i = 0; i < rep.detector_ids.size(); ++i) {
    summary += "detector " + rep.detector_ids[i] + ": count=" + std::to_string(rep.counts[i]) +
               " frequency=" + format_real(rep.frequencies[i]) +
               " expected=" + format_real(rep.expected[i]) + '\n';
  }
  summary += "none: count=" + std::to_string(rep.none_count) +
             " frequency=" + format_real(rep.none_frequency) +
             " expected=" + format_real(rep.none_expected) + '\n';
  const stats::GofReport gof = rep.gof.alpha == cfg.alpha
                                   ? rep.gof
                                   : stats::GofReport{rep.gof.statistic,
                                                      rep.gof.degrees_of_freedom, rep.gof.p_value,
                                                      cfg.alpha, rep.gof.p_value >= cfg.alpha};
  summary += report::gof_line("chi_square", gof);
  pass = pass && gof.pass;
  if (cfg.mode == engine::Mode::Normalized) {
    const bool single = rep.none_count == 0;
    summary += "single_quantum: none_count=" + std::to_string(rep.none_count) +
               (single ? " pass=yes\n" : " pass=no\n");
    pass = pass && single;
  }
  summary += ledger_line(rep.max_energy_residual, rep.max_momentum_residual, pass);
  summary += pass ? "result: PASS\n" : "result: FAIL\n";

  RunOutcome outcome;
  outcome.summary = summary;
  outcome.checks_passed = pass;
  write_artifact(outcome, out_dir / "transactions.csv", report::transaction_log_csv(rep.log));
  write_artifact(outcome, out_dir / "summary.txt", summary);
  return outcome;
}

RunOutcome run_epr(const config::ScenarioConfig& cfg, const fs::path& out_dir, unsigned threads) {
  scenarios::EprScenario scenario;
  scenario.theta_left = cfg.theta_left;
  scenario.theta_right = cfg.theta_right;
  scenario.arm_length = cfg.arm_length;
  const scenarios::EprReport rep =
      scenarios::run_epr(scenario, cfg.trials, cfg.seed, threads, /*keep_log=*/true);

  double max_energy = rep.max_energy_residual;
  double max_momentum = rep.max_momentum_residual;
  const std::vector<report::CorrelationPoint> curve =
      correlation_sweep(cfg, threads, max_energy, max_momentum);

  bool pass = true;
  std::string summary = common_header(cfg);
  summary += "theta_left_rad: " + format_real(cfg.theta_left) + '\n';
  summary += "theta_right_rad: " + format_real(cfg.theta_right) + '\n';
  const std::array<const char*, 4> labels = {"HH", "HV", "VH", "VV"};
  for (std::size_t i = 0; i < 4; ++i) {
    const double freq = rep.trials > 0 ? static_cast<double>(rep.counts[i]) /
                                             static_cast<double>(rep.trials)
                                       : 0.0;
    summary += std::string("joint ") + labels[i] + ": count=" + std::to_string(rep.counts[i]) +
               " frequency=" + format_real(freq) + " expected=" + format_real(rep.expected[i]) +
               '\n';
  }
  summary += "opposite_fraction: " + format_real(rep.opposite_fraction) +
             " expected=" + format_real(rep.opposite_expected) + '\n';
  summary += "correlation: " + format_real(rep.correlation) +
             " expected=" + format_real(rep.correlation_expected) + '\n';
  const stats::GofReport gof = rep.gof.alpha == cfg.alpha
                                   ? rep.gof
                                   : stats::GofReport{rep.gof.statistic,
                                                      rep.gof.degrees_of_freedom, rep.gof.p_value,
                                                      cfg.alpha, rep.gof.p_value >= cfg.alpha};
  summary += report::gof_line("chi_square", gof);
  pass = pass && gof.pass;
  summary += ledger_line(max_energy, max_momentum, pass);
  summary += pass ? "result: PASS\n" : "result: FAIL\n";

  RunOutcome outcome;
  outcome.summary = summary;
  outcome.checks_passed = pass;
  write_artifact(outcome, out_dir / "transactions.csv", report::transaction_log_csv(rep.log));
  write_artifact(outcome, out_dir / "correlation.csv", report::correlation_csv(curve));
  write_artifact(outcome, out_dir / "summary.txt", summary);
  return outcome;
}

RunOutcome run_chsh(const config::ScenarioConfig& cfg, const fs::path& out_dir,
                    unsigned threads) {
  const scenarios::ChshSettings settings{cfg.chsh_a, cfg.chsh_a_prime, cfg.chsh_b,
                                         cfg.chsh_b_prime};
  const scenarios::ChshReport rep =
      scenarios::chsh_s(settings, cfg.trials, cfg.seed, threads, /*keep_log=*/true);
  const double lhv = scenarios::lhv_chsh_s(settings);

  double max_energy = rep.max_energy_residual;
  double max_momentum = rep.max_momentum_residual;
  const std::vector<report::CorrelationPoint> curve =
      correlation_sweep(cfg, threads, max_energy, max_momentum);

  bool pass = true;
  std::string summary = common_header(cfg);
  const std::array<const char*, 4> names = {"a,b", "a,b'", "a',b", "a',b'"};
  for (std::size_t i = 0; i < 4; ++i) {
    const scenarios::ChshSettingStats& s = rep.settings[i];
    summary += std::string("setting ") + names[i] + ": alpha_rad=" + format_real(s.alpha) +
               " beta_rad=" + format_real(s.beta) + " E=" + format_real(s.correlation) +
               " expected=" + format_real(s.correlation_expected) +
               " sigma=" + format_real(s.sigma) + '\n';
  }
  summary += "s_estimate: " + format_real(rep.s_estimate) + '\n';
  summary += "s_sigma: " + format_real(rep.s_sigma) + '\n';
  summary += "s_analytic: " + format_real(rep.s_analytic) + '\n';
  const bool consistent = std::abs(rep.s_estimate - rep.s_analytic) <= 6.0 * rep.s_sigma;
  summary += "s_consistency: |s_estimate-s_analytic|=" +
             format_real(std::abs(rep.s_estimate - rep.s_analytic)) +
             " window=" + format_real(6.0 * rep.s_sigma) +
             (consistent ? " pass=yes\n" : " pass=no\n");
  pass = pass && consistent;
  const bool lhv_ok = lhv <= 2.0;
  summary += "lhv_s: " + format_real(lhv) + " bound=2" + (lhv_ok ? " pass=yes\n" : " pass=no\n");
  pass = pass && lhv_ok;
  summary += ledger_line(max_energy, max_momentum, pass);
  summary += pass ? "result: PASS\n" : "result: FAIL\n";

  RunOutcome outcome;
  outcome.summary = summary;
  outcome.checks_passed = pass;
  write_artifact(outcome, out_dir / "transactions.csv", report::transaction_log_csv(rep.log));
  write_artifact(outcome, out_dir / "correlation.csv", report::correlation_csv(curve));
  write_artifact(outcome, out_dir / "summary.txt", summary);
  return outcome;
}

RunOutcome run_maudlin(const config::ScenarioConfig& cfg, const fs::path& out_dir,
                       unsigned threads) {
  scenarios::MaudlinScenario scenario;
  scenario.emitter = spacetime::event_1d(0.0, 0.0, "emitter");
  scenario.near_absorber = spacetime::event_1d(cfg.near_x, cfg.near_t, "near");
  scenario.far_absorber = spacetime::event_1d(cfg.far_x, cfg.far_t, "far");
  scenario.near_strength = cfg.near_strength;
  const scenarios::MaudlinReport rep =
      scenarios::run_maudlin(scenario, cfg.trials, cfg.seed, threads, /*keep_log=*/true);

  bool pass = true;
  std::string summary = common_header(cfg);
  summary += "near_strength: " + format_real(cfg.near_strength) + '\n';
  summary += "near: count=" + std::to_string(rep.near_count) +
             " frequency=" + format_real(rep.near_frequency) +
             " expected=" + format_real(cfg.near_strength) + '\n';
  summary += "far: count=" + std::to_string(rep.far_count) +
             " frequency=" + format_real(rep.far_frequency) +
             " expected=" + format_real(1.0 - cfg.near_strength) + '\n';
  summary += "none: count=" + std::to_string(rep.none_count) + '\n';
  summary += "far_consultations: " + std::to_string(rep.far_consultations) + '\n';
  summary += std::string("hierarchy_audit: ") + (rep.audit_ok ? "pass=yes\n" : "pass=no\n");
  pass = pass && rep.audit_ok;
  const stats::GofReport gof = rep.gof.alpha == cfg.alpha
                                   ? rep.gof
                                   : stats::GofReport{rep.gof.statistic,
                                                      rep.gof.degrees_of_freedom, rep.gof.p_value,
                                                      cfg.alpha, rep.gof.p_value >= cfg.alpha};
  summary += report::gof_line("chi_square", gof);
  pass = pass && gof.pass;
  summary += ledger_line(rep.max_energy_residual, rep.max_momentum_residual, pass);
  summary += pass ? "result: PASS\n" : "result: FAIL\n";

  RunOutcome outcome;
  outcome.summary = summary;
  outcome.checks_passed = pass;
  write_artifact(outcome, out_dir / "transactions.csv", report::transaction_log_csv(rep.log));
  write_artifact(outcome, out_dir / "summary.txt", summary);
  return outcome;
}

struct FieldSetup {
  std::vector<wavefield::PlaneWaveMode> modes;
  std::vector<wavefield::GridPoint> grid;
  spacetime::SpacetimeEvent emitter;
  spacetime::SpacetimeEvent absorber;
};

FieldSetup build_field(const config::ScenarioConfig& cfg) {
  FieldSetup setup;
  setup.emitter = spacetime::event_1d(cfg.emit_x, cfg.emit_t, "emitter");
  setup.absorber = spacetime::event_1d(cfg.absorb_x, cfg.absorb_t, "absorber");
  setup.modes = wavefield::handshake_modes(setup.emitter, setup.absorber,
                                           {cfg.amplitude, 0.0}, cfg.wavenumber,
                                           cfg.angular_frequency);
  const double span = cfg.absorb_t - cfg.emit_t;
  const double x_min = cfg.grid_x_set ? cfg.grid_x_min : cfg.emit_x - span;
  const double x_max = cfg.grid_x_set ? cfg.grid_x_max : cfg.absorb_x + span;
  const double t_min = cfg.grid_t_set ? cfg.grid_t_min : cfg.emit_t - span;
  const double t_max = cfg.grid_t_set ? cfg.grid_t_max : cfg.absorb_t + span;
  setup.grid = wavefield::make_grid(x_min, x_max, cfg.grid_nx, t_min, t_max, cfg.grid_nt);
  return setup;
}

RunOutcome run_handshake_field(const config::ScenarioConfig& cfg, const fs::path& out_dir,
                               unsigned threads) {
  (void)threads;
  const FieldSetup setup = build_field(cfg);
  const std::vector<wavefield::FieldSample> samples =
      wavefield::superpose(setup.modes, setup.grid);

  // Outside the handshake window the four modes cancel pairwise; inside, the
  // survivors form the standing wave 2iA sin(kx - wt).
  const double a = cfg.amplitude;
  std::size_t before = 0;
  std::size_t interior = 0;
  std::size_t after = 0;
  std::size_t boundary = 0;
  double max_outside = 0.0;
  double max_interior_rel = 0.0;
  for (const wavefield::FieldSample& s : samples) {
    if (s.t == cfg.emit_t || s.t == cfg.absorb_t) {
      ++boundary;
      continue;
    }
    if (s.t < cfg.emit_t || s.t > cfg.absorb_t) {
      if (s.t < cfg.emit_t) {
        ++before;
      } else {
        ++after;
      }
      max_outside = std::max(max_outside, std::abs(s.value));
      continue;
    }
    ++interior;
    const double phase = cfg.wavenumber * s.x - cfg.angular_frequency * s.t;
    const std::complex<double> expected{0.0, 2.0 * (a * std::sin(phase))};
    const double deviation = std::abs(s.value - expected);
    const double scale = std::abs(expected);
    if (scale > 0.0) {
      max_interior_rel = std::max(max_interior_rel, deviation / scale);
    } else if (deviation > 0.0) {
      max_interior_rel = std::numeric_limits<double>::infinity();
    }
  }

  const double outside_tolerance = 1e-12 * std::abs(a);
  const double interior_tolerance = 1e-12;
  const bool outside_ok = max_outside <= outside_tolerance;
  const bool interior_ok = max_interior_rel <= interior_tolerance;
  const auto cost = wavefield::emission_cost(setup.modes);
  const auto emitter_pair = wavefield::emitter_modes({cfg.amplitude, 0.0}, cfg.wavenumber,
                                                     cfg.angular_frequency, setup.emitter);
  const auto pair_cost = wavefield::emission_cost(emitter_pair);
  const bool cost_ok = pair_cost.energy == 0.0 && pair_cost.momentum == 0.0;

  bool pass = outside_ok && interior_ok && cost_ok;
  std::string summary = common_header(cfg);
  summary += "amplitude: " + format_real(cfg.amplitude) + '\n';
  summary += "wavenumber: " + format_real(cfg.wavenumber) + '\n';
  summary += "angular_frequency: " + format_real(cfg.angular_frequency) + '\n';
  summary += "samples: total=" + std::to_string(samples.size()) +
             " before=" + std::to_string(before) + " interior=" + std::to_string(interior) +
             " after=" + std::to_string(after) + " boundary=" + std::to_string(boundary) + '\n';
  summary += "max_outside_abs: " + format_real(max_outside) +
             " tolerance=" + format_real(outside_tolerance) +
             (outside_ok ? " pass=yes\n" : " pass=no\n");
  summary += "max_interior_rel: " + format_real(max_interior_rel) +
             " tolerance=" + format_real(interior_tolerance) +
             (interior_ok ? " pass=yes\n" : " pass=no\n");
  summary += "emission_cost: energy=" + format_real(pair_cost.energy) +
             " momentum=" + format_real(pair_cost.momentum) +
             (cost_ok ? " pass=yes\n" : " pass=no\n");
  summary += "handshake_cost: energy=" + format_real(cost.energy) +
             " momentum=" + format_real(cost.momentum) + '\n';
  summary += pass ? "result: PASS\n" : "result: FAIL\n";

  RunOutcome outcome;
  outcome.summary = summary;
  outcome.checks_passed = pass;
  write_artifact(outcome, out_dir / "transactions.csv",
                 report::transaction_log_csv({}));
  write_artifact(outcome, out_dir / "field.csv", report::field_csv(samples));
  write_artifact(outcome, out_dir / "summary.txt", summary);
  return outcome;
}

}  // namespace

RunOutcome execute_run(const config::ScenarioConfig& config, const fs::path& out_dir,
                       unsigned threads) {
  fs::create_directories(out_dir);
  switch (config.scenario) {
    case config::ScenarioKind::Bubble: return run_bubble(config, out_dir, threads);
    case config::ScenarioKind::Epr: return run_epr(config, out_dir, threads);
    case config::ScenarioKind::Chsh: return run_chsh(config, out_dir, threads);
    case config::ScenarioKind::Maudlin: return run_maudlin(config, out_dir, threads);
    case config::ScenarioKind::HandshakeField:
      return run_handshake_field(config, out_dir, threads);
  }
  throw std::logic_error("unhandled scenario kind");
}

fs::path execute_field_dump(const config::ScenarioConfig& config, const fs::path& out_dir) {
  if (config.scenario != config::ScenarioKind::HandshakeField) {
    throw std::invalid_argument("field dumps need scenario 'handshake-field'");
  }
  fs::create_directories(out_dir);
  const FieldSetup setup = build_field(config);
  const std::vector<wavefield::FieldSample> samples =
      wavefield::superpose(setup.modes, setup.grid);
  const fs::path path = out_dir / "field.csv";
  report::write_text_file(path, report::field_csv(samples));
  return path;
}

}  // namespace tqm::runner
