#include "tqm/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "tqm/parallel.hpp"
#include "tqm/rng.hpp"

namespace tqm::scenarios {

namespace {

constexpr double kPi = std::numbers::pi;

// chi_square needs two bins of real expected mass; degenerate splits reduce
// to an exact zero-count check on the impossible bins.
stats::GofReport gof_or_trivial(std::span<const std::uint64_t> observed,
                                std::span<const double> expected, std::uint64_t total,
                                double alpha = stats::kDefaultAlpha) {
  std::size_t live_bins = 0;
  for (const double p : expected) {
    if (p > 0.0) ++live_bins;
  }
  if (total > 0 && live_bins >= 2) return stats::chi_square(observed, expected, total, alpha);
  stats::GofReport trivial;
  trivial.alpha = alpha;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i] == 0.0 && observed[i] > 0) {
      trivial.statistic = std::numeric_limits<double>::infinity();
      trivial.p_value = 0.0;
      trivial.pass = false;
    }
  }
  return trivial;
}

void track_residuals(const engine::Transaction& tx, double& max_energy, double& max_momentum) {
  max_energy = std::max(max_energy, std::abs(engine::ledger_energy_residual(tx)));
  max_momentum = std::max(max_momentum, spacetime::norm(engine::ledger_momentum_residual(tx)));
}

void check_angle(double theta, const char* what) {
  if (!(theta >= 0.0 && theta < kPi)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, pi)");
  }
}

}  // namespace

// --- Einstein bubble --------------------------------------------------------

SpacetimeEvent absorption_event(const SpacetimeEvent& source, const DetectorSpec& detector) {
  const double r = spacetime::norm(detector.position - source.position);
  return {detector.position, source.t + r, detector.id};
}

std::vector<Echo> bubble_echoes(const SpacetimeEvent& source,
                                const std::vector<DetectorSpec>& detectors) {
  if (detectors.empty()) throw std::invalid_argument("bubble needs at least one detector");
  std::vector<SpacetimeEvent> events;
  events.reserve(detectors.size());
  for (const DetectorSpec& d : detectors) {
    if (!(d.weight >= 0.0) || !std::isfinite(d.weight)) {
      throw std::invalid_argument("detector weight must be finite and nonnegative");
    }
    const double r = spacetime::norm(d.position - source.position);
    if (!(r > 0.0)) throw std::invalid_argument("detector '" + d.id + "' sits on the source");
    events.push_back(absorption_event(source, d));
  }
  const std::vector<std::size_t> order = spacetime::hierarchy_permutation(source, events);
  std::vector<Echo> echoes;
  echoes.reserve(detectors.size());
  for (const std::size_t i : order) {
    const double r = spacetime::norm(detectors[i].position - source.position);
    const std::complex<double> offer{std::sqrt(detectors[i].weight) / r, 0.0};
    Echo e;
    e.absorber_id = detectors[i].id;
    e.strength = engine::echo_strength(offer);
    e.interval_to_emitter = spacetime::interval(source, events[i]);
    e.outcome_label = detectors[i].id;
    echoes.push_back(std::move(e));
  }
  return echoes;
}

BubbleReport run_bubble(const BubbleScenario& scenario, std::uint64_t trials, std::uint64_t seed,
                        unsigned threads, bool keep_log) {
  const std::vector<Echo> echoes = bubble_echoes(scenario.source, scenario.detectors);
  const std::size_t n = echoes.size();

  double total_strength = 0.0;
  for (const Echo& e : echoes) total_strength += e.strength;
  if (scenario.mode == Mode::Normalized && total_strength <= 0.0) {
    throw std::invalid_argument("every detector echo is zero; nothing can be absorbed");
  }

  BubbleReport report;
  report.trials = trials;
  report.detector_ids.reserve(n);
  for (const Echo& e : echoes) report.detector_ids.push_back(e.absorber_id);

  report.expected.resize(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    report.expected[i] = scenario.mode == Mode::Normalized ? echoes[i].strength / total_strength
                                                           : echoes[i].strength;
  }
  report.none_expected =
      scenario.mode == Mode::Normalized ? 0.0 : std::max(0.0, 1.0 - total_strength);

  const std::vector<std::uint32_t> choices =
      engine::select_indices(echoes, scenario.mode, seed, trials, threads);

  report.counts.assign(n, 0);
  for (const std::uint32_t c : choices) {
    if (c < n) {
      ++report.counts[c];
    } else {
      ++report.none_count;
    }
  }
  report.frequencies.resize(n, 0.0);
  if (trials > 0) {
    for (std::size_t i = 0; i < n; ++i) {
      report.frequencies[i] =
          static_cast<double>(report.counts[i]) / static_cast<double>(trials);
    }
    report.none_frequency = static_cast<double>(report.none_count) / static_cast<double>(trials);
  }

  // Ledger bookkeeping; the transaction for a given detector is identical in
  // every trial that selects it.
  std::vector<engine::Transaction> representative(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (report.counts[i] == 0 && !keep_log) continue;
    const SpacetimeEvent vertex = [&] {
      for (const DetectorSpec& d : scenario.detectors) {
        if (d.id == echoes[i].absorber_id) return absorption_event(scenario.source, d);
      }
      throw std::logic_error("echo id lost its detector");
    }();
    representative[i] = engine::two_vertex_transaction(scenario.source, vertex, scenario.quantum,
                                                       echoes[i].outcome_label, 0);
    if (report.counts[i] > 0) {
      track_residuals(representative[i], report.max_energy_residual,
                      report.max_momentum_residual);
    }
  }

  if (keep_log) {
    report.log.reserve(trials);
    for (std::uint64_t t = 0; t < trials; ++t) {
      const std::uint32_t c = choices[t];
      if (c < n) {
        report.log.push_back({t, echoes[c].absorber_id, echoes[c].outcome_label,
                              representative[c].transferred_energy,
                              representative[c].transferred_momentum});
      } else {
        report.log.push_back({t, "none", "", 0.0, 0.0});
      }
    }
  }

  const bool exclude_none = scenario.mode == Mode::Normalized;
  std::vector<std::uint64_t> observed(report.counts.begin(), report.counts.end());
  std::vector<double> expected(report.expected.begin(), report.expected.end());
  if (!exclude_none) {
    observed.push_back(report.none_count);
    expected.push_back(report.none_expected);
  }
  report.gof = gof_or_trivial(observed, expected, trials);
  return report;
}

// --- Freedman-Clauser pair --------------------------------------------------

EntangledPairState EntangledPairState::hv_correlated() {
  EntangledPairState state;
  const double a = 1.0 / std::sqrt(2.0);
  state.amplitudes_[0] = {a, 0.0};  // HH
  state.amplitudes_[3] = {a, 0.0};  // VV
  return state;
}

std::complex<double> EntangledPairState::amplitude(Polarization left, Polarization right,
                                                   double theta_left, double theta_right) const {
  check_angle(theta_left, "left analyzer angle");
  check_angle(theta_right, "right analyzer angle");
  const auto axis = [](Polarization p, double theta) {
    return p == Polarization::H ? std::array<double, 2>{std::cos(theta), std::sin(theta)}
                                : std::array<double, 2>{-std::sin(theta), std::cos(theta)};
  };
  const std::array<double, 2> l = axis(left, theta_left);
  const std::array<double, 2> r = axis(right, theta_right);
  std::complex<double> out{0.0, 0.0};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out += l[i] * r[j] * amplitudes_[static_cast<std::size_t>(i) * 2 + j];
    }
  }
  return out;
}

double EntangledPairState::norm_squared() const {
  double n = 0.0;
  for (const auto& a : amplitudes_) n += std::norm(a);
  return n;
}

std::array<JointOutcome, 4> epr_joint_strengths(double theta_left, double theta_right) {
  const EntangledPairState state = EntangledPairState::hv_correlated();
  const std::array<std::pair<Polarization, Polarization>, 4> ports = {
      std::pair{Polarization::H, Polarization::H}, std::pair{Polarization::H, Polarization::V},
      std::pair{Polarization::V, Polarization::H}, std::pair{Polarization::V, Polarization::V}};
  const std::array<const char*, 4> labels = {"HH", "HV", "VH", "VV"};
  std::array<JointOutcome, 4> out;
  for (std::size_t i = 0; i < 4; ++i) {
    out[i].left = ports[i].first;
    out[i].right = ports[i].second;
    out[i].amplitude = state.amplitude(ports[i].first, ports[i].second, theta_left, theta_right);
    out[i].strength = std::norm(out[i].amplitude);
    out[i].label = labels[i];
  }
  return out;
}

namespace {

struct EprGeometry {
  SpacetimeEvent source;
  SpacetimeEvent left;
  SpacetimeEvent right;
};

EprGeometry epr_geometry(double arm_length) {
  if (!(arm_length > 0.0) || !std::isfinite(arm_length)) {
    throw std::invalid_argument("arm length must be positive and finite");
  }
  EprGeometry g;
  g.source = {{0.0, 0.0, 0.0}, 0.0, "source"};
  g.left = {{-arm_length, 0.0, 0.0}, arm_length, "L"};
  g.right = {{arm_length, 0.0, 0.0}, arm_length, "R"};
  return g;
}

// Three vertices, one quantum into each arm; the emitter entry is the exact
// negation of the absorber sum taken in ledger order.
engine::Transaction epr_transaction(const EprGeometry& g, const engine::Quantum& quantum,
                                    const std::string& joint_label, std::uint64_t trial_index) {
  const auto arm_entry = [&](const SpacetimeEvent& arm) {
    const Vec3 dir = arm.position - g.source.position;
    const double len = spacetime::norm(dir);
    return engine::LedgerEntry{quantum.omega, quantum.wavenumber * ((1.0 / len) * dir)};
  };
  const engine::LedgerEntry left = arm_entry(g.left);
  const engine::LedgerEntry right = arm_entry(g.right);
  const double energy_sum = left.energy + right.energy;
  const Vec3 momentum_sum = left.momentum + right.momentum;
  engine::Transaction tx;
  tx.vertices = {g.source, g.left, g.right};
  tx.ledger = {{-energy_sum, -momentum_sum}, left, right};
  tx.outcome_labels = {std::string{}, joint_label.substr(0, 1), joint_label.substr(1, 1)};
  tx.transferred_energy = energy_sum;
  tx.transferred_momentum = 2.0 * std::abs(quantum.wavenumber);
  tx.trial_index = trial_index;
  return tx;
}

std::vector<Echo> epr_echoes(const std::array<JointOutcome, 4>& joints, const EprGeometry& g) {
  const spacetime::Interval iv = spacetime::interval(g.source, g.left);
  std::vector<Echo> echoes;
  echoes.reserve(4);
  for (const JointOutcome& j : joints) {
    Echo e;
    e.absorber_id = j.label;
    e.strength = j.strength;
    e.interval_to_emitter = iv;
    e.outcome_label = j.label;
    echoes.push_back(std::move(e));
  }
  return echoes;
}

}  // namespace

EprReport run_epr(const EprScenario& scenario, std::uint64_t trials, std::uint64_t seed,
                  unsigned threads, bool keep_log) {
  check_angle(scenario.theta_left, "left analyzer angle");
  check_angle(scenario.theta_right, "right analyzer angle");
  const EprGeometry g = epr_geometry(scenario.arm_length);
  const std::array<JointOutcome, 4> joints =
      epr_joint_strengths(scenario.theta_left, scenario.theta_right);
  const std::vector<Echo> echoes = epr_echoes(joints, g);

  EprReport report;
  report.trials = trials;
  for (std::size_t i = 0; i < 4; ++i) report.expected[i] = joints[i].strength;

  const std::vector<std::uint32_t> choices =
      engine::select_indices(echoes, Mode::Normalized, seed, trials, threads);
  for (const std::uint32_t c : choices) {
    if (c >= 4) throw std::logic_error("joint echo competition left no winner");
    ++report.counts[c];
  }

  if (trials > 0) {
    const double n = static_cast<double>(trials);
    report.opposite_fraction =
        (static_cast<double>(report.counts[1]) + static_cast<double>(report.counts[2])) / n;
    report.correlation = (static_cast<double>(report.counts[0]) +
                          static_cast<double>(report.counts[3])) /
                             n -
                         report.opposite_fraction;
  }
  report.opposite_expected = report.expected[1] + report.expected[2];
  report.correlation_expected =
      report.expected[0] + report.expected[3] - report.opposite_expected;

  std::array<engine::Transaction, 4> representative;
  for (std::size_t i = 0; i < 4; ++i) {
    representative[i] = epr_transaction(g, scenario.quantum, joints[i].label, 0);
    if (report.counts[i] > 0) {
      track_residuals(representative[i], report.max_energy_residual,
                      report.max_momentum_residual);
    }
  }

  if (keep_log) {
    report.log.reserve(trials);
    for (std::uint64_t t = 0; t < trials; ++t) {
      const std::uint32_t c = choices[t];
      report.log.push_back({t, "L+R", joints[c].label, representative[c].transferred_energy,
                            representative[c].transferred_momentum});
    }
  }

  report.gof = gof_or_trivial(report.counts, report.expected, trials);
  return report;
}

// --- CHSH -------------------------------------------------------------------

ChshReport chsh_s(const ChshSettings& settings, std::uint64_t trials_per_setting,
                  std::uint64_t seed, unsigned threads, bool keep_log) {
  check_angle(settings.a, "setting a");
  check_angle(settings.a_prime, "setting a'");
  check_angle(settings.b, "setting b");
  check_angle(settings.b_prime, "setting b'");
  if (trials_per_setting == 0) throw std::invalid_argument("need at least one trial per setting");

  const std::array<std::pair<double, double>, 4> pairs = {
      std::pair{settings.a, settings.b}, std::pair{settings.a, settings.b_prime},
      std::pair{settings.a_prime, settings.b}, std::pair{settings.a_prime, settings.b_prime}};

  ChshReport report;
  report.trials_per_setting = trials_per_setting;
  for (std::size_t i = 0; i < 4; ++i) {
    EprScenario scenario;
    scenario.theta_left = pairs[i].first;
    scenario.theta_right = pairs[i].second;
    const EprReport arm =
        run_epr(scenario, trials_per_setting, derive_seed(seed, i), threads, keep_log);
    if (keep_log) {
      report.log.reserve(report.log.size() + arm.log.size());
      for (const LogRow& row : arm.log) {
        report.log.push_back({i * trials_per_setting + row.trial, row.chosen, row.outcome,
                              row.energy, row.momentum});
      }
    }
    report.max_energy_residual = std::max(report.max_energy_residual, arm.max_energy_residual);
    report.max_momentum_residual =
        std::max(report.max_momentum_residual, arm.max_momentum_residual);
    ChshSettingStats& s = report.settings[i];
    s.alpha = pairs[i].first;
    s.beta = pairs[i].second;
    s.counts = arm.counts;
    s.correlation = arm.correlation;
    s.correlation_expected = arm.correlation_expected;
    s.sigma = std::sqrt(std::max(0.0, 1.0 - arm.correlation * arm.correlation) /
                        static_cast<double>(trials_per_setting));
  }
  const auto combine = [](double e_ab, double e_abp, double e_apb, double e_apbp) {
    return e_ab - e_abp + e_apb + e_apbp;
  };
  report.s_estimate =
      std::abs(combine(report.settings[0].correlation, report.settings[1].correlation,
                       report.settings[2].correlation, report.settings[3].correlation));
  report.s_analytic = std::abs(
      combine(report.settings[0].correlation_expected, report.settings[1].correlation_expected,
              report.settings[2].correlation_expected, report.settings[3].correlation_expected));
  double var = 0.0;
  for (const ChshSettingStats& s : report.settings) var += s.sigma * s.sigma;
  report.s_sigma = std::sqrt(var);
  return report;
}

double lhv_correlation(double alpha, double beta, std::size_t lambda_grid) {
  if (lambda_grid == 0) throw std::invalid_argument("lambda grid must be nonempty");
  double acc = 0.0;
  for (std::size_t j = 0; j < lambda_grid; ++j) {
    const double lambda =
        kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(lambda_grid);
    const double sa = std::cos(2.0 * (alpha - lambda)) >= 0.0 ? 1.0 : -1.0;
    const double sb = std::cos(2.0 * (beta - lambda)) >= 0.0 ? 1.0 : -1.0;
    acc += sa * sb;
  }
  return acc / static_cast<double>(lambda_grid);
}

double lhv_chsh_s(const ChshSettings& settings, std::size_t lambda_grid) {
  return std::abs(lhv_correlation(settings.a, settings.b, lambda_grid) -
                  lhv_correlation(settings.a, settings.b_prime, lambda_grid) +
                  lhv_correlation(settings.a_prime, settings.b, lambda_grid) +
                  lhv_correlation(settings.a_prime, settings.b_prime, lambda_grid));
}

// --- Contingent absorber ----------------------------------------------------

namespace {

// Supplies the near echo unconditionally and the far one only on demand,
// mirroring an absorber that is only moved into the beam after the near
// detector has failed to fire.
class ContingentEchoSource final : public engine::EchoSource {
public:
  ContingentEchoSource(const Echo& near, const Echo& far) : near_(&near), far_(&far) {}

  std::optional<Echo> next() override {
    ++stage_;
    if (stage_ == 1) return *near_;
    if (stage_ == 2) return *far_;
    return std::nullopt;
  }

  bool far_consulted() const { return stage_ >= 2; }

private:
  const Echo* near_;
  const Echo* far_;
  int stage_ = 0;
};

}  // namespace

MaudlinReport run_maudlin(const MaudlinScenario& scenario, std::uint64_t trials,
                          std::uint64_t seed, unsigned threads, bool keep_log) {
  if (!(scenario.near_strength >= 0.0 && scenario.near_strength <= 1.0)) {
    throw std::invalid_argument("near echo strength must lie in [0, 1]");
  }
  const std::vector<SpacetimeEvent> absorbers = {scenario.near_absorber, scenario.far_absorber};
  const std::vector<std::size_t> order =
      spacetime::hierarchy_permutation(scenario.emitter, absorbers);
  if (order[0] != 0) {
    throw std::invalid_argument("near absorber must rank before the far absorber");
  }
  const spacetime::Interval near_iv = spacetime::interval(scenario.emitter, scenario.near_absorber);
  const spacetime::Interval far_iv = spacetime::interval(scenario.emitter, scenario.far_absorber);
  if (!(near_iv.squared < far_iv.squared)) {
    throw std::invalid_argument("near absorber must rank before the far absorber");
  }

  Echo near;
  near.absorber_id = scenario.near_absorber.id;
  near.strength = scenario.near_strength;
  near.interval_to_emitter = near_iv;
  near.outcome_label = scenario.near_absorber.id;
  Echo far;
  far.absorber_id = scenario.far_absorber.id;
  far.strength = 1.0 - scenario.near_strength;
  far.interval_to_emitter = far_iv;
  far.outcome_label = scenario.far_absorber.id;

  // chosen index in bits 0-1 (2 = none), far consult flag in bit 2, audit
  // flag in bit 3.
  const std::vector<std::uint8_t> outcomes =
      run_trials<std::uint8_t>(trials, threads, [&](std::uint64_t t) -> std::uint8_t {
        TrialRng rng(seed, t);
        ContingentEchoSource source(near, far);
        const engine::SelectionOutcome sel = engine::hierarchical_select(source, rng);
        std::uint8_t chosen = 2;
        if (sel.chosen_index.has_value()) chosen = static_cast<std::uint8_t>(*sel.chosen_index);
        bool audit = !sel.considered.empty() && sel.considered.front().absorber_id == near.absorber_id;
        double last_s2 = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < sel.considered.size(); ++i) {
          if (!(sel.considered[i].squared_interval > last_s2)) audit = false;
          last_s2 = sel.considered[i].squared_interval;
          if (sel.considered[i].accepted && i + 1 != sel.considered.size()) audit = false;
        }
        if (source.far_consulted() && sel.considered.size() != 2) audit = false;
        return static_cast<std::uint8_t>(chosen | (source.far_consulted() ? 4 : 0) |
                                         (audit ? 8 : 0));
      });

  MaudlinReport report;
  report.trials = trials;
  for (const std::uint8_t o : outcomes) {
    switch (o & 3) {
      case 0: ++report.near_count; break;
      case 1: ++report.far_count; break;
      default: ++report.none_count; break;
    }
    if ((o & 4) != 0) ++report.far_consultations;
    if ((o & 8) == 0) report.audit_ok = false;
  }
  if (trials > 0) {
    report.near_frequency = static_cast<double>(report.near_count) / static_cast<double>(trials);
    report.far_frequency = static_cast<double>(report.far_count) / static_cast<double>(trials);
  }

  const engine::Transaction near_tx = engine::two_vertex_transaction(
      scenario.emitter, scenario.near_absorber, scenario.quantum, near.outcome_label, 0);
  const engine::Transaction far_tx = engine::two_vertex_transaction(
      scenario.emitter, scenario.far_absorber, scenario.quantum, far.outcome_label, 0);
  if (report.near_count > 0) {
    track_residuals(near_tx, report.max_energy_residual, report.max_momentum_residual);
  }
  if (report.far_count > 0) {
    track_residuals(far_tx, report.max_energy_residual, report.max_momentum_residual);
  }

  if (keep_log) {
    report.log.reserve(trials);
    for (std::uint64_t t = 0; t < trials; ++t) {
      switch (outcomes[t] & 3) {
        case 0:
          report.log.push_back({t, near.absorber_id, near.outcome_label,
                                near_tx.transferred_energy, near_tx.transferred_momentum});
          break;
        case 1:
          report.log.push_back({t, far.absorber_id, far.outcome_label,
                                far_tx.transferred_energy, far_tx.transferred_momentum});
          break;
        default:
          report.log.push_back({t, "none", "", 0.0, 0.0});
          break;
      }
    }
  }

  const std::array<std::uint64_t, 3> observed = {report.near_count, report.far_count,
                                                 report.none_count};
  const std::array<double, 3> expected = {near.strength, far.strength, 0.0};
  report.gof = gof_or_trivial(observed, expected, trials);
  return report;
}

}  // namespace tqm::scenarios
