#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "tqm/engine.hpp"
#include "tqm/spacetime.hpp"
#include "tqm/stats.hpp"

namespace tqm::scenarios {

using engine::Echo;
using engine::Mode;
using spacetime::SpacetimeEvent;
using spacetime::Vec3;

// A detector competing for the quantum. weight is its coverage factor;
// polarimeter_angle only matters to the EPR analyzers.
struct DetectorSpec {
  std::string id;
  Vec3 position;
  double weight = 1.0;
  double polarimeter_angle = 0.0;  // radians in [0, pi)
};

// One line of the transaction log.
struct LogRow {
  std::uint64_t trial = 0;
  std::string chosen;  // absorber id, or "none"
  std::string outcome;
  double energy = 0.0;
  double momentum = 0.0;
};

// --- Einstein bubble --------------------------------------------------------

// The detector at distance r returns an echo of strength weight / r^2 (offer
// amplitude sqrt(weight) / r), so the whole spherical offer collapses to
// exactly one detector per trial.
std::vector<Echo> bubble_echoes(const SpacetimeEvent& source,
                                const std::vector<DetectorSpec>& detectors);

// Absorption vertex for a detector: the offer front reaches it at t0 + r.
SpacetimeEvent absorption_event(const SpacetimeEvent& source, const DetectorSpec& detector);

struct BubbleScenario {
  SpacetimeEvent source;  // default: origin
  std::vector<DetectorSpec> detectors;
  Mode mode = Mode::Normalized;
  engine::Quantum quantum;
};

struct BubbleReport {
  std::vector<std::string> detector_ids;
  std::vector<std::uint64_t> counts;
  std::vector<double> frequencies;
  std::vector<double> expected;  // per-detector selection probability
  std::uint64_t none_count = 0;
  double none_frequency = 0.0;
  double none_expected = 0.0;
  stats::GofReport gof;
  double max_energy_residual = 0.0;
  double max_momentum_residual = 0.0;
  std::uint64_t trials = 0;
  std::vector<LogRow> log;
};

BubbleReport run_bubble(const BubbleScenario& scenario, std::uint64_t trials, std::uint64_t seed,
                        unsigned threads = 0, bool keep_log = true);

// --- Freedman-Clauser pair --------------------------------------------------

enum class Polarization { H, V };

// Two-photon polarization state, fixed to the HV-correlated Bell pair
// (|HH> + |VV>) / sqrt(2).
class EntangledPairState {
public:
  static EntangledPairState hv_correlated();

  // Projection amplitude onto the joint analyzer outcome: left analyzer at
  // theta_left, right at theta_right, each passing its H or V port.
  std::complex<double> amplitude(Polarization left, Polarization right, double theta_left,
                                 double theta_right) const;

  double norm_squared() const;

private:
  // Basis order HH, HV, VH, VV.
  std::array<std::complex<double>, 4> amplitudes_{};
};

struct JointOutcome {
  Polarization left = Polarization::H;
  Polarization right = Polarization::H;
  std::complex<double> amplitude;
  double strength = 0.0;
  std::string label;  // "HH", "HV", "VH", "VV"
};

// The four joint echoes of the two-analyzer handshake. HH and VV carry
// cos^2(dtheta)/2, HV and VH carry sin^2(dtheta)/2, dtheta the analyzer
// offset; coincident analyzers give exactly zero mismatch strength.
std::array<JointOutcome, 4> epr_joint_strengths(double theta_left, double theta_right);

struct EprScenario {
  double theta_left = 0.0;   // radians in [0, pi)
  double theta_right = 0.0;  // radians in [0, pi)
  double arm_length = 1.0;
  engine::Quantum quantum;
};

struct EprReport {
  std::array<std::uint64_t, 4> counts{};  // HH, HV, VH, VV
  std::array<double, 4> expected{};
  std::uint64_t trials = 0;
  double opposite_fraction = 0.0;  // HV + VH rate
  double opposite_expected = 0.0;
  double correlation = 0.0;  // E = P(same) - P(opposite)
  double correlation_expected = 0.0;
  stats::GofReport gof;
  double max_energy_residual = 0.0;
  double max_momentum_residual = 0.0;
  std::vector<LogRow> log;
};

// Each trial picks one of the four joint outcomes through the standard echo
// competition and transfers one quantum into each arm of a three-vertex
// transaction.
EprReport run_epr(const EprScenario& scenario, std::uint64_t trials, std::uint64_t seed,
                  unsigned threads = 0, bool keep_log = true);

// --- CHSH -------------------------------------------------------------------

struct ChshSettings {
  double a = 0.0;
  double a_prime = 0.0;
  double b = 0.0;
  double b_prime = 0.0;
};

struct ChshSettingStats {
  double alpha = 0.0;
  double beta = 0.0;
  std::array<std::uint64_t, 4> counts{};
  double correlation = 0.0;
  double correlation_expected = 0.0;
  double sigma = 0.0;
};

struct ChshReport {
  std::array<ChshSettingStats, 4> settings{};  // (a,b), (a,b'), (a',b), (a',b')
  double s_estimate = 0.0;
  double s_sigma = 0.0;
  double s_analytic = 0.0;
  std::uint64_t trials_per_setting = 0;
  double max_energy_residual = 0.0;
  double max_momentum_residual = 0.0;
  std::vector<LogRow> log;  // settings concatenated; trial = setting * N + local
};

// S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')| from four seeded sub-runs, with
// the analytic value from the projection strengths alongside.
ChshReport chsh_s(const ChshSettings& settings, std::uint64_t trials_per_setting,
                  std::uint64_t seed, unsigned threads = 0, bool keep_log = false);

// Local-hidden-variable baseline: both photons carry the same polarization
// lambda and each analyzer answers deterministically by the nearer axis.
// Mismatch grows linearly in the offset, and S stays within 2 for every
// setting choice. lambda is swept over a uniform midpoint grid.
double lhv_correlation(double alpha, double beta, std::size_t lambda_grid = 4096);
double lhv_chsh_s(const ChshSettings& settings, std::size_t lambda_grid = 4096);

// --- Contingent absorber ----------------------------------------------------

// A slow quantum with a nearby absorber of echo strength near_strength and a
// second absorber that only enters the game when the first one passes: the
// hierarchy must settle the near absorber before the far one is consulted.
struct MaudlinScenario {
  SpacetimeEvent emitter;
  SpacetimeEvent near_absorber;
  SpacetimeEvent far_absorber;
  double near_strength = 0.5;
  engine::Quantum quantum;
};

struct MaudlinReport {
  std::uint64_t near_count = 0;
  std::uint64_t far_count = 0;
  std::uint64_t none_count = 0;
  double near_frequency = 0.0;
  double far_frequency = 0.0;
  std::uint64_t far_consultations = 0;  // trials that had to wake the far absorber
  bool audit_ok = true;  // every trial consulted strictly ascending intervals, near first
  stats::GofReport gof;
  std::uint64_t trials = 0;
  double max_energy_residual = 0.0;
  double max_momentum_residual = 0.0;
  std::vector<LogRow> log;
};

MaudlinReport run_maudlin(const MaudlinScenario& scenario, std::uint64_t trials,
                          std::uint64_t seed, unsigned threads = 0, bool keep_log = true);

}  // namespace tqm::scenarios
