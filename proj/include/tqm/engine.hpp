#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tqm/rng.hpp"
#include "tqm/spacetime.hpp"

namespace tqm::engine {

using spacetime::Interval;
using spacetime::SpacetimeEvent;
using spacetime::Vec3;

enum class Mode { Normalized, Absolute };

// A potential absorber's confirmation as it arrives back at the emitter.
// strength is the offer-confirmation product psi psi*, a nonnegative real.
struct Echo {
  std::string absorber_id;
  double strength = 0.0;
  Interval interval_to_emitter;
  std::string outcome_label;
};

// |psi|^2 for the usual conjugate return leg.
double echo_strength(std::complex<double> offer_at_absorber);

// |offer * confirmation| for an explicitly attenuated return leg.
double echo_strength(std::complex<double> offer_at_absorber,
                     std::complex<double> confirmation_at_emitter);

struct ConsultRecord {
  std::string absorber_id;
  double squared_interval = 0.0;
  double conditional_probability = 0.0;
  bool accepted = false;
};

struct SelectionOutcome {
  std::optional<std::size_t> chosen_index;  // position in the echo walk
  std::optional<std::string> chosen;        // absorber id; nullopt = no transaction
  std::vector<double> probabilities_used;   // realized marginal per echo
  std::vector<ConsultRecord> considered;    // audit trail, consultation order
};

// Walks echoes in ascending-interval order and accepts echo i with
// conditional probability strength_i / R_i, where R_i is the mass not yet
// consumed: the suffix sum of strengths in normalized mode, 1 minus the
// prefix sum in absolute mode. Acceptance ends the walk, so echoes from
// larger intervals are never consulted once a nearer one has completed.
// The marginal acceptance probability telescopes to strength_i / total
// (normalized) or strength_i (absolute).
SelectionOutcome hierarchical_select(std::span<const Echo> echoes, Mode mode,
                                     UniformStream& randomness);

// Contingent echo supply for absolute mode: next() is pulled only after every
// earlier echo has been rejected, so an absorber may owe its existence to the
// rejections before it. Echoes must arrive in nondecreasing interval order
// with cumulative strength <= 1.
class EchoSource {
public:
  virtual ~EchoSource() = default;
  virtual std::optional<Echo> next() = 0;
};

SelectionOutcome hierarchical_select(EchoSource& source, UniformStream& randomness);

struct LedgerEntry {
  double energy = 0.0;
  Vec3 momentum;
};

// A completed transaction: emitter vertex first, absorbers after it, the
// ledger parallel to the vertices. The emitter entry is built as the exact
// negation of the absorber sum, so the conservation residual is exactly zero.
struct Transaction {
  std::vector<SpacetimeEvent> vertices;
  std::vector<LedgerEntry> ledger;
  std::vector<std::string> outcome_labels;
  double transferred_energy = 0.0;
  double transferred_momentum = 0.0;
  std::uint64_t trial_index = 0;
};

// Residuals are summed absorbers first, emitter last.
double ledger_energy_residual(const Transaction& tx);
Vec3 ledger_momentum_residual(const Transaction& tx);

// One quantum of the string field, hbar = 1.
struct Quantum {
  double omega = 1.0;
  double wavenumber = 1.0;
};

Transaction two_vertex_transaction(const SpacetimeEvent& emitter, const SpacetimeEvent& absorber,
                                   const Quantum& quantum, const std::string& outcome_label,
                                   std::uint64_t trial_index);

struct TrialResult {
  std::uint64_t trial_index = 0;
  SelectionOutcome selection;
  std::optional<Transaction> transaction;
};

// One full emission trial: echoes from the offers, hierarchy ordering,
// stochastic choice, then transfer of exactly one quantum to the chosen
// absorber. An empty absorber list or an all-rejected walk yields a
// no-transaction record.
TrialResult run_transaction(const SpacetimeEvent& emitter,
                            const std::vector<SpacetimeEvent>& absorbers,
                            std::span<const std::complex<double>> offers_at_absorbers, Mode mode,
                            const Quantum& quantum, UniformStream& randomness,
                            std::uint64_t trial_index = 0,
                            std::span<const std::string> outcome_labels = {});

struct FrequencyTable {
  std::vector<std::string> ids;
  std::vector<std::uint64_t> counts;
  std::vector<double> frequencies;
  std::uint64_t none_count = 0;
  double none_frequency = 0.0;
  std::uint64_t total = 0;
};

FrequencyTable born_frequencies(std::span<const TrialResult> trials,
                                std::span<const std::string> absorber_ids);

// Bulk sampler sharing the exact walk arithmetic of hierarchical_select:
// entry t is the echo index chosen by trial t, or echoes.size() for a
// no-transaction walk. Trial t draws from TrialRng(seed, trial_offset + t).
std::vector<std::uint32_t> select_indices(std::span<const Echo> echoes, Mode mode,
                                          std::uint64_t seed, std::uint64_t trials,
                                          unsigned threads = 0, std::uint64_t trial_offset = 0);

// Counts per echo index plus a trailing bin for no-transaction walks.
std::vector<std::uint64_t> tally_selections(std::span<const Echo> echoes, Mode mode,
                                            std::uint64_t seed, std::uint64_t trials,
                                            unsigned threads = 0, std::uint64_t trial_offset = 0);

}  // namespace tqm::engine
