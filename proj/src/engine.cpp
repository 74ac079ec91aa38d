#include "tqm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tqm/parallel.hpp"

namespace tqm::engine {

double echo_strength(std::complex<double> offer_at_absorber) {
  return std::norm(offer_at_absorber);
}

double echo_strength(std::complex<double> offer_at_absorber,
                     std::complex<double> confirmation_at_emitter) {
  return std::abs(offer_at_absorber * confirmation_at_emitter);
}

namespace {

void validate_echoes(std::span<const Echo> echoes, Mode mode) {
  double sum = 0.0;
  double last_s2 = -std::numeric_limits<double>::infinity();
  for (const Echo& e : echoes) {
    if (!std::isfinite(e.strength) || e.strength < 0.0) {
      throw std::invalid_argument("echo strength must be finite and nonnegative");
    }
    if (e.interval_to_emitter.squared < last_s2) {
      throw std::invalid_argument("echoes are not in ascending interval order");
    }
    last_s2 = e.interval_to_emitter.squared;
    sum += e.strength;
  }
  if (mode == Mode::Absolute && sum > 1.0 + 1e-9) {
    throw std::invalid_argument("absolute echo strengths exceed unit total");
  }
}

// Precomputed per-echo walk quantities. conditional[i] is strength_i over the
// remaining mass; stop_before[i] marks exhaustion, which in normalized mode
// can only happen when every echo from i on has zero strength.
struct WalkPlan {
  std::vector<double> conditional;
  std::vector<double> marginal;
  std::vector<char> stop_before;
};

WalkPlan make_walk_plan(std::span<const Echo> echoes, Mode mode) {
  validate_echoes(echoes, mode);
  const std::size_t n = echoes.size();
  WalkPlan plan{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                std::vector<char>(n, 0)};
  if (mode == Mode::Normalized) {
    // Suffix sums built backward so the last positive echo sees exactly its
    // own strength as the remainder and is accepted with certainty.
    std::vector<double> remaining(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) remaining[i] = echoes[i].strength + remaining[i + 1];
    const double total = remaining[0];
    for (std::size_t i = 0; i < n; ++i) {
      plan.stop_before[i] = remaining[i] <= 0.0 ? 1 : 0;
      plan.conditional[i] =
          remaining[i] > 0.0 ? std::min(1.0, echoes[i].strength / remaining[i]) : 0.0;
      plan.marginal[i] = total > 0.0 ? echoes[i].strength / total : 0.0;
    }
  } else {
    double consumed = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = 1.0 - consumed;
      plan.conditional[i] = r > 0.0 ? std::min(1.0, echoes[i].strength / r) : 0.0;
      plan.marginal[i] = echoes[i].strength;
      consumed += echoes[i].strength;
    }
  }
  return plan;
}

}  // namespace

SelectionOutcome hierarchical_select(std::span<const Echo> echoes, Mode mode,
                                     UniformStream& randomness) {
  const WalkPlan plan = make_walk_plan(echoes, mode);
  SelectionOutcome out;
  out.probabilities_used = plan.marginal;
  for (std::size_t i = 0; i < echoes.size(); ++i) {
    if (plan.stop_before[i]) break;
    const double u = randomness.next();
    const bool accepted = u < plan.conditional[i];
    out.considered.push_back({echoes[i].absorber_id, echoes[i].interval_to_emitter.squared,
                              plan.conditional[i], accepted});
    if (accepted) {
      out.chosen_index = i;
      out.chosen = echoes[i].absorber_id;
      break;
    }
  }
  return out;
}

SelectionOutcome hierarchical_select(EchoSource& source, UniformStream& randomness) {
  SelectionOutcome out;
  double consumed = 0.0;
  double last_s2 = -std::numeric_limits<double>::infinity();
  std::size_t index = 0;
  while (std::optional<Echo> e = source.next()) {
    if (!std::isfinite(e->strength) || e->strength < 0.0) {
      throw std::invalid_argument("echo strength must be finite and nonnegative");
    }
    if (e->interval_to_emitter.squared < last_s2) {
      throw std::invalid_argument("echo source broke ascending interval order");
    }
    last_s2 = e->interval_to_emitter.squared;
    if (consumed + e->strength > 1.0 + 1e-9) {
      throw std::invalid_argument("cumulative echo strength exceeds unit total");
    }
    const double r = 1.0 - consumed;
    const double cond = r > 0.0 ? std::min(1.0, e->strength / r) : 0.0;
    const double u = randomness.next();
    const bool accepted = u < cond;
    out.probabilities_used.push_back(e->strength);
    out.considered.push_back({e->absorber_id, e->interval_to_emitter.squared, cond, accepted});
    if (accepted) {
      out.chosen_index = index;
      out.chosen = std::move(e->absorber_id);
      break;
    }
    consumed += e->strength;
    ++index;
  }
  return out;
}

double ledger_energy_residual(const Transaction& tx) {
  if (tx.ledger.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 1; i < tx.ledger.size(); ++i) sum += tx.ledger[i].energy;
  return sum + tx.ledger.front().energy;
}

Vec3 ledger_momentum_residual(const Transaction& tx) {
  if (tx.ledger.empty()) return {};
  Vec3 sum{};
  for (std::size_t i = 1; i < tx.ledger.size(); ++i) sum = sum + tx.ledger[i].momentum;
  return sum + tx.ledger.front().momentum;
}

Transaction two_vertex_transaction(const SpacetimeEvent& emitter, const SpacetimeEvent& absorber,
                                   const Quantum& quantum, const std::string& outcome_label,
                                   std::uint64_t trial_index) {
  if (!std::isfinite(quantum.omega) || quantum.omega < 0.0 || !std::isfinite(quantum.wavenumber)) {
    throw std::invalid_argument("quantum must have finite nonnegative omega and finite wavenumber");
  }
  const Vec3 dir = absorber.position - emitter.position;
  const double len = spacetime::norm(dir);
  const Vec3 unit = len > 0.0 ? (1.0 / len) * dir : Vec3{};
  const LedgerEntry absorbed{quantum.omega, quantum.wavenumber * unit};
  const LedgerEntry emitted{-absorbed.energy, -absorbed.momentum};
  Transaction tx;
  tx.vertices = {emitter, absorber};
  tx.ledger = {emitted, absorbed};
  tx.outcome_labels = {std::string{}, outcome_label};
  tx.transferred_energy = quantum.omega;
  tx.transferred_momentum = std::abs(quantum.wavenumber);
  tx.trial_index = trial_index;
  return tx;
}

TrialResult run_transaction(const SpacetimeEvent& emitter,
                            const std::vector<SpacetimeEvent>& absorbers,
                            std::span<const std::complex<double>> offers_at_absorbers, Mode mode,
                            const Quantum& quantum, UniformStream& randomness,
                            std::uint64_t trial_index,
                            std::span<const std::string> outcome_labels) {
  if (offers_at_absorbers.size() != absorbers.size()) {
    throw std::invalid_argument("need exactly one offer amplitude per absorber");
  }
  if (!outcome_labels.empty() && outcome_labels.size() != absorbers.size()) {
    throw std::invalid_argument("outcome labels must match the absorber list");
  }
  TrialResult result;
  result.trial_index = trial_index;
  if (absorbers.empty()) return result;

  const std::vector<std::size_t> order = spacetime::hierarchy_permutation(emitter, absorbers);
  std::vector<Echo> echoes;
  echoes.reserve(absorbers.size());
  for (const std::size_t i : order) {
    Echo e;
    e.absorber_id = absorbers[i].id;
    e.strength = echo_strength(offers_at_absorbers[i]);
    e.interval_to_emitter = spacetime::interval(emitter, absorbers[i]);
    if (!outcome_labels.empty()) e.outcome_label = outcome_labels[i];
    echoes.push_back(std::move(e));
  }
  result.selection = hierarchical_select(echoes, mode, randomness);
  if (result.selection.chosen_index.has_value()) {
    const std::size_t original = order[*result.selection.chosen_index];
    result.transaction =
        two_vertex_transaction(emitter, absorbers[original], quantum,
                               echoes[*result.selection.chosen_index].outcome_label, trial_index);
  }
  return result;
}

FrequencyTable born_frequencies(std::span<const TrialResult> trials,
                                std::span<const std::string> absorber_ids) {
  if (trials.empty()) throw std::invalid_argument("need at least one trial");
  FrequencyTable table;
  table.ids.assign(absorber_ids.begin(), absorber_ids.end());
  table.counts.assign(absorber_ids.size(), 0);
  table.total = trials.size();
  for (const TrialResult& tr : trials) {
    if (!tr.selection.chosen.has_value()) {
      ++table.none_count;
      continue;
    }
    bool found = false;
    for (std::size_t i = 0; i < table.ids.size(); ++i) {
      if (table.ids[i] == *tr.selection.chosen) {
        ++table.counts[i];
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("trial chose an absorber missing from the id list");
  }
  table.frequencies.resize(table.counts.size());
  for (std::size_t i = 0; i < table.counts.size(); ++i) {
    table.frequencies[i] =
        static_cast<double>(table.counts[i]) / static_cast<double>(table.total);
  }
  table.none_frequency = static_cast<double>(table.none_count) / static_cast<double>(table.total);
  return table;
}

std::vector<std::uint32_t> select_indices(std::span<const Echo> echoes, Mode mode,
                                          std::uint64_t seed, std::uint64_t trials,
                                          unsigned threads, std::uint64_t trial_offset) {
  const WalkPlan plan = make_walk_plan(echoes, mode);
  const std::size_t n = echoes.size();
  return run_trials<std::uint32_t>(trials, threads, [&](std::uint64_t t) -> std::uint32_t {
    TrialRng rng(seed, trial_offset + t);
    for (std::size_t i = 0; i < n; ++i) {
      if (plan.stop_before[i]) break;
      if (rng.next() < plan.conditional[i]) return static_cast<std::uint32_t>(i);
    }
    return static_cast<std::uint32_t>(n);
  });
}

std::vector<std::uint64_t> tally_selections(std::span<const Echo> echoes, Mode mode,
                                            std::uint64_t seed, std::uint64_t trials,
                                            unsigned threads, std::uint64_t trial_offset) {
  const std::vector<std::uint32_t> choices =
      select_indices(echoes, mode, seed, trials, threads, trial_offset);
  std::vector<std::uint64_t> counts(echoes.size() + 1, 0);
  for (const std::uint32_t c : choices) ++counts[c];
  return counts;
}

}  // namespace tqm::engine
