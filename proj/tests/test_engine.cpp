#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "tqm/engine.hpp"
#include "tqm/rng.hpp"
#include "tqm/spacetime.hpp"
#include "tqm/stats.hpp"

using namespace tqm;
using namespace tqm::engine;
using spacetime::event_1d;
using spacetime::Interval;
using spacetime::IntervalClass;
using spacetime::SpacetimeEvent;

namespace {

// Replays a fixed list of uniforms so walks can be steered deterministically.
class ScriptedStream final : public UniformStream {
public:
  explicit ScriptedStream(std::vector<double> values) : values_(std::move(values)) {}
  double next() override {
    if (cursor_ >= values_.size()) throw std::logic_error("scripted stream exhausted");
    return values_[cursor_++];
  }
  std::size_t draws() const { return cursor_; }

private:
  std::vector<double> values_;
  std::size_t cursor_ = 0;
};

Echo make_echo(std::string id, double strength, double squared) {
  Echo e;
  e.absorber_id = std::move(id);
  e.strength = strength;
  e.interval_to_emitter = Interval{squared, squared > 0.0 ? IntervalClass::Timelike
                                                          : IntervalClass::Lightlike};
  return e;
}

std::vector<Echo> canonical_echoes() {
  return {make_echo("a", 0.4, 0.0), make_echo("b", 0.3, 1.0), make_echo("c", 0.2, 2.0),
          make_echo("d", 0.1, 3.0)};
}

// Hands out echoes one at a time and counts how many were actually pulled.
class VectorSource final : public EchoSource {
public:
  explicit VectorSource(std::vector<Echo> echoes) : echoes_(std::move(echoes)) {}
  std::optional<Echo> next() override {
    if (cursor_ >= echoes_.size()) return std::nullopt;
    ++pulls_;
    return echoes_[cursor_++];
  }
  std::size_t pulls() const { return pulls_; }

private:
  std::vector<Echo> echoes_;
  std::size_t cursor_ = 0;
  std::size_t pulls_ = 0;
};

}  // namespace

TEST_CASE("echo strength is the offer-confirmation product") {
  CHECK(echo_strength({3.0, 4.0}) == 25.0);
  CHECK(echo_strength({0.0, 0.0}) == 0.0);
  // |(3+4i)(1+2i)| = |-5+10i| = 5 sqrt(5)
  CHECK(echo_strength({3.0, 4.0}, {1.0, 2.0}) ==
        doctest::Approx(11.180339887498949).epsilon(1e-15));
  // conjugate return leg reduces to |psi|^2
  const std::complex<double> psi{0.6, -0.8};
  CHECK(echo_strength(psi, std::conj(psi)) == doctest::Approx(echo_strength(psi)).epsilon(1e-15));
}

TEST_CASE("normalized walk conditionals follow the suffix sums") {
  const std::vector<Echo> echoes = canonical_echoes();
  ScriptedStream all_reject({0.9, 0.9, 0.9, 0.9});
  const SelectionOutcome out = hierarchical_select(echoes, Mode::Normalized, all_reject);

  REQUIRE(out.considered.size() == 4);
  CHECK(out.considered[0].conditional_probability == 0.4);
  CHECK(out.considered[1].conditional_probability == 0.4999999999999999);
  CHECK(out.considered[2].conditional_probability == 0.6666666666666666);
  // the last positive echo sees exactly its own strength as the remainder
  CHECK(out.considered[3].conditional_probability == 1.0);
  CHECK(out.considered[3].accepted);
  CHECK(out.chosen_index == 3);
  CHECK(out.chosen == "d");

  CHECK(out.probabilities_used == std::vector<double>{0.4, 0.3, 0.2, 0.1});
  CHECK(all_reject.draws() == 4);
}

TEST_CASE("acceptance ends the walk immediately") {
  const std::vector<Echo> echoes = canonical_echoes();
  ScriptedStream accept_first({0.3});
  const SelectionOutcome out = hierarchical_select(echoes, Mode::Normalized, accept_first);
  CHECK(out.chosen_index == 0);
  CHECK(out.chosen == "a");
  CHECK(out.considered.size() == 1);
  CHECK(accept_first.draws() == 1);
  // marginals cover the whole list even when the walk stops early
  CHECK(out.probabilities_used.size() == 4);
}

TEST_CASE("absolute walk can end with no transaction") {
  const std::vector<Echo> echoes = {make_echo("a", 0.3, 0.0), make_echo("b", 0.2, 1.0)};
  ScriptedStream all_reject({0.95, 0.95});
  const SelectionOutcome out = hierarchical_select(echoes, Mode::Absolute, all_reject);
  CHECK_FALSE(out.chosen_index.has_value());
  CHECK_FALSE(out.chosen.has_value());
  REQUIRE(out.considered.size() == 2);
  CHECK(out.considered[0].conditional_probability == 0.3);
  CHECK(out.considered[1].conditional_probability == 0.28571428571428575);  // 0.2 / 0.7
  CHECK(out.probabilities_used == std::vector<double>{0.3, 0.2});
}

TEST_CASE("a zero-strength echo consumes a draw but is never chosen") {
  const std::vector<Echo> echoes = {make_echo("mute", 0.0, 0.0), make_echo("live", 1.0, 1.0)};
  ScriptedStream stream({0.0, 0.5});
  const SelectionOutcome out = hierarchical_select(echoes, Mode::Normalized, stream);
  CHECK(out.chosen == "live");
  REQUIRE(out.considered.size() == 2);
  CHECK_FALSE(out.considered[0].accepted);
  CHECK(out.considered[0].conditional_probability == 0.0);
  CHECK(out.considered[1].conditional_probability == 1.0);
  CHECK(stream.draws() == 2);
}

TEST_CASE("an exhausted walk stops without drawing") {
  const std::vector<Echo> echoes = {make_echo("a", 0.0, 0.0), make_echo("b", 0.0, 1.0)};
  ScriptedStream stream({});
  const SelectionOutcome out = hierarchical_select(echoes, Mode::Normalized, stream);
  CHECK_FALSE(out.chosen.has_value());
  CHECK(out.considered.empty());
  CHECK(stream.draws() == 0);

  ScriptedStream empty_stream({});
  const SelectionOutcome none = hierarchical_select(std::vector<Echo>{}, Mode::Normalized,
                                                    empty_stream);
  CHECK_FALSE(none.chosen.has_value());
  CHECK(none.probabilities_used.empty());
}

TEST_CASE("selection validates its echo list") {
  ScriptedStream stream({0.5});
  std::vector<Echo> bad = {make_echo("a", -0.1, 0.0)};
  CHECK_THROWS_AS(hierarchical_select(bad, Mode::Normalized, stream), std::invalid_argument);

  std::vector<Echo> unsorted = {make_echo("a", 0.5, 1.0), make_echo("b", 0.5, 0.0)};
  CHECK_THROWS_AS(hierarchical_select(unsorted, Mode::Normalized, stream), std::invalid_argument);

  std::vector<Echo> heavy = {make_echo("a", 0.8, 0.0), make_echo("b", 0.8, 1.0)};
  CHECK_THROWS_AS(hierarchical_select(heavy, Mode::Absolute, stream), std::invalid_argument);
  // the same list is fine when strengths are shares of a whole
  ScriptedStream fresh({0.5, 0.5});
  CHECK_NOTHROW(hierarchical_select(heavy, Mode::Normalized, fresh));
}

TEST_CASE("a lazy source reproduces the eager absolute walk") {
  const std::vector<Echo> echoes = {make_echo("a", 0.25, 0.0), make_echo("b", 0.35, 1.0),
                                    make_echo("c", 0.30, 2.0)};
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    TrialRng eager_rng(42, trial);
    TrialRng lazy_rng(42, trial);
    const SelectionOutcome eager = hierarchical_select(echoes, Mode::Absolute, eager_rng);
    VectorSource source(echoes);
    const SelectionOutcome lazy = hierarchical_select(source, lazy_rng);
    CHECK(eager.chosen_index == lazy.chosen_index);
    CHECK(eager.chosen == lazy.chosen);
    REQUIRE(eager.considered.size() == lazy.considered.size());
    for (std::size_t i = 0; i < eager.considered.size(); ++i) {
      CHECK(eager.considered[i].conditional_probability ==
            lazy.considered[i].conditional_probability);
      CHECK(eager.considered[i].accepted == lazy.considered[i].accepted);
    }
    // echoes past the acceptance point are never pulled into existence
    CHECK(source.pulls() == lazy.considered.size());
  }
}

TEST_CASE("a lazy source is validated as it is consumed") {
  VectorSource unsorted({make_echo("a", 0.1, 2.0), make_echo("b", 0.1, 1.0)});
  ScriptedStream reject_first({0.99});
  CHECK_THROWS_AS(hierarchical_select(unsorted, reject_first), std::invalid_argument);

  VectorSource heavy({make_echo("a", 0.6, 0.0), make_echo("b", 0.6, 1.0)});
  ScriptedStream reject_then_pull({0.99, 0.0});
  CHECK_THROWS_AS(hierarchical_select(heavy, reject_then_pull), std::invalid_argument);
}

TEST_CASE("bulk selection matches the one-trial walk draw for draw") {
  const std::vector<Echo> echoes = canonical_echoes();
  const std::uint64_t seed = 20260819;
  const std::uint64_t trials = 1000;
  const std::vector<std::uint32_t> bulk = select_indices(echoes, Mode::Normalized, seed, trials, 1);
  REQUIRE(bulk.size() == trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    TrialRng rng(seed, t);
    const SelectionOutcome one = hierarchical_select(echoes, Mode::Normalized, rng);
    const std::uint32_t expected =
        one.chosen_index ? static_cast<std::uint32_t>(*one.chosen_index)
                         : static_cast<std::uint32_t>(echoes.size());
    CHECK(bulk[t] == expected);
  }
}

TEST_CASE("bulk selection is independent of thread count and honors the offset") {
  const std::vector<Echo> echoes = canonical_echoes();
  const std::vector<std::uint32_t> one = select_indices(echoes, Mode::Normalized, 5, 4096, 1);
  const std::vector<std::uint32_t> three = select_indices(echoes, Mode::Normalized, 5, 4096, 3);
  CHECK(one == three);

  const std::vector<std::uint32_t> shifted =
      select_indices(echoes, Mode::Normalized, 5, 100, 1, 500);
  for (std::size_t i = 0; i < 100; ++i) CHECK(shifted[i] == one[500 + i]);
}

TEST_CASE("long-run selection frequencies follow the echo strengths") {
  const std::vector<Echo> echoes = canonical_echoes();
  const std::uint64_t trials = 100000;
  const std::vector<std::uint64_t> counts =
      tally_selections(echoes, Mode::Normalized, 99, trials);
  REQUIRE(counts.size() == 5);
  CHECK(counts[4] == 0);  // unit total mass leaves no room for a null outcome
  std::uint64_t sum = 0;
  for (const std::uint64_t c : counts) sum += c;
  CHECK(sum == trials);
  const std::vector<std::uint64_t> observed(counts.begin(), counts.begin() + 4);
  CHECK(stats::chi_square(observed, std::vector<double>{0.4, 0.3, 0.2, 0.1}, trials).pass);
}

TEST_CASE("absolute mode leaves the advertised null share") {
  const std::vector<Echo> echoes = {make_echo("a", 0.3, 0.0), make_echo("b", 0.2, 1.0)};
  const std::uint64_t trials = 100000;
  const std::vector<std::uint64_t> counts = tally_selections(echoes, Mode::Absolute, 17, trials);
  REQUIRE(counts.size() == 3);
  CHECK(stats::chi_square(counts, std::vector<double>{0.3, 0.2, 0.5}, trials).pass);
}

TEST_CASE("a two-vertex transaction books the quantum once") {
  const SpacetimeEvent emitter = event_1d(0.0, 0.0, "src");
  const SpacetimeEvent absorber = event_1d(2.0, 2.0, "det");
  const Quantum quantum{1.5, 2.5};
  const Transaction tx = two_vertex_transaction(emitter, absorber, quantum, "hit", 7);

  REQUIRE(tx.vertices.size() == 2);
  CHECK(tx.vertices[0].id == "src");
  CHECK(tx.vertices[1].id == "det");
  REQUIRE(tx.ledger.size() == 2);
  CHECK(tx.ledger[1].energy == 1.5);
  CHECK(tx.ledger[1].momentum.x == 2.5);
  CHECK(tx.ledger[0].energy == -1.5);
  CHECK(tx.ledger[0].momentum.x == -2.5);
  CHECK(tx.outcome_labels == std::vector<std::string>{"", "hit"});
  CHECK(tx.transferred_energy == 1.5);
  CHECK(tx.transferred_momentum == 2.5);
  CHECK(tx.trial_index == 7);
  CHECK(ledger_energy_residual(tx) == 0.0);
  CHECK(ledger_momentum_residual(tx).x == 0.0);

  CHECK_THROWS_AS(two_vertex_transaction(emitter, absorber, Quantum{-1.0, 1.0}, "", 0),
                  std::invalid_argument);
}

TEST_CASE("ledger residuals vanish exactly for arbitrary quanta and directions") {
  TrialRng rng(31337, 0);
  for (int i = 0; i < 100; ++i) {
    const SpacetimeEvent emitter{{rng.next() * 4.0 - 2.0, rng.next() * 4.0 - 2.0,
                                  rng.next() * 4.0 - 2.0},
                                 rng.next(),
                                 "e"};
    const spacetime::Vec3 offset{rng.next() * 2.0 - 1.0, rng.next() * 2.0 - 1.0,
                                 rng.next() * 2.0 - 1.0};
    const SpacetimeEvent absorber{emitter.position + offset, emitter.t + 5.0, "a"};
    const Quantum quantum{rng.next() * 3.0, rng.next() * 6.0 - 3.0};
    const Transaction tx = two_vertex_transaction(emitter, absorber, quantum, "x", i);
    CHECK(ledger_energy_residual(tx) == 0.0);
    const spacetime::Vec3 pr = ledger_momentum_residual(tx);
    CHECK(pr.x == 0.0);
    CHECK(pr.y == 0.0);
    CHECK(pr.z == 0.0);
  }
}

TEST_CASE("run_transaction consults the nearest interval first") {
  const SpacetimeEvent emitter = event_1d(0.0, 0.0, "src");
  // listed far-first on purpose: B sits at s^2 = 0.75, A on the light line
  const std::vector<SpacetimeEvent> absorbers = {event_1d(0.5, 1.0, "B"), event_1d(1.0, 1.0, "A")};
  const std::vector<std::complex<double>> offers = {{0.5, 0.0}, {0.0, 0.5}};
  const std::vector<std::string> labels = {"far", "near"};

  ScriptedStream reject_then_accept({0.9, 0.1});
  const TrialResult result = run_transaction(emitter, absorbers, offers, Mode::Normalized,
                                             Quantum{}, reject_then_accept, 3, labels);
  REQUIRE(result.selection.considered.size() == 2);
  CHECK(result.selection.considered[0].absorber_id == "A");
  CHECK(result.selection.considered[0].squared_interval == 0.0);
  CHECK(result.selection.considered[0].conditional_probability == 0.5);
  CHECK(result.selection.considered[1].absorber_id == "B");
  CHECK(result.selection.considered[1].conditional_probability == 1.0);
  CHECK(result.selection.chosen == "B");

  REQUIRE(result.transaction.has_value());
  CHECK(result.transaction->vertices[1].id == "B");
  CHECK(result.transaction->outcome_labels[1] == "far");
  CHECK(result.transaction->trial_index == 3);
  CHECK(ledger_energy_residual(*result.transaction) == 0.0);

  ScriptedStream accept_first({0.1});
  const TrialResult near = run_transaction(emitter, absorbers, offers, Mode::Normalized, Quantum{},
                                           accept_first, 4, labels);
  CHECK(near.selection.chosen == "A");
  CHECK(near.transaction->outcome_labels[1] == "near");
}

TEST_CASE("run_transaction rejects malformed geometry and arguments") {
  const SpacetimeEvent emitter = event_1d(0.0, 0.0, "src");
  const std::vector<SpacetimeEvent> absorbers = {event_1d(1.0, 1.0, "A")};
  ScriptedStream stream({0.5});

  CHECK_THROWS_AS(run_transaction(emitter, absorbers, std::vector<std::complex<double>>{},
                                  Mode::Normalized, Quantum{}, stream),
                  std::invalid_argument);

  const std::vector<SpacetimeEvent> past = {event_1d(0.0, -1.0, "P")};
  const std::vector<std::complex<double>> one_offer = {{1.0, 0.0}};
  CHECK_THROWS_AS(
      run_transaction(emitter, past, one_offer, Mode::Normalized, Quantum{}, stream),
      spacetime::CausalityError);

  const TrialResult empty = run_transaction(emitter, {}, {}, Mode::Normalized, Quantum{}, stream);
  CHECK_FALSE(empty.selection.chosen.has_value());
  CHECK_FALSE(empty.transaction.has_value());
}

TEST_CASE("born_frequencies tallies chosen absorbers") {
  std::vector<TrialResult> trials(10);
  for (std::size_t i = 0; i < trials.size(); ++i) {
    trials[i].trial_index = i;
    if (i < 6) {
      trials[i].selection.chosen = "A";
    } else if (i < 9) {
      trials[i].selection.chosen = "B";
    }
  }
  const std::vector<std::string> ids = {"A", "B"};
  const FrequencyTable table = born_frequencies(trials, ids);
  CHECK(table.counts == std::vector<std::uint64_t>{6, 3});
  CHECK(table.frequencies[0] == 0.6);
  CHECK(table.frequencies[1] == 0.3);
  CHECK(table.none_count == 1);
  CHECK(table.none_frequency == 0.1);
  CHECK(table.total == 10);

  const std::vector<std::string> wrong = {"A"};
  CHECK_THROWS_AS(born_frequencies(trials, wrong), std::invalid_argument);
  CHECK_THROWS_AS(born_frequencies(std::vector<TrialResult>{}, ids), std::invalid_argument);
}
