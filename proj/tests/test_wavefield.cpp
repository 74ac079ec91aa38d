#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "tqm/rng.hpp"
#include "tqm/wavefield.hpp"

using namespace tqm::wavefield;
using tqm::spacetime::event_1d;

namespace {
const SpacetimeEvent kOrigin = event_1d(0.0, 0.0, "origin");
}

TEST_CASE("the retarded mode rotates as exp(+i(kx - wt)) after its source") {
  const PlaneWaveMode f1 = retarded_mode({1.0, 0.0}, 1.0, 1.0, kOrigin);
  const Complex at = evaluate_mode(f1, 2.0, 1.0);  // phase = 1
  CHECK(at.real() == doctest::Approx(0.5403023058681398).epsilon(1e-15));
  CHECK(at.imag() == doctest::Approx(0.8414709848078965).epsilon(1e-15));
  CHECK(evaluate_mode(f1, 2.0, -0.25) == Complex{0.0, 0.0});
  CHECK(evaluate_mode(f1, 0.0, 0.0) == Complex{1.0, 0.0});  // vertex included
}

TEST_CASE("the advanced mode rotates as exp(-i(kx - wt)) before its source") {
  const PlaneWaveMode g1 = advanced_mode({1.0, 0.0}, 1.0, 1.0, kOrigin);
  // phase at (x=0, t=-1) is kx - wt = 1.
  const Complex at = evaluate_mode(g1, 0.0, -1.0);
  CHECK(at.real() == doctest::Approx(0.5403023058681398).epsilon(1e-15));
  CHECK(at.imag() == doctest::Approx(-0.8414709848078965).epsilon(1e-15));
  CHECK(evaluate_mode(g1, 0.0, 0.5) == Complex{0.0, 0.0});
}

TEST_CASE("mode factories reject bad parameters") {
  CHECK_THROWS_AS(retarded_mode({1.0, 0.0}, 1.0, -2.0, kOrigin), std::invalid_argument);
  CHECK_THROWS_AS(advanced_mode({1.0, 0.0}, std::nan(""), 1.0, kOrigin), std::invalid_argument);
}

TEST_CASE("energy and momentum eigenvalues flip sign with the wave character") {
  const PlaneWaveMode ret = retarded_mode({1.0, 0.0}, 2.5, 3.5, kOrigin);
  const PlaneWaveMode adv = advanced_mode({1.0, 0.0}, 2.5, 3.5, kOrigin);
  CHECK(energy_eigenvalue(ret) == 3.5);
  CHECK(momentum_eigenvalue(ret) == 2.5);
  CHECK(energy_eigenvalue(adv) == -3.5);
  CHECK(momentum_eigenvalue(adv) == -2.5);
}

TEST_CASE("a symmetric emitter pair costs exactly nothing") {
  const auto pair = emitter_modes({0.7, 0.0}, 1.3, 2.2, kOrigin);
  const EmissionCost cost = emission_cost(pair);
  CHECK(cost.energy == 0.0);
  CHECK(cost.momentum == 0.0);
}

TEST_CASE("handshake geometry is validated") {
  CHECK_THROWS_AS(handshake_modes(kOrigin, event_1d(2.0, 1.0, "a"), {1.0, 0.0}, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(handshake_modes(kOrigin, event_1d(-1.0, -1.0, "a"), {1.0, 0.0}, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_NOTHROW(handshake_modes(kOrigin, event_1d(3.0, 3.0, "a"), {1.0, 0.0}, 1.0, 1.0));
}

TEST_CASE("the handshake interior is the standing wave 2iA sin(kx - wt)") {
  const SpacetimeEvent absorber = event_1d(5.0, 5.0, "a");
  const auto modes = handshake_modes(kOrigin, absorber, {1.0, 0.0}, 1.0, 1.0);
  // phase = pi/2 at x = 2 + pi/2, t = 2 (interior).
  const GridPoint p{2.0 + std::numbers::pi / 2.0, 2.0};
  const auto samples = superpose(modes, std::vector<GridPoint>{p});
  REQUIRE(samples.size() == 1);
  CHECK(samples[0].value.real() == 0.0);
  CHECK(samples[0].value.imag() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("outside the handshake window the field cancels to exactly zero") {
  tqm::TrialRng rng(555, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const double amp_re = rng.next() * 4.0 - 2.0;
    const double amp_im = rng.next() * 4.0 - 2.0;
    const double k = rng.next() * 3.0 + 0.1;
    const double w = rng.next() * 3.0 + 0.1;
    const double t_abs = rng.next() * 5.0 + 1.0;
    const auto modes =
        handshake_modes(kOrigin, event_1d(t_abs, t_abs, "a"), {amp_re, amp_im}, k, w);
    for (int i = 0; i < 20; ++i) {
      const double x = rng.next() * 20.0 - 10.0;
      const double t_before = -1e-6 - rng.next() * 10.0;
      const double t_after = t_abs + 1e-6 + rng.next() * 10.0;
      Complex before{0.0, 0.0};
      Complex after{0.0, 0.0};
      for (const auto& m : modes) {
        before += evaluate_mode(m, x, t_before);
        after += evaluate_mode(m, x, t_after);
      }
      CHECK(before == Complex{0.0, 0.0});
      CHECK(after == Complex{0.0, 0.0});
    }
  }
}

TEST_CASE("interior samples track the standing wave for real amplitudes") {
  tqm::TrialRng rng(556, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const double a = (rng.next() * 4.0 - 2.0) + (rng.next() < 0.5 ? 2.5 : -2.5);
    const double k = rng.next() * 3.0 + 0.1;
    const double w = rng.next() * 3.0 + 0.1;
    const double t_abs = rng.next() * 5.0 + 1.0;
    const auto modes = handshake_modes(kOrigin, event_1d(t_abs, t_abs, "a"), {a, 0.0}, k, w);
    for (int i = 0; i < 40; ++i) {
      const double x = rng.next() * 20.0 - 10.0;
      const double t = rng.next() * (t_abs - 2e-9) + 1e-9;
      Complex value{0.0, 0.0};
      for (const auto& m : modes) value += evaluate_mode(m, x, t);
      const double phase = k * x - w * t;
      const Complex expected{0.0, 2.0 * (a * std::sin(phase))};
      const double deviation = std::abs(value - expected);
      const double scale = std::abs(expected);
      if (scale > 0.0) {
        CHECK(deviation / scale <= 1e-12);
      } else {
        CHECK(deviation == 0.0);
      }
    }
  }
}

TEST_CASE("superposition is additive over mode lists") {
  tqm::TrialRng rng(557, 0);
  std::vector<PlaneWaveMode> first;
  std::vector<PlaneWaveMode> second;
  for (int i = 0; i < 3; ++i) {
    first.push_back(retarded_mode({rng.next(), rng.next()}, rng.next() * 2.0, rng.next() * 2.0,
                                  event_1d(rng.next(), rng.next() - 0.5, "f")));
    second.push_back(advanced_mode({rng.next(), rng.next()}, rng.next() * 2.0, rng.next() * 2.0,
                                   event_1d(rng.next(), rng.next() + 0.5, "s"), -1));
  }
  std::vector<PlaneWaveMode> joint = first;
  joint.insert(joint.end(), second.begin(), second.end());
  std::vector<GridPoint> grid;
  for (int i = 0; i < 50; ++i) grid.push_back({rng.next() * 8.0 - 4.0, rng.next() * 8.0 - 4.0});
  const auto sum_joint = superpose(joint, grid);
  const auto sum_first = superpose(first, grid);
  const auto sum_second = superpose(second, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Complex lhs = sum_joint[i].value;
    const Complex rhs = sum_first[i].value + sum_second[i].value;
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("make_grid spans its bounds inclusively in row-major order") {
  const auto grid = make_grid(-1.0, 1.0, 3, 0.0, 4.0, 5);
  REQUIRE(grid.size() == 15);
  CHECK(grid.front().x == -1.0);
  CHECK(grid.front().t == 0.0);
  CHECK(grid[1].x == 0.0);   // x varies fastest
  CHECK(grid[3].t == 1.0);   // next time row
  CHECK(grid.back().x == 1.0);
  CHECK(grid.back().t == 4.0);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 1, 0.0, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1.0, 0.0, 5, 0.0, 1.0, 5), std::invalid_argument);
}
