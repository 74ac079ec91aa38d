#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "tqm/spacetime.hpp"

namespace tqm::wavefield {

using spacetime::SpacetimeEvent;
using Complex = std::complex<double>;

enum class WaveCharacter { Retarded, Advanced };

enum class TimeWindow { AfterSource, BeforeSource };

// Half-space time gate for a mode, relative to its source vertex. Retarded
// waves live at t >= t_source, advanced waves at t <= t_source; both include
// the vertex itself.
struct SupportMask {
  TimeWindow window = TimeWindow::AfterSource;
  double reference_time = 0.0;

  bool contains(double t) const {
    return window == TimeWindow::AfterSource ? t >= reference_time : t <= reference_time;
  }
};

// One analytic plane wave on the string: sign * A * exp(+-i(kx - wt)) inside
// its support window. sign is +1 for the emitter pair and -1 for the
// absorber's canceling pair.
struct PlaneWaveMode {
  Complex amplitude{1.0, 0.0};
  double wavenumber = 1.0;         // k
  double angular_frequency = 1.0;  // omega >= 0
  WaveCharacter character = WaveCharacter::Retarded;
  int sign = +1;
  SpacetimeEvent source;
  SupportMask support;
};

PlaneWaveMode retarded_mode(Complex amplitude, double wavenumber, double angular_frequency,
                            const SpacetimeEvent& source, int sign = +1);
PlaneWaveMode advanced_mode(Complex amplitude, double wavenumber, double angular_frequency,
                            const SpacetimeEvent& source, int sign = +1);

// hbar = 1: +omega/+k for retarded modes, -omega/-k for advanced ones.
double energy_eigenvalue(const PlaneWaveMode& mode);
double momentum_eigenvalue(const PlaneWaveMode& mode);

struct GridPoint {
  double x = 0.0;
  double t = 0.0;
};

struct FieldSample {
  double x = 0.0;
  double t = 0.0;
  Complex value;
};

// Exactly zero outside the support window.
Complex evaluate_mode(const PlaneWaveMode& mode, double x, double t);

std::vector<FieldSample> superpose(std::span<const PlaneWaveMode> modes,
                                   std::span<const GridPoint> grid);

// Emitter pair: retarded offer toward the future plus its advanced partner
// into the past, both with amplitude +A.
std::array<PlaneWaveMode, 2> emitter_modes(Complex amplitude, double wavenumber,
                                           double angular_frequency,
                                           const SpacetimeEvent& emitter);

// Absorber pair: the same two characters with amplitude -A, gated on the
// absorption time, so the absorber cancels the offer beyond itself and emits
// the confirmation toward the emitter.
std::array<PlaneWaveMode, 2> absorber_modes(Complex amplitude, double wavenumber,
                                            double angular_frequency,
                                            const SpacetimeEvent& absorber);

// All four modes of a completed handshake. The absorber must sit on the
// emitter's forward light line: x_abs - x_emit = t_abs - t_emit.
std::vector<PlaneWaveMode> handshake_modes(const SpacetimeEvent& emitter,
                                           const SpacetimeEvent& absorber, Complex amplitude,
                                           double wavenumber, double angular_frequency);

std::vector<FieldSample> handshake_field(const SpacetimeEvent& emitter,
                                         const SpacetimeEvent& absorber, Complex amplitude,
                                         double wavenumber, double angular_frequency,
                                         std::span<const GridPoint> grid);

struct EmissionCost {
  double energy = 0.0;
  double momentum = 0.0;
};

// Summed mode eigenvalues. A symmetric retarded/advanced pair costs exactly
// (0, 0): the emitter loses nothing at emission time.
EmissionCost emission_cost(std::span<const PlaneWaveMode> modes);

// Row-major grid: t varies in the outer loop, x in the inner one.
std::vector<GridPoint> make_grid(double x_min, double x_max, std::size_t nx, double t_min,
                                 double t_max, std::size_t nt);

}  // namespace tqm::wavefield
