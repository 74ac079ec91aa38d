#include "tqm/wavefield.hpp"

#include <cmath>
#include <stdexcept>

namespace tqm::wavefield {

namespace {

void check_mode_params(Complex amplitude, double wavenumber, double angular_frequency) {
  if (!std::isfinite(amplitude.real()) || !std::isfinite(amplitude.imag()) ||
      !std::isfinite(wavenumber) || !std::isfinite(angular_frequency)) {
    throw std::invalid_argument("wave mode parameters must be finite");
  }
  if (angular_frequency < 0.0) {
    throw std::invalid_argument("angular frequency must be nonnegative");
  }
}

}  // namespace

PlaneWaveMode retarded_mode(Complex amplitude, double wavenumber, double angular_frequency,
                            const SpacetimeEvent& source, int sign) {
  check_mode_params(amplitude, wavenumber, angular_frequency);
  return {amplitude,
          wavenumber,
          angular_frequency,
          WaveCharacter::Retarded,
          sign,
          source,
          {TimeWindow::AfterSource, source.t}};
}

PlaneWaveMode advanced_mode(Complex amplitude, double wavenumber, double angular_frequency,
                            const SpacetimeEvent& source, int sign) {
  check_mode_params(amplitude, wavenumber, angular_frequency);
  return {amplitude,
          wavenumber,
          angular_frequency,
          WaveCharacter::Advanced,
          sign,
          source,
          {TimeWindow::BeforeSource, source.t}};
}

double energy_eigenvalue(const PlaneWaveMode& mode) {
  return mode.character == WaveCharacter::Retarded ? mode.angular_frequency
                                                   : -mode.angular_frequency;
}

double momentum_eigenvalue(const PlaneWaveMode& mode) {
  return mode.character == WaveCharacter::Retarded ? mode.wavenumber : -mode.wavenumber;
}

Complex evaluate_mode(const PlaneWaveMode& mode, double x, double t) {
  if (!mode.support.contains(t)) return {0.0, 0.0};
  const double phase = mode.wavenumber * x - mode.angular_frequency * t;
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  const Complex rotor = mode.character == WaveCharacter::Retarded ? Complex{c, s} : Complex{c, -s};
  return static_cast<double>(mode.sign) * (mode.amplitude * rotor);
}

std::vector<FieldSample> superpose(std::span<const PlaneWaveMode> modes,
                                   std::span<const GridPoint> grid) {
  std::vector<FieldSample> out;
  out.reserve(grid.size());
  for (const GridPoint& p : grid) {
    Complex acc{0.0, 0.0};
    for (const PlaneWaveMode& m : modes) acc += evaluate_mode(m, p.x, p.t);
    out.push_back({p.x, p.t, acc});
  }
  return out;
}

std::array<PlaneWaveMode, 2> emitter_modes(Complex amplitude, double wavenumber,
                                           double angular_frequency,
                                           const SpacetimeEvent& emitter) {
  return {retarded_mode(amplitude, wavenumber, angular_frequency, emitter, +1),
          advanced_mode(amplitude, wavenumber, angular_frequency, emitter, +1)};
}

std::array<PlaneWaveMode, 2> absorber_modes(Complex amplitude, double wavenumber,
                                            double angular_frequency,
                                            const SpacetimeEvent& absorber) {
  return {retarded_mode(amplitude, wavenumber, angular_frequency, absorber, -1),
          advanced_mode(amplitude, wavenumber, angular_frequency, absorber, -1)};
}

std::vector<PlaneWaveMode> handshake_modes(const SpacetimeEvent& emitter,
                                           const SpacetimeEvent& absorber, Complex amplitude,
                                           double wavenumber, double angular_frequency) {
  const double dt = absorber.t - emitter.t;
  if (!(dt > 0.0)) {
    throw std::invalid_argument("absorber must lie strictly later than the emitter");
  }
  const double dx = absorber.position.x - emitter.position.x;
  if (std::abs(dx - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
    throw std::invalid_argument("absorber is not on the emitter's forward light line");
  }
  const auto em = emitter_modes(amplitude, wavenumber, angular_frequency, emitter);
  const auto ab = absorber_modes(amplitude, wavenumber, angular_frequency, absorber);
  return {em[0], em[1], ab[0], ab[1]};
}

std::vector<FieldSample> handshake_field(const SpacetimeEvent& emitter,
                                         const SpacetimeEvent& absorber, Complex amplitude,
                                         double wavenumber, double angular_frequency,
                                         std::span<const GridPoint> grid) {
  const auto modes = handshake_modes(emitter, absorber, amplitude, wavenumber, angular_frequency);
  return superpose(modes, grid);
}

EmissionCost emission_cost(std::span<const PlaneWaveMode> modes) {
  EmissionCost cost;
  for (const PlaneWaveMode& m : modes) {
    cost.energy += energy_eigenvalue(m);
    cost.momentum += momentum_eigenvalue(m);
  }
  return cost;
}

std::vector<GridPoint> make_grid(double x_min, double x_max, std::size_t nx, double t_min,
                                 double t_max, std::size_t nt) {
  if (nx < 2 || nt < 2 || !(x_max > x_min) || !(t_max > t_min)) {
    throw std::invalid_argument("grid needs at least 2x2 points and increasing bounds");
  }
  std::vector<GridPoint> grid;
  grid.reserve(nx * nt);
  for (std::size_t j = 0; j < nt; ++j) {
    const double t = t_min + (t_max - t_min) * static_cast<double>(j) / static_cast<double>(nt - 1);
    for (std::size_t i = 0; i < nx; ++i) {
      const double x =
          x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(nx - 1);
      grid.push_back({x, t});
    }
  }
  return grid;
}

}  // namespace tqm::wavefield
