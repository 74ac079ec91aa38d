#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tqm/engine.hpp"
#include "tqm/scenarios.hpp"

namespace tqm::config {

enum class ScenarioKind { Bubble, Epr, Chsh, Maudlin, HandshakeField };

const char* scenario_name(ScenarioKind kind);

struct DetectorConfig {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double weight = 1.0;

  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

// Parsed run description. Angles are stored in radians regardless of the
// unit they were written in.
struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::Bubble;
  std::uint64_t seed = 0;
  std::uint64_t trials = 10000;
  engine::Mode mode = engine::Mode::Normalized;
  double alpha = 1e-3;

  // bubble
  std::vector<DetectorConfig> detectors;

  // epr / chsh
  double theta_left = 0.0;
  double theta_right = 0.0;
  double chsh_a = 0.0;
  double chsh_a_prime = 0.0;
  double chsh_b = 0.0;
  double chsh_b_prime = 0.0;
  double arm_length = 1.0;
  std::uint32_t curve_points = 19;
  std::uint64_t curve_trials = 10000;

  // maudlin
  double near_strength = 0.5;
  double near_x = 0.0;
  double near_t = 0.0;
  double far_x = 0.0;
  double far_t = 0.0;

  // handshake-field
  double amplitude = 1.0;
  double wavenumber = 1.0;
  double angular_frequency = 1.0;
  double emit_x = 0.0;
  double emit_t = 0.0;
  double absorb_x = 1.0;
  double absorb_t = 1.0;
  double grid_x_min = 0.0;
  double grid_x_max = 0.0;
  bool grid_x_set = false;
  std::uint32_t grid_nx = 101;
  double grid_t_min = 0.0;
  double grid_t_max = 0.0;
  bool grid_t_set = false;
  std::uint32_t grid_nt = 101;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// line is 1-based; 0 marks a whole-file problem (e.g. a missing key).
struct ParseError {
  int line = 0;
  std::string message;
};

struct ParseResult {
  ScenarioConfig config;
  std::vector<ParseError> errors;
  bool ok() const { return errors.empty(); }
};

// Parses the line-oriented key = value format ('#' starts a comment,
// [detector] opens a detector block). Collects every error it can find
// rather than stopping at the first one.
ParseResult parse_config(const std::string& text);

// Canonical text form: fixed key order, 17 significant digits, angles in
// radians. parse_config(canonical_text(c)) reproduces c exactly.
std::string canonical_text(const ScenarioConfig& config);

}  // namespace tqm::config
