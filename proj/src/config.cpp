#include "tqm/config.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace tqm::config {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  if (!std::isfinite(v)) return false;
  out = v;
  return true;
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  if (s.empty() || s[0] == '-' || s[0] == '+') return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_u32(const std::string& s, std::uint32_t& out) {
  std::uint64_t wide = 0;
  if (!parse_u64(s, wide) || wide > 0xffffffffULL) return false;
  out = static_cast<std::uint32_t>(wide);
  return true;
}

bool parse_reals(const std::string& s, std::size_t n, double* out) {
  std::istringstream in(s);
  for (std::size_t i = 0; i < n; ++i) {
    std::string tok;
    if (!(in >> tok)) return false;
    if (!parse_real(tok, out[i])) return false;
  }
  std::string rest;
  return !(in >> rest);
}

bool valid_id(const std::string& s) {
  if (s.empty()) return false;
  for (const char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
                    c == '.';
    if (!ok) return false;
  }
  return true;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Keys that may appear in the global section, with the scenarios they apply
// to. Angle keys are listed under their base name; the _deg/_rad suffix is
// resolved separately.
enum Applies : unsigned {
  kAll = 0x1f,
  kBubble = 1u << 0,
  kEpr = 1u << 1,
  kChsh = 1u << 2,
  kMaudlin = 1u << 3,
  kField = 1u << 4,
};

struct KeySpec {
  const char* name;
  unsigned applies;
  bool is_angle;
};

constexpr std::array<KeySpec, 27> kKeys = {{
    {"scenario", kAll, false},
    {"seed", kAll, false},
    {"trials", kAll, false},
    {"mode", kAll, false},
    {"alpha", kAll, false},
    {"theta_left", kEpr, true},
    {"theta_right", kEpr, true},
    {"a", kChsh, true},
    {"a_prime", kChsh, true},
    {"b", kChsh, true},
    {"b_prime", kChsh, true},
    {"arm_length", kEpr | kChsh, false},
    {"curve_points", kEpr | kChsh, false},
    {"curve_trials", kEpr | kChsh, false},
    {"near_strength", kMaudlin, false},
    {"near_x", kMaudlin, false},
    {"near_t", kMaudlin, false},
    {"far_x", kMaudlin, false},
    {"far_t", kMaudlin, false},
    {"amplitude", kField, false},
    {"wavenumber", kField, false},
    {"angular_frequency", kField, false},
    {"emit_x", kField, false},
    {"emit_t", kField, false},
    {"absorb_x", kField, false},
    {"absorb_t", kField, false},
    {"grid_x", kField, false},
}};

// grid_nx, grid_t, grid_nt share the field scenario; appended here to keep
// the array literal readable.
constexpr std::array<KeySpec, 3> kKeysTail = {{
    {"grid_nx", kField, false},
    {"grid_t", kField, false},
    {"grid_nt", kField, false},
}};

const KeySpec* find_key(const std::string& base) {
  for (const KeySpec& k : kKeys) {
    if (base == k.name) return &k;
  }
  for (const KeySpec& k : kKeysTail) {
    if (base == k.name) return &k;
  }
  return nullptr;
}

unsigned scenario_bit(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Bubble: return kBubble;
    case ScenarioKind::Epr: return kEpr;
    case ScenarioKind::Chsh: return kChsh;
    case ScenarioKind::Maudlin: return kMaudlin;
    case ScenarioKind::HandshakeField: return kField;
  }
  return 0;
}

struct Parser {
  ScenarioConfig config;
  std::vector<ParseError> errors;
  bool scenario_seen = false;
  bool scenario_valid = false;
  std::map<std::string, int> seen_at;  // base key -> first line
  std::map<std::string, char> angle_unit;  // base key -> 'd' or 'r'

  struct DetectorState {
    DetectorConfig detector;
    int section_line = 0;
    int id_line = 0;
    bool has_id = false;
    bool has_position = false;
    std::set<std::string> seen;
  };
  std::optional<DetectorState> open_detector;
  int first_section_line = 0;

  void error(int line, std::string message) { errors.push_back({line, std::move(message)}); }

  void finish_detector() {
    if (!open_detector.has_value()) return;
    DetectorState& d = *open_detector;
    if (!d.has_id) {
      error(d.section_line, "detector block is missing 'id'");
    } else {
      for (const DetectorConfig& prev : config.detectors) {
        if (prev.id == d.detector.id) {
          error(d.id_line, "duplicate detector id '" + d.detector.id + "'");
          break;
        }
      }
    }
    if (!d.has_position) error(d.section_line, "detector block is missing 'position'");
    if (d.has_id && d.has_position) config.detectors.push_back(d.detector);
    open_detector.reset();
  }

  void handle_detector_key(const std::string& key, const std::string& value, int line) {
    DetectorState& d = *open_detector;
    if (key != "id" && key != "position" && key != "weight") {
      error(line, "unknown detector key '" + key + "'");
      return;
    }
    if (!d.seen.insert(key).second) {
      error(line, "duplicate key '" + key + "' in detector block");
      return;
    }
    if (key == "id") {
      if (!valid_id(value)) {
        error(line, "detector id must be nonempty and use only [A-Za-z0-9_.-]");
        return;
      }
      d.detector.id = value;
      d.has_id = true;
      d.id_line = line;
    } else if (key == "position") {
      double xyz[3];
      if (!parse_reals(value, 3, xyz)) {
        error(line, "position needs three finite reals");
        return;
      }
      d.detector.x = xyz[0];
      d.detector.y = xyz[1];
      d.detector.z = xyz[2];
      d.has_position = true;
    } else {
      double w = 0.0;
      if (!parse_real(value, w) || w < 0.0) {
        error(line, "weight must be a finite nonnegative real");
        return;
      }
      d.detector.weight = w;
    }
  }

  // Splits a possible angle key into (base, unit). Returns the key itself
  // with unit 0 when it carries no angle suffix.
  static std::pair<std::string, char> split_angle(const std::string& key) {
    if (key.size() > 4 && key.ends_with("_deg")) return {key.substr(0, key.size() - 4), 'd'};
    if (key.size() > 4 && key.ends_with("_rad")) return {key.substr(0, key.size() - 4), 'r'};
    return {key, 0};
  }

  void store_angle(const std::string& base, double radians, int line) {
    if (base == "theta_left") config.theta_left = radians;
    else if (base == "theta_right") config.theta_right = radians;
    else if (base == "a") config.chsh_a = radians;
    else if (base == "a_prime") config.chsh_a_prime = radians;
    else if (base == "b") config.chsh_b = radians;
    else if (base == "b_prime") config.chsh_b_prime = radians;
    else error(line, "internal: unhandled angle key '" + base + "'");
  }

  void handle_global_key(const std::string& key, const std::string& value, int line) {
    const auto [base, unit] = split_angle(key);
    const KeySpec* spec = find_key(base);
    if (spec == nullptr || (spec->is_angle && unit == 0) || (!spec->is_angle && unit != 0)) {
      error(line, "unknown key '" + key + "'");
      return;
    }
    const auto [it, inserted] = seen_at.emplace(base, line);
    if (!inserted) {
      if (spec->is_angle && angle_unit[base] != unit) {
        error(line, "'" + base + "' was already given in the other unit");
      } else {
        error(line, "duplicate key '" + key + "'");
      }
      return;
    }
    if (spec->is_angle) {
      angle_unit[base] = unit;
      double v = 0.0;
      if (!parse_real(value, v)) {
        error(line, "'" + key + "' must be a finite real");
        return;
      }
      const double radians = unit == 'd' ? v * kPi / 180.0 : v;
      if (!(radians >= 0.0 && radians < kPi)) {
        error(line, "'" + key + "' is out of range: analyzer angles live in [0, pi)");
        return;
      }
      store_angle(base, radians, line);
      return;
    }

    if (base == "scenario") {
      scenario_seen = true;
      if (value == "bubble") config.scenario = ScenarioKind::Bubble;
      else if (value == "epr") config.scenario = ScenarioKind::Epr;
      else if (value == "chsh") config.scenario = ScenarioKind::Chsh;
      else if (value == "maudlin") config.scenario = ScenarioKind::Maudlin;
      else if (value == "handshake-field") config.scenario = ScenarioKind::HandshakeField;
      else {
        error(line, "unknown scenario '" + value +
                        "' (expected bubble, epr, chsh, maudlin, or handshake-field)");
        return;
      }
      scenario_valid = true;
    } else if (base == "seed") {
      if (!parse_u64(value, config.seed)) error(line, "'seed' must be an unsigned integer");
    } else if (base == "trials") {
      if (!parse_u64(value, config.trials)) error(line, "'trials' must be an unsigned integer");
    } else if (base == "mode") {
      if (value == "normalized") config.mode = engine::Mode::Normalized;
      else if (value == "absolute") config.mode = engine::Mode::Absolute;
      else error(line, "mode must be 'normalized' or 'absolute'");
    } else if (base == "alpha") {
      double v = 0.0;
      if (!parse_real(value, v) || !(v > 0.0 && v < 1.0)) {
        error(line, "'alpha' must lie strictly between 0 and 1");
      } else {
        config.alpha = v;
      }
    } else if (base == "arm_length") {
      double v = 0.0;
      if (!parse_real(value, v) || !(v > 0.0)) {
        error(line, "'arm_length' must be a positive real");
      } else {
        config.arm_length = v;
      }
    } else if (base == "curve_points") {
      if (!parse_u32(value, config.curve_points) || config.curve_points < 2) {
        error(line, "'curve_points' must be an integer of at least 2");
      }
    } else if (base == "curve_trials") {
      if (!parse_u64(value, config.curve_trials) || config.curve_trials == 0) {
        error(line, "'curve_trials' must be a positive integer");
      }
    } else if (base == "near_strength") {
      double v = 0.0;
      if (!parse_real(value, v) || !(v >= 0.0 && v <= 1.0)) {
        error(line, "'near_strength' must lie in [0, 1]");
      } else {
        config.near_strength = v;
      }
    } else if (base == "near_x" || base == "near_t" || base == "far_x" || base == "far_t" ||
               base == "emit_x" || base == "emit_t" || base == "absorb_x" ||
               base == "absorb_t" || base == "wavenumber") {
      double v = 0.0;
      if (!parse_real(value, v)) {
        error(line, "'" + base + "' must be a finite real");
        return;
      }
      if (base == "near_x") config.near_x = v;
      else if (base == "near_t") config.near_t = v;
      else if (base == "far_x") config.far_x = v;
      else if (base == "far_t") config.far_t = v;
      else if (base == "emit_x") config.emit_x = v;
      else if (base == "emit_t") config.emit_t = v;
      else if (base == "absorb_x") config.absorb_x = v;
      else if (base == "absorb_t") config.absorb_t = v;
      else config.wavenumber = v;
    } else if (base == "amplitude") {
      double v = 0.0;
      if (!parse_real(value, v) || v == 0.0) {
        error(line, "'amplitude' must be a finite nonzero real");
      } else {
        config.amplitude = v;
      }
    } else if (base == "angular_frequency") {
      double v = 0.0;
      if (!parse_real(value, v) || v < 0.0) {
        error(line, "'angular_frequency' must be a finite nonnegative real");
      } else {
        config.angular_frequency = v;
      }
    } else if (base == "grid_x" || base == "grid_t") {
      double pair[2];
      if (!parse_reals(value, 2, pair) || !(pair[0] < pair[1])) {
        error(line, "'" + base + "' needs two finite reals, min then max");
        return;
      }
      if (base == "grid_x") {
        config.grid_x_min = pair[0];
        config.grid_x_max = pair[1];
        config.grid_x_set = true;
      } else {
        config.grid_t_min = pair[0];
        config.grid_t_max = pair[1];
        config.grid_t_set = true;
      }
    } else if (base == "grid_nx" || base == "grid_nt") {
      std::uint32_t v = 0;
      if (!parse_u32(value, v) || v < 2) {
        error(line, "'" + base + "' must be an integer of at least 2");
        return;
      }
      if (base == "grid_nx") config.grid_nx = v;
      else config.grid_nt = v;
    } else {
      error(line, "internal: unhandled key '" + base + "'");
    }
  }

  void require(const char* base, const char* hint) {
    if (seen_at.find(base) == seen_at.end()) {
      error(0, std::string("missing required key: ") + hint);
    }
  }

  void finish() {
    finish_detector();
    if (!scenario_seen) {
      error(0, "missing required key: scenario");
      return;
    }
    if (!scenario_valid) return;

    const unsigned bit = scenario_bit(config.scenario);
    for (const auto& [base, line] : seen_at) {
      const KeySpec* spec = find_key(base);
      if (spec != nullptr && (spec->applies & bit) == 0) {
        error(line, "key '" + base + "' does not apply to scenario '" +
                        scenario_name(config.scenario) + "'");
      }
    }
    if (!config.detectors.empty() && config.scenario != ScenarioKind::Bubble) {
      error(first_section_line, "detector blocks only apply to scenario 'bubble'");
    }

    switch (config.scenario) {
      case ScenarioKind::Bubble:
        if (config.detectors.empty() && errors.empty()) {
          error(0, "scenario 'bubble' needs at least one [detector] block");
        }
        break;
      case ScenarioKind::Epr:
        require("theta_left", "theta_left_deg or theta_left_rad");
        require("theta_right", "theta_right_deg or theta_right_rad");
        break;
      case ScenarioKind::Chsh:
        require("a", "a_deg or a_rad");
        require("a_prime", "a_prime_deg or a_prime_rad");
        require("b", "b_deg or b_rad");
        require("b_prime", "b_prime_deg or b_prime_rad");
        break;
      case ScenarioKind::Maudlin: {
        require("near_x", "near_x");
        require("near_t", "near_t");
        require("far_x", "far_x");
        require("far_t", "far_t");
        if (errors.empty()) {
          const auto emitter = spacetime::event_1d(0.0, 0.0, "emitter");
          const auto near = spacetime::event_1d(config.near_x, config.near_t, "near");
          const auto far = spacetime::event_1d(config.far_x, config.far_t, "far");
          try {
            spacetime::hierarchy_permutation(emitter, {near, far});
          } catch (const spacetime::CausalityError& e) {
            error(0, e.what());
            break;
          }
          const double s2_near = spacetime::interval(emitter, near).squared;
          const double s2_far = spacetime::interval(emitter, far).squared;
          if (!(s2_near < s2_far)) {
            error(0, "the near absorber must sit at a strictly smaller interval than the far one");
          }
        }
        break;
      }
      case ScenarioKind::HandshakeField: {
        require("absorb_x", "absorb_x");
        require("absorb_t", "absorb_t");
        if (errors.empty()) {
          const double dt = config.absorb_t - config.emit_t;
          const double dx = config.absorb_x - config.emit_x;
          if (!(dt > 0.0) || std::abs(dx - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
            error(0, "the absorber must sit on the emitter's forward light line "
                     "(absorb_x - emit_x = absorb_t - emit_t > 0)");
          }
        }
        break;
      }
    }
  }
};

}  // namespace

const char* scenario_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Bubble: return "bubble";
    case ScenarioKind::Epr: return "epr";
    case ScenarioKind::Chsh: return "chsh";
    case ScenarioKind::Maudlin: return "maudlin";
    case ScenarioKind::HandshakeField: return "handshake-field";
  }
  return "unknown";
}

ParseResult parse_config(const std::string& text) {
  Parser parser;
  int line_no = 0;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string lineText = trim(raw);
    if (lineText.empty()) continue;

    if (lineText.front() == '[') {
      if (lineText.back() != ']') {
        parser.error(line_no, "unterminated section header");
        continue;
      }
      const std::string section = trim(lineText.substr(1, lineText.size() - 2));
      parser.finish_detector();
      if (section != "detector") {
        parser.error(line_no, "unknown section '" + section + "'");
        continue;
      }
      parser.open_detector.emplace();
      parser.open_detector->section_line = line_no;
      if (parser.first_section_line == 0) parser.first_section_line = line_no;
      continue;
    }

    const std::size_t eq = lineText.find('=');
    if (eq == std::string::npos) {
      parser.error(line_no, "expected 'key = value'");
      continue;
    }
    const std::string key = trim(std::string_view(lineText).substr(0, eq));
    const std::string value = trim(std::string_view(lineText).substr(eq + 1));
    if (key.empty()) {
      parser.error(line_no, "empty key");
      continue;
    }
    if (value.empty()) {
      parser.error(line_no, "empty value for key '" + key + "'");
      continue;
    }
    if (parser.open_detector.has_value()) {
      parser.handle_detector_key(key, value, line_no);
    } else {
      parser.handle_global_key(key, value, line_no);
    }
  }
  parser.finish();

  ParseResult result;
  result.errors = std::move(parser.errors);
  if (result.errors.empty()) result.config = std::move(parser.config);
  return result;
}

std::string canonical_text(const ScenarioConfig& config) {
  std::string out;
  const auto kv = [&out](const char* key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  kv("scenario", scenario_name(config.scenario));
  kv("seed", std::to_string(config.seed));
  kv("trials", std::to_string(config.trials));
  kv("mode", config.mode == engine::Mode::Normalized ? "normalized" : "absolute");
  kv("alpha", format_real(config.alpha));
  switch (config.scenario) {
    case ScenarioKind::Bubble:
      for (const DetectorConfig& d : config.detectors) {
        out += "\n[detector]\n";
        kv("id", d.id);
        kv("position",
           format_real(d.x) + " " + format_real(d.y) + " " + format_real(d.z));
        kv("weight", format_real(d.weight));
      }
      break;
    case ScenarioKind::Epr:
      kv("theta_left_rad", format_real(config.theta_left));
      kv("theta_right_rad", format_real(config.theta_right));
      kv("arm_length", format_real(config.arm_length));
      kv("curve_points", std::to_string(config.curve_points));
      kv("curve_trials", std::to_string(config.curve_trials));
      break;
    case ScenarioKind::Chsh:
      kv("a_rad", format_real(config.chsh_a));
      kv("a_prime_rad", format_real(config.chsh_a_prime));
      kv("b_rad", format_real(config.chsh_b));
      kv("b_prime_rad", format_real(config.chsh_b_prime));
      kv("arm_length", format_real(config.arm_length));
      kv("curve_points", std::to_string(config.curve_points));
      kv("curve_trials", std::to_string(config.curve_trials));
      break;
    case ScenarioKind::Maudlin:
      kv("near_strength", format_real(config.near_strength));
      kv("near_x", format_real(config.near_x));
      kv("near_t", format_real(config.near_t));
      kv("far_x", format_real(config.far_x));
      kv("far_t", format_real(config.far_t));
      break;
    case ScenarioKind::HandshakeField:
      kv("amplitude", format_real(config.amplitude));
      kv("wavenumber", format_real(config.wavenumber));
      kv("angular_frequency", format_real(config.angular_frequency));
      kv("emit_x", format_real(config.emit_x));
      kv("emit_t", format_real(config.emit_t));
      kv("absorb_x", format_real(config.absorb_x));
      kv("absorb_t", format_real(config.absorb_t));
      if (config.grid_x_set) {
        kv("grid_x", format_real(config.grid_x_min) + " " + format_real(config.grid_x_max));
      }
      kv("grid_nx", std::to_string(config.grid_nx));
      if (config.grid_t_set) {
        kv("grid_t", format_real(config.grid_t_min) + " " + format_real(config.grid_t_max));
      }
      kv("grid_nt", std::to_string(config.grid_nt));
      break;
  }
  return out;
}

}  // namespace tqm::config
