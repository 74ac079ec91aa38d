#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tqm::spacetime {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline Vec3 operator-(const Vec3& v) { return {-v.x, -v.y, -v.z}; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

// An emission or absorption vertex. c = 1 throughout, so position and time
// share units.
struct SpacetimeEvent {
  Vec3 position;
  double t = 0.0;
  std::string id;
};

// Convenience for the one-dimensional string scenarios.
inline SpacetimeEvent event_1d(double x, double t, std::string id = {}) {
  return {{x, 0.0, 0.0}, t, std::move(id)};
}

enum class IntervalClass { Timelike, Lightlike, Spacelike };

// |s^2| at or below this counts as lightlike.
inline constexpr double kLightlikeTolerance = 1e-9;

// Signed squared Minkowski interval, signature (+t, -x).
struct Interval {
  double squared = 0.0;
  IntervalClass classification = IntervalClass::Lightlike;
};

Interval interval(const SpacetimeEvent& a, const SpacetimeEvent& b);

class CausalityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Ascending-interval rank of the candidate absorbers around an emitter:
// primary key s^2, ties broken by dt, then id. Throws CausalityError if an
// absorber lies outside the emitter's closed forward light cone.
std::vector<std::size_t> hierarchy_permutation(const SpacetimeEvent& emitter,
                                               const std::vector<SpacetimeEvent>& absorbers);

std::vector<SpacetimeEvent> hierarchy_order(const SpacetimeEvent& emitter,
                                            const std::vector<SpacetimeEvent>& absorbers);

}  // namespace tqm::spacetime
