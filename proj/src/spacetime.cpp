#include "tqm/spacetime.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace tqm::spacetime {

Interval interval(const SpacetimeEvent& a, const SpacetimeEvent& b) {
  const double dt = b.t - a.t;
  const Vec3 dx = b.position - a.position;
  const double s2 = dt * dt - dot(dx, dx);
  IntervalClass cls = IntervalClass::Lightlike;
  if (s2 > kLightlikeTolerance) {
    cls = IntervalClass::Timelike;
  } else if (s2 < -kLightlikeTolerance) {
    cls = IntervalClass::Spacelike;
  }
  return {s2, cls};
}

std::vector<std::size_t> hierarchy_permutation(const SpacetimeEvent& emitter,
                                               const std::vector<SpacetimeEvent>& absorbers) {
  struct Key {
    double s2;
    double dt;
    const std::string* id;
  };
  std::vector<Key> keys;
  keys.reserve(absorbers.size());
  for (const auto& ab : absorbers) {
    const Interval iv = interval(emitter, ab);
    const double dt = ab.t - emitter.t;
    const bool inside = iv.squared >= 0.0 || iv.classification == IntervalClass::Lightlike;
    if (dt <= 0.0 || !inside) {
      throw CausalityError("absorber '" + ab.id + "' is outside the emitter's forward light cone");
    }
    keys.push_back({iv.squared, dt, &ab.id});
  }
  std::vector<std::size_t> order(absorbers.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&keys](std::size_t l, std::size_t r) {
    return std::tie(keys[l].s2, keys[l].dt, *keys[l].id) <
           std::tie(keys[r].s2, keys[r].dt, *keys[r].id);
  });
  return order;
}

std::vector<SpacetimeEvent> hierarchy_order(const SpacetimeEvent& emitter,
                                            const std::vector<SpacetimeEvent>& absorbers) {
  std::vector<SpacetimeEvent> out;
  out.reserve(absorbers.size());
  for (std::size_t i : hierarchy_permutation(emitter, absorbers)) out.push_back(absorbers[i]);
  return out;
}

}  // namespace tqm::spacetime
