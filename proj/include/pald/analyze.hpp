// Community analysis over a normalized cohesion matrix: strong ties under
// the universal threshold, and top-k cohesion neighbors of a point.
#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "pald/types.hpp"

namespace pald {

struct StrongTie {
  std::size_t x, y;  // x < y
  double strength;   // min(c_xy, c_yx)
};

struct StrongTieGraph {
  double threshold;
  std::vector<StrongTie> edges;
};

namespace detail {

inline void require_normalized(const CohesionMatrix& c) {
  if (!c.normalized)
    throw ValidationError("analysis requires a normalized cohesion matrix");
}

}  // namespace detail

// Universal strong-tie threshold: half the mean self-cohesion.
inline double universal_threshold(const CohesionMatrix& c) {
  detail::require_normalized(c);
  double sum = 0.0;
  for (std::size_t x = 0; x < c.n; ++x) sum += c.at(x, x);
  return 0.5 * sum / static_cast<double>(c.n);
}

// Undirected edges whose symmetrized strength min(c_xy, c_yx) meets the
// threshold (>= keeps equal values).
inline StrongTieGraph strong_ties(const CohesionMatrix& c,
                                  std::optional<double> threshold = std::nullopt) {
  detail::require_normalized(c);
  StrongTieGraph g{threshold ? *threshold : universal_threshold(c), {}};
  for (std::size_t x = 0; x < c.n; ++x)
    for (std::size_t y = x + 1; y < c.n; ++y) {
      const double s = std::min(c.at(x, y), c.at(y, x));
      if (s >= g.threshold) g.edges.push_back({x, y, s});
    }
  return g;
}

struct Neighbor {
  std::size_t z;
  double strength;
};

// Top-k points by symmetrized cohesion with the focus point, strongest
// first, ties broken toward the smaller index.
inline std::vector<Neighbor> nearest_neighbors(const CohesionMatrix& c, std::size_t focus,
                                               std::size_t k) {
  detail::require_normalized(c);
  if (focus >= c.n) throw ValidationError("focus point out of range");
  if (k >= c.n) throw ValidationError("k must be smaller than the point count");
  std::vector<Neighbor> all;
  all.reserve(c.n - 1);
  for (std::size_t z = 0; z < c.n; ++z)
    if (z != focus) all.push_back({z, std::min(c.at(focus, z), c.at(z, focus))});
  std::stable_sort(all.begin(), all.end(),
                   [](const Neighbor& a, const Neighbor& b) { return a.strength > b.strength; });
  all.resize(k);
  return all;
}

}  // namespace pald
