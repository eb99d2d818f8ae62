// Shared fixtures and comparison helpers for the test suite.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "pald/pald.hpp"

namespace fixtures {

// Build a distance matrix from the strict upper triangle, row by row.
inline pald::DistanceMatrix dmat(std::size_t n, std::vector<double> upper) {
  std::vector<double> v(n * n, 0.0);
  std::size_t k = 0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) v[x * n + y] = v[y * n + x] = upper[k++];
  return pald::DistanceMatrix(n, std::move(v));
}

// Two points at distance 5.
inline pald::DistanceMatrix d2() { return dmat(2, {5.0}); }

// Three points, d01=1, d02=2, d12=3 (distinct distances).
inline pald::DistanceMatrix d3() { return dmat(3, {1.0, 2.0, 3.0}); }

// Equilateral triple: every off-diagonal distance is 1 (all ties).
inline pald::DistanceMatrix t3() { return dmat(3, {1.0, 1.0, 1.0}); }

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
  return std::fabs(a - b) / scale;
}

inline double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel_diff(a[i], b[i]));
  return worst;
}

inline double total(const pald::CohesionMatrix& c) {
  double s = 0.0;
  for (double v : c.values) s += v;
  return s;
}

}  // namespace fixtures
