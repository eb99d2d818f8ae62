// Brute-force probability oracle and entrywise reference algorithms.
// These define correct output for every optimized variant.
#pragma once

#include <cstddef>
#include <string>

#include "pald/types.hpp"

namespace pald {

// One term g_xyz of the cohesion sum.
struct TripletContribution {
  std::size_t x, y, z;
  double value;
};

namespace detail {

inline void check_index(const DistanceMatrix& d, std::size_t i, const char* name) {
  if (i >= d.size())
    throw ValidationError(std::string("index ") + name + "=" + std::to_string(i) +
                          " out of range for n=" + std::to_string(d.size()));
}

}  // namespace detail

// Size of the local focus of (x, y): the number of points z with
// d_xz < d_xy or d_yz < d_xy (Strict) or with <= (InclusiveSplit).
// Always >= 2 since x and y qualify via their zero self-distance.
inline int focus_size(const DistanceMatrix& d, std::size_t x, std::size_t y, Policy policy) {
  detail::check_index(d, x, "x");
  detail::check_index(d, y, "y");
  if (x == y) throw ValidationError("focus_size requires x != y");
  const double dxy = d(x, y);
  const double* rx = d.row(x);
  const double* ry = d.row(y);
  int u = 0;
  if (policy == Policy::Strict) {
    for (std::size_t z = 0; z < d.size(); ++z) u += (rx[z] < dxy) | (ry[z] < dxy);
  } else {
    for (std::size_t z = 0; z < d.size(); ++z) u += (rx[z] <= dxy) | (ry[z] <= dxy);
  }
  return u;
}

// g_xyz = 1{d_xz <= d_yz} * 1{d_xz <= d_xy} / u_xy, evaluated literally
// with inclusive comparisons; Strict replaces <= with <. Tie splitting is
// not applied here (it lives in the cohesion sum).
inline TripletContribution oracle_contribution(const DistanceMatrix& d, std::size_t x,
                                               std::size_t y, std::size_t z, int u_xy,
                                               Policy policy) {
  detail::check_index(d, x, "x");
  detail::check_index(d, y, "y");
  detail::check_index(d, z, "z");
  if (x == y) throw ValidationError("oracle_contribution requires x != y");
  const double dxz = d(x, z), dyz = d(y, z), dxy = d(x, y);
  bool supports, member;
  if (policy == Policy::Strict) {
    supports = dxz < dyz;
    member = dxz < dxy;
  } else {
    supports = dxz <= dyz;
    member = dxz <= dxy;
  }
  return {x, y, z, (supports && member) ? 1.0 / static_cast<double>(u_xy) : 0.0};
}

// Direct triple-loop evaluation of c_xz = (1/(n-1)) sum_{y != x} g_xyz.
// Under InclusiveSplit a support tie d_xz == d_yz (z not in {x,y})
// contributes 0.5/u_xy to each of c_xz and c_yz. This is the independent
// test oracle for all other variants. Returns a normalized matrix.
inline CohesionMatrix oracle_cohesion(const DistanceMatrix& d, Policy policy) {
  const std::size_t n = d.size();
  CohesionMatrix c(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t z = 0; z < n; ++z) {
      double sum = 0.0;
      for (std::size_t y = 0; y < n; ++y) {
        if (y == x) continue;
        const double dxz = d(x, z), dyz = d(y, z), dxy = d(x, y);
        const double inv_u = 1.0 / focus_size(d, x, y, policy);
        if (policy == Policy::Strict) {
          if (dxz < dxy && dxz < dyz) sum += inv_u;
        } else {
          if (dxz <= dxy) {
            if (dxz < dyz)
              sum += inv_u;
            else if (dxz == dyz && z != x && z != y)
              sum += 0.5 * inv_u;
          }
        }
      }
      c.at(x, z) = sum / static_cast<double>(n - 1);
    }
  }
  c.normalized = true;
  return c;
}

// Pairwise sequential algorithm: for each pair x < y, a first pass over
// all n points computes u_xy, a second pass adds 1/u_xy of support to
// c_xz or c_yz for each point in the focus. Output is unnormalized.
inline PaldResult pairwise_entrywise(const DistanceMatrix& d, Policy policy) {
  const std::size_t n = d.size();
  PaldResult r{FocusSizeMatrix(n), CohesionMatrix(n)};
  const bool strict = policy == Policy::Strict;
  for (std::size_t x = 0; x < n; ++x) {
    const double* rx = d.row(x);
    for (std::size_t y = x + 1; y < n; ++y) {
      const double* ry = d.row(y);
      const double dxy = rx[y];
      int u = 0;
      if (strict) {
        for (std::size_t z = 0; z < n; ++z) u += (rx[z] < dxy) | (ry[z] < dxy);
      } else {
        for (std::size_t z = 0; z < n; ++z) u += (rx[z] <= dxy) | (ry[z] <= dxy);
      }
      r.focus.at(x, y) = r.focus.at(y, x) = u;
      const double w = 1.0 / u;
      if (strict) {
        for (std::size_t z = 0; z < n; ++z) {
          if (rx[z] < dxy || ry[z] < dxy) {
            if (rx[z] < ry[z])
              r.cohesion.at(x, z) += w;
            else
              r.cohesion.at(y, z) += w;
          }
        }
      } else {
        for (std::size_t z = 0; z < n; ++z) {
          if (rx[z] <= dxy || ry[z] <= dxy) {
            if (rx[z] < ry[z])
              r.cohesion.at(x, z) += w;
            else if (ry[z] < rx[z])
              r.cohesion.at(y, z) += w;
            else {
              r.cohesion.at(x, z) += 0.5 * w;
              r.cohesion.at(y, z) += 0.5 * w;
            }
          }
        }
      }
    }
  }
  return r;
}

// Triplet sequential algorithm (Strict semantics only). Every unordered
// triple is visited once; its minimum-distance pair determines two focus
// increments (pass one) and two cohesion updates (pass two). The diagonal
// of C is left zero; see fill_diagonal. With validate_ties set, an exact
// tie among the triple's three distances raises a ValidationError.
inline PaldResult triplet_entrywise(const DistanceMatrix& d, bool validate_ties = false) {
  const std::size_t n = d.size();
  PaldResult r{FocusSizeMatrix(n), CohesionMatrix(n)};
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) r.focus.at(x, y) = 2;

  for (std::size_t x = 0; x < n; ++x) {
    const double* rx = d.row(x);
    for (std::size_t y = x + 1; y < n; ++y) {
      const double* ry = d.row(y);
      const double dxy = rx[y];
      for (std::size_t z = y + 1; z < n; ++z) {
        const double dxz = rx[z], dyz = ry[z];
        if (validate_ties && (dxy == dxz || dxy == dyz || dxz == dyz))
          throw ValidationError("exact distance tie in triple (" + std::to_string(x) + "," +
                                std::to_string(y) + "," + std::to_string(z) +
                                "); the triplet algorithm requires distinct distances");
        if (dxy < dxz && dxy < dyz) {
          ++r.focus.at(x, z);
          ++r.focus.at(y, z);
        } else if (dxz < dyz) {
          ++r.focus.at(x, y);
          ++r.focus.at(y, z);
        } else {
          ++r.focus.at(x, y);
          ++r.focus.at(x, z);
        }
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) r.focus.at(y, x) = r.focus.at(x, y);

  for (std::size_t x = 0; x < n; ++x) {
    const double* rx = d.row(x);
    for (std::size_t y = x + 1; y < n; ++y) {
      const double* ry = d.row(y);
      const double dxy = rx[y];
      for (std::size_t z = y + 1; z < n; ++z) {
        const double dxz = rx[z], dyz = ry[z];
        if (dxy < dxz && dxy < dyz) {
          r.cohesion.at(x, y) += 1.0 / r.focus.at(x, z);
          r.cohesion.at(y, x) += 1.0 / r.focus.at(y, z);
        } else if (dxz < dyz) {
          r.cohesion.at(x, z) += 1.0 / r.focus.at(x, y);
          r.cohesion.at(z, x) += 1.0 / r.focus.at(y, z);
        } else {
          r.cohesion.at(y, z) += 1.0 / r.focus.at(x, y);
          r.cohesion.at(z, y) += 1.0 / r.focus.at(x, z);
        }
      }
    }
  }
  return r;
}

// Reconciles the triplet algorithm's untouched diagonal with the pairwise
// one: c_xx = sum_{y != x} 1/u_xy. After this the two variants agree
// entrywise.
inline void fill_diagonal(const FocusSizeMatrix& u, CohesionMatrix& c) {
  for (std::size_t x = 0; x < c.n; ++x) {
    double sum = 0.0;
    for (std::size_t y = 0; y < c.n; ++y)
      if (y != x) sum += 1.0 / u.at(x, y);
    c.at(x, x) = sum;
  }
}

// Applies the 1/(n-1) factor. Double normalization is rejected.
inline void normalize(CohesionMatrix& c) {
  if (c.normalized) throw ValidationError("cohesion matrix is already normalized");
  const double scale = 1.0 / static_cast<double>(c.n - 1);
  for (double& v : c.values) v *= scale;
  c.normalized = true;
}

// Local depths are row sums of the normalized cohesion matrix.
inline LocalDepthVector local_depths(const CohesionMatrix& c) {
  if (!c.normalized) throw ValidationError("local depths require a normalized cohesion matrix");
  LocalDepthVector ld;
  ld.depths.resize(c.n);
  for (std::size_t x = 0; x < c.n; ++x) {
    double sum = 0.0;
    for (std::size_t z = 0; z < c.n; ++z) sum += c.at(x, z);
    ld.depths[x] = sum;
  }
  return ld;
}

}  // namespace pald
