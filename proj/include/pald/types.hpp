// Core domain types for partitioned local depth (PaLD) computations.
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pald {

// Error hierarchy. The CLI maps these onto distinct exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct UnsupportedPolicyError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

// Comparison semantics for focus membership and support.
//
// Strict ignores equality everywhere: `<` for focus membership, and a
// support tie goes to the second point of the pair (the branch-free form
// of the pairwise update). InclusiveSplit uses `<=` for focus membership
// and splits support 0.5/0.5 on a distance tie between a third point and
// the pair.
enum class Policy { Strict, InclusiveSplit };

inline const char* to_string(Policy p) {
  return p == Policy::Strict ? "strict" : "split";
}

// Dense symmetric n x n distance matrix with zero diagonal and strictly
// positive off-diagonal entries. The sole input to PaLD. Immutable after
// construction; safe to share read-only across threads.
class DistanceMatrix {
 public:
  DistanceMatrix(std::size_t n, std::vector<double> values)
      : n_(n), values_(std::move(values)) {
    if (n_ < 2) throw ValidationError("distance matrix needs n >= 2, got n=" + std::to_string(n_));
    if (values_.size() != n_ * n_)
      throw ValidationError("distance matrix storage size does not match n*n");
    for (std::size_t x = 0; x < n_; ++x) {
      if (values_[x * n_ + x] != 0.0)
        throw ValidationError("distance matrix diagonal entry (" + std::to_string(x) +
                              "," + std::to_string(x) + ") is nonzero");
      for (std::size_t y = x + 1; y < n_; ++y) {
        const double dxy = values_[x * n_ + y];
        if (!(dxy > 0.0))
          throw ValidationError("off-diagonal distance (" + std::to_string(x) + "," +
                                std::to_string(y) + ") must be positive, got " +
                                std::to_string(dxy) + " (duplicate points are rejected)");
        if (dxy != values_[y * n_ + x])
          throw ValidationError("distance matrix not symmetric at (" + std::to_string(x) +
                                "," + std::to_string(y) + ")");
      }
    }
  }

  std::size_t size() const { return n_; }
  double operator()(std::size_t x, std::size_t y) const { return values_[x * n_ + y]; }
  const double* row(std::size_t x) const { return values_.data() + x * n_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

// Symmetric n x n matrix of local focus sizes u_xy. Diagonal unused
// (kept at 0). Off-diagonal entries are in [2, n].
struct FocusSizeMatrix {
  std::size_t n = 0;
  std::vector<std::int32_t> sizes;  // row-major n*n

  explicit FocusSizeMatrix(std::size_t n_ = 0) : n(n_), sizes(n_ * n_, 0) {}
  std::int32_t& at(std::size_t x, std::size_t y) { return sizes[x * n + y]; }
  std::int32_t at(std::size_t x, std::size_t y) const { return sizes[x * n + y]; }
};

// Dense n x n cohesion matrix c_xz (not symmetric). `normalized` records
// whether the 1/(n-1) factor has been applied.
struct CohesionMatrix {
  std::size_t n = 0;
  std::vector<double> values;  // row-major n*n
  bool normalized = false;

  explicit CohesionMatrix(std::size_t n_ = 0) : n(n_), values(n_ * n_, 0.0) {}
  double& at(std::size_t x, std::size_t z) { return values[x * n + z]; }
  double at(std::size_t x, std::size_t z) const { return values[x * n + z]; }
};

// Row sums of the normalized cohesion matrix; depths[x] in [0,1].
struct LocalDepthVector {
  std::vector<double> depths;
};

// Result of a full PaLD pass: focus sizes plus (unnormalized) cohesion.
struct PaldResult {
  FocusSizeMatrix focus;
  CohesionMatrix cohesion;
};

// Wall-clock seconds per phase of a blocked/parallel run. `overhead`
// covers element-type conversion, initialization, mirroring, and
// reciprocal precompute.
struct PhaseTimes {
  double focus_seconds = 0.0;
  double cohesion_seconds = 0.0;
  double overhead_seconds = 0.0;
  double total_seconds = 0.0;
};

}  // namespace pald
