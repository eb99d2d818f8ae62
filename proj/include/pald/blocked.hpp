// Cache-blocked and branch-free variants of the pairwise and triplet
// algorithms. Templated on the element type: the reference paths use
// double, the performance paths can be instantiated at float.
#pragma once

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "pald/reference.hpp"
#include "pald/types.hpp"

namespace pald {

// Block sizes in points. b drives the pairwise algorithm; b_focus and
// b_cohesion drive the two triplet passes independently. None of them
// needs to divide n; trailing blocks are short.
struct BlockConfig {
  std::size_t b = 0;
  std::size_t b_focus = 0;
  std::size_t b_cohesion = 0;
};

// Whether inner updates go through 0/1 mask FMAs or explicit branches.
// Both produce bit-identical output; Branchy exists so that can be tested.
enum class UpdateStyle { Masked, Branchy };

// 0/1-valued comparison masks. Pairwise uses (r, s); triplet uses all
// three with r + s + t == 1 for distinct distances.
struct MaskTriple {
  double r, s, t;
};

// r flags focus membership of z for the pair (x, y); s picks the entry of
// C to support. The two updates c_xz += r*s*(1/u) and c_yz += r*(1-s)*(1/u)
// reproduce the branchy pairwise update exactly.
inline MaskTriple pairwise_masks(double dxy, double dxz, double dyz) {
  const double r = static_cast<double>((dxz < dxy) | (dyz < dxy));
  const double s = static_cast<double>(dxz < dyz);
  return {r, s, 0.0};
}

// r flags (x,y) as the minimum-distance pair of the triple; s flags (x,z);
// t flags (y,z). Exactly one is 1 for distinct distances.
inline MaskTriple triplet_masks(double dxy, double dxz, double dyz) {
  const double r = static_cast<double>((dxy < dxz) & (dxy < dyz));
  const double s = (1.0 - r) * static_cast<double>(dxz < dyz);
  const double t = (1.0 - r) * (1.0 - s);
  return {r, s, t};
}

namespace detail {

class PhaseClock {
 public:
  explicit PhaseClock(PhaseTimes* out) : out_(out), start_(now()) {}
  void focus(double s) {
    if (out_) out_->focus_seconds += s;
  }
  void cohesion(double s) {
    if (out_) out_->cohesion_seconds += s;
  }
  void overhead(double s) {
    if (out_) out_->overhead_seconds += s;
  }
  void finish() {
    if (out_) out_->total_seconds = now() - start_;
  }
  static double now() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  }

 private:
  PhaseTimes* out_;
  double start_;
};

struct ScopedPhase {
  double t0 = PhaseClock::now();
  double elapsed() const { return PhaseClock::now() - t0; }
};

template <class Real>
std::vector<Real> to_real(const DistanceMatrix& d) {
  std::vector<Real> out(d.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<Real>(d.values()[i]);
  return out;
}

// Focus-size counts for the pair block [x0,x1) x [y0,y1) over third
// points z in [z0,z1), accumulated into counts (row-major, (x1-x0) rows of
// stride ys). Diagonal block pairs only count x < y.
template <class Real>
void pair_block_focus(const Real* dd, std::size_t n, Policy policy, std::size_t x0,
                      std::size_t x1, std::size_t y0, std::size_t y1, std::size_t z0,
                      std::size_t z1, std::int32_t* counts) {
  const std::size_t ys = y1 - y0;
  const bool strict = policy == Policy::Strict;
  for (std::size_t x = x0; x < x1; ++x) {
    const Real* rx = dd + x * n;
    const std::size_t ybeg = (y0 > x + 1) ? y0 : x + 1;
    for (std::size_t y = ybeg; y < y1; ++y) {
      const Real* ry = dd + y * n;
      const Real dxy = rx[y];
      std::int32_t cnt = 0;
      if (strict) {
        for (std::size_t z = z0; z < z1; ++z) cnt += (rx[z] < dxy) | (ry[z] < dxy);
      } else {
        for (std::size_t z = z0; z < z1; ++z) cnt += (rx[z] <= dxy) | (ry[z] <= dxy);
      }
      counts[(x - x0) * ys + (y - y0)] += cnt;
    }
  }
}

// Cohesion updates for one pair block over z in [z0,z1). recip holds the
// precomputed 1/u values in the same layout as pair_block_focus counts.
template <class Real>
void pair_block_cohesion(const Real* dd, std::size_t n, Policy policy, UpdateStyle style,
                         std::size_t x0, std::size_t x1, std::size_t y0, std::size_t y1,
                         std::size_t z0, std::size_t z1, const Real* recip, Real* c) {
  const std::size_t ys = y1 - y0;
  const bool strict = policy == Policy::Strict;
  for (std::size_t x = x0; x < x1; ++x) {
    const Real* rx = dd + x * n;
    Real* cx = c + x * n;
    const std::size_t ybeg = (y0 > x + 1) ? y0 : x + 1;
    for (std::size_t y = ybeg; y < y1; ++y) {
      const Real* ry = dd + y * n;
      Real* cy = c + y * n;
      const Real dxy = rx[y];
      const Real w = recip[(x - x0) * ys + (y - y0)];
      if (style == UpdateStyle::Masked) {
        if (strict) {
          for (std::size_t z = z0; z < z1; ++z) {
            const Real dxz = rx[z], dyz = ry[z];
            const Real r = (dxz < dyz ? dxz : dyz) < dxy ? Real(1) : Real(0);
            const Real s = dxz < dyz ? Real(1) : Real(0);
            cx[z] += r * s * w;
            cy[z] += r * (Real(1) - s) * w;
          }
        } else {
          for (std::size_t z = z0; z < z1; ++z) {
            const Real dxz = rx[z], dyz = ry[z];
            const Real r = (dxz < dyz ? dxz : dyz) <= dxy ? Real(1) : Real(0);
            const Real sx = (dxz < dyz ? Real(1) : Real(0)) +
                            Real(0.5) * (dxz == dyz ? Real(1) : Real(0));
            cx[z] += r * sx * w;
            cy[z] += r * (Real(1) - sx) * w;
          }
        }
      } else {
        for (std::size_t z = z0; z < z1; ++z) {
          const Real dxz = rx[z], dyz = ry[z];
          if (strict) {
            if (dxz < dxy || dyz < dxy) {
              if (dxz < dyz)
                cx[z] += w;
              else
                cy[z] += w;
            }
          } else {
            if (dxz <= dxy || dyz <= dxy) {
              if (dxz < dyz)
                cx[z] += w;
              else if (dyz < dxz)
                cy[z] += w;
              else {
                cx[z] += Real(0.5) * w;
                cy[z] += Real(0.5) * w;
              }
            }
          }
        }
      }
    }
  }
}

struct BlockRange {
  std::size_t begin, end;
};

// Focus increments for one triple of blocks. Visits each unordered triple
// x < y < z once; the two non-minimal pairs' sizes are incremented. U is
// written in its upper triangle only.
template <class Real>
void triple_block_focus(const Real* dd, std::size_t n, UpdateStyle style, BlockRange bx,
                        BlockRange by, BlockRange bz, std::int32_t* u) {
  const bool xy_same = bx.begin == by.begin;
  const bool yz_same = by.begin == bz.begin;
  for (std::size_t x = bx.begin; x < bx.end; ++x) {
    const Real* rx = dd + x * n;
    std::int32_t* ux = u + x * n;
    const std::size_t ybeg = xy_same ? x + 1 : by.begin;
    for (std::size_t y = ybeg; y < by.end; ++y) {
      const Real* ry = dd + y * n;
      std::int32_t* uy = u + y * n;
      const Real dxy = rx[y];
      const std::size_t zbeg = yz_same ? y + 1 : bz.begin;
      if (style == UpdateStyle::Masked) {
        std::int32_t uxy = 0;
        for (std::size_t z = zbeg; z < bz.end; ++z) {
          const Real dxz = rx[z], dyz = ry[z];
          const std::int32_t r = dxy < (dxz < dyz ? dxz : dyz) ? 1 : 0;
          const std::int32_t s = (1 - r) & (dxz < dyz ? 1 : 0);
          const std::int32_t t = 1 - r - s;
          uxy += s + t;
          ux[z] += r + t;
          uy[z] += r + s;
        }
        ux[y] += uxy;
      } else {
        for (std::size_t z = zbeg; z < bz.end; ++z) {
          const Real dxz = rx[z], dyz = ry[z];
          if (dxy < dxz && dxy < dyz) {
            ++ux[z];
            ++uy[z];
          } else if (dxz < dyz) {
            ++ux[y];
            ++uy[z];
          } else {
            ++ux[y];
            ++ux[z];
          }
        }
      }
    }
  }
}

// Six-way cohesion updates for one triple of blocks. recip is the full
// n x n matrix of 1/u values.
// ct is an n x n transposed accumulator: ct[a*n + z] buffers support that
// belongs in c[z*n + a]. Writing the z-column contributions there keeps
// every store in the inner loop unit-stride (a direct column walk touches
// a fresh page per step); the caller folds ct back into c with one
// transpose-add. Each (x, y, z) adds at most once per destination, so the
// buffering reorders no sums within an entry.
template <class Real>
void triple_block_cohesion(const Real* dd, std::size_t n, UpdateStyle style, BlockRange bx,
                           BlockRange by, BlockRange bz, const Real* recip, Real* c,
                           Real* ct) {
  const bool xy_same = bx.begin == by.begin;
  const bool yz_same = by.begin == bz.begin;
  // The masked path stages per-z masks and reduction terms in scratch so
  // that each pass touches few enough arrays for the vectorizer's alias
  // checks; each destination entry still gets at most one addition per
  // (x, y, z), in the same order as the branchy path.
  const std::size_t lane = bz.end - bz.begin;
  std::vector<Real> buf(style == UpdateStyle::Masked ? 5 * lane : 0);
  Real* __restrict gr = buf.data();        // min-pair mask r
  Real* __restrict gs = gr + lane;         // (x,z)-pair mask s
  Real* __restrict gt = gs + lane;         // (y,z)-pair mask t
  Real* __restrict gx = gt + lane;         // r * wx[z]
  Real* __restrict gy = gx + lane;         // r * wy[z]
  for (std::size_t x = bx.begin; x < bx.end; ++x) {
    const Real* rx = dd + x * n;
    const Real* wx = recip + x * n;
    Real* cx = c + x * n;
    const std::size_t ybeg = xy_same ? x + 1 : by.begin;
    for (std::size_t y = ybeg; y < by.end; ++y) {
      const Real* ry = dd + y * n;
      const Real* wy = recip + y * n;
      Real* cy = c + y * n;
      const Real dxy = rx[y];
      const Real wxy = wx[y];
      const std::size_t zbeg = yz_same ? y + 1 : bz.begin;
      // Both styles accumulate the (x,y)-destined support in registers and
      // flush once per z-run, so they stay bit-identical to each other.
      Real cxy = 0, cyx = 0;
      if (style == UpdateStyle::Masked) {
        const std::size_t run = bz.end - zbeg;
        const Real* __restrict rxz = rx + zbeg;
        const Real* __restrict ryz = ry + zbeg;
        const Real* __restrict wxz = wx + zbeg;
        const Real* __restrict wyz = wy + zbeg;
        Real* __restrict cxz = cx + zbeg;
        Real* __restrict cyz = cy + zbeg;
        Real* __restrict ctx = ct + x * n + zbeg;
        Real* __restrict cty = ct + y * n + zbeg;
        // Single-comparison selects (dxy < min, dxz < dyz) if-convert and
        // vectorize where the equivalent bool-and form stays scalar.
        for (std::size_t i = 0; i < run; ++i) {
          const Real dxz = rxz[i], dyz = ryz[i];
          const Real r = dxy < (dxz < dyz ? dxz : dyz) ? Real(1) : Real(0);
          const Real s = (Real(1) - r) * (dxz < dyz ? Real(1) : Real(0));
          gr[i] = r;
          gs[i] = s;
          gt[i] = (Real(1) - r) - s;
        }
        for (std::size_t i = 0; i < run; ++i) cxz[i] += gs[i] * wxy;
        for (std::size_t i = 0; i < run; ++i) cyz[i] += gt[i] * wxy;
        for (std::size_t i = 0; i < run; ++i) ctx[i] += gs[i] * wyz[i];
        for (std::size_t i = 0; i < run; ++i) cty[i] += gt[i] * wxz[i];
        for (std::size_t i = 0; i < run; ++i) {
          gx[i] = gr[i] * wxz[i];
          gy[i] = gr[i] * wyz[i];
        }
        // Kept scalar (strict FP forbids reassociating the sum), preserving
        // bit-identity with the branchy path's accumulation order.
        for (std::size_t i = 0; i < run; ++i) {
          cxy += gx[i];
          cyx += gy[i];
        }
      } else {
        Real* ctx = ct + x * n;
        Real* cty = ct + y * n;
        for (std::size_t z = zbeg; z < bz.end; ++z) {
          const Real dxz = rx[z], dyz = ry[z];
          if (dxy < dxz && dxy < dyz) {
            cxy += wx[z];
            cyx += wy[z];
          } else if (dxz < dyz) {
            cx[z] += wxy;
            ctx[z] += wy[z];
          } else {
            cy[z] += wxy;
            cty[z] += wx[z];
          }
        }
      }
      cx[y] += cxy;
      cy[x] += cyx;
    }
  }
}

// Folds the transposed accumulator back: c[z][a] += ct[a][z].
template <class Real>
void fold_transposed(Real* c, const Real* ct, std::size_t n) {
  for (std::size_t z = 0; z < n; ++z) {
    Real* __restrict cz = c + z * n;
    const Real* __restrict col = ct + z;
    for (std::size_t a = 0; a < n; ++a) cz[a] += col[a * n];
  }
}

inline void mirror_upper(std::int32_t* u, std::size_t n) {
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) u[y * n + x] = u[x * n + y];
}

template <class Real>
PaldResult collect_result(std::size_t n, std::vector<std::int32_t>&& u,
                          const std::vector<Real>& c) {
  PaldResult r{FocusSizeMatrix(n), CohesionMatrix(n)};
  r.focus.sizes = std::move(u);
  for (std::size_t i = 0; i < c.size(); ++i) r.cohesion.values[i] = static_cast<double>(c[i]);
  return r;
}

}  // namespace detail

// Blocked pairwise algorithm: iterates pair blocks over the upper
// triangle of blocks; per block pair, pass one computes a focus-size
// block over all z, pass two applies mask-weighted cohesion updates with
// precomputed reciprocals. Output is unnormalized and matches
// pairwise_entrywise.
template <class Real = double>
PaldResult blocked_pairwise(const DistanceMatrix& d, std::size_t b,
                            Policy policy = Policy::Strict, PhaseTimes* times = nullptr,
                            UpdateStyle style = UpdateStyle::Masked) {
  if (b < 1) throw ValidationError("pairwise block size must be >= 1");
  const std::size_t n = d.size();
  detail::PhaseClock clock(times);

  detail::ScopedPhase conv;
  const std::vector<Real> dd = detail::to_real<Real>(d);
  std::vector<Real> c(n * n, Real(0));
  std::vector<std::int32_t> u(n * n, 0);
  std::vector<std::int32_t> ub(b * b);
  std::vector<Real> recip(b * b);
  clock.overhead(conv.elapsed());

  for (std::size_t x0 = 0; x0 < n; x0 += b) {
    const std::size_t x1 = std::min(x0 + b, n);
    for (std::size_t y0 = x0; y0 < n; y0 += b) {
      const std::size_t y1 = std::min(y0 + b, n);
      const std::size_t ys = y1 - y0;

      detail::ScopedPhase pf;
      std::fill(ub.begin(), ub.begin() + (x1 - x0) * ys, 0);
      detail::pair_block_focus(dd.data(), n, policy, x0, x1, y0, y1, 0, n, ub.data());
      clock.focus(pf.elapsed());

      detail::ScopedPhase pr;
      for (std::size_t x = x0; x < x1; ++x) {
        const std::size_t ybeg = (y0 > x + 1) ? y0 : x + 1;
        for (std::size_t y = ybeg; y < y1; ++y) {
          const std::int32_t cnt = ub[(x - x0) * ys + (y - y0)];
          u[x * n + y] = u[y * n + x] = cnt;
          recip[(x - x0) * ys + (y - y0)] = Real(1) / static_cast<Real>(cnt);
        }
      }
      clock.overhead(pr.elapsed());

      detail::ScopedPhase pc;
      detail::pair_block_cohesion(dd.data(), n, policy, style, x0, x1, y0, y1, 0, n,
                                  recip.data(), c.data());
      clock.cohesion(pc.elapsed());
    }
  }

  detail::ScopedPhase out;
  PaldResult r = detail::collect_result(n, std::move(u), c);
  clock.overhead(out.elapsed());
  clock.finish();
  return r;
}

// Blocked triplet algorithm (Strict only): pass one over block triples
// builds the full focus-size matrix, pass two (independent block size)
// performs the six cohesion updates per triple. The diagonal of C is left
// zero; see fill_diagonal.
template <class Real = double>
PaldResult blocked_triplet(const DistanceMatrix& d, std::size_t b_focus,
                           std::size_t b_cohesion, Policy policy = Policy::Strict,
                           PhaseTimes* times = nullptr,
                           UpdateStyle style = UpdateStyle::Masked) {
  if (policy != Policy::Strict)
    throw UnsupportedPolicyError("the triplet algorithm supports the strict policy only");
  if (b_focus < 1 || b_cohesion < 1) throw ValidationError("triplet block sizes must be >= 1");
  const std::size_t n = d.size();
  detail::PhaseClock clock(times);

  detail::ScopedPhase conv;
  const std::vector<Real> dd = detail::to_real<Real>(d);
  std::vector<Real> c(n * n, Real(0));
  std::vector<std::int32_t> u(n * n, 0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) u[x * n + y] = 2;
  clock.overhead(conv.elapsed());

  detail::ScopedPhase pf;
  for (std::size_t x0 = 0; x0 < n; x0 += b_focus)
    for (std::size_t y0 = x0; y0 < n; y0 += b_focus)
      for (std::size_t z0 = y0; z0 < n; z0 += b_focus)
        detail::triple_block_focus(dd.data(), n, style, {x0, std::min(x0 + b_focus, n)},
                                   {y0, std::min(y0 + b_focus, n)},
                                   {z0, std::min(z0 + b_focus, n)}, u.data());
  clock.focus(pf.elapsed());

  detail::ScopedPhase pr;
  detail::mirror_upper(u.data(), n);
  std::vector<Real> recip(n * n, Real(0));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (y != x) recip[x * n + y] = Real(1) / static_cast<Real>(u[x * n + y]);
  clock.overhead(pr.elapsed());

  detail::ScopedPhase pc;
  std::vector<Real> ct(n * n, Real(0));
  for (std::size_t x0 = 0; x0 < n; x0 += b_cohesion)
    for (std::size_t y0 = x0; y0 < n; y0 += b_cohesion)
      for (std::size_t z0 = y0; z0 < n; z0 += b_cohesion)
        detail::triple_block_cohesion(dd.data(), n, style, {x0, std::min(x0 + b_cohesion, n)},
                                      {y0, std::min(y0 + b_cohesion, n)},
                                      {z0, std::min(z0 + b_cohesion, n)}, recip.data(),
                                      c.data(), ct.data());
  detail::fold_transposed(c.data(), ct.data(), n);
  clock.cohesion(pc.elapsed());

  detail::ScopedPhase out;
  PaldResult r = detail::collect_result(n, std::move(u), c);
  clock.overhead(out.elapsed());
  clock.finish();
  return r;
}

enum class Variant { Pairwise, Triplet };

namespace detail {

inline std::size_t pow2_floor(double v) {
  std::size_t b = 1;
  while (static_cast<double>(b * 2) <= v) b *= 2;
  return b;
}

inline std::size_t clamp_sweep(std::size_t b) {
  if (b < 32) return 32;
  if (b > 1024) return 1024;
  return b;
}

}  // namespace detail

// Last-level cache size in bytes; falls back to 16 MiB when undetectable.
inline std::size_t detected_cache_bytes() {
  for (int name : {_SC_LEVEL3_CACHE_SIZE, _SC_LEVEL2_CACHE_SIZE}) {
    long v = ::sysconf(name);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::size_t(16) << 20;
}

// Block sizes used when tuning is skipped: the largest powers of two
// whose working set (2b^2 words pairwise, 6b^2 / 12b^2 words for the two
// triplet passes) fits in half the last-level cache, clamped to the
// tuning sweep range [32, 1024].
inline BlockConfig default_block_config(std::size_t element_bytes = sizeof(double),
                                        std::size_t cache_bytes = detected_cache_bytes()) {
  const double m = static_cast<double>(cache_bytes) / 2.0 / static_cast<double>(element_bytes);
  BlockConfig cfg;
  cfg.b = detail::clamp_sweep(detail::pow2_floor(std::sqrt(m / 2.0)));
  cfg.b_focus = detail::clamp_sweep(detail::pow2_floor(std::sqrt(m / 6.0)));
  cfg.b_cohesion = detail::clamp_sweep(detail::pow2_floor(std::sqrt(m / 12.0)));
  return cfg;
}

namespace detail {

inline DistanceMatrix random_distances(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.5, 2.0);
  std::vector<double> v(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) v[x * n + y] = v[y * n + x] = dist(rng);
  return DistanceMatrix(n, std::move(v));
}

}  // namespace detail

// Sweeps power-of-two block sizes in [32, 1024] on a random matrix of the
// given size and returns the fastest configuration, breaking ties toward
// larger blocks. trial_budget is the number of timed trials per
// candidate (the minimum is kept).
template <class Real = float>
BlockConfig autotune_blocks(std::size_t n, Variant variant, int trial_budget = 1) {
  if (trial_budget < 1) throw ValidationError("autotune trial budget must be >= 1");
  const DistanceMatrix d = detail::random_distances(n, 0x9e3779b97f4a7c15ull);
  std::vector<std::size_t> sweep;
  for (std::size_t b = 32; b <= 1024; b *= 2) sweep.push_back(b);

  auto time_run = [&](auto&& fn) {
    double best = 1e300;
    for (int t = 0; t < trial_budget; ++t) {
      const double t0 = detail::PhaseClock::now();
      fn();
      best = std::min(best, detail::PhaseClock::now() - t0);
    }
    return best;
  };

  BlockConfig best = default_block_config(sizeof(Real));
  double best_t = 1e300;
  if (variant == Variant::Pairwise) {
    for (std::size_t b : sweep) {
      const double t = time_run([&] { blocked_pairwise<Real>(d, b); });
      if (t < best_t || (t == best_t && b > best.b)) {
        best_t = t;
        best.b = b;
      }
    }
  } else {
    for (std::size_t bf : sweep) {
      for (std::size_t bc : sweep) {
        const double t = time_run([&] { blocked_triplet<Real>(d, bf, bc); });
        if (t < best_t || (t == best_t && bf * bc > best.b_focus * best.b_cohesion)) {
          best_t = t;
          best.b_focus = bf;
          best.b_cohesion = bc;
        }
      }
    }
  }
  return best;
}

}  // namespace pald
