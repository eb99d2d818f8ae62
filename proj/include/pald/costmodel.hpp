// Closed-form computation/communication cost predictions for the two
// blocked algorithms, the three-nested-loop bandwidth lower bound, and
// normalized operation counts / percentage-of-peak accounting. All
// formulas are leading-order; lower-order terms are dropped.
#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>

#include "pald/blocked.hpp"  // Variant
#include "pald/types.hpp"

namespace pald {

// Two-level machine model: fast memory of M words, per-instruction times
// for comparisons / FMAs / int-to-float casts, time per word moved, and
// single-core peak rate. Defaults mirror a 249.6 Gflops/sec core where
// comparisons cost twice an FMA, with a 22 MiB last-level cache of
// 32-bit words and ~100 GB/s of memory bandwidth.
struct MachineParams {
  double fast_memory_words = 22.0 * 1024 * 1024 / 4;
  double gamma_fma = 1.0 / 249.6e9;
  double gamma_cmp = 2.0 / 249.6e9;
  double gamma_cast = 1.0 / 249.6e9;
  double beta = 4.0 / 100e9;
  double peak_gflops = 249.6;

  void check() const {
    if (fast_memory_words <= 0 || gamma_fma <= 0 || gamma_cmp <= 0 || gamma_cast <= 0 ||
        beta <= 0 || peak_gflops <= 0)
      throw ValidationError("all machine parameters must be positive");
  }
};

// Key-value config, one `key = value` per line, '#' comments. Documented
// keys: fast_memory_words, gamma_cmp, gamma_fma, gamma_cast, beta,
// peak_gflops. Unknown keys are rejected.
inline MachineParams load_machine_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open machine config: " + path);
  MachineParams m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string eq;
    double value;
    if (key.find('=') != std::string::npos) {
      const auto pos = key.find('=');
      std::string rest = key.substr(pos + 1);
      key.erase(pos);
      if (rest.empty()) ls >> rest;
      value = std::stod(rest);
    } else if (!(ls >> eq >> value) || eq != "=") {
      throw ValidationError("malformed machine config at " + path + ":" +
                            std::to_string(lineno));
    }
    if (key == "fast_memory_words")
      m.fast_memory_words = value;
    else if (key == "gamma_cmp")
      m.gamma_cmp = value;
    else if (key == "gamma_fma")
      m.gamma_fma = value;
    else if (key == "gamma_cast")
      m.gamma_cast = value;
    else if (key == "beta")
      m.beta = value;
    else if (key == "peak_gflops")
      m.peak_gflops = value;
    else
      throw ValidationError("unknown machine config key '" + key + "' at " + path + ":" +
                            std::to_string(lineno));
  }
  m.check();
  return m;
}

// flops is the unweighted operation count, words the predicted traffic,
// seconds the gamma-weighted compute time plus beta-weighted bandwidth
// time, pct_peak the achieved fraction of peak at the predicted time.
struct CostEstimate {
  double flops = 0;
  double words = 0;
  double compute_seconds = 0;
  double bandwidth_seconds = 0;
  double seconds = 0;
  double pct_peak = 0;
};

inline double choose2(std::size_t n) {
  return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
}
inline double choose3(std::size_t n) {
  return static_cast<double>(n) * static_cast<double>(n - 1) * static_cast<double>(n - 2) / 6.0;
}

// Omega(n^3 / sqrt(M)) bandwidth lower bound, unit constant.
inline double lower_bound_words(std::size_t n, double fast_memory_words) {
  const double nd = static_cast<double>(n);
  return nd * nd * nd / std::sqrt(fast_memory_words);
}

// Operation counts normalized to FMA/cast cost, with comparisons weighted
// twice: pairwise 16 * n * C(n,2) ~ 8n^3, triplet 39 * C(n,3) ~ 6.5n^3.
inline double normalized_op_count(std::size_t n, Variant variant) {
  if (variant == Variant::Pairwise) return 16.0 * static_cast<double>(n) * choose2(n);
  return 39.0 * choose3(n);
}

// Fraction of peak achieved by `ops` normalized operations in `seconds`.
inline double pct_peak(double ops, double seconds, double peak_gflops) {
  if (seconds <= 0) throw ValidationError("pct_peak requires seconds > 0");
  return ops / (1e9 * seconds) / peak_gflops;
}

// Leading-order pairwise costs: F = (5 gamma_cmp + 1 gamma_fma) * n*C(n,2),
// W = 4*sqrt(2) * n^3/sqrt(M).
inline CostEstimate pairwise_costs(std::size_t n, const MachineParams& m) {
  m.check();
  CostEstimate e;
  const double iters = static_cast<double>(n) * choose2(n);
  e.flops = 6.0 * iters;
  e.compute_seconds = (5.0 * m.gamma_cmp + m.gamma_fma) * iters;
  e.words = 4.0 * std::sqrt(2.0) * lower_bound_words(n, m.fast_memory_words);
  e.bandwidth_seconds = m.beta * e.words;
  e.seconds = e.compute_seconds + e.bandwidth_seconds;
  e.pct_peak = pct_peak(normalized_op_count(n, Variant::Pairwise), e.seconds, m.peak_gflops);
  return e;
}

// Leading-order triplet costs: F = (6 gamma_cmp + 2 gamma_fma) * C(n,3),
// W = (sqrt(6) + 4*sqrt(3)) * n^3/sqrt(M).
inline CostEstimate triplet_costs(std::size_t n, const MachineParams& m) {
  m.check();
  if (n < 3) throw ValidationError("triplet cost model requires n >= 3");
  CostEstimate e;
  const double iters = choose3(n);
  e.flops = 8.0 * iters;
  e.compute_seconds = (6.0 * m.gamma_cmp + 2.0 * m.gamma_fma) * iters;
  e.words = (std::sqrt(6.0) + 4.0 * std::sqrt(3.0)) * lower_bound_words(n, m.fast_memory_words);
  e.bandwidth_seconds = m.beta * e.words;
  e.seconds = e.compute_seconds + e.bandwidth_seconds;
  e.pct_peak = pct_peak(normalized_op_count(n, Variant::Triplet), e.seconds, m.peak_gflops);
  return e;
}

}  // namespace pald
