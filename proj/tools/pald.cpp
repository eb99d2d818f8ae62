// pald command-line tool: compute cohesion matrices, analyze strong ties,
// benchmark the algorithm variants, predict costs, and convert inputs.
//
// Exit codes: 0 success, 2 input validation, 3 unsupported combination,
// 4 I/O.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pald/pald.hpp"

namespace {

using namespace pald;

std::string file_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  return ext;
}

struct LoadedInput {
  DistanceMatrix distances;
  bool tie_heavy = false;  // hop-count metric, defaults to pairwise + split
};

LoadedInput load_input(const std::string& path, std::string format) {
  if (format == "auto") {
    const std::string ext = file_ext(path);
    if (ext == "csv") format = "csv";
    else if (ext == "bin" || ext == "pald") format = "bin";
    else if (ext == "pts" || ext == "points") format = "points";
    else if (ext == "edges" || ext == "edgelist" || ext == "txt") format = "edgelist";
    else
      throw ValidationError("cannot infer input format from '" + path +
                            "'; pass --format explicitly");
  }
  if (format == "csv") return {read_distance_csv(path), false};
  if (format == "bin") return {read_distance_binary(path), false};
  if (format == "points") return {points_to_distances(read_points_csv(path)), false};
  if (format == "edgelist") {
    GraphDistances g = graph_to_distances(read_edge_list(path));
    if (g.dropped_vertices > 0)
      std::cerr << "warning: dropped " << g.dropped_vertices
                << " vertices outside the largest connected component\n";
    return {std::move(g.distances), true};
  }
  throw ValidationError("unknown input format '" + format + "'");
}

Policy parse_policy(const std::string& s) {
  if (s == "strict") return Policy::Strict;
  if (s == "split") return Policy::InclusiveSplit;
  throw ValidationError("unknown policy '" + s + "' (expected strict or split)");
}

struct ComputeOpts {
  std::string in, format = "auto", alg = "auto", policy, out, out_focus, out_depths;
  std::string precision = "double";
  std::size_t b = 0, b_focus = 0, b_cohesion = 0;
  int threads = 1;
  bool no_normalize = false, deterministic = false, autotune = false, validate_ties = false;
};

struct ComputeRun {
  PaldResult result;
  PhaseTimes times;
  bool diagonal_missing = false;
};

template <class Real>
ComputeRun run_algorithm(const std::string& alg, const DistanceMatrix& d, Policy policy,
                         const ComputeOpts& o, const BlockConfig& cfg) {
  ComputeRun run;
  const double t0 = detail::PhaseClock::now();
  if (alg == "naive-pairwise") {
    run.result = pairwise_entrywise(d, policy);
  } else if (alg == "naive-triplet") {
    if (policy != Policy::Strict)
      throw UnsupportedPolicyError("the triplet algorithm supports the strict policy only");
    run.result = triplet_entrywise(d, o.validate_ties);
    run.diagonal_missing = true;
  } else if (alg == "blocked-pairwise") {
    if (o.threads > 1)
      run.result = parallel_pairwise<Real>(d, cfg.b, {o.threads, o.deterministic}, policy,
                                           &run.times);
    else
      run.result = blocked_pairwise<Real>(d, cfg.b, policy, &run.times);
  } else if (alg == "blocked-triplet") {
    if (o.threads > 1)
      run.result = parallel_triplet<Real>(d, cfg.b_focus, cfg.b_cohesion,
                                          {o.threads, o.deterministic}, policy, &run.times);
    else
      run.result = blocked_triplet<Real>(d, cfg.b_focus, cfg.b_cohesion, policy, &run.times);
    run.diagonal_missing = true;
  } else {
    throw ValidationError("unknown algorithm '" + alg + "'");
  }
  if (run.times.total_seconds == 0) run.times.total_seconds = detail::PhaseClock::now() - t0;
  return run;
}

void write_cohesion(const std::string& path, const CohesionMatrix& c, const std::string& alg,
                    const std::string& policy) {
  if (file_ext(path) == "bin" || file_ext(path) == "pald")
    write_matrix_binary(path, c.values.data(), c.n);
  else
    write_cohesion_csv(path, c, alg, policy);
}

int cmd_compute(const ComputeOpts& o, bool policy_given, bool alg_given) {
  LoadedInput input = load_input(o.in, o.format);
  const DistanceMatrix& d = input.distances;
  const std::size_t n = d.size();

  // Tie-heavy hop-count inputs default to pairwise with tie splitting.
  std::string alg = o.alg;
  Policy policy = policy_given ? parse_policy(o.policy)
                               : (input.tie_heavy ? Policy::InclusiveSplit : Policy::Strict);
  if (alg == "auto") {
    if (input.tie_heavy && !alg_given)
      alg = "blocked-pairwise";
    else
      alg = (n >= 1024) ? "blocked-triplet" : "blocked-pairwise";
  }
  if ((alg == "naive-triplet" || alg == "blocked-triplet") && policy != Policy::Strict)
    throw UnsupportedPolicyError("the triplet algorithm supports the strict policy only; "
                                 "use a pairwise variant for the split policy");

  const std::size_t elem = o.precision == "float" ? sizeof(float) : sizeof(double);
  BlockConfig cfg = default_block_config(elem);
  if (o.autotune) {
    const Variant v = (alg == "blocked-triplet") ? Variant::Triplet : Variant::Pairwise;
    const BlockConfig tuned =
        o.precision == "float" ? autotune_blocks<float>(n, v) : autotune_blocks<double>(n, v);
    if (v == Variant::Pairwise) cfg.b = tuned.b;
    else {
      cfg.b_focus = tuned.b_focus;
      cfg.b_cohesion = tuned.b_cohesion;
    }
  }
  if (o.b) cfg.b = o.b;
  if (o.b_focus) cfg.b_focus = o.b_focus;
  if (o.b_cohesion) cfg.b_cohesion = o.b_cohesion;

  ComputeRun run = o.precision == "float" ? run_algorithm<float>(alg, d, policy, o, cfg)
                                          : run_algorithm<double>(alg, d, policy, o, cfg);

  if (run.diagonal_missing) fill_diagonal(run.result.focus, run.result.cohesion);
  if (!o.no_normalize) normalize(run.result.cohesion);

  if (!o.out.empty()) write_cohesion(o.out, run.result.cohesion, alg, to_string(policy));
  if (!o.out_focus.empty()) {
    std::vector<double> f(n * n);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = run.result.focus.sizes[i];
    write_matrix_csv(o.out_focus, f.data(), n);
  }
  if (!o.out_depths.empty()) {
    if (!run.result.cohesion.normalized)
      throw ValidationError("--out-depths requires normalization (drop --no-normalize)");
    const LocalDepthVector ld = local_depths(run.result.cohesion);
    std::ofstream out(o.out_depths);
    if (!out) throw IoError("cannot write " + o.out_depths);
    char buf[64];
    for (double v : ld.depths) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << "\n";
    }
  }

  std::printf("n=%zu algorithm=%s policy=%s threads=%d normalized=%s\n", n, alg.c_str(),
              to_string(policy), o.threads, o.no_normalize ? "false" : "true");
  std::printf("wall_seconds=%.6f focus_seconds=%.6f cohesion_seconds=%.6f "
              "overhead_seconds=%.6f\n",
              run.times.total_seconds, run.times.focus_seconds, run.times.cohesion_seconds,
              run.times.overhead_seconds);
  return 0;
}

int cmd_analyze(const std::string& in, const std::string& mode, std::size_t k,
                std::size_t focus, std::optional<double> threshold, const std::string& out) {
  const CohesionMatrix c = read_cohesion_csv(in);
  if (mode == "strong-ties") {
    const StrongTieGraph g = strong_ties(c, threshold);
    std::printf("threshold=%.17g\nedges=%zu\n", g.threshold, g.edges.size());
    std::ostream* os = &std::cout;
    std::ofstream f;
    if (!out.empty()) {
      f.open(out);
      if (!f) throw IoError("cannot write " + out);
      os = &f;
    }
    *os << "x,y,strength\n";
    char buf[64];
    for (const auto& e : g.edges) {
      std::snprintf(buf, sizeof(buf), "%.17g", e.strength);
      *os << e.x << "," << e.y << "," << buf << "\n";
    }
    return 0;
  }
  if (mode == "neighbors") {
    const auto nb = nearest_neighbors(c, focus, k);
    std::printf("focus=%zu k=%zu\n", focus, k);
    std::printf("z,strength\n");
    for (const auto& e : nb) std::printf("%zu,%.17g\n", e.z, e.strength);
    return 0;
  }
  throw ValidationError("unknown analyze mode '" + mode + "'");
}

int cmd_predict(std::size_t n, const std::string& variant, const std::string& machine) {
  const MachineParams m = machine.empty() ? MachineParams{} : load_machine_params(machine);
  const Variant v = variant == "triplet" ? Variant::Triplet : Variant::Pairwise;
  const CostEstimate e = v == Variant::Triplet ? triplet_costs(n, m) : pairwise_costs(n, m);
  const double lb = lower_bound_words(n, m.fast_memory_words);
  std::printf("variant=%s n=%zu\n", variant.c_str(), n);
  std::printf("flops=%.6g\nwords_moved=%.6g\n", e.flops, e.words);
  std::printf("compute_seconds=%.6g\nbandwidth_seconds=%.6g\npredicted_seconds=%.6g\n",
              e.compute_seconds, e.bandwidth_seconds, e.seconds);
  std::printf("lower_bound_words=%.6g\nlower_bound_ratio=%.3g\n", lb, e.words / lb);
  std::printf("normalized_ops=%.6g\npct_peak=%.3g\n", normalized_op_count(n, v), e.pct_peak);
  return 0;
}

int cmd_convert(const std::string& in, const std::string& informat, const std::string& out) {
  const LoadedInput input = load_input(in, informat);
  const std::string ext = file_ext(out);
  if (ext == "bin" || ext == "pald")
    write_matrix_binary(out, input.distances.values().data(), input.distances.size());
  else if (ext == "csv")
    write_distance_csv(out, input.distances);
  else
    throw ValidationError("cannot infer output format from '" + out + "' (use .csv or .bin)");
  std::printf("wrote %zu x %zu distance matrix to %s\n", input.distances.size(),
              input.distances.size(), out.c_str());
  return 0;
}

struct BenchOpts {
  std::vector<std::size_t> sizes{512};
  std::vector<std::string> algs{"naive-pairwise", "blocked-pairwise", "blocked-triplet"};
  std::vector<std::size_t> blocks;
  std::vector<int> threads{1};
  int trials = 5;
  std::string out_csv, baseline = "naive-pairwise", precision = "float";
};

int cmd_bench(const BenchOpts& o) {
  if (o.trials < 1) throw ValidationError("bench needs at least 1 trial");
  std::ofstream csv;
  std::ostream* os = &std::cout;
  if (!o.out_csv.empty()) {
    csv.open(o.out_csv);
    if (!csv) throw IoError("cannot write " + o.out_csv);
    os = &csv;
  }
  *os << "algorithm,n,b,b_focus,b_cohesion,p,trial,total_s,focus_s,cohesion_s,"
         "mem_overhead_s\n";

  struct Key {
    std::string alg;
    std::size_t n, b, bf, bc;
    int p;
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, double> mean_total;

  for (std::size_t n : o.sizes) {
    const DistanceMatrix d = detail::random_distances(n, 12345 + n);
    const BlockConfig def = default_block_config(
        o.precision == "float" ? sizeof(float) : sizeof(double));
    std::vector<std::size_t> blocks = o.blocks;
    if (blocks.empty()) blocks = {def.b};

    for (const std::string& alg : o.algs) {
      const bool naive = alg.rfind("naive", 0) == 0;
      const std::vector<std::size_t> bs = naive ? std::vector<std::size_t>{0} : blocks;
      const std::vector<int> ps = naive ? std::vector<int>{1} : o.threads;
      for (std::size_t b : bs) {
        for (int p : ps) {
          ComputeOpts co;
          co.threads = p;
          BlockConfig cfg{b, b, std::max<std::size_t>(1, b / 2)};
          double sum = 0;
          for (int trial = 0; trial < o.trials; ++trial) {
            ComputeRun run = o.precision == "float"
                                 ? run_algorithm<float>(alg, d, Policy::Strict, co, cfg)
                                 : run_algorithm<double>(alg, d, Policy::Strict, co, cfg);
            sum += run.times.total_seconds;
            char line[256];
            std::snprintf(line, sizeof(line), "%s,%zu,%zu,%zu,%zu,%d,%d,%.6f,%.6f,%.6f,%.6f\n",
                          alg.c_str(), n, cfg.b, cfg.b_focus, cfg.b_cohesion, p, trial,
                          run.times.total_seconds, run.times.focus_seconds,
                          run.times.cohesion_seconds, run.times.overhead_seconds);
            *os << line;
          }
          mean_total[{alg, n, cfg.b, cfg.b_focus, cfg.b_cohesion, p}] = sum / o.trials;
        }
      }
    }
  }

  // Summary: speedup vs the named baseline at the same n, and
  // strong-scaling efficiency vs the same config at p = 1.
  std::printf("algorithm,n,b,b_focus,b_cohesion,p,mean_s,speedup_vs_%s,efficiency\n",
              o.baseline.c_str());
  for (const auto& [k, mean] : mean_total) {
    double base = 0;
    for (const auto& [k2, m2] : mean_total)
      if (k2.alg == o.baseline && k2.n == k.n && k2.p == 1) base = m2;
    double p1 = 0;
    for (const auto& [k2, m2] : mean_total)
      if (k2.alg == k.alg && k2.n == k.n && k2.b == k.b && k2.bf == k.bf && k2.bc == k.bc &&
          k2.p == 1)
        p1 = m2;
    std::printf("%s,%zu,%zu,%zu,%zu,%d,%.6f,%.3f,%.3f\n", k.alg.c_str(), k.n, k.b, k.bf, k.bc,
                k.p, mean, base > 0 ? base / mean : 0.0,
                p1 > 0 ? (p1 / mean) / k.p : 0.0);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pald: partitioned local depth cohesion computation"};
  app.require_subcommand(1);

  ComputeOpts co;
  auto* compute = app.add_subcommand("compute", "compute a cohesion matrix");
  compute->add_option("--in", co.in, "input file")->required();
  compute->add_option("--format", co.format, "input format: auto|csv|bin|points|edgelist");
  compute->add_option("--alg", co.alg,
                      "auto|naive-pairwise|naive-triplet|blocked-pairwise|blocked-triplet");
  auto* policy_opt = compute->add_option("--policy", co.policy, "strict|split");
  compute->add_option("--block", co.b, "pairwise block size");
  compute->add_option("--block-focus", co.b_focus, "triplet focus-pass block size");
  compute->add_option("--block-cohesion", co.b_cohesion, "triplet cohesion-pass block size");
  compute->add_option("--threads", co.threads, "worker count")->envname("PALD_THREADS");
  compute->add_flag("--no-normalize", co.no_normalize, "skip the 1/(n-1) normalization");
  compute->add_flag("--deterministic", co.deterministic, "fixed parallel combination order");
  compute->add_flag("--autotune", co.autotune, "sweep block sizes before computing");
  compute->add_flag("--validate-ties", co.validate_ties,
                    "error on exact distance ties (naive-triplet)");
  compute->add_option("--precision", co.precision, "double|float");
  compute->add_option("--out", co.out, "cohesion output (.csv or .bin)");
  compute->add_option("--out-focus", co.out_focus, "focus-size matrix output (.csv)");
  compute->add_option("--out-depths", co.out_depths, "local depth vector output");

  std::string an_in, an_mode = "strong-ties", an_out;
  std::size_t an_k = 10, an_focus = 0;
  double an_threshold = -1;
  auto* analyze = app.add_subcommand("analyze", "strong ties / neighbors from cohesion");
  analyze->add_option("--in", an_in, "normalized cohesion CSV")->required();
  analyze->add_option("--mode", an_mode, "strong-ties|neighbors");
  analyze->add_option("--k", an_k, "neighbor count");
  analyze->add_option("--focus", an_focus, "focus point index");
  auto* thr_opt = analyze->add_option("--threshold", an_threshold, "override the threshold");
  analyze->add_option("--out", an_out, "edge CSV output (default stdout)");

  std::size_t pr_n = 2048;
  std::string pr_variant = "pairwise", pr_machine;
  auto* predict = app.add_subcommand("predict", "cost model predictions");
  predict->add_option("--n", pr_n, "point count")->required();
  predict->add_option("--variant", pr_variant, "pairwise|triplet");
  predict->add_option("--machine", pr_machine, "machine config file");

  std::string cv_in, cv_informat = "auto", cv_out;
  auto* convert = app.add_subcommand("convert", "convert inputs to distance matrices");
  convert->add_option("--in", cv_in, "input file")->required();
  convert->add_option("--format", cv_informat, "input format");
  convert->add_option("--out", cv_out, "output file (.csv or .bin)")->required();

  BenchOpts bo;
  auto* bench = app.add_subcommand("bench", "timing benchmark, CSV output");
  bench->add_option("--sizes", bo.sizes, "matrix sizes")->delimiter(',');
  bench->add_option("--algs", bo.algs, "algorithms to time")->delimiter(',');
  bench->add_option("--blocks", bo.blocks, "block sizes to sweep")->delimiter(',');
  bench->add_option("--threads", bo.threads, "thread counts to sweep")->delimiter(',');
  bench->add_option("--trials", bo.trials, "trials per configuration");
  bench->add_option("--out", bo.out_csv, "CSV output path (default stdout)");
  bench->add_option("--baseline", bo.baseline, "baseline algorithm for speedups");
  bench->add_option("--precision", bo.precision, "double|float");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compute) return cmd_compute(co, policy_opt->count() > 0, compute->count("--alg") > 0);
    if (*analyze)
      return cmd_analyze(an_in, an_mode, an_k, an_focus,
                         thr_opt->count() ? std::optional<double>(an_threshold) : std::nullopt,
                         an_out);
    if (*predict) return cmd_predict(pr_n, pr_variant, pr_machine);
    if (*convert) return cmd_convert(cv_in, cv_informat, cv_out);
    if (*bench) return cmd_bench(bo);
  } catch (const UnsupportedPolicyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
