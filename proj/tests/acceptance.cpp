// Acceptance gate: one line per criterion. Exit code reflects criteria
// 1-5, 7, and 8; criterion 6 is a machine-dependent performance smoke
// test whose ratios are reported but never gate (this box may be a
// single-core VM). Usage: acceptance <path-to-cli-binary>.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "pald/pald.hpp"

using namespace pald;
using fixtures::max_rel_diff;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what, bool gating = true) {
  std::printf("criterion %d: %s — %s%s\n", criterion, pass ? "PASS" : "FAIL", what.c_str(),
              gating ? "" : " [not gating]");
  if (!pass && gating) ++failures;
}

double now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::vector<DistanceMatrix> corpus() {
  std::vector<DistanceMatrix> out;
  out.reserve(200);
  for (std::uint64_t i = 0; i < 200; ++i)
    out.push_back(detail::random_distances(2 + i * 7919 % 63, 0xACCE0000 + i));
  return out;
}

// Criterion 1: brute-force oracle equivalence on 200 random matrices.
void criterion1(const std::vector<DistanceMatrix>& ds) {
  const double t0 = now();
  double worst = 0;
  for (const auto& d : ds) {
    auto r = pairwise_entrywise(d, Policy::Strict);
    normalize(r.cohesion);
    worst = std::max(worst, max_rel_diff(r.cohesion.values, oracle_cohesion(d, Policy::Strict).values));
  }
  const double dt = now() - t0;
  std::ostringstream msg;
  msg << "pairwise vs brute-force oracle on 200 matrices, max rel diff " << worst << ", "
      << dt << " s";
  report(1, worst <= 1e-12 && dt < 30, msg.str());
}

// Criterion 2: every variant matches the entrywise pairwise pass.
void criterion2(const std::vector<DistanceMatrix>& ds) {
  const double t0 = now();
  double worst = 0;
  bool focus_ok = true;
  auto compare = [&](const PaldResult& ref, PaldResult got, bool fill) {
    if (fill) fill_diagonal(got.focus, got.cohesion);
    focus_ok = focus_ok && (got.focus.sizes == ref.focus.sizes);
    worst = std::max(worst, max_rel_diff(got.cohesion.values, ref.cohesion.values));
  };
  for (const auto& d : ds) {
    const std::size_t n = d.size();
    const auto ref = pairwise_entrywise(d, Policy::Strict);
    compare(ref, triplet_entrywise(d), true);
    for (std::size_t b : {std::size_t(1), std::size_t(3), std::size_t(8), n, n + 7})
      compare(ref, blocked_pairwise(d, b), false);
    using P = std::pair<std::size_t, std::size_t>;
    for (auto [bf, bc] : {P{1, 1}, P{4, 8}, P{16, 4}})
      compare(ref, blocked_triplet(d, bf, bc), true);
    for (int p : {2, 4, 8}) {
      compare(ref, parallel_pairwise(d, 8, {p, true}), false);
      compare(ref, parallel_triplet(d, 8, 8, {p, true}), true);
    }
  }
  const double dt = now() - t0;
  std::ostringstream msg;
  msg << "all variants vs pairwise on the corpus, max rel diff " << worst
      << ", focus sizes " << (focus_ok ? "exact" : "MISMATCH") << ", " << dt << " s";
  report(2, worst <= 1e-9 && focus_ok && dt < 120, msg.str());
}

// Criterion 3: conservation and mean local depth, both policies.
void criterion3(const std::vector<DistanceMatrix>& ds) {
  bool ok = true;
  auto check_one = [&](const DistanceMatrix& d, Policy policy) {
    const std::size_t n = d.size();
    auto r = pairwise_entrywise(d, policy);
    ok = ok && std::fabs(fixtures::total(r.cohesion) - 0.5 * n * (n - 1)) <= 1e-9 * n * n;
    normalize(r.cohesion);
    double mean = 0;
    for (double v : local_depths(r.cohesion).depths) mean += v / n;
    ok = ok && std::fabs(mean - 0.5) <= 1e-9;
  };
  for (const auto& d : ds)
    for (Policy policy : {Policy::Strict, Policy::InclusiveSplit}) check_one(d, policy);
  // Tie-heavy hop-count matrices from small graphs.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EdgeList e;
    const std::size_t nv = 5 + seed % 4;
    for (std::size_t a = 0; a < nv; ++a)
      for (std::size_t b = a + 1; b < nv; ++b)
        if ((a * 31 + b * 17 + seed) % 10 < 5) e.edges.push_back({a, b});
    if (e.edges.empty()) continue;
    check_one(graph_to_distances(e).distances, Policy::InclusiveSplit);
  }
  report(3, ok, "unnormalized total n(n-1)/2 and mean local depth 1/2, both policies");
}

// Criterion 4: the hand-traced fixtures.
void criterion4() {
  bool ok = true;
  auto close = [](double a, double b) { return std::fabs(a - b) <= 1e-15; };

  const auto r2 = pairwise_entrywise(fixtures::d2(), Policy::Strict);
  ok = ok && r2.focus.at(0, 1) == 2 && close(r2.cohesion.at(0, 0), 0.5) &&
       close(r2.cohesion.at(1, 1), 0.5) && r2.cohesion.at(0, 1) == 0.0;

  const auto r3 = pairwise_entrywise(fixtures::d3(), Policy::Strict);
  ok = ok && r3.focus.at(0, 1) == 2 && r3.focus.at(0, 2) == 3 && r3.focus.at(1, 2) == 3;
  ok = ok && close(r3.cohesion.at(0, 0), 5.0 / 6) && close(r3.cohesion.at(1, 1), 5.0 / 6) &&
       close(r3.cohesion.at(2, 2), 2.0 / 3) && close(r3.cohesion.at(0, 1), 1.0 / 3) &&
       close(r3.cohesion.at(1, 0), 1.0 / 3) && r3.cohesion.at(0, 2) == 0.0;

  const auto ts = pairwise_entrywise(fixtures::t3(), Policy::Strict);
  const auto ti = pairwise_entrywise(fixtures::t3(), Policy::InclusiveSplit);
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t z = 0; z < 3; ++z) {
      ok = ok && ts.cohesion.at(x, z) == (x == z ? 1.0 : 0.0);
      ok = ok && close(ti.cohesion.at(x, z), x == z ? 2.0 / 3 : 1.0 / 6);
      if (x != z) {
        ok = ok && ts.focus.at(x, z) == 2;
        ok = ok && ti.focus.at(x, z) == 3;
      }
    }
  report(4, ok, "D2, D3, and T3 fixture values exact");
}

// Criterion 5: cost-model pins.
void criterion5() {
  const double pw = pct_peak(16.0 * 2048 * choose2(2048), 0.99422, 249.6);
  const double tr = pct_peak(39.0 * choose3(8192), 51.15952, 249.6);
  const MachineParams m;
  const double lb = lower_bound_words(4096, m.fast_memory_words);
  const double cp = pairwise_costs(4096, m).words / lb;
  const double ct = triplet_costs(4096, m).words / lb;
  const bool ok = std::fabs(pw - 0.277) <= 0.001 && std::fabs(tr - 0.28) <= 0.005 &&
                  std::fabs(cp - 5.66) < 0.005 && std::fabs(ct - 9.38) < 0.005;
  std::ostringstream msg;
  msg << "pct-of-peak " << pw * 100 << "% / " << tr * 100 << "%, traffic coefficients " << cp
      << " / " << ct;
  report(5, ok, msg.str());
}

// Criterion 6: performance smoke. Machine-dependent and never gating;
// sizes are scaled down so the suite stays usable on small VMs.
void criterion6() {
  const std::size_t n_pw = 1024, n_tri = 1024;
  const auto d = detail::random_distances(n_pw, 0xBEEF);
  double t0 = now();
  pairwise_entrywise(d, Policy::Strict);
  const double naive_s = now() - t0;
  const BlockConfig cfg = default_block_config(sizeof(float));
  t0 = now();
  blocked_pairwise<float>(d, cfg.b);
  const double blocked_s = now() - t0;

  t0 = now();
  blocked_triplet<float>(d, cfg.b_focus, cfg.b_cohesion);
  const double triplet_s = now() - t0;

  t0 = now();
  parallel_pairwise<float>(d, cfg.b, {8, true});
  const double par8_s = now() - t0;

  const double r1 = naive_s / blocked_s;
  const double r2 = blocked_s / triplet_s;
  const double r3 = blocked_s / par8_s;
  std::ostringstream msg;
  msg << "n=" << n_pw << ": blocked/naive speedup " << r1 << " (want >= 4), triplet/pairwise "
      << r2 << " (want >= 1), p=8/p=1 " << r3 << " (want >= 4; 1 on a single core)";
  report(6, r1 >= 4.0 && r2 >= 1.0 && r3 >= 4.0, msg.str(), /*gating=*/false);
  (void)n_tri;
}

// Criterion 7: ingestion round trips and hop-metric properties.
void criterion7() {
  bool ok = true;
  const auto d = detail::random_distances(11, 0xF00D);
  write_matrix_binary("acc_rt.bin", d.values().data(), d.size(), 8);
  ok = ok && read_distance_binary("acc_rt.bin").values() == d.values();
  std::remove("acc_rt.bin");

  std::size_t dropped_seen = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EdgeList e;
    const std::size_t nv = 4 + seed % 7;
    for (std::size_t a = 0; a < nv; ++a)
      for (std::size_t b = a + 1; b < nv; ++b)
        if ((a * 131 + b * 37 + seed * 7) % 100 < 40) e.edges.push_back({a, b});
    if (e.edges.empty()) continue;
    const auto g = graph_to_distances(e);
    dropped_seen += g.dropped_vertices;
    const auto& h = g.distances;
    for (std::size_t x = 0; x < h.size(); ++x)
      for (std::size_t y = 0; y < h.size(); ++y)
        for (std::size_t z = 0; z < h.size(); ++z)
          if (x != y && y != z && x != z) ok = ok && h(x, z) <= h(x, y) + h(y, z);
  }
  // The disconnected path must actually be exercised.
  EdgeList two;
  two.edges = {{0, 1}, {2, 3}, {3, 4}};
  const auto g = graph_to_distances(two);
  ok = ok && g.dropped_vertices == 2 && g.distances.size() == 3;
  report(7, ok, "binary round trip bit-exact; hop metrics satisfy the triangle inequality; "
                "disconnected graphs drop " + std::to_string(dropped_seen + 2) + " vertices");
}

int run(const std::string& cmd) { return std::system(cmd.c_str()); }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Criterion 8: CLI end to end on the D3 fixture.
void criterion8(const std::string& cli) {
  bool ok = true;
  std::ostringstream notes;
  {
    std::ofstream f("acc_d3.csv");
    f << "0,1,2\n1,0,3\n2,3,0\n";
  }
  std::string first_bytes;
  for (const std::string alg :
       {"naive-pairwise", "naive-triplet", "blocked-pairwise", "blocked-triplet"}) {
    const std::string out = "acc_c_" + alg + ".csv";
    const std::string cmd = cli + " compute --in acc_d3.csv --alg " + alg +
                            " --deterministic --out " + out + " > acc_cli.log 2>&1";
    if (run(cmd) != 0) {
      ok = false;
      notes << alg << " failed; ";
      continue;
    }
    const std::string bytes = slurp(out);
    if (run(cmd) != 0 || slurp(out) != bytes) {
      ok = false;
      notes << alg << " not byte-stable; ";
    }
    const CohesionMatrix c = read_cohesion_csv(out);
    if (!(c.normalized && std::fabs(c.at(0, 0) - 5.0 / 12) <= 1e-12)) {
      ok = false;
      notes << alg << " c11 != 5/12; ";
    }
    if (first_bytes.empty()) first_bytes = bytes;
    std::remove(out.c_str());
  }

  if (run(cli + " compute --in acc_d3.csv --alg naive-pairwise --deterministic "
              "--out acc_c.csv > acc_cli.log 2>&1") == 0) {
    if (run(cli + " analyze --in acc_c.csv --mode strong-ties > acc_an.log 2>&1") != 0) {
      ok = false;
      notes << "analyze failed; ";
    } else {
      const std::string log = slurp("acc_an.log");
      const bool thr = log.find("threshold=0.194444444444444") != std::string::npos;
      const bool empty = log.find("edges=0") != std::string::npos;
      if (!(thr && empty)) {
        ok = false;
        notes << "analyze output wrong (" << log.substr(0, 60) << "); ";
      }
    }
  } else {
    ok = false;
    notes << "compute for analyze failed; ";
  }
  for (const char* p : {"acc_d3.csv", "acc_c.csv", "acc_cli.log", "acc_an.log"}) std::remove(p);
  report(8, ok, ok ? "CLI compute/analyze on the 3-point fixture: c11 = 5/12, threshold 7/36, "
                     "no strong ties, byte-stable output"
                   : "CLI end-to-end: " + notes.str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-cli-binary>\n");
    return 2;
  }
  const auto ds = corpus();
  criterion1(ds);
  criterion2(ds);
  criterion3(ds);
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8(argv[1]);
  if (failures) std::printf("%d gating criteria failed\n", failures);
  return failures ? 1 : 0;
}
