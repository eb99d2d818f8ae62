#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"

using namespace pald;
using fixtures::d3;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
}

}  // namespace

TEST_CASE("distance CSV round trip preserves every bit") {
  TempFile f("rt_dist.csv");
  const auto d = detail::random_distances(7, 42);
  write_distance_csv(f.path, d);
  const auto back = read_distance_csv(f.path);
  CHECK(back.values() == d.values());
}

TEST_CASE("CSV reader accepts headers and comments, validates entries") {
  TempFile f("grid.csv");
  write_text(f.path, "# produced by hand\ncol0,col1\n0,1.5\n1.5,0\n");
  const auto d = read_distance_csv(f.path);
  CHECK(d.size() == 2);
  CHECK(d(0, 1) == 1.5);

  write_text(f.path, "0,1.5\n1.5\n");
  CHECK_THROWS_AS(read_distance_csv(f.path), ValidationError);  // ragged
  write_text(f.path, "0,nan\nnan,0\n");
  CHECK_THROWS_AS(read_distance_csv(f.path), ValidationError);  // non-finite
  write_text(f.path, "0.1,1.5\n1.5,0\n");
  CHECK_THROWS_AS(read_distance_csv(f.path), ValidationError);  // nonzero diagonal
  write_text(f.path, "0,-2\n-2,0\n");
  CHECK_THROWS_AS(read_distance_csv(f.path), ValidationError);  // negative
}

TEST_CASE("slight CSV asymmetry is averaged, large asymmetry rejected") {
  TempFile f("asym.csv");
  write_text(f.path, "0,1.0000000000001\n1,0\n");  // within 1e-9 relative
  const auto d = read_distance_csv(f.path);
  CHECK(d(0, 1) == d(1, 0));
  CHECK(d(0, 1) == doctest::Approx(1.00000000000005).epsilon(1e-13));

  write_text(f.path, "0,1.1\n1,0\n");
  CHECK_THROWS_AS(read_distance_csv(f.path), ValidationError);
}

TEST_CASE("binary round trips are bit-exact for both widths") {
  const auto d = detail::random_distances(9, 77);
  TempFile f8("rt8.bin");
  write_matrix_binary(f8.path, d.values().data(), d.size(), 8);
  CHECK(read_distance_binary(f8.path).values() == d.values());

  // 32-bit payloads hold float-representable values exactly.
  std::vector<double> fv(d.values());
  for (std::size_t i = 0; i < fv.size(); ++i) fv[i] = static_cast<float>(fv[i]);
  TempFile f4("rt4.bin");
  write_matrix_binary(f4.path, fv.data(), d.size(), 4);
  CHECK(read_matrix_binary(f4.path).values == fv);
}

TEST_CASE("binary reader rejects malformed files") {
  TempFile f("bad.bin");
  write_text(f.path, "NOPE");
  CHECK_THROWS_AS(read_matrix_binary(f.path), ValidationError);

  const auto d = fixtures::d2();
  write_matrix_binary(f.path, d.values().data(), d.size(), 8);
  {
    std::fstream io(f.path, std::ios::in | std::ios::out | std::ios::binary);
    io.seekp(4);
    const char v = 9;
    io.write(&v, 1);  // unsupported version
  }
  CHECK_THROWS_AS(read_matrix_binary(f.path), ValidationError);

  write_matrix_binary(f.path, d.values().data(), d.size(), 8);
  {
    std::ifstream in(f.path, std::ios::binary);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    write_text(f.path, all.substr(0, all.size() - 3));  // truncated payload
  }
  CHECK_THROWS_AS(read_matrix_binary(f.path), ValidationError);
}

TEST_CASE("cohesion CSV carries its normalization metadata") {
  auto r = pairwise_entrywise(d3(), Policy::Strict);
  normalize(r.cohesion);
  TempFile f("coh.csv");
  write_cohesion_csv(f.path, r.cohesion, "naive-pairwise", "strict");
  const CohesionMatrix back = read_cohesion_csv(f.path);
  CHECK(back.normalized);
  CHECK(back.values == r.cohesion.values);
}

TEST_CASE("point clouds turn into validated distance matrices") {
  TempFile f("pts.csv");
  write_text(f.path, "0\n1\n3\n");
  const auto d = points_to_distances(read_points_csv(f.path));
  CHECK(d(0, 1) == 1.0);
  CHECK(d(0, 2) == 3.0);
  CHECK(d(1, 2) == 2.0);

  write_text(f.path, "0,0\n0,1\n1,0\n1,1\n");  // unit square corners
  const auto sq = points_to_distances(read_points_csv(f.path));
  CHECK(sq(0, 3) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(sq(1, 2) == sq(2, 1));

  write_text(f.path, "1,2\n1,2\n3,4\n");  // duplicate rows
  CHECK_THROWS_AS(points_to_distances(read_points_csv(f.path)), ValidationError);

  // Random clouds satisfy every DistanceMatrix invariant by construction.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  PointCloud cloud;
  cloud.n = 10;
  cloud.dim = 5;
  for (std::size_t i = 0; i < 50; ++i) cloud.coords.push_back(u(rng));
  CHECK_NOTHROW(points_to_distances(cloud));
}

TEST_CASE("edge lists become hop-count distance matrices") {
  TempFile f("g.edges");
  write_text(f.path, "# path graph\n0 1\n1 2\n");
  const auto g = graph_to_distances(read_edge_list(f.path));
  CHECK(g.dropped_vertices == 0);
  CHECK(g.distances(0, 2) == 2.0);
  CHECK(g.distances(0, 1) == 1.0);

  write_text(f.path, "0 1\n1 2\n2 0\n2 2\n");  // triangle plus a self-loop
  const auto tri = graph_to_distances(read_edge_list(f.path));
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t y = x + 1; y < 3; ++y) CHECK(tri.distances(x, y) == 1.0);

  write_text(f.path, "0 1\n2 3\n");  // two components: keep one, warn
  const auto two = graph_to_distances(read_edge_list(f.path));
  CHECK(two.distances.size() == 2);
  CHECK(two.dropped_vertices == 2);

  write_text(f.path, "# empty\n");
  CHECK_THROWS_AS(graph_to_distances(read_edge_list(f.path)), ValidationError);
}

TEST_CASE("hop metrics satisfy the triangle inequality") {
  std::mt19937_64 rng(123);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t nv = 4 + rng() % 6;
    EdgeList e;
    for (std::size_t a = 0; a < nv; ++a)
      for (std::size_t b = a + 1; b < nv; ++b)
        if (rng() % 100 < 40) e.edges.push_back({a, b});
    if (e.edges.empty()) continue;
    const auto g = graph_to_distances(e);
    const auto& d = g.distances;
    const std::size_t n = d.size();
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        for (std::size_t z = 0; z < n; ++z)
          if (x != y && y != z && x != z) {
            CHECK(d(x, z) <= d(x, y) + d(y, z));
            ++checked;
          }
  }
  CHECK(checked > 0);
}

TEST_CASE("tie splitting conserves mass on hop-count inputs") {
  std::mt19937_64 rng(321);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t nv = 5 + rng() % 5;
    EdgeList e;
    for (std::size_t a = 0; a < nv; ++a)
      for (std::size_t b = a + 1; b < nv; ++b)
        if (rng() % 100 < 50) e.edges.push_back({a, b});
    if (e.edges.empty()) continue;
    const auto g = graph_to_distances(e);
    const std::size_t n = g.distances.size();
    if (n < 2) continue;
    const auto r = pairwise_entrywise(g.distances, Policy::InclusiveSplit);
    CHECK(fixtures::total(r.cohesion) == doctest::Approx(0.5 * n * (n - 1)).epsilon(1e-9));
  }
}

TEST_CASE("strong-tie threshold and graph on the hand-traced fixture") {
  const CohesionMatrix c = oracle_cohesion(d3(), Policy::Strict);
  CHECK(universal_threshold(c) == doctest::Approx(7.0 / 36).epsilon(1e-14));
  const StrongTieGraph g = strong_ties(c);
  CHECK(g.threshold == doctest::Approx(7.0 / 36).epsilon(1e-14));
  CHECK(g.edges.empty());  // strongest pair has min strength 1/6 < 7/36

  // Equal strengths are kept by the >= rule when the threshold allows.
  const CohesionMatrix t = oracle_cohesion(fixtures::t3(), Policy::InclusiveSplit);
  CHECK(strong_ties(t).edges.empty());  // 1/12 < threshold 1/6
  CHECK(strong_ties(t, 1.0 / 12).edges.size() == 3);

  auto un = pairwise_entrywise(d3(), Policy::Strict);
  CHECK_THROWS_AS(strong_ties(un.cohesion), ValidationError);
}

TEST_CASE("two separated clusters produce within-cluster strong ties") {
  // Points on a line: {0, 1} and {10, 11.5}; all distances distinct.
  PointCloud p;
  p.n = 4;
  p.dim = 1;
  p.coords = {0.0, 1.0, 10.0, 11.5};
  const CohesionMatrix c = oracle_cohesion(points_to_distances(p), Policy::Strict);
  const StrongTieGraph g = strong_ties(c);
  REQUIRE(g.edges.size() == 2);
  CHECK(g.edges[0].x == 0);
  CHECK(g.edges[0].y == 1);
  CHECK(g.edges[1].x == 2);
  CHECK(g.edges[1].y == 3);
  for (const auto& e : g.edges) CHECK(e.strength >= g.threshold);
}

TEST_CASE("nearest neighbors by symmetrized cohesion") {
  const CohesionMatrix c = oracle_cohesion(d3(), Policy::Strict);
  const auto one = nearest_neighbors(c, 0, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].z == 1);
  CHECK(one[0].strength == doctest::Approx(1.0 / 6).epsilon(1e-14));
  const auto two = nearest_neighbors(c, 0, 2);
  CHECK(two[1].z == 2);
  CHECK(two[1].strength == 0.0);

  CHECK_THROWS_AS(nearest_neighbors(c, 9, 1), ValidationError);
  CHECK_THROWS_AS(nearest_neighbors(c, 0, 3), ValidationError);
  auto un = pairwise_entrywise(d3(), Policy::Strict);
  CHECK_THROWS_AS(nearest_neighbors(un.cohesion, 0, 1), ValidationError);
}
