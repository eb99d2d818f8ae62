// Builders for valid DistanceMatrix inputs (CSV grids, a fixed binary
// layout, point clouds, unweighted graphs via BFS hop counts) and output
// persistence.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <deque>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "pald/types.hpp"

namespace pald {

// n points in d dimensions, row-major.
struct PointCloud {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> coords;
  const double* point(std::size_t i) const { return coords.data() + i * dim; }
};

// Undirected edges over vertex ids (not necessarily dense).
struct EdgeList {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& tok, double& out) {
  const std::string t = trim(tok);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

// Reads a numeric CSV grid, skipping '#' comments and an optional single
// non-numeric header row.
inline std::vector<std::vector<double>> read_csv_grid(const std::string& path,
                                                      std::vector<std::string>* comments) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first_data = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      if (comments) comments->push_back(t);
      continue;
    }
    std::vector<double> row;
    bool numeric = true;
    for (const auto& tok : split_csv(t)) {
      double v;
      if (!parse_double(tok, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first_data) {  // header row
        first_data = false;
        continue;
      }
      throw ValidationError(path + ":" + std::to_string(lineno) + ": non-numeric entry");
    }
    first_data = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline const char* kCsvFormat = "%.17g";

}  // namespace detail

// Validates raw values into a DistanceMatrix: asymmetry within 1e-9
// relative is symmetrized by averaging, beyond it rejected; the diagonal
// must be zero and off-diagonal entries positive and finite.
inline DistanceMatrix validate_distances(std::size_t n, std::vector<double> v,
                                         const std::string& origin) {
  if (n < 2) throw ValidationError(origin + ": need at least 2 points");
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const double d = v[x * n + y];
      if (!std::isfinite(d))
        throw ValidationError(origin + ": non-finite entry at (" + std::to_string(x) + "," +
                              std::to_string(y) + ")");
      if (d < 0)
        throw ValidationError(origin + ": negative distance at (" + std::to_string(x) + "," +
                              std::to_string(y) + ")");
    }
    if (v[x * n + x] != 0.0)
      throw ValidationError(origin + ": nonzero diagonal at (" + std::to_string(x) + "," +
                            std::to_string(x) + ")");
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      const double a = v[x * n + y], b = v[y * n + x];
      const double scale = std::max(std::abs(a), std::abs(b));
      if (std::abs(a - b) > 1e-9 * scale)
        throw ValidationError(origin + ": asymmetry beyond tolerance at (" + std::to_string(x) +
                              "," + std::to_string(y) + "): " + std::to_string(a) + " vs " +
                              std::to_string(b));
      const double avg = 0.5 * (a + b);
      if (!(avg > 0))
        throw ValidationError(origin + ": zero off-diagonal distance at (" + std::to_string(x) +
                              "," + std::to_string(y) + ") (duplicate points)");
      v[x * n + y] = v[y * n + x] = avg;
    }
  }
  return DistanceMatrix(n, std::move(v));
}

inline DistanceMatrix read_distance_csv(const std::string& path) {
  const auto rows = detail::read_csv_grid(path, nullptr);
  const std::size_t n = rows.size();
  if (n == 0) throw ValidationError(path + ": empty grid");
  std::vector<double> v;
  v.reserve(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    if (rows[x].size() != n)
      throw ValidationError(path + ": non-square grid (row " + std::to_string(x) + " has " +
                            std::to_string(rows[x].size()) + " of " + std::to_string(n) +
                            " columns)");
    v.insert(v.end(), rows[x].begin(), rows[x].end());
  }
  return validate_distances(n, std::move(v), path);
}

// Writes an n x n grid with 17 significant digits, preceded by the given
// '#' comment lines (already including the leading '#').
inline void write_matrix_csv(const std::string& path, const double* values, std::size_t n,
                             const std::vector<std::string>& comments = {}) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& cmt : comments) out << cmt << "\n";
  char buf[64];
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      std::snprintf(buf, sizeof(buf), detail::kCsvFormat, values[x * n + y]);
      out << (y ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

inline void write_distance_csv(const std::string& path, const DistanceMatrix& d) {
  write_matrix_csv(path, d.values().data(), d.size());
}

// Self-describing cohesion CSV: a metadata comment carries n, algorithm,
// policy, and the normalization flag so `analyze` can validate its input.
inline void write_cohesion_csv(const std::string& path, const CohesionMatrix& c,
                               const std::string& algorithm, const std::string& policy) {
  std::ostringstream meta;
  meta << "# pald-cohesion n=" << c.n << " algorithm=" << algorithm << " policy=" << policy
       << " normalized=" << (c.normalized ? "true" : "false");
  write_matrix_csv(path, c.values.data(), c.n, {meta.str()});
}

inline CohesionMatrix read_cohesion_csv(const std::string& path) {
  std::vector<std::string> comments;
  const auto rows = detail::read_csv_grid(path, &comments);
  const std::size_t n = rows.size();
  if (n == 0) throw ValidationError(path + ": empty grid");
  CohesionMatrix c(n);
  for (std::size_t x = 0; x < n; ++x) {
    if (rows[x].size() != n) throw ValidationError(path + ": non-square grid");
    std::copy(rows[x].begin(), rows[x].end(), c.values.begin() + x * n);
  }
  for (const auto& cmt : comments)
    if (cmt.find("normalized=true") != std::string::npos) c.normalized = true;
  return c;
}

// Fixed binary layout: magic "PALD", format version u8 (=1), element
// width u8 (4 or 8), u64 n, then n^2 little-endian row-major elements.
inline constexpr char kBinaryMagic[4] = {'P', 'A', 'L', 'D'};
inline constexpr std::uint8_t kBinaryVersion = 1;

inline void write_matrix_binary(const std::string& path, const double* values, std::size_t n,
                                int width = 8) {
  if (width != 4 && width != 8)
    throw ValidationError("unsupported binary element width " + std::to_string(width));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(kBinaryMagic, 4);
  const std::uint8_t ver = kBinaryVersion, w = static_cast<std::uint8_t>(width);
  out.put(static_cast<char>(ver));
  out.put(static_cast<char>(w));
  const std::uint64_t n64 = n;
  out.write(reinterpret_cast<const char*>(&n64), 8);
  if (width == 8) {
    out.write(reinterpret_cast<const char*>(values), static_cast<std::streamsize>(n * n * 8));
  } else {
    std::vector<float> f(n * n);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<float>(values[i]);
    out.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(n * n * 4));
  }
  if (!out) throw IoError("write failed: " + path);
}

struct RawMatrix {
  std::size_t n = 0;
  int width = 8;
  std::vector<double> values;
};

inline RawMatrix read_matrix_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  std::uint8_t ver, width;
  std::uint64_t n64;
  if (!in.read(magic, 4) || std::memcmp(magic, kBinaryMagic, 4) != 0)
    throw ValidationError(path + ": bad magic (not a PALD binary matrix)");
  if (!in.read(reinterpret_cast<char*>(&ver), 1) || ver != kBinaryVersion)
    throw ValidationError(path + ": unsupported format version " +
                          std::to_string(static_cast<int>(ver)));
  if (!in.read(reinterpret_cast<char*>(&width), 1) || (width != 4 && width != 8))
    throw ValidationError(path + ": unsupported element width " +
                          std::to_string(static_cast<int>(width)));
  if (!in.read(reinterpret_cast<char*>(&n64), 8)) throw ValidationError(path + ": truncated header");
  RawMatrix m;
  m.n = static_cast<std::size_t>(n64);
  m.width = width;
  m.values.resize(m.n * m.n);
  if (width == 8) {
    if (!in.read(reinterpret_cast<char*>(m.values.data()),
                 static_cast<std::streamsize>(m.n * m.n * 8)))
      throw ValidationError(path + ": truncated payload");
  } else {
    std::vector<float> f(m.n * m.n);
    if (!in.read(reinterpret_cast<char*>(f.data()),
                 static_cast<std::streamsize>(m.n * m.n * 4)))
      throw ValidationError(path + ": truncated payload");
    for (std::size_t i = 0; i < f.size(); ++i) m.values[i] = static_cast<double>(f[i]);
  }
  return m;
}

inline DistanceMatrix read_distance_binary(const std::string& path) {
  RawMatrix m = read_matrix_binary(path);
  return validate_distances(m.n, std::move(m.values), path);
}

// Point cloud CSV: one point per row, all rows the same dimension.
inline PointCloud read_points_csv(const std::string& path) {
  const auto rows = detail::read_csv_grid(path, nullptr);
  PointCloud p;
  p.n = rows.size();
  if (p.n == 0) throw ValidationError(path + ": no points");
  p.dim = rows[0].size();
  if (p.dim < 1) throw ValidationError(path + ": points need at least one coordinate");
  for (std::size_t i = 0; i < p.n; ++i) {
    if (rows[i].size() != p.dim)
      throw ValidationError(path + ": inconsistent dimension at row " + std::to_string(i));
    p.coords.insert(p.coords.end(), rows[i].begin(), rows[i].end());
  }
  return p;
}

// Euclidean distances; each unordered pair is computed once so the result
// is exactly symmetric. Duplicate points (zero distance) are rejected.
inline DistanceMatrix points_to_distances(const PointCloud& p) {
  if (p.n < 2) throw ValidationError("point cloud needs at least 2 points");
  std::vector<double> v(p.n * p.n, 0.0);
  for (std::size_t x = 0; x < p.n; ++x) {
    for (std::size_t y = x + 1; y < p.n; ++y) {
      double sum = 0.0;
      const double *px = p.point(x), *py = p.point(y);
      for (std::size_t k = 0; k < p.dim; ++k) {
        const double diff = px[k] - py[k];
        sum += diff * diff;
      }
      const double dist = std::sqrt(sum);
      if (dist == 0.0)
        throw ValidationError("duplicate points " + std::to_string(x) + " and " +
                              std::to_string(y) + " (zero distance)");
      v[x * p.n + y] = v[y * p.n + x] = dist;
    }
  }
  return DistanceMatrix(p.n, std::move(v));
}

// Edge list text: whitespace-separated vertex id pairs, '#' comments
// (SNAP-compatible). Self-loops are dropped.
inline EdgeList read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  EdgeList e;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ls(t);
    std::uint64_t u, v;
    if (!(ls >> u >> v))
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected two vertex ids");
    if (u == v) continue;
    e.edges.emplace_back(u, v);
  }
  return e;
}

struct GraphDistances {
  DistanceMatrix distances;
  std::size_t dropped_vertices = 0;  // vertices outside the largest component
};

// Hop-count distances on the largest connected component of an unweighted
// undirected graph, via BFS from every vertex. Vertices outside the
// largest component are dropped and counted.
inline GraphDistances graph_to_distances(const EdgeList& e) {
  if (e.edges.empty()) throw ValidationError("empty graph");
  std::unordered_map<std::uint64_t, std::size_t> id;
  std::vector<std::vector<std::size_t>> adj;
  auto intern = [&](std::uint64_t v) {
    auto [it, inserted] = id.emplace(v, adj.size());
    if (inserted) adj.emplace_back();
    return it->second;
  };
  for (const auto& [u, v] : e.edges) {
    const std::size_t a = intern(u), b = intern(v);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  const std::size_t nv = adj.size();

  // Largest connected component by BFS labeling.
  std::vector<int> comp(nv, -1);
  std::vector<std::size_t> comp_size;
  for (std::size_t s = 0; s < nv; ++s) {
    if (comp[s] >= 0) continue;
    const int c = static_cast<int>(comp_size.size());
    std::size_t count = 0;
    std::deque<std::size_t> q{s};
    comp[s] = c;
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop_front();
      ++count;
      for (std::size_t w : adj[v])
        if (comp[w] < 0) {
          comp[w] = c;
          q.push_back(w);
        }
    }
    comp_size.push_back(count);
  }
  const int best =
      static_cast<int>(std::max_element(comp_size.begin(), comp_size.end()) - comp_size.begin());
  const std::size_t n = comp_size[best];
  if (n < 2) throw ValidationError("largest connected component has fewer than 2 vertices");

  std::vector<std::size_t> dense(nv, SIZE_MAX);
  std::vector<std::size_t> members;
  for (std::size_t v = 0; v < nv; ++v)
    if (comp[v] == best) {
      dense[v] = members.size();
      members.push_back(v);
    }

  std::vector<double> dist(n * n, 0.0);
  std::vector<std::int32_t> hops(nv);
  for (std::size_t si = 0; si < n; ++si) {
    std::fill(hops.begin(), hops.end(), -1);
    const std::size_t s = members[si];
    hops[s] = 0;
    std::deque<std::size_t> q{s};
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop_front();
      for (std::size_t w : adj[v])
        if (hops[w] < 0) {
          hops[w] = hops[v] + 1;
          q.push_back(w);
        }
    }
    for (std::size_t ti = 0; ti < n; ++ti) dist[si * n + ti] = hops[members[ti]];
  }
  return {DistanceMatrix(n, std::move(dist)), nv - n};
}

}  // namespace pald
