// SPDX-License-Identifier: Apache-2.0
// Small graph builders and independent dense/brute-force oracles.
#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <string>
#include <vector>

#include "evograph/graph.hpp"
#include "evograph/nn/params.hpp"
#include "evograph/rng.hpp"

namespace fixtures {

using evograph::Edge;
using evograph::GraphFrame;
using evograph::GraphSnapshot;
using evograph::Matrix;
using evograph::NodeId;

inline GraphSnapshot make(std::size_t n, std::vector<Edge> edges, std::size_t d = 2) {
  GraphSnapshot s;
  s.n = n;
  s.edges = evograph::canonical_edges(std::move(edges));
  s.features = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  return s;
}

inline GraphSnapshot path(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return make(n, e);
}

inline GraphSnapshot star(std::size_t leaves) {
  std::vector<Edge> e;
  for (NodeId i = 1; i <= leaves; ++i) e.push_back({0, i});
  return make(leaves + 1, e);
}

inline GraphSnapshot triangle() { return make(3, {{0, 1}, {0, 2}, {1, 2}}); }

/// Random graph with edge probability p and N(0,1) features.
inline GraphSnapshot random_graph(std::size_t n, double p, std::size_t d, evograph::RngStream& rng) {
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) e.push_back({u, v});
    }
  }
  auto s = make(n, e, d);
  for (Eigen::Index r = 0; r < s.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < s.features.cols(); ++c) s.features(r, c) = rng.normal();
  }
  return s;
}

/// Random connected graph: random tree plus extra edges.
inline GraphSnapshot random_connected(std::size_t n, std::size_t extra, std::size_t d, evograph::RngStream& rng) {
  std::vector<Edge> e;
  for (NodeId v = 1; v < n; ++v) e.push_back({static_cast<NodeId>(rng.below(v)), v});
  for (std::size_t k = 0; k < extra; ++k) {
    auto u = static_cast<NodeId>(rng.below(n)), v = static_cast<NodeId>(rng.below(n));
    if (u != v) e.push_back({std::min(u, v), std::max(u, v)});
  }
  auto s = make(n, e, d);
  for (Eigen::Index r = 0; r < s.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < s.features.cols(); ++c) s.features(r, c) = rng.normal();
  }
  return s;
}

inline Matrix dense_adjacency(const GraphFrame& g) {
  Matrix A = Matrix::Zero(static_cast<Eigen::Index>(g.n), static_cast<Eigen::Index>(g.n));
  for (const auto& e : g.edges) A(e.u, e.v) = A(e.v, e.u) = 1.0;
  return A;
}

/// D~^-1 (A + I) built densely.
inline Matrix dense_normalized(const GraphFrame& g) {
  Matrix A = dense_adjacency(g) + Matrix::Identity(static_cast<Eigen::Index>(g.n), static_cast<Eigen::Index>(g.n));
  for (Eigen::Index i = 0; i < A.rows(); ++i) A.row(i) /= A.row(i).sum();
  return A;
}

/// Closeness from an all-pairs BFS over a dense adjacency matrix.
inline std::vector<double> bfs_closeness(const GraphFrame& g) {
  const Matrix A = dense_adjacency(g);
  std::vector<double> out(g.n);
  for (std::size_t s = 0; s < g.n; ++s) {
    std::vector<long> dist(g.n, -1);
    std::deque<std::size_t> q{s};
    dist[s] = 0;
    while (!q.empty()) {
      const auto u = q.front();
      q.pop_front();
      for (std::size_t v = 0; v < g.n; ++v) {
        if (A(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) != 0 && dist[v] < 0) {
          dist[v] = dist[u] + 1;
          q.push_back(v);
        }
      }
    }
    long total = 0;
    for (auto d : dist) total += d;
    out[s] = g.n == 1 ? 0.0 : static_cast<double>(g.n - 1) / static_cast<double>(total);
  }
  return out;
}

/// Reference GAT head written directly from the attention formula.
inline Matrix dense_gat(const Matrix& A, const Matrix& O, const evograph::nn::ParamBundle& p, std::size_t heads,
                        double slope) {
  const auto n = A.rows();
  Matrix out = Matrix::Zero(n, p.tensors()[0].value.cols());
  for (std::size_t h = 0; h < heads; ++h) {
    const Matrix& W = p.tensors()[3 * h].value;
    const Matrix& as = p.tensors()[3 * h + 1].value;
    const Matrix& ad = p.tensors()[3 * h + 2].value;
    const Matrix Z = O * W;
    for (Eigen::Index i = 0; i < n; ++i) {
      std::vector<double> e(static_cast<std::size_t>(n), -INFINITY);
      double mx = -INFINITY;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j && A(i, j) == 0) continue;
        double s = (Z.row(i) * as)(0, 0) + (Z.row(j) * ad)(0, 0);
        s = s > 0 ? s : slope * s;
        e[static_cast<std::size_t>(j)] = s;
        mx = std::max(mx, s);
      }
      double z = 0;
      for (auto& v : e) z += (v = std::exp(v - mx));
      for (Eigen::Index j = 0; j < n; ++j) out.row(i) += e[static_cast<std::size_t>(j)] / z * Z.row(j) / double(heads);
    }
  }
  return out;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("evograph_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixtures
