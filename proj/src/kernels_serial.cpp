// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>

#include "evograph/kernels.hpp"

namespace evograph::kernels::serial {

void propagate(const NormalizedAdjacency& L, const Matrix& x, Matrix& out) {
  const auto& adj = L.adj;
  out.resize(x.rows(), x.cols());
  for (std::size_t i = 0; i < adj.n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.row(r) = x.row(r);
    for (const NodeId* p = adj.begin(i); p != adj.end(i); ++p) out.row(r) += x.row(*p);
    out.row(r) *= L.inv_deg1[i];
  }
}

void propagate_transpose(const NormalizedAdjacency& L, const Matrix& g, Matrix& out) {
  const auto& adj = L.adj;
  out.resize(g.rows(), g.cols());
  for (std::size_t j = 0; j < adj.n; ++j) {
    const auto r = static_cast<Eigen::Index>(j);
    out.row(r) = L.inv_deg1[j] * g.row(r);
    for (const NodeId* p = adj.begin(j); p != adj.end(j); ++p) out.row(r) += L.inv_deg1[*p] * g.row(*p);
  }
}

std::vector<std::uint64_t> distance_sums(const Adjacency& adj) {
  const std::size_t n = adj.n;
  std::vector<std::uint64_t> sums(n, 0);
  std::vector<std::uint32_t> dist(n);
  std::vector<NodeId> queue(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<std::uint32_t>::max());
    std::size_t head = 0, tail = 0;
    queue[tail++] = static_cast<NodeId>(s);
    dist[s] = 0;
    std::uint64_t total = 0;
    while (head < tail) {
      const NodeId u = queue[head++];
      total += dist[u];
      for (const NodeId* p = adj.begin(u); p != adj.end(u); ++p) {
        if (dist[*p] == std::numeric_limits<std::uint32_t>::max()) {
          dist[*p] = dist[u] + 1;
          queue[tail++] = *p;
        }
      }
    }
    sums[s] = tail == n ? total : kUnreachable;
  }
  return sums;
}

void gat_attention(const Adjacency& adj, const Vector& src, const Vector& dst, double slope,
                   std::vector<double>& pre, std::vector<double>& alpha) {
  pre.resize(att_size(adj));
  alpha.resize(att_size(adj));
  for (std::size_t i = 0; i < adj.n; ++i) {
    const std::size_t base = att_offset(adj, i);
    const std::size_t deg = adj.degree(i);
    auto score = [&](std::size_t j) {
      return src[static_cast<Eigen::Index>(i)] + dst[static_cast<Eigen::Index>(j)];
    };
    pre[base] = score(i);
    for (std::size_t k = 0; k < deg; ++k) pre[base + 1 + k] = score(adj.neighbors[adj.offsets[i] + k]);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= deg; ++k) {
      const double e = pre[base + k] > 0 ? pre[base + k] : slope * pre[base + k];
      alpha[base + k] = e;
      mx = std::max(mx, e);
    }
    double z = 0.0;
    for (std::size_t k = 0; k <= deg; ++k) {
      alpha[base + k] = std::exp(alpha[base + k] - mx);
      z += alpha[base + k];
    }
    for (std::size_t k = 0; k <= deg; ++k) alpha[base + k] /= z;
  }
}

void gat_aggregate(const Adjacency& adj, const std::vector<double>& alpha, const Matrix& z, Matrix& out) {
  out.resize(static_cast<Eigen::Index>(adj.n), z.cols());
  for (std::size_t i = 0; i < adj.n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const std::size_t base = att_offset(adj, i);
    out.row(r) = alpha[base] * z.row(r);
    const std::size_t deg = adj.degree(i);
    for (std::size_t k = 0; k < deg; ++k) {
      out.row(r) += alpha[base + 1 + k] * z.row(adj.neighbors[adj.offsets[i] + k]);
    }
  }
}

}  // namespace evograph::kernels::serial
