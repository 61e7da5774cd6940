// SPDX-License-Identifier: Apache-2.0
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "evograph/kernels.hpp"

namespace evograph::kernels {

namespace omp {

void propagate(const NormalizedAdjacency& L, const Matrix& x, Matrix& out) {
  const auto& adj = L.adj;
  out.resize(x.rows(), x.cols());
  const auto n = static_cast<std::ptrdiff_t>(adj.n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto r = static_cast<Eigen::Index>(i);
    out.row(r) = x.row(r);
    for (const NodeId* p = adj.begin(i); p != adj.end(i); ++p) out.row(r) += x.row(*p);
    out.row(r) *= L.inv_deg1[i];
  }
}

void propagate_transpose(const NormalizedAdjacency& L, const Matrix& g, Matrix& out) {
  const auto& adj = L.adj;
  out.resize(g.rows(), g.cols());
  const auto n = static_cast<std::ptrdiff_t>(adj.n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t jj = 0; jj < n; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    const auto r = static_cast<Eigen::Index>(j);
    out.row(r) = L.inv_deg1[j] * g.row(r);
    for (const NodeId* p = adj.begin(j); p != adj.end(j); ++p) out.row(r) += L.inv_deg1[*p] * g.row(*p);
  }
}

std::vector<std::uint64_t> distance_sums(const Adjacency& adj) {
  const std::size_t n = adj.n;
  std::vector<std::uint64_t> sums(n, 0);
#pragma omp parallel
  {
    std::vector<std::uint32_t> dist(n);
    std::vector<NodeId> queue(n);
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t ss = 0; ss < static_cast<std::ptrdiff_t>(n); ++ss) {
      const auto s = static_cast<std::size_t>(ss);
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
  }
  return sums;
}

void gat_attention(const Adjacency& adj, const Vector& src, const Vector& dst, double slope,
                   std::vector<double>& pre, std::vector<double>& alpha) {
  pre.resize(att_size(adj));
  alpha.resize(att_size(adj));
  const auto n = static_cast<std::ptrdiff_t>(adj.n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
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
  const auto n = static_cast<std::ptrdiff_t>(adj.n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto r = static_cast<Eigen::Index>(i);
    const std::size_t base = att_offset(adj, i);
    out.row(r) = alpha[base] * z.row(r);
    const std::size_t deg = adj.degree(i);
    for (std::size_t k = 0; k < deg; ++k) {
      out.row(r) += alpha[base + 1 + k] * z.row(adj.neighbors[adj.offsets[i] + k]);
    }
  }
}

}  // namespace omp

void set_thread_cap(int threads) {
  static const int default_threads = omp_get_max_threads();
  omp_set_num_threads(threads > 0 ? threads : default_threads);
}

int thread_cap_from_env() {
  const char* raw = std::getenv("EVOGRAPH_THREADS");
  if (raw == nullptr) return 0;
  try {
    const int v = std::stoi(raw);
    return v > 0 ? v : 0;
  } catch (...) {
    return 0;
  }
}

}  // namespace evograph::kernels
