// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "evograph/graph.hpp"

// Data-parallel inner loops. Every kernel exists twice: a plain serial loop
// kept as the reference, and an OpenMP version that partitions independent
// output rows across threads. Each output element is computed by exactly one
// thread with the same operation order as the serial loop, so both versions
// are bitwise identical for any thread count.
//
// Attention layout: node i owns slots [att_offset(i), att_offset(i+1)); the
// first slot is the self-loop, the rest follow adj's sorted neighbor order.
namespace evograph::kernels {

inline std::size_t att_offset(const Adjacency& adj, std::size_t i) { return adj.offsets[i] + i; }
inline std::size_t att_size(const Adjacency& adj) { return adj.neighbors.size() + adj.n; }

constexpr std::uint64_t kUnreachable = ~std::uint64_t{0};

namespace serial {
/// out = L * x
void propagate(const NormalizedAdjacency& L, const Matrix& x, Matrix& out);
/// out = L^T * g
void propagate_transpose(const NormalizedAdjacency& L, const Matrix& g, Matrix& out);
/// Sum of BFS hop distances from every node; kUnreachable when some node is not reached.
std::vector<std::uint64_t> distance_sums(const Adjacency& adj);
/// Softmax attention weights over N(i) u {i} of LeakyReLU(src[i] + dst[j]).
void gat_attention(const Adjacency& adj, const Vector& src, const Vector& dst, double slope,
                   std::vector<double>& pre, std::vector<double>& alpha);
/// out_i = sum_j alpha_ij z_j
void gat_aggregate(const Adjacency& adj, const std::vector<double>& alpha, const Matrix& z, Matrix& out);
}  // namespace serial

namespace omp {
void propagate(const NormalizedAdjacency& L, const Matrix& x, Matrix& out);
void propagate_transpose(const NormalizedAdjacency& L, const Matrix& g, Matrix& out);
std::vector<std::uint64_t> distance_sums(const Adjacency& adj);
void gat_attention(const Adjacency& adj, const Vector& src, const Vector& dst, double slope,
                   std::vector<double>& pre, std::vector<double>& alpha);
void gat_aggregate(const Adjacency& adj, const std::vector<double>& alpha, const Matrix& z, Matrix& out);
}  // namespace omp

// Library code calls these; they forward to the OpenMP versions.
inline void propagate(const NormalizedAdjacency& L, const Matrix& x, Matrix& out) { omp::propagate(L, x, out); }
inline void propagate_transpose(const NormalizedAdjacency& L, const Matrix& g, Matrix& out) {
  omp::propagate_transpose(L, g, out);
}
inline std::vector<std::uint64_t> distance_sums(const Adjacency& adj) { return omp::distance_sums(adj); }
inline void gat_attention(const Adjacency& adj, const Vector& src, const Vector& dst, double slope,
                          std::vector<double>& pre, std::vector<double>& alpha) {
  omp::gat_attention(adj, src, dst, slope, pre, alpha);
}
inline void gat_aggregate(const Adjacency& adj, const std::vector<double>& alpha, const Matrix& z, Matrix& out) {
  omp::gat_aggregate(adj, alpha, z, out);
}

/// Caps OpenMP worker threads; 0 restores the runtime default.
void set_thread_cap(int threads);
/// Reads EVOGRAPH_THREADS; returns 0 when unset or invalid.
int thread_cap_from_env();

}  // namespace evograph::kernels
