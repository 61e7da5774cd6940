// SPDX-License-Identifier: Apache-2.0
// The OpenMP kernels must agree bit for bit with the serial reference.
#include <gtest/gtest.h>

#include <omp.h>

#include "evograph/kernels.hpp"
#include "fixtures.hpp"

using namespace evograph;

namespace {

struct Case {
  GraphSnapshot g;
  NormalizedAdjacency L;
  Matrix x;
  Vector src, dst;
};

Case make_case(std::uint64_t seed) {
  RngStream rng(seed, "kernels");
  Case c;
  const std::size_t n = 1 + rng.below(300);
  c.g = fixtures::random_graph(n, rng.uniform(0.0, 0.1), 1, rng);
  c.L = normalize(c.g);
  c.x.resize(static_cast<Eigen::Index>(n), 5);
  for (auto& v : c.x.reshaped()) v = rng.normal();
  c.src.resize(static_cast<Eigen::Index>(n));
  c.dst.resize(static_cast<Eigen::Index>(n));
  for (auto& v : c.src) v = rng.normal();
  for (auto& v : c.dst) v = rng.normal();
  return c;
}

class KernelParity : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override { kernels::set_thread_cap(GetParam()); }
  void TearDown() override { kernels::set_thread_cap(0); }
};

}  // namespace

TEST_P(KernelParity, Propagate) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto c = make_case(s);
    Matrix a, b;
    kernels::serial::propagate(c.L, c.x, a);
    kernels::omp::propagate(c.L, c.x, b);
    EXPECT_EQ(a, b);
    EXPECT_LE((a - c.L.dense() * c.x).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST_P(KernelParity, PropagateTranspose) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto c = make_case(s);
    Matrix a, b;
    kernels::serial::propagate_transpose(c.L, c.x, a);
    kernels::omp::propagate_transpose(c.L, c.x, b);
    EXPECT_EQ(a, b);
    EXPECT_LE((a - c.L.dense().transpose() * c.x).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST_P(KernelParity, DistanceSums) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto c = make_case(s);
    EXPECT_EQ(kernels::serial::distance_sums(c.L.adj), kernels::omp::distance_sums(c.L.adj));
  }
}

TEST_P(KernelParity, Attention) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto c = make_case(s);
    std::vector<double> p1, a1, p2, a2;
    kernels::serial::gat_attention(c.L.adj, c.src, c.dst, 0.2, p1, a1);
    kernels::omp::gat_attention(c.L.adj, c.src, c.dst, 0.2, p2, a2);
    EXPECT_EQ(p1, p2);
    EXPECT_EQ(a1, a2);
    Matrix o1, o2;
    kernels::serial::gat_aggregate(c.L.adj, a1, c.x, o1);
    kernels::omp::gat_aggregate(c.L.adj, a2, c.x, o2);
    EXPECT_EQ(o1, o2);
  }
}

INSTANTIATE_TEST_SUITE_P(Threads, KernelParity, ::testing::Values(1, 2, 3, 4));

TEST(Kernels, UnreachableMarker) {
  const auto g = fixtures::make(4, {{0, 1}, {2, 3}});
  const auto adj = build_adjacency(g.n, g.edges);
  for (auto v : kernels::serial::distance_sums(adj)) EXPECT_EQ(v, kernels::kUnreachable);
  const auto p = fixtures::path(4);
  const auto sums = kernels::omp::distance_sums(build_adjacency(p.n, p.edges));
  EXPECT_EQ(sums, (std::vector<std::uint64_t>{6, 4, 4, 6}));
}

TEST(Kernels, AttentionRowsSumToOne) {
  const auto c = make_case(99);
  std::vector<double> pre, alpha;
  kernels::gat_attention(c.L.adj, c.src, c.dst, 0.2, pre, alpha);
  ASSERT_EQ(alpha.size(), kernels::att_size(c.L.adj));
  for (std::size_t i = 0; i < c.L.n(); ++i) {
    double s = 0;
    for (auto k = kernels::att_offset(c.L.adj, i); k < kernels::att_offset(c.L.adj, i + 1); ++k) s += alpha[k];
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}
