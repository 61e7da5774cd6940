// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "evograph/error.hpp"
#include "evograph/evogen.hpp"
#include "evograph/kernels.hpp"
#include "evograph/theory.hpp"
#include "fixtures.hpp"

using namespace evograph;

TEST(Coefficients, Beta) {
  EXPECT_DOUBLE_EQ(beta_coeff({1, 2, 4}), 1.75);
  EXPECT_DOUBLE_EQ(beta_coeff({1}), 1.0);
  EXPECT_DOUBLE_EQ(beta_coeff(std::vector<double>(12, 3.0)), 4.0);
  try {
    beta_coeff({1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroDegree);
  }
}

TEST(Coefficients, C) {
  EXPECT_DOUBLE_EQ(c_coeff({3, 7, 1, 2}, 0.0), 1.0);
  EXPECT_NEAR(c_coeff({1, 2, 4}, 1.0), 3.0 / 1.75, 1e-12);
  EXPECT_DOUBLE_EQ(c_coeff({2, 2}, 2.0), 4.0);
  EXPECT_THROW(c_coeff({0.5}, 1.0), Error);
}

TEST(Coefficients, NodeRelError) {
  EXPECT_DOUBLE_EQ(node_rel_error(1, 1, 0), 0.0);
  EXPECT_DOUBLE_EQ(node_rel_error(4, 1, 0), 0.75);
  EXPECT_DOUBLE_EQ(node_rel_error(2, 3, 1), 0.625);
  for (double d = 1; d < 200; d += 1.0) EXPECT_GE(node_rel_error(d, 1.0, 0.0), 0.0);
}

namespace {

DegreeHistogram hist(std::map<std::size_t, std::size_t> counts) {
  DegreeHistogram h;
  h.counts = std::move(counts);
  for (const auto& [d, c] : h.counts) h.total += c;
  return h;
}

// Direct evaluation of the graph error from a degree list.
double t2_oracle(double m, double n0, double t, double alpha, const std::vector<double>& d) {
  double s1 = 0, num = 0;
  for (double x : d) s1 += 1.0 / x, num += std::pow(x, alpha - 1);
  const double C = num / s1;
  double acc = 0;
  for (double x : d) acc += C * C * std::pow(x, -2 * alpha - 4) - 2 * C * std::pow(x, -alpha - 4) + std::pow(x, -3);
  return 2 * m * m * t / (n0 + t) * acc / static_cast<double>(d.size());
}

}  // namespace

TEST(GraphError, ZeroTime) {
  Theorem2Inputs in{5, 1000, 0, 0.3, hist({{2, 10}, {5, 4}, {9, 1}})};
  EXPECT_EQ(graph_error_t2(in), 0.0);
}

TEST(GraphError, TimeRatioForFixedQ) {
  Theorem2Inputs a{5, 1000, 40, 0.3, hist({{2, 10}, {5, 4}, {9, 1}})};
  Theorem2Inputs b = a;
  b.t = 170;
  const double want = (40.0 / 1040.0) / (170.0 / 1170.0);
  EXPECT_NEAR(graph_error_t2(a) / graph_error_t2(b), want, 1e-12);
}

TEST(GraphError, MatchesDirectEvaluation) {
  const auto Q = hist({{1, 3}, {2, 10}, {5, 4}, {9, 1}});
  std::vector<double> d;
  for (const auto& [deg, c] : Q.counts) d.insert(d.end(), c, static_cast<double>(deg));
  for (double alpha : {0.0, 0.25, 1.0, 2.0}) {
    Theorem2Inputs in{5, 1000, 77, alpha, Q};
    EXPECT_NEAR(graph_error_t2(in), t2_oracle(5, 1000, 77, alpha, d), 1e-12);
  }
}

TEST(GraphError, VariantsDifferAsDocumented) {
  Theorem2Inputs in{5, 1000, 50, 0.5, hist({{2, 10}, {5, 4}, {9, 1}})};
  GraphErrorVariant v;
  const double base = graph_error_t2(in, v);
  v.prefactor = Prefactor::two_m;
  EXPECT_NEAR(graph_error_t2(in, v), base / 5.0, 1e-15);
  v = {};
  v.middle = MiddleExponent::two_alpha_plus_4;
  EXPECT_NE(graph_error_t2(in, v), base);
  v = {};
  v.c_form = CForm::expectation_ratio;
  EXPECT_NE(graph_error_t2(in, v), base);
  EXPECT_NE(describe(v).find("prefactor=2m^2"), std::string::npos);
}

TEST(GraphError, MonotoneInTime) {
  RngStream rng(3, "graph-gen");
  const auto f = ba_final(BaConfig{200, 5, 50, SeedGraph::ring}, rng);
  Theorem2Inputs in{5, 250, 0, 0.4, degree_histogram(f)};
  double prev = -1;
  for (int t = 0; t < 300; t += 7) {
    in.t = t;
    const double e = graph_error_t2(in);
    EXPECT_GT(e, prev);
    prev = e;
  }
}

TEST(GraphError, RejectsZeroDegreeHistogram) {
  Theorem2Inputs in{5, 1000, 10, 0.3, hist({{0, 1}, {2, 3}})};
  EXPECT_THROW(graph_error_t2(in), Error);
}

TEST(FitLinearGcn, EdgelessInterpolates) {
  auto g = fixtures::make(3, {}, 3);
  g.features << 2, 1, 0, 0, 1, 3, 1, 0, 1;
  Vector w(3);
  w << 0.5, -2, 1.25;
  const Vector Y = g.features * w;
  const Vector W = fit_linear_gcn(normalize(g), g.features, Y);
  EXPECT_LE((W - w).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(FitLinearGcn, ZeroTargets) {
  RngStream rng(4, "fit");
  const auto g = fixtures::random_graph(20, 0.2, 4, rng);
  const Vector W = fit_linear_gcn(normalize(g), g.features, Vector::Zero(20));
  EXPECT_LE(W.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(FitLinearGcn, MinimumNormWhenSingular) {
  auto g = fixtures::make(4, {}, 2);
  g.features << 1, 1, 2, 2, 3, 3, 4, 4;  // rank one
  Vector Y(4);
  Y << 2, 4, 6, 8;
  const Vector W = fit_linear_gcn(normalize(g), g.features, Y);
  EXPECT_NEAR(W[0], 1.0, 1e-10);
  EXPECT_NEAR(W[1], 1.0, 1e-10);
}

TEST(FitLinearGcn, MatchesGradientDescentOracle) {
  RngStream rng(5, "fit");
  const auto g = fixtures::random_graph(50, 0.1, 3, rng);
  const auto L = normalize(g);
  Vector Y(50);
  for (auto& y : Y) y = rng.normal();
  const Matrix LX = fixtures::dense_normalized(g) * g.features;
  auto objective = [&](const Vector& W) { return (LX * W - Y).squaredNorm(); };
  Vector w = Vector::Zero(3);
  for (int step = 0; step < 100000; ++step) w -= 1e-3 * 2.0 * LX.transpose() * (LX * w - Y);
  const Vector W = fit_linear_gcn(L, g.features, Y);
  EXPECT_NEAR(objective(W), objective(w), 1e-6 * objective(w));
}

TEST(FitLinearGcn, GlobalMinimumUnderPerturbation) {
  RngStream rng(6, "fit");
  const auto g = fixtures::random_graph(40, 0.15, 4, rng);
  const auto L = normalize(g);
  Vector Y(40);
  for (auto& y : Y) y = rng.normal();
  const Matrix LX = fixtures::dense_normalized(g) * g.features;
  const Vector W = fit_linear_gcn(L, g.features, Y);
  const double base = (LX * W - Y).squaredNorm();
  for (int k = 0; k < 200; ++k) {
    Vector delta(4);
    for (auto& v : delta) v = rng.normal();
    delta *= 1e-3 / delta.norm();
    EXPECT_GE((LX * (W + delta) - Y).squaredNorm(), base);
  }
}

TEST(FitLinearGcn, RowSubsetAndShapes) {
  RngStream rng(7, "fit");
  const auto g = fixtures::random_graph(30, 0.2, 2, rng);
  Vector w(2);
  w << 1.5, -0.5;
  const Matrix LX = fixtures::dense_normalized(g) * g.features;
  Vector Y = LX * w;
  for (int i = 1; i < 30; i += 2) Y[i] = 100;  // corrupt rows outside the mask
  std::vector<NodeId> rows;
  for (NodeId i = 0; i < 30; i += 2) rows.push_back(i);
  EXPECT_LE((fit_linear_gcn(normalize(g), g.features, Y, rows) - w).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_THROW(fit_linear_gcn(normalize(g), g.features, Vector::Zero(5)), Error);
}

TEST(RealizedError, Basic) {
  Vector p(3);
  p << 2, 1, 5;
  EXPECT_DOUBLE_EQ(realized_relative_error(p, {1, 0, 5}), 0.5);
}

namespace {

// Seed edge (0,1); node 2 arrives attached to node 0.
EvolvingGraph hand_fixture() {
  EvolvingGraph g;
  GraphSnapshot s0;
  s0.n = 2;
  s0.edges = {{0, 1}};
  s0.features = Matrix(2, 2);
  s0.features << 1, 0, 0, 1;
  GraphSnapshot s1;
  s1.n = 3;
  s1.edges = {{0, 1}, {0, 2}};
  s1.features = Matrix(3, 2);
  s1.features << 1, 0, 0, 1, 1, 0;
  s1.time_index = 1;
  g.snapshots = {s0, s1};
  g.feature_dim = 2;
  return g;
}

}  // namespace

TEST(DistortionBound, HandFixtureBound) {
  const auto evo = realized(hand_fixture());
  DistortionConfig cfg;  // N 64, xi 0.1, slope 0.2
  const double N = 64, b = 0.2, xi = 0.1;
  EXPECT_NEAR(distortion_lower_bound(evo, cfg, 0, 1), N * b * b * std::pow(xi, 4) / 36.0, 1e-18);
  EXPECT_EQ(distortion_lower_bound(evo, cfg, 0, 0), 0.0);
}

TEST(DistortionBound, HandFixtureEstimateExceedsBound) {
  const auto evo = realized(hand_fixture());
  DistortionConfig cfg;
  cfg.param_draws = 100000;
  RngStream rng(8, "theta");
  const auto theta = random_shallow_gcn(cfg.hidden, 2, rng);
  RngStream pert(8, "perturbation");
  const auto est = empirical_distortion(evo, theta, cfg, 0, 1, pert);
  EXPECT_GE(est.mean, distortion_lower_bound(evo, cfg, 0, 1));
  EXPECT_GT(est.se, 0.0);
  EXPECT_LT(est.lo, est.mean);
  EXPECT_GT(est.hi, est.mean);
}

TEST(DistortionBound, TauZeroIsExactlyZero) {
  const auto evo = realized(hand_fixture());
  DistortionConfig cfg;
  cfg.param_draws = 50;
  RngStream rng(9, "theta");
  const auto theta = random_shallow_gcn(cfg.hidden, 2, rng);
  RngStream pert(9, "p");
  const auto est = empirical_distortion(evo, theta, cfg, 0, 0, pert);
  EXPECT_EQ(est.mean, 0.0);
  EXPECT_EQ(est.se, 0.0);
}

TEST(DistortionBound, TinyXiAroundZero) {
  // theta* = 0: the network output itself is O(N xi^2), so both the estimate
  // and the bound vanish while the bound stays below the estimate.
  const auto evo = realized(hand_fixture());
  DistortionConfig cfg;
  cfg.xi = 1e-6;
  cfg.param_draws = 2000;
  ShallowGcn zero{Vector::Zero(64), Matrix::Zero(64, 2), Vector::Zero(64)};
  RngStream pert(10, "p");
  const auto est = empirical_distortion(evo, zero, cfg, 0, 1, pert);
  EXPECT_LE(est.mean, 1e-8);
  EXPECT_GE(est.mean, distortion_lower_bound(evo, cfg, 0, 1));
}

TEST(DistortionBound, BoundStrictlyIncreasingWhenDegreeGrows) {
  // Every arrival attaches to node 0.
  EvolvingGraph g;
  RngStream rng(11, "f");
  std::vector<Edge> edges{{0, 1}, {1, 2}};
  for (std::size_t k = 0; k <= 8; ++k) {
    GraphSnapshot s;
    s.n = 3 + k;
    if (k > 0) edges.push_back({0, static_cast<NodeId>(2 + k)});
    s.edges = canonical_edges(edges);
    s.features = Matrix(static_cast<Eigen::Index>(s.n), 3);
    g.snapshots.push_back(s);
  }
  Matrix X(11, 3);
  for (auto& v : X.reshaped()) v = rng.normal();
  for (auto& s : g.snapshots) s.features = X.topRows(static_cast<Eigen::Index>(s.n));
  const auto evo = realized(g);
  DistortionConfig cfg;
  double prev = -1;
  for (std::size_t tau = 0; tau <= 8; ++tau) {
    const double b = distortion_lower_bound(evo, cfg, 0, tau);
    EXPECT_GT(b, prev);
    prev = b;
  }
}

TEST(DistortionBound, RandomPrefixBoundHoldsWithinTwoSe) {
  for (std::uint64_t seed = 0; seed < 2; ++seed) {
    RngStream gen(seed, "graph-gen");
    GraphFrame g0 = ba_final(BaConfig{20, 2, 10, SeedGraph::ring}, gen);
    g0.features.resize(static_cast<Eigen::Index>(g0.n), 4);
    RngStream feat(seed, "features");
    for (auto& v : g0.features.reshaped()) v = feat.normal();
    DistortionConfig cfg;
    cfg.param_draws = 50;
    RngStream prng(seed, "paths");
    const auto evo = continuations(g0, 2, 5, 100, prng);
    RngStream init(seed, "init");
    const auto theta = random_shallow_gcn(cfg.hidden, 4, init);
    const auto deg = degrees(g0.n, g0.edges);
    const auto node = static_cast<std::size_t>(std::max_element(deg.begin(), deg.end()) - deg.begin());
    double prev = 0;
    for (std::size_t tau = 1; tau <= 5; ++tau) {
      RngStream pert(seed, "perturbation" + std::to_string(tau));
      const auto est = empirical_distortion(evo, theta, cfg, node, tau, pert);
      const double bound = distortion_lower_bound(evo, cfg, node, tau);
      EXPECT_GE(est.mean + 2 * est.se, bound) << "tau " << tau;
      EXPECT_GT(bound, prev);
      prev = bound;
    }
  }
}

TEST(DistortionBound, Errors) {
  const auto evo = realized(hand_fixture());
  DistortionConfig cfg;
  try {
    distortion_lower_bound(evo, cfg, 2, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NodeNotPresent);
  }
  cfg.xi = 0;
  EXPECT_THROW(validate(cfg), Error);
  cfg = {};
  cfg.slope = 1.0;
  EXPECT_THROW(validate(cfg), Error);
}
