// SPDX-License-Identifier: Apache-2.0
#include "evograph/evogen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "evograph/kernels.hpp"

namespace evograph {

SeedGraph parse_seed_graph(const std::string& name) {
  if (name == "ring") return SeedGraph::ring;
  if (name == "ba") return SeedGraph::ba;
  throw Error(ErrorCode::ConfigInvalid, "unknown seed_graph '" + name + "'");
}

std::string to_string(SeedGraph kind) { return kind == SeedGraph::ring ? "ring" : "ba"; }

void validate(const BaConfig& cfg) {
  if (cfg.m < 1 || cfg.m > cfg.n0) throw Error(ErrorCode::ConfigInvalid, "need 1 <= m <= n0");
  if (cfg.horizon < 1) throw Error(ErrorCode::ConfigInvalid, "horizon must be >= 1");
  if (cfg.seed_graph == SeedGraph::ring && cfg.n0 < 2) throw Error(ErrorCode::ConfigInvalid, "ring seed needs n0 >= 2");
  if (cfg.seed_graph == SeedGraph::ba && cfg.n0 < cfg.m + 1) {
    throw Error(ErrorCode::ConfigInvalid, "ba seed needs n0 >= m + 1");
  }
}

void validate(const DualBaConfig& cfg) {
  const auto hi = std::max(cfg.m1, cfg.m2);
  if (cfg.m1 < 1 || cfg.m2 < 1 || hi > cfg.n0) throw Error(ErrorCode::ConfigInvalid, "need 1 <= m1, m2 <= n0");
  if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "p must lie in [0, 1]");
  if (cfg.horizon < 1) throw Error(ErrorCode::ConfigInvalid, "horizon must be >= 1");
  if (cfg.seed_graph == SeedGraph::ring && cfg.n0 < 2) throw Error(ErrorCode::ConfigInvalid, "ring seed needs n0 >= 2");
  if (cfg.seed_graph == SeedGraph::ba && cfg.n0 < hi + 1) {
    throw Error(ErrorCode::ConfigInvalid, "ba seed needs n0 >= max(m1, m2) + 1");
  }
}

namespace {

// Growing graph with a repeated-endpoint list: each node appears once per
// incident edge, so a uniform pick from the list is degree proportional.
struct Grower {
  std::size_t n = 0;
  std::vector<Edge> edges;
  std::vector<NodeId> endpoints;

  void link(NodeId a, NodeId b) {
    edges.push_back({std::min(a, b), std::max(a, b)});
    endpoints.push_back(a);
    endpoints.push_back(b);
  }

  void arrive(std::size_t m, RngStream& rng) {
    const auto fresh = static_cast<NodeId>(n);
    std::vector<NodeId> picked;
    picked.reserve(m);
    while (picked.size() < m) {
      const NodeId t = endpoints[rng.below(endpoints.size())];
      if (std::find(picked.begin(), picked.end(), t) == picked.end()) picked.push_back(t);
    }
    ++n;
    for (auto t : picked) link(t, fresh);
  }

  GraphFrame frame(int time_index) const {
    GraphFrame f;
    f.n = n;
    f.edges = edges;
    std::sort(f.edges.begin(), f.edges.end());
    f.features = Matrix(static_cast<Eigen::Index>(n), 0);
    f.time_index = time_index;
    return f;
  }
};

Grower seed(std::size_t n0, SeedGraph kind, const std::function<std::size_t()>& draw_m, std::size_t star_m,
            RngStream& rng) {
  Grower g;
  if (kind == SeedGraph::ring) {
    g.n = n0;
    if (n0 == 2) {
      g.link(0, 1);
    } else {
      for (std::size_t i = 0; i < n0; ++i) g.link(static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n0));
    }
    return g;
  }
  g.n = star_m + 1;
  for (std::size_t i = 1; i <= star_m; ++i) g.link(0, static_cast<NodeId>(i));
  while (g.n < n0) g.arrive(draw_m(), rng);
  return g;
}

EvolvingGraph grow(std::size_t n0, std::size_t horizon, SeedGraph kind, std::size_t star_m,
                   const std::function<std::size_t()>& draw_m, RngStream& rng) {
  Grower g = seed(n0, kind, draw_m, star_m, rng);
  EvolvingGraph out;
  out.snapshots.reserve(horizon + 1);
  for (std::size_t k = 0; k <= horizon; ++k) {
    if (k > 0) g.arrive(draw_m(), rng);
    GraphSnapshot s;
    static_cast<GraphFrame&>(s) = g.frame(static_cast<int>(k));
    out.snapshots.push_back(std::move(s));
  }
  return out;
}

}  // namespace

EvolvingGraph ba_evolve(const BaConfig& cfg, RngStream& rng) {
  validate(cfg);
  return grow(cfg.n0, cfg.horizon, cfg.seed_graph, cfg.m, [&] { return cfg.m; }, rng);
}

EvolvingGraph dual_ba_evolve(const DualBaConfig& cfg, RngStream& rng) {
  validate(cfg);
  auto draw = [&] { return rng.bernoulli(cfg.p) ? cfg.m1 : cfg.m2; };
  return grow(cfg.n0, cfg.horizon, cfg.seed_graph, std::max(cfg.m1, cfg.m2), draw, rng);
}

GraphFrame ba_final(const BaConfig& cfg, RngStream& rng) {
  validate(cfg);
  auto draw = [&] { return cfg.m; };
  Grower g = seed(cfg.n0, cfg.seed_graph, draw, cfg.m, rng);
  for (std::size_t k = 0; k < cfg.horizon; ++k) g.arrive(cfg.m, rng);
  return g.frame(static_cast<int>(cfg.horizon));
}

std::vector<GraphFrame> ba_continue(const GraphFrame& start, std::size_t m, std::size_t steps, RngStream& rng) {
  Grower g;
  g.n = start.n;
  for (const auto& e : start.edges) g.link(e.u, e.v);
  if (m < 1 || m > g.n || g.endpoints.empty()) throw Error(ErrorCode::ConfigInvalid, "cannot continue this frame");
  const auto d = start.features.cols();
  Matrix x = start.features;
  std::vector<GraphFrame> out;
  out.reserve(steps + 1);
  out.push_back(start);
  for (std::size_t k = 1; k <= steps; ++k) {
    g.arrive(m, rng);
    x.conservativeResize(static_cast<Eigen::Index>(g.n), d);
    for (Eigen::Index c = 0; c < d; ++c) x(static_cast<Eigen::Index>(g.n - 1), c) = rng.normal();
    GraphFrame f;
    f.n = g.n;
    f.edges = g.edges;
    std::sort(f.edges.begin(), f.edges.end());
    f.features = x;
    f.time_index = start.time_index + static_cast<int>(k);
    out.push_back(std::move(f));
  }
  return out;
}

void gaussian_features(EvolvingGraph& g, std::size_t d, RngStream& rng) {
  g.feature_dim = d;
  if (g.snapshots.empty()) return;
  std::size_t n_max = 0;
  for (const auto& s : g.snapshots) n_max = std::max(n_max, s.n);
  Matrix x(static_cast<Eigen::Index>(n_max), static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = rng.normal();
  }
  for (auto& s : g.snapshots) s.features = x.topRows(static_cast<Eigen::Index>(s.n));
}

std::vector<double> power_labels(const GraphFrame& s, double alpha, std::size_t col) {
  if (col >= static_cast<std::size_t>(s.features.cols())) {
    throw Error(ErrorCode::DimensionMismatch, "label column outside feature matrix");
  }
  const auto deg = degrees(s.n, s.edges);
  std::vector<double> y(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    if (deg[i] == 0) throw Error(ErrorCode::ZeroDegree, "node " + std::to_string(i) + " has degree 0");
    y[i] = std::pow(static_cast<double>(deg[i]), alpha) *
           s.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col));
  }
  return y;
}

std::vector<double> closeness_labels(const GraphFrame& s) {
  const auto adj = build_adjacency(s.n, s.edges);
  const auto sums = kernels::distance_sums(adj);
  std::vector<double> y(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    if (sums[i] == kernels::kUnreachable) {
      throw Error(ErrorCode::Disconnected, "node " + std::to_string(i) + " cannot reach every node");
    }
    // A single node has no other node to reach; define its closeness as 0.
    y[i] = s.n == 1 ? 0.0 : static_cast<double>(s.n - 1) / static_cast<double>(sums[i]);
  }
  return y;
}

DegreeHistogram degree_histogram(const GraphFrame& s) {
  DegreeHistogram h;
  for (auto d : degrees(s.n, s.edges)) ++h.counts[d];
  h.total = s.n;
  return h;
}

double tail_slope(const DegreeHistogram& h, std::size_t d_min, double bin_ratio, std::size_t min_count) {
  if (h.counts.empty() || bin_ratio <= 1.0) throw Error(ErrorCode::DegenerateFit, "empty histogram or bad bin ratio");
  const double d_max = static_cast<double>(h.counts.rbegin()->first);
  std::vector<double> xs, ys;
  double lo = static_cast<double>(std::max<std::size_t>(d_min, 1));
  while (lo <= d_max) {
    const double hi = std::max(lo + 1.0, std::ceil(lo * bin_ratio));
    std::size_t count = 0;
    for (auto it = h.counts.lower_bound(static_cast<std::size_t>(lo));
         it != h.counts.end() && static_cast<double>(it->first) < hi; ++it) {
      count += it->second;
    }
    if (count >= min_count) {
      // Density per unit degree over the integers lo..hi-1.
      const double width = hi - lo;
      xs.push_back(std::log(std::sqrt(lo * (hi - 1.0))));
      ys.push_back(std::log(static_cast<double>(count) / (width * static_cast<double>(h.total))));
    }
    lo = hi;
  }
  if (xs.size() < 2) throw Error(ErrorCode::DegenerateFit, "fewer than two populated bins");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / n, my += ys[i] / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
  return sxy / sxx;
}

double degree_exponent(const GraphFrame& s, const std::vector<double>& labels) {
  if (labels.size() != s.n) throw Error(ErrorCode::DimensionMismatch, "labels do not match node count");
  const auto deg = degrees(s.n, s.edges);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < s.n; ++i) {
    if (deg[i] == 0 || !(labels[i] > 0)) continue;
    xs.push_back(std::log(static_cast<double>(deg[i])));
    ys.push_back(std::log(labels[i]));
  }
  if (xs.size() < 2) throw Error(ErrorCode::DegenerateFit, "not enough positive labels");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / n, my += ys[i] / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
  if (sxx == 0) throw Error(ErrorCode::DegenerateFit, "all degrees equal");
  return sxy / sxx;
}

}  // namespace evograph
