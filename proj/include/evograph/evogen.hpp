// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "evograph/graph.hpp"

namespace evograph {

enum class SeedGraph {
  ring,  // cycle over n0 nodes
  ba,    // star over m+1 nodes grown by preferential attachment to n0
};

SeedGraph parse_seed_graph(const std::string& name);
std::string to_string(SeedGraph kind);

struct BaConfig {
  std::size_t n0 = 1000;
  std::size_t m = 5;
  std::size_t horizon = 180;
  SeedGraph seed_graph = SeedGraph::ring;
};

struct DualBaConfig {
  std::size_t n0 = 1000;
  std::size_t m1 = 1;
  std::size_t m2 = 5;
  double p = 0.5;
  std::size_t horizon = 180;
  SeedGraph seed_graph = SeedGraph::ring;
};

void validate(const BaConfig& cfg);
void validate(const DualBaConfig& cfg);

/// Snapshots 0..horizon; snapshot k holds n0 + k nodes. Features are empty
/// (n x 0) until gaussian_features fills them.
EvolvingGraph ba_evolve(const BaConfig& cfg, RngStream& rng);
EvolvingGraph dual_ba_evolve(const DualBaConfig& cfg, RngStream& rng);

/// Final snapshot only, for long horizons where the sequence would not fit.
GraphFrame ba_final(const BaConfig& cfg, RngStream& rng);

/// Continues a realized frame by `steps` preferential-attachment arrivals and
/// returns every intermediate frame (the input frame first). New nodes get
/// standard-normal features from the same stream.
std::vector<GraphFrame> ba_continue(const GraphFrame& start, std::size_t m, std::size_t steps, RngStream& rng);

/// Each node gets an i.i.d. N(0, I_d) row at arrival, shared by every later snapshot.
void gaussian_features(EvolvingGraph& g, std::size_t d, RngStream& rng);

/// y_i = deg(i)^alpha * X[i][col], degrees of this snapshot.
std::vector<double> power_labels(const GraphFrame& s, double alpha, std::size_t col);

/// y_i = (n - 1) / sum_j dist(i, j).
std::vector<double> closeness_labels(const GraphFrame& s);

struct DegreeHistogram {
  std::map<std::size_t, std::size_t> counts;
  std::size_t total = 0;
};

DegreeHistogram degree_histogram(const GraphFrame& s);

/// Slope of log density against log degree over logarithmic bins with
/// d >= d_min. Bins holding fewer than min_count nodes are dropped.
double tail_slope(const DegreeHistogram& h, std::size_t d_min, double bin_ratio = 1.5, std::size_t min_count = 5);

/// Least-squares slope of log y on log deg; a scalar exponent summarising how
/// a label model scales with degree.
double degree_exponent(const GraphFrame& s, const std::vector<double>& labels);

}  // namespace evograph
