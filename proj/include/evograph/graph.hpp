// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evograph/error.hpp"
#include "evograph/rng.hpp"

namespace evograph {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using NodeId = std::uint32_t;

/// Undirected edge stored canonically with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  auto operator<=>(const Edge&) const = default;
};

enum class Task { regression, classification };

struct Labels {
  Task task = Task::regression;
  /// Class ids are stored as integral doubles for classification.
  std::vector<double> values;
};

/// Structure and features of one timestep. Estimator code that runs after
/// deployment only ever sees this type, which carries no label data.
struct GraphFrame {
  std::size_t n = 0;
  std::vector<Edge> edges;  // sorted, u < v, unique
  Matrix features;          // n x d
  int time_index = 0;
};

struct GraphSnapshot : GraphFrame {
  std::optional<Labels> labels;
  std::vector<NodeId> mask;  // observed node indices, sorted
};

struct EvolvingGraph {
  std::vector<GraphSnapshot> snapshots;
  std::size_t feature_dim = 0;
};

/// Compressed neighbor lists of a simple undirected graph. Neighbors of each
/// node are sorted ascending.
struct Adjacency {
  std::size_t n = 0;
  std::vector<std::size_t> offsets;  // n + 1
  std::vector<NodeId> neighbors;

  std::size_t degree(std::size_t i) const { return offsets[i + 1] - offsets[i]; }
  const NodeId* begin(std::size_t i) const { return neighbors.data() + offsets[i]; }
  const NodeId* end(std::size_t i) const { return neighbors.data() + offsets[i + 1]; }
};

Adjacency build_adjacency(std::size_t n, const std::vector<Edge>& edges);

/// L = D~^-1 (A + I). Stored implicitly: L[i][j] = inv_deg1[i] for j in N(i) u {i}.
struct NormalizedAdjacency {
  Adjacency adj;
  std::vector<double> inv_deg1;

  std::size_t n() const { return adj.n; }
  double at(std::size_t i, std::size_t j) const;
  Matrix dense() const;
};

NormalizedAdjacency normalize(const GraphFrame& frame);
NormalizedAdjacency normalize(std::size_t n, const std::vector<Edge>& edges);

struct Violation {
  ErrorCode code;
  std::string message;
  std::vector<std::size_t> indices;
};

/// Empty result means the snapshot satisfies every invariant.
std::vector<Violation> validate(const GraphSnapshot& snapshot);
void require_valid(const GraphSnapshot& snapshot);

enum class AugmentKind { drop_edge, drop_node, mask_feature };

struct AugmentationSpec {
  AugmentKind kind = AugmentKind::drop_edge;
  double p = 0.2;
};

AugmentKind parse_augment_kind(const std::string& name);
std::string to_string(AugmentKind kind);

GraphFrame augment(const GraphFrame& frame, const AugmentationSpec& spec, RngStream& rng);
GraphSnapshot augment(const GraphSnapshot& snapshot, const AugmentationSpec& spec, RngStream& rng);

std::vector<std::size_t> degrees(std::size_t n, const std::vector<Edge>& edges);

/// Canonicalizes (u < v), sorts and de-duplicates.
std::vector<Edge> canonical_edges(std::vector<Edge> edges);

}  // namespace evograph
