// SPDX-License-Identifier: Apache-2.0
#include "evograph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace evograph {

std::vector<Edge> canonical_edges(std::vector<Edge> edges) {
  for (auto& e : edges) {
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<std::size_t> degrees(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::size_t> deg(n, 0);
  for (const auto& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

Adjacency build_adjacency(std::size_t n, const std::vector<Edge>& edges) {
  Adjacency adj;
  adj.n = n;
  adj.offsets.assign(n + 1, 0);
  for (const auto& e : edges) {
    ++adj.offsets[e.u + 1];
    ++adj.offsets[e.v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) adj.offsets[i + 1] += adj.offsets[i];
  adj.neighbors.resize(adj.offsets[n]);
  std::vector<std::size_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
  for (const auto& e : edges) {
    adj.neighbors[cursor[e.u]++] = e.v;
    adj.neighbors[cursor[e.v]++] = e.u;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adj.neighbors.begin() + static_cast<std::ptrdiff_t>(adj.offsets[i]),
              adj.neighbors.begin() + static_cast<std::ptrdiff_t>(adj.offsets[i + 1]));
  }
  return adj;
}

double NormalizedAdjacency::at(std::size_t i, std::size_t j) const {
  if (i == j) return inv_deg1[i];
  return std::binary_search(adj.begin(i), adj.end(i), static_cast<NodeId>(j)) ? inv_deg1[i] : 0.0;
}

Matrix NormalizedAdjacency::dense() const {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n()), static_cast<Eigen::Index>(n()));
  for (std::size_t i = 0; i < n(); ++i) {
    out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = inv_deg1[i];
    for (const NodeId* p = adj.begin(i); p != adj.end(i); ++p) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*p)) = inv_deg1[i];
    }
  }
  return out;
}

NormalizedAdjacency normalize(std::size_t n, const std::vector<Edge>& edges) {
  NormalizedAdjacency out;
  out.adj = build_adjacency(n, edges);
  out.inv_deg1.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.inv_deg1[i] = 1.0 / static_cast<double>(out.adj.degree(i) + 1);
  }
  return out;
}

NormalizedAdjacency normalize(const GraphFrame& frame) { return normalize(frame.n, frame.edges); }

std::vector<Violation> validate(const GraphSnapshot& s) {
  std::vector<Violation> out;
  auto add = [&](ErrorCode code, std::string msg, std::vector<std::size_t> idx) {
    out.push_back({code, std::move(msg), std::move(idx)});
  };

  std::vector<std::size_t> out_of_range, self_loops;
  for (std::size_t k = 0; k < s.edges.size(); ++k) {
    const auto& e = s.edges[k];
    if (e.u >= s.n || e.v >= s.n) out_of_range.push_back(k);
    if (e.u == e.v) self_loops.push_back(k);
  }
  if (!out_of_range.empty()) add(ErrorCode::EdgeOutOfRange, "edge endpoint >= n", out_of_range);
  if (!self_loops.empty()) add(ErrorCode::SelfLoop, "edge (u,u) present", self_loops);

  std::vector<std::pair<Edge, std::size_t>> sorted;
  sorted.reserve(s.edges.size());
  for (std::size_t k = 0; k < s.edges.size(); ++k) {
    Edge e = s.edges[k];
    if (e.u > e.v) std::swap(e.u, e.v);
    sorted.emplace_back(e, k);
  }
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> dups;
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    if (sorted[k].first == sorted[k - 1].first) dups.push_back(sorted[k].second);
  }
  if (!dups.empty()) add(ErrorCode::DuplicateEdge, "edge listed more than once", dups);

  if (static_cast<std::size_t>(s.features.rows()) != s.n) {
    std::ostringstream msg;
    msg << "features has " << s.features.rows() << " rows, expected " << s.n;
    add(ErrorCode::FeatureRowMismatch, msg.str(), {});
  }
  std::vector<std::size_t> non_finite;
  for (Eigen::Index i = 0; i < s.features.rows(); ++i) {
    if (!s.features.row(i).allFinite()) non_finite.push_back(static_cast<std::size_t>(i));
  }
  if (!non_finite.empty()) add(ErrorCode::NonFiniteFeature, "non-finite feature entries", non_finite);

  if (!s.labels && !s.mask.empty()) {
    add(ErrorCode::MaskWithoutLabels, "mask present but labels absent", {});
  }
  std::vector<std::size_t> bad_mask;
  for (auto m : s.mask) {
    if (m >= s.n) bad_mask.push_back(m);
  }
  if (!bad_mask.empty()) add(ErrorCode::InconsistentDimension, "mask index >= n", bad_mask);
  if (s.labels && s.labels->values.size() != s.n) {
    add(ErrorCode::InconsistentDimension, "labels length differs from n", {});
  }
  return out;
}

void require_valid(const GraphSnapshot& s) {
  auto violations = validate(s);
  if (!violations.empty()) {
    throw Error(violations.front().code,
                "snapshot t=" + std::to_string(s.time_index) + ": " + violations.front().message);
  }
}

AugmentKind parse_augment_kind(const std::string& name) {
  if (name == "drop_edge") return AugmentKind::drop_edge;
  if (name == "drop_node") return AugmentKind::drop_node;
  if (name == "mask_feature") return AugmentKind::mask_feature;
  throw Error(ErrorCode::ConfigInvalid, "unknown augmentation kind '" + name + "'");
}

std::string to_string(AugmentKind kind) {
  switch (kind) {
    case AugmentKind::drop_edge: return "drop_edge";
    case AugmentKind::drop_node: return "drop_node";
    case AugmentKind::mask_feature: return "mask_feature";
  }
  return "drop_edge";
}

GraphFrame augment(const GraphFrame& frame, const AugmentationSpec& spec, RngStream& rng) {
  if (!(spec.p >= 0.0 && spec.p <= 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, "augmentation probability outside [0,1]");
  }
  GraphFrame out;
  out.n = frame.n;
  out.time_index = frame.time_index;
  switch (spec.kind) {
    case AugmentKind::drop_edge: {
      out.features = frame.features;
      out.edges.reserve(frame.edges.size());
      for (const auto& e : frame.edges) {
        if (rng.uniform() >= spec.p) out.edges.push_back(e);
      }
      break;
    }
    case AugmentKind::drop_node: {
      out.features = frame.features;
      std::vector<char> dropped(frame.n, 0);
      for (std::size_t i = 0; i < frame.n; ++i) dropped[i] = rng.uniform() < spec.p ? 1 : 0;
      for (const auto& e : frame.edges) {
        if (!dropped[e.u] && !dropped[e.v]) out.edges.push_back(e);
      }
      break;
    }
    case AugmentKind::mask_feature: {
      out.edges = frame.edges;
      out.features = frame.features;
      for (Eigen::Index i = 0; i < out.features.rows(); ++i) {
        if (rng.uniform() < spec.p) out.features.row(i).setZero();
      }
      break;
    }
  }
  return out;
}

GraphSnapshot augment(const GraphSnapshot& snapshot, const AugmentationSpec& spec, RngStream& rng) {
  GraphSnapshot out;
  static_cast<GraphFrame&>(out) = augment(static_cast<const GraphFrame&>(snapshot), spec, rng);
  out.labels = snapshot.labels;
  out.mask = snapshot.mask;
  return out;
}

}  // namespace evograph
