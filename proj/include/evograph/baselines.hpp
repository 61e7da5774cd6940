// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "evograph/audit.hpp"
#include "evograph/graph.hpp"
#include "evograph/pretrain.hpp"
#include "evograph/smart.hpp"

namespace evograph {

struct LinearFit {
  double slope = 0;
  double intercept = 0;
};

/// Ordinary least squares over (time, loss) pairs.
LinearFit linear_fit(const std::vector<std::pair<double, double>>& points);
/// Clamped at 0 from below.
double linear_predict(const LinearFit& fit, double time);

struct DocFit {
  double ac0 = 0;
  double l0 = 0;
  double slope = 0;
};

/// Mean over nodes of the largest softmax probability of each logit row.
double average_confidence(const Matrix& logits);

/// Through-origin least squares of (l_k - l_0) on (AC_k - AC_0), k >= 1.
DocFit doc_fit(Task task, const std::vector<double>& confidences, const std::vector<double>& losses);
double doc_predict(const DocFit& fit, double confidence);

/// Which nodes get labelled in a frame.
enum class MaskPolicy {
  new_arrivals,  // fraction of nodes that arrived since the previous frame
  population,    // fraction of every node present
};

MaskPolicy parse_mask_policy(const std::string& name);
std::string to_string(MaskPolicy p);

/// ceil(fraction * pool) nodes without replacement, sorted. With
/// new_arrivals the pool is [n_prev, n); an empty pool falls back to all nodes.
std::vector<NodeId> label_mask(std::size_t n_prev, std::size_t n, double fraction, MaskPolicy policy, RngStream& rng);

struct OracleConfig {
  double label_fraction = 0.1;
  MaskPolicy policy = MaskPolicy::new_arrivals;
  std::size_t epochs = 5;
  std::size_t window = 10;
};

/// Supervised post-deployment oracle. At each test frame it buys labels for
/// a fresh mask through the vault, adds the observed loss to its history,
/// continues supervised training of the full estimator on the most recent
/// window and predicts the frame. Throws LabelAccessDenied unless the vault
/// was opened for it.
std::vector<double> supervised_oracle(const std::vector<smart::EstimatorFrame>& frames, std::size_t first_test,
                                      const std::vector<double>& warmup_losses, smart::EstimatorState state,
                                      const PretrainedModel& model, LabelVault& vault, const smart::SmartConfig& scfg,
                                      const OracleConfig& ocfg, RngStream& mask_rng, RngStream& aug_rng);

}  // namespace evograph
