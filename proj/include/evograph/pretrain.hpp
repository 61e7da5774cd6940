// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "evograph/graph.hpp"
#include "evograph/nn/layers.hpp"

namespace evograph {

/// The frozen model G whose decay is being tracked.
class PretrainedModel {
 public:
  /// Single-layer linear GCN: prediction LXW; embedding [LXW, LX].
  static PretrainedModel linear_gcn(Vector W);
  /// gcn(layers) classifier: prediction is the logits; embedding is the
  /// activations entering the last layer concatenated with the logits.
  static PretrainedModel gcn(nn::ParamBundle params, nn::GcnSpec spec, std::size_t classes);

  Task task() const { return task_; }
  std::size_t embedding_dim(std::size_t feature_dim) const;

  Matrix predict(const NormalizedAdjacency& L, const Matrix& X) const;
  Matrix embed(const NormalizedAdjacency& L, const Matrix& X) const;
  /// Both at once; saves one forward pass.
  void forward(const NormalizedAdjacency& L, const Matrix& X, Matrix& prediction, Matrix& embedding) const;

  const Vector& linear_weights() const { return W_; }
  const nn::ParamBundle& gcn_params() const { return params_; }

 private:
  Task task_ = Task::regression;
  bool linear_ = true;
  Vector W_;
  nn::ParamBundle params_;
  nn::GcnSpec spec_;
  std::size_t classes_ = 0;
};

struct GcnTrainConfig {
  std::size_t layers = 2;
  std::size_t hidden = 32;
  std::size_t epochs = 200;
  double lr = 0.01;
};

/// Trains a gcn(layers) classifier on the labelled rows with Adam on
/// softmax cross-entropy.
PretrainedModel train_gcn_classifier(const NormalizedAdjacency& L, const Matrix& X, const std::vector<double>& classes,
                                     const std::vector<NodeId>& rows, const GcnTrainConfig& cfg, RngStream& rng);

/// Mean loss of `prediction` over `rows` (all nodes when empty): MSE on
/// column 0 for regression, softmax cross-entropy for classification.
double prediction_loss(const Matrix& prediction, const Labels& labels, const std::vector<NodeId>& rows);

}  // namespace evograph
