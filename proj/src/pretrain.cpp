// SPDX-License-Identifier: Apache-2.0
#include "evograph/pretrain.hpp"

#include <algorithm>

#include "evograph/kernels.hpp"

namespace evograph {

PretrainedModel PretrainedModel::linear_gcn(Vector W) {
  PretrainedModel m;
  m.task_ = Task::regression;
  m.linear_ = true;
  m.W_ = std::move(W);
  return m;
}

PretrainedModel PretrainedModel::gcn(nn::ParamBundle params, nn::GcnSpec spec, std::size_t classes) {
  PretrainedModel m;
  m.task_ = Task::classification;
  m.linear_ = false;
  m.params_ = std::move(params);
  m.spec_ = spec;
  m.classes_ = classes;
  return m;
}

std::size_t PretrainedModel::embedding_dim(std::size_t feature_dim) const {
  if (linear_) return 1 + feature_dim;
  const auto& last = params_.tensors().back().value;
  return static_cast<std::size_t>(last.rows() + last.cols());
}

void PretrainedModel::forward(const NormalizedAdjacency& L, const Matrix& X, Matrix& prediction,
                              Matrix& embedding) const {
  if (linear_) {
    if (X.cols() != W_.size()) throw Error(ErrorCode::DimensionMismatch, "feature width differs from W");
    Matrix lx;
    kernels::propagate(L, X, lx);
    prediction = lx * W_;
    embedding.resize(lx.rows(), lx.cols() + 1);
    embedding.col(0) = prediction.col(0);
    embedding.rightCols(lx.cols()) = lx;
    return;
  }
  nn::GcnCache cache;
  prediction = nn::gcn_forward(L, X, params_, spec_, &cache);
  // Input to the last layer: X for one layer, otherwise the activated
  // previous layer output.
  Matrix before;
  const std::size_t layers = cache.pre.size();
  if (layers == 1) {
    before = X;
  } else {
    before = cache.pre[layers - 2].unaryExpr([&](double v) {
      switch (spec_.activation) {
        case nn::Activation::none: return v;
        case nn::Activation::relu: return v > 0 ? v : 0.0;
        case nn::Activation::leaky: return v > 0 ? v : spec_.leaky_slope * v;
      }
      return v;
    });
  }
  embedding.resize(before.rows(), before.cols() + prediction.cols());
  embedding.leftCols(before.cols()) = before;
  embedding.rightCols(prediction.cols()) = prediction;
}

Matrix PretrainedModel::predict(const NormalizedAdjacency& L, const Matrix& X) const {
  Matrix p, e;
  forward(L, X, p, e);
  return p;
}

Matrix PretrainedModel::embed(const NormalizedAdjacency& L, const Matrix& X) const {
  Matrix p, e;
  forward(L, X, p, e);
  return e;
}

PretrainedModel train_gcn_classifier(const NormalizedAdjacency& L, const Matrix& X, const std::vector<double>& classes,
                                     const std::vector<NodeId>& rows, const GcnTrainConfig& cfg, RngStream& rng) {
  if (rows.empty()) throw Error(ErrorCode::EmptyMask, "no labelled rows to pretrain on");
  std::size_t k = 0;
  for (double c : classes) k = std::max(k, static_cast<std::size_t>(c) + 1);
  std::vector<std::size_t> dims{static_cast<std::size_t>(X.cols())};
  for (std::size_t l = 1; l < cfg.layers; ++l) dims.push_back(cfg.hidden);
  dims.push_back(k);
  auto params = nn::make_gcn(dims, rng);
  nn::GcnSpec spec;
  auto adam = nn::make_adam(params, cfg.lr);
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    nn::GcnCache cache;
    const Matrix logits = nn::gcn_forward(L, X, params, spec, &cache);
    Matrix dlogits;
    nn::softmax_cross_entropy(logits, classes, rows, &dlogits);
    const auto grads = nn::gcn_backward(L, params, spec, cache, dlogits);
    nn::adam_update(params, grads, adam);
  }
  return PretrainedModel::gcn(std::move(params), spec, k);
}

double prediction_loss(const Matrix& prediction, const Labels& labels, const std::vector<NodeId>& rows) {
  if (labels.task == Task::classification) return nn::softmax_cross_entropy(prediction, labels.values, rows, nullptr);
  return nn::masked_mse(prediction, labels.values, rows, nullptr);
}

}  // namespace evograph
