// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "evograph/audit.hpp"
#include "evograph/graph.hpp"
#include "evograph/nn/layers.hpp"
#include "evograph/nn/params.hpp"
#include "evograph/pretrain.hpp"

namespace evograph::smart {

struct SmartConfig {
  double lambda = 0.5;
  std::size_t rnn_dim = 16;  // B, width of the GAT output
  std::size_t lstm_hidden = 16;
  std::size_t gat_heads = 1;
  AugmentationSpec augmentation{AugmentKind::drop_edge, 0.2};
  std::size_t warmup_epochs = 200;
  std::size_t finetune_epochs = 100;
  std::size_t patience = 20;
  double lr = 0.01;
};

void validate(const SmartConfig& cfg);

/// What the estimator sees of one timestep: structure, features and the
/// frozen model's embedding. Never labels.
struct EstimatorFrame {
  GraphFrame graph;
  Adjacency adj;
  Matrix O;
};

EstimatorFrame make_frame(const GraphFrame& g, const PretrainedModel& model);

struct EstimatorState {
  nn::ParamBundle phi;
  nn::ParamBundle predictor;
  nn::ParamBundle decoder;
  nn::LstmState lstm;
  nn::AdamState adam_phi;
  nn::AdamState adam_predictor;
  nn::AdamState adam_decoder;
  double lambda = 0.5;
  std::size_t rnn_dim = 16;
  std::size_t heads = 1;
  std::string pool = "mean";
  long warmup_steps = 0;
  long finetune_steps = 0;
};

EstimatorState init_state(std::size_t embedding_dim, const SmartConfig& cfg, RngStream& rng);

/// Mean loss over the masked nodes.
double observed_loss(const Matrix& prediction, const GraphSnapshot& s);
/// Mean loss over every node; scoring only.
double full_loss(const Matrix& prediction, const Labels& labels);

struct ReconGrads {
  nn::ParamBundle phi;
  nn::ParamBundle decoder;
};

struct ReconParts {
  double structure = 0;
  double feature = 0;
  double total = 0;
};

/// L_g = lambda L_s + (1 - lambda) L_f on an augmented view. The structure
/// term only reaches phi; the feature term reaches phi and the decoder.
/// Gradients are accumulated with weight `scale` when grads is non-null.
ReconParts recon_loss(const EstimatorState& st, const EstimatorFrame& f, const AugmentationSpec& aug, RngStream& rng,
                      ReconGrads* grads = nullptr, double scale = 1.0);

/// Column mean of F.
Vector pooled_input(const Matrix& F);

/// Embeds and pools one frame with the current phi on the clean graph.
Vector frame_input(const EstimatorState& st, const EstimatorFrame& f);

struct WarmupReport {
  std::vector<double> objective;  // per epoch
  std::size_t best_epoch = 0;
};

/// Warm-up objective: sum_k (lhat_k - l_k)^2 + mean_k L_g,k, one Adam step
/// per epoch for every component, LSTM state reset each epoch. Keeps the best
/// epoch's parameters and threads the LSTM state through all frames.
EstimatorState warmup(const std::vector<EstimatorFrame>& frames, const std::vector<double>& losses,
                      const SmartConfig& cfg, RngStream& init_rng, RngStream& aug_rng,
                      WarmupReport* report = nullptr);

/// Continues supervised training from an existing state (used by the
/// supervised oracle); same objective as warmup, starting from a zero LSTM
/// state over the given window. The Adam moments carry over.
void supervised_epochs(EstimatorState& st, const std::vector<const EstimatorFrame*>& frames,
                       const std::vector<double>& losses, const SmartConfig& cfg, std::size_t epochs,
                       RngStream& aug_rng);

/// Warm-up objective and its gradients for fixed augmentation draws; exposed
/// for gradient checks.
struct WarmupGrads {
  nn::ParamBundle phi;
  nn::ParamBundle predictor;
  nn::ParamBundle decoder;
};
double warmup_objective(const EstimatorState& st, const std::vector<const EstimatorFrame*>& frames,
                        const std::vector<double>& losses, const AugmentationSpec& aug, RngStream& aug_rng,
                        WarmupGrads* grads);

/// Post-deployment update of phi and the decoder by Adam on L_g. The
/// predictor is untouched. Takes the label-free frame only.
void finetune(EstimatorState& st, const EstimatorFrame& f, const SmartConfig& cfg, RngStream& aug_rng);

/// lhat = softplus(readout(LSTM(pooled phi(O), h))); advances the LSTM state.
double predict(EstimatorState& st, const EstimatorFrame& f);
/// Same without advancing.
double peek(const EstimatorState& st, const EstimatorFrame& f);

void save_state(const EstimatorState& st, const std::filesystem::path& path);
EstimatorState load_state(const std::filesystem::path& path);

}  // namespace evograph::smart
