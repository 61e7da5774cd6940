// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "evograph/graph.hpp"
#include "evograph/nn/params.hpp"

namespace evograph::nn {

// ---- GCN -----------------------------------------------------------------

enum class Activation { none, relu, leaky };

struct GcnSpec {
  Activation activation = Activation::relu;
  double leaky_slope = 0.01;
  bool linear_output = true;  // skip the activation after the last layer
};

/// dims = {in, hidden..., out}; tensors W0..W{L-1}, no biases.
ParamBundle make_gcn(const std::vector<std::size_t>& dims, RngStream& rng);
std::size_t gcn_layers(const ParamBundle& p);

struct GcnCache {
  std::vector<Matrix> propagated;  // L H_l per layer
  std::vector<Matrix> pre;         // L H_l W_l per layer
};

/// O = act(L ... act(L X W0) ... W{L-1})
Matrix gcn_forward(const NormalizedAdjacency& L, const Matrix& X, const ParamBundle& p, const GcnSpec& spec,
                   GcnCache* cache = nullptr);
ParamBundle gcn_backward(const NormalizedAdjacency& L, const ParamBundle& p, const GcnSpec& spec,
                         const GcnCache& cache, const Matrix& dO);

// ---- GAT -----------------------------------------------------------------

struct GatSpec {
  std::size_t heads = 1;
  double slope = 0.2;
};

/// Per head h: W{h} (in x out), a_src{h} and a_dst{h} (out x 1). e_ij =
/// LeakyReLU(a_src.z_i + a_dst.z_j) over j in N(i) u {i}; heads are averaged.
ParamBundle make_gat(std::size_t in, std::size_t out, std::size_t heads, RngStream& rng);

struct GatCache {
  Adjacency adj;
  Matrix input;
  std::vector<Matrix> z;
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> alpha;
};

Matrix gat_forward(const Adjacency& adj, const Matrix& O, const ParamBundle& p, const GatSpec& spec,
                   GatCache* cache = nullptr);
ParamBundle gat_backward(const ParamBundle& p, const GatSpec& spec, const GatCache& cache, const Matrix& dF);

// ---- decoders --------------------------------------------------------------

double sigmoid(double x);
double softplus(double x);
double softplus_inverse(double y);

/// A_hat = sigmoid(F F^T), dense; for small graphs and tests.
Matrix structure_decode(const Matrix& F);

/// Node pairs scored by the structure loss with 0/1 targets.
struct PairSet {
  std::vector<Edge> pairs;
  std::vector<double> targets;
};

/// Every edge as a positive plus as many uniformly drawn non-adjacent,
/// distinct node pairs as negatives.
PairSet sample_pairs(const Adjacency& adj, const std::vector<Edge>& edges, RngStream& rng);

/// Mean BCE of sigmoid(F_u . F_v) against the targets; accumulates dL/dF.
double structure_loss(const Matrix& F, const PairSet& pairs, Matrix* dF);

/// Tensor a (out x B).
ParamBundle make_decoder(std::size_t out, std::size_t B, RngStream& rng);
/// O_hat = F a^T
Matrix feature_decode(const Matrix& F, const ParamBundle& dec);
/// MSE(O, F a^T); accumulates dL/dF and dL/da.
double feature_loss(const Matrix& O, const Matrix& F, const ParamBundle& dec, Matrix* dF, ParamBundle* ddec);

// ---- LSTM ----------------------------------------------------------------

struct LstmState {
  Vector h;
  Vector c;
};

LstmState zero_state(std::size_t hidden);

/// Wx (4H x in), Wh (4H x H), b (4H x 1) with gate blocks i, f, g, o; scalar
/// readout w_out (1 x H), b_out (1 x 1).
ParamBundle make_lstm(std::size_t in, std::size_t hidden, RngStream& rng);
std::size_t lstm_hidden(const ParamBundle& p);
std::size_t lstm_input(const ParamBundle& p);

struct LstmStepCache {
  Vector x, h_prev, c_prev, i, f, g, o, c, tanh_c, h;
};

/// One cell step; returns the linear readout of h'.
double lstm_step(const Vector& x, const LstmState& st, const ParamBundle& p, LstmState& next,
                 LstmStepCache* cache = nullptr);

struct LstmSequence {
  std::vector<double> raw;
  std::vector<LstmStepCache> steps;
  LstmState final;
};

LstmSequence lstm_run(const std::vector<Vector>& xs, const LstmState& start, const ParamBundle& p);

/// Backpropagation through time given dL/draw_k; returns parameter gradients
/// and fills dL/dx_k.
ParamBundle lstm_backward(const ParamBundle& p, const LstmSequence& seq, const std::vector<double>& draw,
                          std::vector<Vector>* dx);

// ---- losses --------------------------------------------------------------

double loss_mse(const Matrix& pred, const Matrix& target);
double loss_bce(const Matrix& probs, const Matrix& targets);

/// Mean softmax cross-entropy over `rows` (all rows when empty); fills dL/dlogits.
double softmax_cross_entropy(const Matrix& logits, const std::vector<double>& classes, const std::vector<NodeId>& rows,
                             Matrix* dlogits);
/// Mean squared error of column 0 over `rows`; fills dL/dpred.
double masked_mse(const Matrix& pred, const std::vector<double>& target, const std::vector<NodeId>& rows,
                  Matrix* dpred);

}  // namespace evograph::nn
