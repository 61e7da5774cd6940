// SPDX-License-Identifier: Apache-2.0
#include "evograph/nn/composites.hpp"

#include <algorithm>

#include "evograph/error.hpp"
#include "evograph/nn/layers.hpp"
#include "evograph/pretrain.hpp"
#include "evograph/smart.hpp"

namespace evograph::nn {

namespace {

// Connected random graph: a random spanning tree plus a few extra edges.
GraphFrame random_graph(std::size_t n, std::size_t d, RngStream& rng) {
  GraphFrame g;
  g.n = n;
  std::vector<Edge> edges;
  for (NodeId v = 1; v < n; ++v) {
    const auto u = static_cast<NodeId>(rng.below(v));
    edges.push_back({u, v});
  }
  for (std::size_t k = 0; k < n / 2; ++k) {
    auto u = static_cast<NodeId>(rng.below(n)), v = static_cast<NodeId>(rng.below(n));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    edges.push_back({u, v});
  }
  g.edges = canonical_edges(edges);
  g.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < g.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.features.cols(); ++c) g.features(r, c) = rng.normal();
  }
  return g;
}

Vector concat(const std::vector<const ParamBundle*>& bundles) {
  std::size_t total = 0;
  for (const auto* b : bundles) total += b->size();
  Vector out(static_cast<Eigen::Index>(total));
  Eigen::Index at = 0;
  for (const auto* b : bundles) {
    const Vector f = b->flatten();
    out.segment(at, f.size()) = f;
    at += f.size();
  }
  return out;
}

void split(const Vector& theta, const std::vector<ParamBundle*>& bundles) {
  Eigen::Index at = 0;
  for (auto* b : bundles) {
    const auto n = static_cast<Eigen::Index>(b->size());
    b->unflatten(theta.segment(at, n));
    at += n;
  }
  if (at != theta.size()) throw Error(ErrorCode::DimensionMismatch, "parameter vector has the wrong length");
}

class Named : public Composite {
 public:
  explicit Named(std::string name) : name_(std::move(name)) {}
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
};

class GcnMse : public Named {
 public:
  GcnMse(RngStream& rng, bool classify) : Named(classify ? "gcn_ce" : "gcn_mse"), classify_(classify) {
    const std::size_t n = 6 + rng.below(6);
    g_ = random_graph(n, 3, rng);
    L_ = normalize(g_);
    const std::size_t out = classify ? 3 : 1;
    params_ = make_gcn({3, 4, out}, rng);
    for (std::size_t i = 0; i < n; ++i) y_.push_back(classify ? static_cast<double>(rng.below(3)) : rng.normal());
    for (NodeId i = 0; i < n; i += 2) rows_.push_back(i);
  }
  Vector parameters() const override { return params_.flatten(); }
  double evaluate(const Vector& theta, Vector* grad) const override {
    ParamBundle p = params_;
    p.unflatten(theta);
    GcnCache cache;
    const Matrix O = gcn_forward(L_, g_.features, p, spec_, &cache);
    Matrix dO = Matrix::Zero(O.rows(), O.cols());
    const double loss = classify_ ? softmax_cross_entropy(O, y_, rows_, &dO) : masked_mse(O, y_, rows_, &dO);
    if (grad) *grad = gcn_backward(L_, p, spec_, cache, dO).flatten();
    return loss;
  }

 private:
  bool classify_;
  GraphFrame g_;
  NormalizedAdjacency L_;
  ParamBundle params_;
  GcnSpec spec_;
  std::vector<double> y_;
  std::vector<NodeId> rows_;
};

class GatLoss : public Named {
 public:
  GatLoss(RngStream& rng, bool feature) : Named(feature ? "gat_feature" : "gat_structure"), feature_(feature) {
    const std::size_t n = 6 + rng.below(6);
    g_ = random_graph(n, 4, rng);
    adj_ = build_adjacency(n, g_.edges);
    spec_.heads = 1 + rng.below(2);
    phi_ = make_gat(4, 3, spec_.heads, rng);
    dec_ = make_decoder(4, 3, rng);
    pairs_ = sample_pairs(adj_, g_.edges, rng);
  }
  Vector parameters() const override { return feature_ ? concat({&phi_, &dec_}) : phi_.flatten(); }
  double evaluate(const Vector& theta, Vector* grad) const override {
    ParamBundle phi = phi_, dec = dec_;
    if (feature_) {
      split(theta, {&phi, &dec});
    } else {
      phi.unflatten(theta);
    }
    GatCache cache;
    const Matrix F = gat_forward(adj_, g_.features, phi, spec_, &cache);
    Matrix dF = Matrix::Zero(F.rows(), F.cols());
    ParamBundle ddec = dec.zeros_like();
    const double loss = feature_ ? feature_loss(g_.features, F, dec, &dF, &ddec) : structure_loss(F, pairs_, &dF);
    if (grad) {
      const ParamBundle dphi = gat_backward(phi, spec_, cache, dF);
      *grad = feature_ ? concat({&dphi, &ddec}) : dphi.flatten();
    }
    return loss;
  }

 private:
  bool feature_;
  GraphFrame g_;
  Adjacency adj_;
  GatSpec spec_;
  ParamBundle phi_, dec_;
  PairSet pairs_;
};

class LstmSeq : public Named {
 public:
  explicit LstmSeq(RngStream& rng) : Named("lstm_sequence") {
    const std::size_t in = 2 + rng.below(3), H = 2 + rng.below(4), K = 2 + rng.below(4);
    p_ = make_lstm(in, H, rng);
    p_["b_out"](0, 0) = rng.normal();
    for (std::size_t k = 0; k < K; ++k) {
      Vector x(static_cast<Eigen::Index>(in));
      for (auto& v : x) v = rng.normal();
      xs_.push_back(x);
      targets_.push_back(rng.uniform(0.1, 1.0));
    }
    start_ = zero_state(H);
    for (auto& v : start_.h) v = rng.uniform(-0.5, 0.5);
    for (auto& v : start_.c) v = rng.uniform(-0.5, 0.5);
  }
  Vector parameters() const override { return p_.flatten(); }
  double evaluate(const Vector& theta, Vector* grad) const override {
    ParamBundle p = p_;
    p.unflatten(theta);
    const auto seq = lstm_run(xs_, start_, p);
    double loss = 0;
    std::vector<double> draw(seq.raw.size());
    for (std::size_t k = 0; k < seq.raw.size(); ++k) {
      const double diff = softplus(seq.raw[k]) - targets_[k];
      loss += diff * diff;
      draw[k] = 2.0 * diff * sigmoid(seq.raw[k]);
    }
    if (grad) *grad = lstm_backward(p, seq, draw, nullptr).flatten();
    return loss;
  }

 private:
  ParamBundle p_;
  std::vector<Vector> xs_;
  std::vector<double> targets_;
  LstmState start_;
};

// Shared fixture for the SMART objectives: a short grown sequence embedded
// by a random linear GCN.
struct SmartFixture {
  std::vector<smart::EstimatorFrame> frames;
  std::vector<double> losses;
  smart::EstimatorState st;
  AugmentationSpec aug;
  RngStream aug_rng{0, "aug"};

  explicit SmartFixture(RngStream& rng, std::size_t K) {
    const std::size_t n0 = 6 + rng.below(4);
    GraphFrame g = random_graph(n0 + K, 2, rng);
    Vector W(2);
    W << rng.normal(), rng.normal();
    const auto model = PretrainedModel::linear_gcn(W);
    for (std::size_t k = 0; k < K; ++k) {
      // Frame k keeps the first n0 + k nodes and the edges among them.
      GraphFrame f;
      f.n = n0 + k;
      for (const auto& e : g.edges) {
        if (e.v < f.n) f.edges.push_back(e);
      }
      f.features = g.features.topRows(static_cast<Eigen::Index>(f.n));
      f.time_index = static_cast<int>(k);
      frames.push_back(smart::make_frame(f, model));
      losses.push_back(rng.uniform(0.1, 1.0));
    }
    smart::SmartConfig cfg;
    cfg.rnn_dim = 3;
    cfg.lstm_hidden = 3;
    cfg.gat_heads = 1 + rng.below(2);
    cfg.lambda = rng.uniform(0.1, 0.9);
    const AugmentKind kinds[] = {AugmentKind::drop_edge, AugmentKind::drop_node, AugmentKind::mask_feature};
    aug = {kinds[rng.below(3)], 0.3};
    st = smart::init_state(static_cast<std::size_t>(frames.front().O.cols()), cfg, rng);
    aug_rng = rng.child("augmentation");
  }
};

class Recon : public Named {
 public:
  explicit Recon(RngStream& rng) : Named("recon"), fx_(rng, 1) {}
  Vector parameters() const override { return concat({&fx_.st.phi, &fx_.st.decoder}); }
  double evaluate(const Vector& theta, Vector* grad) const override {
    smart::EstimatorState st = fx_.st;
    split(theta, {&st.phi, &st.decoder});
    RngStream rng = fx_.aug_rng;  // same augmentation draw on every call
    smart::ReconGrads g{st.phi.zeros_like(), st.decoder.zeros_like()};
    const double loss = smart::recon_loss(st, fx_.frames[0], fx_.aug, rng, grad ? &g : nullptr).total;
    if (grad) *grad = concat({&g.phi, &g.decoder});
    return loss;
  }

 private:
  SmartFixture fx_;
};

class Warmup : public Named {
 public:
  explicit Warmup(RngStream& rng) : Named("warmup"), fx_(rng, 3 + rng.below(2)) {}
  Vector parameters() const override { return concat({&fx_.st.phi, &fx_.st.predictor, &fx_.st.decoder}); }
  double evaluate(const Vector& theta, Vector* grad) const override {
    smart::EstimatorState st = fx_.st;
    split(theta, {&st.phi, &st.predictor, &st.decoder});
    std::vector<const smart::EstimatorFrame*> ptrs;
    for (const auto& f : fx_.frames) ptrs.push_back(&f);
    RngStream rng = fx_.aug_rng;
    smart::WarmupGrads g;
    const double loss = smart::warmup_objective(st, ptrs, fx_.losses, fx_.aug, rng, grad ? &g : nullptr);
    if (grad) *grad = concat({&g.phi, &g.predictor, &g.decoder});
    return loss;
  }

 private:
  SmartFixture fx_;
};

}  // namespace

const std::vector<std::string>& composite_names() {
  static const std::vector<std::string> names = {"gcn_mse", "gcn_ce",        "gat_structure", "gat_feature",
                                                 "recon",   "lstm_sequence", "warmup"};
  return names;
}

std::unique_ptr<Composite> make_composite(const std::string& name, RngStream& rng) {
  if (name == "gcn_mse") return std::make_unique<GcnMse>(rng, false);
  if (name == "gcn_ce") return std::make_unique<GcnMse>(rng, true);
  if (name == "gat_structure") return std::make_unique<GatLoss>(rng, false);
  if (name == "gat_feature") return std::make_unique<GatLoss>(rng, true);
  if (name == "recon") return std::make_unique<Recon>(rng);
  if (name == "lstm_sequence") return std::make_unique<LstmSeq>(rng);
  if (name == "warmup") return std::make_unique<Warmup>(rng);
  throw Error(ErrorCode::UnsupportedComposite, "no backward pass for '" + name + "'");
}

}  // namespace evograph::nn
