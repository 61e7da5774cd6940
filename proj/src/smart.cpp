// SPDX-License-Identifier: Apache-2.0
#include "evograph/smart.hpp"

#include <cmath>
#include <limits>

#include "evograph/io.hpp"
#include "evograph/nn/checkpoint.hpp"

namespace evograph::smart {

static_assert(!CarriesLabels<EstimatorFrame>, "estimator frames must not carry labels");

namespace {

nn::GatSpec gat_spec(const EstimatorState& st) { return {st.heads, 0.2}; }

std::string epoch_key(const char* phase, std::size_t e) { return std::string(phase) + std::to_string(e); }

}  // namespace

void validate(const SmartConfig& cfg) {
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "lambda must lie in [0, 1]");
  if (cfg.rnn_dim < 1 || cfg.lstm_hidden < 1 || cfg.gat_heads < 1) {
    throw Error(ErrorCode::ConfigInvalid, "rnn_dim, lstm_hidden and gat_heads must be >= 1");
  }
  if (!(cfg.augmentation.p >= 0.0 && cfg.augmentation.p <= 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, "augmentation p must lie in [0, 1]");
  }
  if (!(cfg.lr > 0)) throw Error(ErrorCode::ConfigInvalid, "lr must be positive");
  if (cfg.patience < 1) throw Error(ErrorCode::ConfigInvalid, "patience must be >= 1");
}

EstimatorFrame make_frame(const GraphFrame& g, const PretrainedModel& model) {
  EstimatorFrame f;
  f.graph = g;
  const auto L = normalize(g);
  f.adj = L.adj;
  f.O = model.embed(L, g.features);
  return f;
}

EstimatorState init_state(std::size_t embedding_dim, const SmartConfig& cfg, RngStream& rng) {
  validate(cfg);
  EstimatorState st;
  auto phi_rng = rng.child("phi");
  auto lstm_rng = rng.child("lstm");
  auto dec_rng = rng.child("decoder");
  st.phi = nn::make_gat(embedding_dim, cfg.rnn_dim, cfg.gat_heads, phi_rng);
  st.predictor = nn::make_lstm(cfg.rnn_dim, cfg.lstm_hidden, lstm_rng);
  st.decoder = nn::make_decoder(embedding_dim, cfg.rnn_dim, dec_rng);
  st.lstm = nn::zero_state(cfg.lstm_hidden);
  st.adam_phi = nn::make_adam(st.phi, cfg.lr);
  st.adam_predictor = nn::make_adam(st.predictor, cfg.lr);
  st.adam_decoder = nn::make_adam(st.decoder, cfg.lr);
  st.lambda = cfg.lambda;
  st.rnn_dim = cfg.rnn_dim;
  st.heads = cfg.gat_heads;
  return st;
}

double observed_loss(const Matrix& prediction, const GraphSnapshot& s) {
  if (s.mask.empty()) throw Error(ErrorCode::EmptyMask, "observed loss needs a non-empty mask");
  if (!s.labels) throw Error(ErrorCode::MissingLabels, "masked snapshot without labels");
  return prediction_loss(prediction, *s.labels, s.mask);
}

double full_loss(const Matrix& prediction, const Labels& labels) {
  if (labels.values.size() != static_cast<std::size_t>(prediction.rows())) {
    throw Error(ErrorCode::MissingLabels, "full loss needs a label for every node");
  }
  return prediction_loss(prediction, labels, {});
}

ReconParts recon_loss(const EstimatorState& st, const EstimatorFrame& f, const AugmentationSpec& aug, RngStream& rng,
                      ReconGrads* grads, double scale) {
  // The view carries O as its feature matrix so feature masking hides
  // embedding rows from phi, while the reconstruction target stays clean.
  GraphFrame view;
  view.n = f.graph.n;
  view.edges = f.graph.edges;
  view.features = f.O;
  view.time_index = f.graph.time_index;
  const GraphFrame seen = augment(view, aug, rng);
  const Adjacency adj = build_adjacency(seen.n, seen.edges);
  const nn::PairSet pairs = nn::sample_pairs(f.adj, f.graph.edges, rng);

  const auto spec = gat_spec(st);
  nn::GatCache cache;
  const Matrix F = nn::gat_forward(adj, seen.features, st.phi, spec, grads ? &cache : nullptr);
  Matrix dFs, dFf;
  nn::ParamBundle ddec;
  if (grads) {
    dFs = Matrix::Zero(F.rows(), F.cols());
    dFf = Matrix::Zero(F.rows(), F.cols());
    ddec = st.decoder.zeros_like();
  }
  ReconParts parts;
  parts.structure = nn::structure_loss(F, pairs, grads ? &dFs : nullptr);
  parts.feature = nn::feature_loss(f.O, F, st.decoder, grads ? &dFf : nullptr, grads ? &ddec : nullptr);
  const double lam = st.lambda;
  parts.total = lam * parts.structure + (1.0 - lam) * parts.feature;
  if (grads) {
    Matrix dF = (1.0 - lam) * dFf;
    if (lam != 0.0) dF += lam * dFs;
    grads->phi.axpy(scale, nn::gat_backward(st.phi, spec, cache, dF));
    grads->decoder.axpy(scale * (1.0 - lam), ddec);
  }
  return parts;
}

Vector pooled_input(const Matrix& F) {
  if (F.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "cannot pool an empty embedding");
  return F.colwise().mean().transpose();
}

Vector frame_input(const EstimatorState& st, const EstimatorFrame& f) {
  return pooled_input(nn::gat_forward(f.adj, f.O, st.phi, gat_spec(st)));
}

double warmup_objective(const EstimatorState& st, const std::vector<const EstimatorFrame*>& frames,
                        const std::vector<double>& losses, const AugmentationSpec& aug, RngStream& aug_rng,
                        WarmupGrads* grads) {
  const std::size_t K = frames.size();
  if (losses.size() != K) throw Error(ErrorCode::DimensionMismatch, "one observed loss per frame required");
  const auto spec = gat_spec(st);
  std::vector<nn::GatCache> caches(grads ? K : 0);
  std::vector<Vector> xs(K);
  for (std::size_t k = 0; k < K; ++k) {
    const Matrix F = nn::gat_forward(frames[k]->adj, frames[k]->O, st.phi, spec, grads ? &caches[k] : nullptr);
    xs[k] = pooled_input(F);
  }
  const auto seq = nn::lstm_run(xs, nn::zero_state(nn::lstm_hidden(st.predictor)), st.predictor);
  double supervised = 0;
  std::vector<double> draw(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double pred = nn::softplus(seq.raw[k]);
    const double diff = pred - losses[k];
    supervised += diff * diff;
    draw[k] = 2.0 * diff * nn::sigmoid(seq.raw[k]);
  }
  if (grads) {
    grads->phi = st.phi.zeros_like();
    grads->decoder = st.decoder.zeros_like();
    std::vector<Vector> dx;
    grads->predictor = nn::lstm_backward(st.predictor, seq, draw, &dx);
    for (std::size_t k = 0; k < K; ++k) {
      const auto n = static_cast<Eigen::Index>(frames[k]->graph.n);
      const Matrix dF = Matrix::Ones(n, 1) * (dx[k].transpose() / static_cast<double>(n));
      grads->phi.axpy(1.0, nn::gat_backward(st.phi, spec, caches[k], dF));
    }
  }
  double recon = 0;
  ReconGrads rg;
  if (grads) rg = {grads->phi.zeros_like(), grads->decoder.zeros_like()};
  for (std::size_t k = 0; k < K; ++k) {
    auto rng = aug_rng.child("k" + std::to_string(k));
    recon += recon_loss(st, *frames[k], aug, rng, grads ? &rg : nullptr, 1.0 / static_cast<double>(K)).total;
  }
  if (grads) {
    grads->phi.axpy(1.0, rg.phi);
    grads->decoder.axpy(1.0, rg.decoder);
  }
  return supervised + recon / static_cast<double>(K);
}

namespace {

void thread_state(EstimatorState& st, const std::vector<const EstimatorFrame*>& frames) {
  st.lstm = nn::zero_state(nn::lstm_hidden(st.predictor));
  for (const auto* f : frames) {
    nn::LstmState next;
    nn::lstm_step(frame_input(st, *f), st.lstm, st.predictor, next);
    st.lstm = std::move(next);
  }
}

// Runs up to `epochs` Adam epochs on the warm-up objective, restoring the
// best epoch's parameters. Returns the number of epochs run.
std::size_t train_supervised(EstimatorState& st, const std::vector<const EstimatorFrame*>& frames,
                             const std::vector<double>& losses, const SmartConfig& cfg, std::size_t epochs,
                             RngStream& aug_rng, WarmupReport* report) {
  double best = std::numeric_limits<double>::infinity();
  EstimatorState best_state = st;
  std::size_t best_epoch = 0, run = 0;
  for (std::size_t e = 0; e < epochs; ++e) {
    auto rng = aug_rng.child(epoch_key("e", e));
    WarmupGrads g;
    const double obj = warmup_objective(st, frames, losses, cfg.augmentation, rng, &g);
    if (report) report->objective.push_back(obj);
    if (obj < best) {
      best = obj;
      best_state = st;
      best_epoch = e;
    } else if (e - best_epoch >= cfg.patience) {
      break;
    }
    nn::adam_update(st.phi, g.phi, st.adam_phi);
    nn::adam_update(st.predictor, g.predictor, st.adam_predictor);
    nn::adam_update(st.decoder, g.decoder, st.adam_decoder);
    ++run;
  }
  if (epochs > 0) {
    const long steps = st.warmup_steps + static_cast<long>(run);
    st = std::move(best_state);
    st.warmup_steps = steps;
  }
  if (report) report->best_epoch = best_epoch;
  return run;
}

}  // namespace

EstimatorState warmup(const std::vector<EstimatorFrame>& frames, const std::vector<double>& losses,
                      const SmartConfig& cfg, RngStream& init_rng, RngStream& aug_rng, WarmupReport* report) {
  validate(cfg);
  if (frames.size() < 2) throw Error(ErrorCode::InsufficientHistory, "warm-up needs at least two labelled frames");
  if (losses.size() != frames.size()) throw Error(ErrorCode::DimensionMismatch, "one observed loss per frame required");
  EstimatorState st = init_state(static_cast<std::size_t>(frames.front().O.cols()), cfg, init_rng);
  // Start the readout at the mean observed loss so the softplus head begins
  // in the right range instead of near log 2.
  double mean = 0;
  for (double l : losses) mean += l / static_cast<double>(losses.size());
  st.predictor["b_out"](0, 0) = nn::softplus_inverse(std::max(mean, 1e-12));
  std::vector<const EstimatorFrame*> ptrs;
  for (const auto& f : frames) ptrs.push_back(&f);
  train_supervised(st, ptrs, losses, cfg, cfg.warmup_epochs, aug_rng, report);
  thread_state(st, ptrs);
  return st;
}

void supervised_epochs(EstimatorState& st, const std::vector<const EstimatorFrame*>& frames,
                       const std::vector<double>& losses, const SmartConfig& cfg, std::size_t epochs,
                       RngStream& aug_rng) {
  if (frames.empty()) throw Error(ErrorCode::InsufficientHistory, "no frames to train on");
  train_supervised(st, frames, losses, cfg, epochs, aug_rng, nullptr);
  thread_state(st, frames);
}

void finetune(EstimatorState& st, const EstimatorFrame& f, const SmartConfig& cfg, RngStream& aug_rng) {
  if (cfg.finetune_epochs == 0) return;
  double best = std::numeric_limits<double>::infinity();
  nn::ParamBundle best_phi = st.phi, best_dec = st.decoder;
  std::size_t best_epoch = 0, run = 0;
  for (std::size_t e = 0; e < cfg.finetune_epochs; ++e) {
    auto rng = aug_rng.child(epoch_key("e", e));
    ReconGrads g{st.phi.zeros_like(), st.decoder.zeros_like()};
    const double obj = recon_loss(st, f, cfg.augmentation, rng, &g).total;
    if (obj < best) {
      best = obj;
      best_phi = st.phi;
      best_dec = st.decoder;
      best_epoch = e;
    } else if (e - best_epoch >= cfg.patience) {
      break;
    }
    nn::adam_update(st.phi, g.phi, st.adam_phi);
    nn::adam_update(st.decoder, g.decoder, st.adam_decoder);
    ++run;
  }
  st.phi = std::move(best_phi);
  st.decoder = std::move(best_dec);
  st.finetune_steps += static_cast<long>(run);
}

double predict(EstimatorState& st, const EstimatorFrame& f) {
  nn::LstmState next;
  const double raw = nn::lstm_step(frame_input(st, f), st.lstm, st.predictor, next);
  st.lstm = std::move(next);
  return nn::softplus(raw);
}

double peek(const EstimatorState& st, const EstimatorFrame& f) {
  nn::LstmState next;
  return nn::softplus(nn::lstm_step(frame_input(st, f), st.lstm, st.predictor, next));
}

namespace {

nn::ParamBundle adam_bundle(nn::Component tag, const nn::AdamState& a) {
  nn::ParamBundle b(tag);
  b.add("m", 1, a.m.size()).row(0) = a.m.transpose();
  b.add("v", 1, a.v.size()).row(0) = a.v.transpose();
  return b;
}

nn::AdamState read_adam(const nn::Checkpoint& ck, const std::string& label) {
  nn::AdamState a;
  const auto& b = ck.bundle(label);
  a.m = b["m"].row(0).transpose();
  a.v = b["v"].row(0).transpose();
  a.step = std::stol(ck.get(label + ".step"));
  a.lr = std::stod(ck.get(label + ".lr"));
  return a;
}

}  // namespace

void save_state(const EstimatorState& st, const std::filesystem::path& path) {
  nn::Checkpoint ck;
  ck.header = {{"lambda", format_double(st.lambda)},
               {"rnn_dim", std::to_string(st.rnn_dim)},
               {"heads", std::to_string(st.heads)},
               {"pool", st.pool},
               {"warmup_steps", std::to_string(st.warmup_steps)},
               {"finetune_steps", std::to_string(st.finetune_steps)}};
  const std::pair<const char*, const nn::AdamState*> adams[] = {
      {"adam_phi", &st.adam_phi}, {"adam_predictor", &st.adam_predictor}, {"adam_decoder", &st.adam_decoder}};
  for (const auto& [label, a] : adams) {
    ck.header.emplace_back(std::string(label) + ".step", std::to_string(a->step));
    ck.header.emplace_back(std::string(label) + ".lr", format_double(a->lr));
  }
  ck.bundles.emplace_back("phi", st.phi);
  ck.bundles.emplace_back("predictor", st.predictor);
  ck.bundles.emplace_back("decoder", st.decoder);
  nn::ParamBundle lstm(nn::Component::lstm_M);
  lstm.add("h", st.lstm.h.size(), 1) = st.lstm.h;
  lstm.add("c", st.lstm.c.size(), 1) = st.lstm.c;
  ck.bundles.emplace_back("lstm_state", std::move(lstm));
  ck.bundles.emplace_back("adam_phi", adam_bundle(nn::Component::gat_phi, st.adam_phi));
  ck.bundles.emplace_back("adam_predictor", adam_bundle(nn::Component::lstm_M, st.adam_predictor));
  ck.bundles.emplace_back("adam_decoder", adam_bundle(nn::Component::decoder_a, st.adam_decoder));
  nn::save_checkpoint(ck, path);
}

EstimatorState load_state(const std::filesystem::path& path) {
  const auto ck = nn::load_checkpoint(path);
  EstimatorState st;
  st.lambda = std::stod(ck.get("lambda"));
  st.rnn_dim = std::stoul(ck.get("rnn_dim"));
  st.heads = std::stoul(ck.get("heads"));
  st.pool = ck.get("pool");
  st.warmup_steps = std::stol(ck.get("warmup_steps"));
  st.finetune_steps = std::stol(ck.get("finetune_steps"));
  st.phi = ck.bundle("phi");
  st.predictor = ck.bundle("predictor");
  st.decoder = ck.bundle("decoder");
  const auto& lstm = ck.bundle("lstm_state");
  st.lstm.h = lstm["h"].col(0);
  st.lstm.c = lstm["c"].col(0);
  st.adam_phi = read_adam(ck, "adam_phi");
  st.adam_predictor = read_adam(ck, "adam_predictor");
  st.adam_decoder = read_adam(ck, "adam_decoder");
  return st;
}

}  // namespace evograph::smart
