// SPDX-License-Identifier: Apache-2.0
#include "evograph/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace evograph {

LinearFit linear_fit(const std::vector<std::pair<double, double>>& points) {
  std::set<double> times;
  for (const auto& p : points) times.insert(p.first);
  if (times.size() < 2) throw Error(ErrorCode::DegenerateFit, "linear fit needs two distinct times");
  const double n = static_cast<double>(points.size());
  double mt = 0, ml = 0;
  for (const auto& [t, l] : points) mt += t / n, ml += l / n;
  double stl = 0, stt = 0;
  for (const auto& [t, l] : points) stl += (t - mt) * (l - ml), stt += (t - mt) * (t - mt);
  LinearFit f;
  f.slope = stl / stt;
  f.intercept = ml - f.slope * mt;
  return f;
}

double linear_predict(const LinearFit& fit, double time) { return std::max(0.0, fit.intercept + fit.slope * time); }

double average_confidence(const Matrix& logits) {
  if (logits.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "no rows");
  double total = 0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    total += 1.0 / (logits.row(r).array() - mx).exp().sum();
  }
  return total / static_cast<double>(logits.rows());
}

DocFit doc_fit(Task task, const std::vector<double>& confidences, const std::vector<double>& losses) {
  if (task != Task::classification) {
    throw Error(ErrorCode::NotClassification, "difference of confidences only applies to classification");
  }
  if (confidences.size() != losses.size() || confidences.size() < 2) {
    throw Error(ErrorCode::InsufficientHistory, "DoC needs at least two paired frames");
  }
  DocFit f;
  f.ac0 = confidences[0];
  f.l0 = losses[0];
  double sxy = 0, sxx = 0;
  for (std::size_t k = 1; k < confidences.size(); ++k) {
    const double dx = confidences[k] - f.ac0;
    sxy += dx * (losses[k] - f.l0);
    sxx += dx * dx;
  }
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  return f;
}

double doc_predict(const DocFit& fit, double confidence) {
  return std::max(0.0, fit.l0 + fit.slope * (confidence - fit.ac0));
}

MaskPolicy parse_mask_policy(const std::string& name) {
  if (name == "new_arrivals") return MaskPolicy::new_arrivals;
  if (name == "population") return MaskPolicy::population;
  throw Error(ErrorCode::ConfigInvalid, "unknown mask policy '" + name + "'");
}

std::string to_string(MaskPolicy p) { return p == MaskPolicy::new_arrivals ? "new_arrivals" : "population"; }

std::vector<NodeId> label_mask(std::size_t n_prev, std::size_t n, double fraction, MaskPolicy policy, RngStream& rng) {
  if (!(fraction > 0 && fraction <= 1)) throw Error(ErrorCode::ConfigInvalid, "label fraction must lie in (0, 1]");
  std::size_t lo = 0;
  if (policy == MaskPolicy::new_arrivals && n_prev < n) lo = n_prev;
  const std::size_t pool = n - lo;
  const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(pool) - 1e-9));
  const auto picked = rng.sample_without_replacement(pool, std::max<std::size_t>(k, 1));
  std::vector<NodeId> mask;
  mask.reserve(picked.size());
  for (auto p : picked) mask.push_back(static_cast<NodeId>(lo + p));
  std::sort(mask.begin(), mask.end());
  return mask;
}

std::vector<double> supervised_oracle(const std::vector<smart::EstimatorFrame>& frames, std::size_t first_test,
                                      const std::vector<double>& warmup_losses, smart::EstimatorState state,
                                      const PretrainedModel& model, LabelVault& vault, const smart::SmartConfig& scfg,
                                      const OracleConfig& ocfg, RngStream& mask_rng, RngStream& aug_rng) {
  if (!vault.oracle_granted()) {
    throw Error(ErrorCode::LabelAccessDenied, "supervised oracle requires an explicitly flagged run");
  }
  if (warmup_losses.size() != first_test) throw Error(ErrorCode::DimensionMismatch, "one warm-up loss per frame");
  std::vector<double> history = warmup_losses;
  std::vector<double> out;
  for (std::size_t t = first_test; t < frames.size(); ++t) {
    const auto& f = frames[t];
    auto mrng = mask_rng.child("t" + std::to_string(t));
    const auto mask = label_mask(frames[t - 1].graph.n, f.graph.n, ocfg.label_fraction, ocfg.policy, mrng);
    const Labels bought = vault.subset(static_cast<int>(t), mask, Purpose::SupervisedOracle);
    Labels padded;
    padded.task = bought.task;
    padded.values.assign(f.graph.n, 0.0);
    for (std::size_t i = 0; i < mask.size(); ++i) padded.values[mask[i]] = bought.values[i];
    const auto L = normalize(f.graph);
    history.push_back(prediction_loss(model.predict(L, f.graph.features), padded, mask));

    const std::size_t end = t + 1;
    const std::size_t begin = end > ocfg.window ? end - ocfg.window : 0;
    std::vector<const smart::EstimatorFrame*> window;
    std::vector<double> losses;
    for (std::size_t k = begin; k < end; ++k) {
      window.push_back(&frames[k]);
      losses.push_back(history[k]);
    }
    // Train on the window ending at t, then replay the earlier frames to
    // rebuild the recurrent state and predict t.
    std::vector<const smart::EstimatorFrame*> context(window.begin(), window.end() - 1);
    auto rng = aug_rng.child("t" + std::to_string(t));
    smart::supervised_epochs(state, window, losses, scfg, ocfg.epochs, rng);
    state.lstm = nn::zero_state(nn::lstm_hidden(state.predictor));
    for (const auto* c : context) smart::predict(state, *c);
    out.push_back(smart::predict(state, f));
  }
  return out;
}

}  // namespace evograph
