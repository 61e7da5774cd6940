// SPDX-License-Identifier: Apache-2.0
#include "evograph/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "evograph/audit.hpp"
#include "evograph/io.hpp"
#include "evograph/kernels.hpp"
#include "evograph/metrics.hpp"

namespace evograph {

namespace {

std::string tag(const char* prefix, std::size_t k) { return prefix + std::to_string(k); }

Labels make_labels(const ExperimentConfig& cfg, const GraphFrame& f) {
  Labels l;
  l.task = Task::regression;
  l.values = cfg.label_model.kind == LabelModel::closeness ? closeness_labels(f)
                                                           : power_labels(f, cfg.label_model.alpha, cfg.label_model.col);
  return l;
}

std::vector<NodeId> draw_mask(const ExperimentConfig& cfg, const std::vector<GraphFrame*>& frames, std::size_t k,
                              RngStream& masks) {
  auto rng = masks.child(tag("t", k));
  const std::size_t prev = k == 0 ? 0 : frames[k - 1]->n;
  return label_mask(prev, frames[k]->n, cfg.warmup_mask.fraction, cfg.warmup_mask.policy, rng);
}

// Training labels for G, drawn apart from the frame-0 observation mask so the
// frame-0 observed loss is not in-sample.
std::vector<NodeId> pretrain_mask(const ExperimentConfig& cfg, const GraphFrame& f0, const RngStream& masks) {
  auto rng = masks.child("pretrain");
  return label_mask(0, f0.n, cfg.pretrain.label_fraction, MaskPolicy::population, rng);
}

double effective_m(const GeneratorConfig& g) {
  if (g.kind == GeneratorKind::ba) return static_cast<double>(g.m);
  return g.p * static_cast<double>(g.m1) + (1.0 - g.p) * static_cast<double>(g.m2);
}

double pick_alpha(const ExperimentConfig& cfg, const GraphFrame& f0, const std::vector<double>& y0) {
  if (cfg.theory.alpha) return *cfg.theory.alpha;
  if (cfg.label_model.kind == LabelModel::power) return cfg.label_model.alpha;
  return degree_exponent(f0, y0);
}

Matrix rows_of(const Matrix& m, const std::vector<NodeId>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

Vector column0(const Matrix& m) { return m.col(0); }

MethodScore score(const std::string& name, const std::vector<double>& pred, const std::vector<double>& actual) {
  const LossTrace trace{pred, actual};
  return MethodScore{name, mape(trace), rmse(trace), mae(trace)};
}

// Everything after the data is in hand. Frames carry no labels; the vault
// holds them.
RunResult pipeline(const ExperimentConfig& cfg, std::vector<GraphSnapshot> frames, LabelVault& vault,
                   std::uint64_t seed) {
  const std::size_t T = frames.size();
  const std::size_t td = cfg.t_deploy;
  if (T < td + 2) throw Error(ErrorCode::InsufficientHistory, "need at least t_deploy + 2 frames");
  const RngStream root(seed, "experiment");
  auto masks = root.child("masks");
  auto init = root.child("init");
  auto aug = root.child("augmentation");

  std::vector<GraphFrame*> view;
  for (auto& f : frames) view.push_back(&f);
  for (std::size_t k = 0; k <= td; ++k) {
    if (frames[k].mask.empty()) frames[k].mask = draw_mask(cfg, view, k, masks);
  }

  RunResult r;
  r.seed = seed;

  // Pretrain G on frame 0.
  const auto L0 = normalize(frames[0]);
  PretrainedModel model = PretrainedModel::linear_gcn(Vector());
  {
    const auto rows = pretrain_mask(cfg, frames[0], masks);
    const Labels bought = vault.subset(0, rows, Purpose::Warmup);
    std::vector<double> padded(frames[0].n, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) padded[rows[i]] = bought.values[i];
    if (cfg.pretrain.backbone == Backbone::linear_gcn) {
      if (bought.task != Task::regression) throw Error(ErrorCode::ConfigInvalid, "linear_gcn needs regression labels");
      const Vector Y = Eigen::Map<const Vector>(padded.data(), static_cast<Eigen::Index>(padded.size()));
      model = PretrainedModel::linear_gcn(fit_linear_gcn(L0, frames[0].features, Y, rows));
    } else {
      auto prng = init.child("pretrain");
      model = train_gcn_classifier(L0, frames[0].features, padded, rows, cfg.pretrain.gcn, prng);
    }
    if (model.task() == Task::regression) r.alpha_used = pick_alpha(cfg, frames[0], vault.all(0, Purpose::Warmup).values);
  }

  std::vector<Matrix> pred(T);
  std::vector<smart::EstimatorFrame> est(T);
  for (std::size_t k = 0; k < T; ++k) {
    est[k] = smart::make_frame(frames[k], model);
    pred[k] = model.predict(normalize(frames[k]), frames[k].features);
  }

  // Observed losses on the warm-up frames, each on its own fresh mask.
  for (std::size_t k = 0; k <= td; ++k) {
    const Labels seen = vault.subset(static_cast<int>(k), frames[k].mask, Purpose::Warmup);
    r.observed.push_back(prediction_loss(rows_of(pred[k], frames[k].mask), seen, {}));
  }

  std::vector<smart::EstimatorFrame> warm(est.begin(), est.begin() + static_cast<long>(td + 1));
  auto smart_init = init.child("smart");
  auto warm_aug = aug.child("warmup");
  smart::EstimatorState st = smart::warmup(warm, r.observed, cfg.smart, smart_init, warm_aug);

  if (cfg.baselines.supervised) {
    OracleConfig oc;
    oc.label_fraction = cfg.warmup_mask.fraction;
    oc.policy = cfg.warmup_mask.policy;
    oc.epochs = cfg.baselines.supervised_epochs;
    oc.window = cfg.baselines.supervised_window;
    auto mrng = masks.child("oracle");
    auto arng = aug.child("oracle");
    r.supervised = supervised_oracle(est, td + 1, r.observed, st, model, vault, cfg.smart, oc, mrng, arng);
  }

  LinearFit lin;
  if (cfg.baselines.linear) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k <= td; ++k) pts.emplace_back(static_cast<double>(k), r.observed[k]);
    lin = linear_fit(pts);
  }
  const bool use_doc = cfg.baselines.doc && model.task() == Task::classification;
  DocFit doc;
  if (use_doc) {
    std::vector<double> conf;
    for (std::size_t k = 0; k <= td; ++k) conf.push_back(average_confidence(pred[k]));
    doc = doc_fit(model.task(), conf, r.observed);
  }
  const bool synthetic = cfg.generator.has_value() && model.task() == Task::regression;
  Theorem2Inputs t2;
  if (synthetic) {
    t2.m = effective_m(*cfg.generator);
    t2.n0 = static_cast<double>(frames[0].n);
    t2.alpha = r.alpha_used;
    t2.Q = degree_histogram(frames[0]);
  }

  auto ft = aug.child("finetune");
  for (std::size_t tau = td + 1; tau < T; ++tau) {
    auto rng = ft.child(tag("t", tau));
    smart::finetune(st, est[tau], cfg.smart, rng);
    r.tau.push_back(static_cast<int>(tau));
    r.smart.push_back(smart::predict(st, est[tau]));
    const Labels& truth = vault.all(static_cast<int>(tau), Purpose::Scoring);
    r.actual.push_back(smart::full_loss(pred[tau], truth));
    if (model.task() == Task::regression) r.realized_error.push_back(realized_relative_error(column0(pred[tau]), truth.values));
    if (cfg.baselines.linear) r.linear.push_back(linear_predict(lin, static_cast<double>(tau)));
    if (use_doc) r.doc.push_back(doc_predict(doc, average_confidence(pred[tau])));
    if (synthetic) {
      t2.t = static_cast<double>(tau);
      r.theorem2.push_back(graph_error_t2(t2, cfg.theory.variant));
    }
  }

  r.scores.push_back(score("smart", r.smart, r.actual));
  if (!r.linear.empty()) r.scores.push_back(score("linear", r.linear, r.actual));
  if (!r.doc.empty()) r.scores.push_back(score("doc", r.doc, r.actual));
  if (!r.supervised.empty()) r.scores.push_back(score("supervised", r.supervised, r.actual));
  r.audit = vault.log();
  r.audit_violations = vault.violations();
  return r;
}

}  // namespace

EvolvingGraph generate_sequence(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (!cfg.generator) throw Error(ErrorCode::ConfigInvalid, "no generator configured");
  const auto& gc = *cfg.generator;
  const RngStream root(seed, "experiment");
  auto gen = root.child("graph-gen");
  auto feat = root.child("features");
  auto masks = root.child("masks");
  EvolvingGraph g = gc.kind == GeneratorKind::ba
                        ? ba_evolve(BaConfig{gc.n0, gc.m, gc.horizon, gc.seed_graph}, gen)
                        : dual_ba_evolve(DualBaConfig{gc.n0, gc.m1, gc.m2, gc.p, gc.horizon, gc.seed_graph}, gen);
  gaussian_features(g, gc.feature_dim, feat);
  std::vector<GraphFrame*> view;
  for (auto& s : g.snapshots) view.push_back(&s);
  for (std::size_t k = 0; k < g.snapshots.size(); ++k) {
    auto& s = g.snapshots[k];
    s.labels = make_labels(cfg, s);
    if (k <= cfg.t_deploy) s.mask = draw_mask(cfg, view, k, masks);
  }
  return g;
}

RunResult run_on_sequence(const ExperimentConfig& cfg, const EvolvingGraph& g, std::uint64_t seed) {
  LabelVault vault(static_cast<int>(cfg.t_deploy), cfg.baselines.supervised);
  std::vector<GraphSnapshot> frames = g.snapshots;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (!frames[k].labels) throw Error(ErrorCode::MissingLabels, "frame " + std::to_string(k) + " has no labels");
    vault.deposit(static_cast<int>(k), std::move(*frames[k].labels));
    frames[k].labels.reset();
  }
  return pipeline(cfg, std::move(frames), vault, seed);
}

RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  if (cfg.generator) return run_on_sequence(cfg, generate_sequence(cfg, seed), seed);
  const auto& dir = *cfg.snapshot_dir;
  LoadOptions opts;
  opts.labels = false;
  EvolvingGraph g = load_sequence(dir, opts);
  LabelVault vault(static_cast<int>(cfg.t_deploy), cfg.baselines.supervised);
  for (std::size_t k = 0; k < g.snapshots.size(); ++k) {
    vault.deposit_file(static_cast<int>(k), dir, g.snapshots[k].n);
    if (k <= cfg.t_deploy) g.snapshots[k].mask = read_mask_file(dir, k);
  }
  vault.watch_label_files();
  return pipeline(cfg, std::move(g.snapshots), vault, seed);
}

std::vector<SummaryRow> summarize(const std::vector<RunResult>& runs) {
  std::vector<SummaryRow> out;
  if (runs.empty()) return out;
  for (const auto& first : runs.front().scores) {
    SummaryRow row;
    row.method = first.method;
    std::vector<double> mapes;
    for (const auto& r : runs) {
      auto it = std::find_if(r.scores.begin(), r.scores.end(), [&](const MethodScore& s) { return s.method == row.method; });
      if (it == r.scores.end()) throw Error(ErrorCode::DimensionMismatch, "runs disagree on methods");
      mapes.push_back(it->mape);
      row.rmse += it->rmse;
      row.mae += it->mae;
    }
    row.seeds = runs.size();
    row.mape = mean(mapes);
    row.rmse /= static_cast<double>(runs.size());
    row.mae /= static_cast<double>(runs.size());
    row.se = runs.size() >= 2 ? standard_error(mapes) : std::nan("");
    out.push_back(row);
  }
  return out;
}

std::vector<RunResult> multi_seed(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds) {
  if (seeds.size() < 2) throw Error(ErrorCode::TooFewSamples, "multi_seed needs at least two seeds");
  validate(cfg);
  std::vector<RunResult> out(seeds.size());
  int cap = kernels::thread_cap_from_env();
  if (cap <= 0) cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cap), seeds.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i) out[i] = run_experiment(cfg, seeds[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      // Parallelism lives across seeds here; kernels run serially per worker.
      omp_set_num_threads(1);
      for (std::size_t i = next++; i < seeds.size(); i = next++) {
        try {
          out[i] = run_experiment(cfg, seeds[i]);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<CurveRow> theory_curve(const ExperimentConfig& cfg) {
  if (!cfg.generator) throw Error(ErrorCode::ConfigInvalid, "theory-curve needs a generator");
  if (cfg.theory.seeds < 1) throw Error(ErrorCode::ConfigInvalid, "theory.seeds must be >= 1");
  validate(cfg);
  const std::size_t T = cfg.generator->horizon + 1;
  std::vector<std::vector<double>> realized(T), bound(T);
  for (std::size_t s = 0; s < cfg.theory.seeds; ++s) {
    const auto g = generate_sequence(cfg, cfg.seed + s);
    const auto& f0 = g.snapshots[0];
    const auto& y0 = f0.labels->values;
    const auto L0 = normalize(f0);
    const Vector Y = Eigen::Map<const Vector>(y0.data(), static_cast<Eigen::Index>(y0.size()));
    const Vector W = fit_linear_gcn(L0, f0.features, Y);
    Theorem2Inputs in;
    in.m = effective_m(*cfg.generator);
    in.n0 = static_cast<double>(f0.n);
    in.alpha = pick_alpha(cfg, f0, y0);
    in.Q = degree_histogram(f0);
    for (std::size_t tau = cfg.t_deploy + 1; tau < T; ++tau) {
      const auto& f = g.snapshots[tau];
      const auto L = normalize(f);
      Matrix P;
      kernels::propagate(L, f.features, P);
      const Vector LX = P * W;
      realized[tau].push_back(realized_relative_error(LX, f.labels->values));
      in.t = static_cast<double>(tau);
      bound[tau].push_back(graph_error_t2(in, cfg.theory.variant));
    }
  }
  std::vector<CurveRow> rows;
  for (std::size_t tau = cfg.t_deploy + 1; tau < T; ++tau) {
    CurveRow row;
    row.tau = tau;
    row.bound = mean(bound[tau]);
    row.estimate = mean(realized[tau]);
    row.se = realized[tau].size() >= 2 ? standard_error(realized[tau]) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::vector<CurveRow> distortion_curve(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto& dc = cfg.distortion;
  const std::size_t d = cfg.generator ? cfg.generator->feature_dim : 8;
  const RngStream root(cfg.seed, "distortion");
  auto gen = root.child("graph-gen");
  GraphFrame g0 = ba_final(BaConfig{dc.prefix_n0, dc.prefix_m, dc.prefix_steps, SeedGraph::ring}, gen);
  g0.time_index = 0;
  auto feat = root.child("features");
  g0.features.resize(static_cast<Eigen::Index>(g0.n), static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < g0.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < g0.features.cols(); ++c) g0.features(r, c) = feat.normal();
  }
  std::size_t node = 0;
  if (dc.node >= 0) {
    node = static_cast<std::size_t>(dc.node);
  } else {
    const auto deg = degrees(g0.n, g0.edges);
    node = static_cast<std::size_t>(std::max_element(deg.begin(), deg.end()) - deg.begin());
  }
  auto paths_rng = root.child("paths");
  const auto evo = continuations(g0, dc.prefix_m, dc.taus, dc.mc.evolution_draws, paths_rng);
  auto init = root.child("init");
  const auto theta = random_shallow_gcn(dc.mc.hidden, d, init);
  auto pert = root.child("perturbation");
  std::vector<CurveRow> rows;
  for (std::size_t tau = 1; tau <= dc.taus; ++tau) {
    auto rng = pert.child(tag("tau", tau));
    const auto est = empirical_distortion(evo, theta, dc.mc, node, tau, rng);
    rows.push_back(CurveRow{tau, distortion_lower_bound(evo, dc.mc, node, tau), est.mean, est.se});
  }
  return rows;
}

}  // namespace evograph
