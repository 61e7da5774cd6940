// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <set>
#include <sstream>

#include "evograph/harness.hpp"
#include "json.hpp"

namespace evograph {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ConfigInvalid, where + ": " + what);
}

void allow(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where, "expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) bad(where, "unknown key '" + k + "'");
  }
}

template <class T>
void read(const json& j, const char* key, const std::string& where, T& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  const std::string at = where + "." + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) bad(at, "expected a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) bad(at, "expected a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) bad(at, "expected a number");
    out = v.get<double>();
  } else if constexpr (std::is_signed_v<T>) {
    if (!v.is_number_integer()) bad(at, "expected an integer");
    out = v.get<T>();
  } else {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      bad(at, "expected a non-negative integer");
    }
    out = v.get<T>();
  }
}

std::string opt_string(const json& j, const char* key, const std::string& where, const std::string& fallback) {
  std::string s = fallback;
  read(j, key, where, s);
  return s;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
  }
  allow(root, "config", {"data", "task", "label_model", "t_deploy", "warmup_mask", "pretrain", "smart", "baselines",
                         "theory", "distortion", "seed", "output_dir"});
  ExperimentConfig cfg;

  if (!root.contains("data")) bad("config", "missing 'data'");
  const auto& data = root.at("data");
  allow(data, "data", {"generator", "snapshot_dir"});
  if (data.contains("generator") == data.contains("snapshot_dir")) {
    bad("data", "give exactly one of 'generator' or 'snapshot_dir'");
  }
  if (data.contains("generator")) {
    const auto& g = data.at("generator");
    const std::string w = "data.generator";
    allow(g, w, {"kind", "n0", "m", "m1", "m2", "p", "horizon", "seed_graph", "feature_dim"});
    GeneratorConfig gen;
    const auto kind = opt_string(g, "kind", w, "ba");
    if (kind == "ba") gen.kind = GeneratorKind::ba;
    else if (kind == "dual_ba") gen.kind = GeneratorKind::dual_ba;
    else bad(w + ".kind", "expected 'ba' or 'dual_ba'");
    read(g, "n0", w, gen.n0);
    read(g, "m", w, gen.m);
    read(g, "m1", w, gen.m1);
    read(g, "m2", w, gen.m2);
    read(g, "p", w, gen.p);
    read(g, "horizon", w, gen.horizon);
    read(g, "feature_dim", w, gen.feature_dim);
    gen.seed_graph = parse_seed_graph(opt_string(g, "seed_graph", w, "ring"));
    cfg.generator = gen;
  } else {
    std::string dir;
    read(data, "snapshot_dir", "data", dir);
    std::filesystem::path p(dir);
    cfg.snapshot_dir = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }

  const auto task = opt_string(root, "task", "config", "regression");
  if (task == "regression") cfg.task = Task::regression;
  else if (task == "classification") cfg.task = Task::classification;
  else bad("config.task", "expected 'regression' or 'classification'");

  if (root.contains("label_model")) {
    const auto& l = root.at("label_model");
    allow(l, "label_model", {"kind", "alpha", "col"});
    const auto kind = opt_string(l, "kind", "label_model", "closeness");
    if (kind == "closeness") cfg.label_model.kind = LabelModel::closeness;
    else if (kind == "power") cfg.label_model.kind = LabelModel::power;
    else bad("label_model.kind", "expected 'closeness' or 'power'");
    read(l, "alpha", "label_model", cfg.label_model.alpha);
    read(l, "col", "label_model", cfg.label_model.col);
  }

  read(root, "t_deploy", "config", cfg.t_deploy);

  if (root.contains("warmup_mask")) {
    const auto& m = root.at("warmup_mask");
    allow(m, "warmup_mask", {"fraction", "policy"});
    read(m, "fraction", "warmup_mask", cfg.warmup_mask.fraction);
    cfg.warmup_mask.policy = parse_mask_policy(opt_string(m, "policy", "warmup_mask", "new_arrivals"));
  }

  if (root.contains("pretrain")) {
    const auto& p = root.at("pretrain");
    allow(p, "pretrain", {"backbone", "layers", "hidden", "label_fraction", "epochs", "lr"});
    const auto bb = opt_string(p, "backbone", "pretrain", "linear_gcn");
    if (bb == "linear_gcn") cfg.pretrain.backbone = Backbone::linear_gcn;
    else if (bb == "gcn") cfg.pretrain.backbone = Backbone::gcn;
    else bad("pretrain.backbone", "expected 'linear_gcn' or 'gcn'");
    read(p, "layers", "pretrain", cfg.pretrain.gcn.layers);
    read(p, "hidden", "pretrain", cfg.pretrain.gcn.hidden);
    read(p, "label_fraction", "pretrain", cfg.pretrain.label_fraction);
    read(p, "epochs", "pretrain", cfg.pretrain.gcn.epochs);
    read(p, "lr", "pretrain", cfg.pretrain.gcn.lr);
  }

  if (root.contains("smart")) {
    const auto& s = root.at("smart");
    const std::string w = "smart";
    allow(s, w, {"lambda", "rnn_dim", "lstm_hidden", "gat_heads", "augmentation", "warmup_epochs", "finetune_epochs",
                 "patience", "lr"});
    auto& sc = cfg.smart;
    read(s, "lambda", w, sc.lambda);
    read(s, "rnn_dim", w, sc.rnn_dim);
    read(s, "lstm_hidden", w, sc.lstm_hidden);
    read(s, "gat_heads", w, sc.gat_heads);
    read(s, "warmup_epochs", w, sc.warmup_epochs);
    read(s, "finetune_epochs", w, sc.finetune_epochs);
    read(s, "patience", w, sc.patience);
    read(s, "lr", w, sc.lr);
    if (s.contains("augmentation")) {
      const auto& a = s.at("augmentation");
      allow(a, "smart.augmentation", {"kind", "p"});
      sc.augmentation.kind = parse_augment_kind(opt_string(a, "kind", "smart.augmentation", "drop_edge"));
      read(a, "p", "smart.augmentation", sc.augmentation.p);
    }
  }

  if (root.contains("baselines")) {
    const auto& b = root.at("baselines");
    allow(b, "baselines", {"linear", "doc", "supervised", "supervised_epochs", "supervised_window"});
    read(b, "linear", "baselines", cfg.baselines.linear);
    read(b, "doc", "baselines", cfg.baselines.doc);
    read(b, "supervised", "baselines", cfg.baselines.supervised);
    read(b, "supervised_epochs", "baselines", cfg.baselines.supervised_epochs);
    read(b, "supervised_window", "baselines", cfg.baselines.supervised_window);
  }

  if (root.contains("theory")) {
    const auto& t = root.at("theory");
    allow(t, "theory", {"prefactor", "middle_exponent", "c_form", "alpha", "seeds"});
    const auto pre = opt_string(t, "prefactor", "theory", "2m^2");
    if (pre == "2m^2") cfg.theory.variant.prefactor = Prefactor::two_m_squared;
    else if (pre == "2m") cfg.theory.variant.prefactor = Prefactor::two_m;
    else bad("theory.prefactor", "expected '2m^2' or '2m'");
    const auto mid = opt_string(t, "middle_exponent", "theory", "alpha+4");
    if (mid == "alpha+4") cfg.theory.variant.middle = MiddleExponent::alpha_plus_4;
    else if (mid == "2alpha+4") cfg.theory.variant.middle = MiddleExponent::two_alpha_plus_4;
    else bad("theory.middle_exponent", "expected 'alpha+4' or '2alpha+4'");
    const auto cf = opt_string(t, "c_form", "theory", "sum_ratio");
    if (cf == "sum_ratio") cfg.theory.variant.c_form = CForm::sum_ratio;
    else if (cf == "expectation_ratio") cfg.theory.variant.c_form = CForm::expectation_ratio;
    else bad("theory.c_form", "expected 'sum_ratio' or 'expectation_ratio'");
    if (t.contains("alpha")) {
      double a = 0;
      read(t, "alpha", "theory", a);
      cfg.theory.alpha = a;
    }
    read(t, "seeds", "theory", cfg.theory.seeds);
  }

  if (root.contains("distortion")) {
    const auto& d = root.at("distortion");
    const std::string w = "distortion";
    allow(d, w, {"hidden", "xi", "slope", "param_draws", "evolution_draws", "prefix_n0", "prefix_m", "prefix_steps",
                 "taus", "node"});
    auto& dc = cfg.distortion;
    read(d, "hidden", w, dc.mc.hidden);
    read(d, "xi", w, dc.mc.xi);
    read(d, "slope", w, dc.mc.slope);
    read(d, "param_draws", w, dc.mc.param_draws);
    read(d, "evolution_draws", w, dc.mc.evolution_draws);
    read(d, "prefix_n0", w, dc.prefix_n0);
    read(d, "prefix_m", w, dc.prefix_m);
    read(d, "prefix_steps", w, dc.prefix_steps);
    read(d, "taus", w, dc.taus);
    read(d, "node", w, dc.node);
  }

  read(root, "seed", "config", cfg.seed);
  std::string out = cfg.output_dir.string();
  read(root, "output_dir", "config", out);
  cfg.output_dir = out;
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.t_deploy < 2) throw Error(ErrorCode::ConfigInvalid, "t_deploy must be >= 2");
  if (!(cfg.warmup_mask.fraction > 0 && cfg.warmup_mask.fraction <= 1)) {
    throw Error(ErrorCode::ConfigInvalid, "warmup_mask.fraction must lie in (0, 1]");
  }
  if (!(cfg.pretrain.label_fraction > 0 && cfg.pretrain.label_fraction <= 1)) {
    throw Error(ErrorCode::ConfigInvalid, "pretrain.label_fraction must lie in (0, 1]");
  }
  if (cfg.pretrain.gcn.layers < 1 || cfg.pretrain.gcn.layers > 3) {
    throw Error(ErrorCode::ConfigInvalid, "pretrain.layers must be 1..3");
  }
  smart::validate(cfg.smart);
  validate(cfg.distortion.mc);
  if (cfg.generator) {
    const auto& g = *cfg.generator;
    if (g.kind == GeneratorKind::ba) {
      validate(BaConfig{g.n0, g.m, g.horizon, g.seed_graph});
    } else {
      validate(DualBaConfig{g.n0, g.m1, g.m2, g.p, g.horizon, g.seed_graph});
    }
    if (g.feature_dim < 1) throw Error(ErrorCode::ConfigInvalid, "feature_dim must be >= 1");
    if (cfg.t_deploy >= g.horizon) throw Error(ErrorCode::ConfigInvalid, "t_deploy must be below the horizon");
    if (cfg.label_model.kind == LabelModel::power && cfg.label_model.col >= g.feature_dim) {
      throw Error(ErrorCode::ConfigInvalid, "label_model.col outside the feature width");
    }
    if (cfg.label_model.kind == LabelModel::power && cfg.label_model.alpha < 0) {
      throw Error(ErrorCode::ConfigInvalid, "label_model.alpha must be >= 0");
    }
    if (cfg.task != Task::regression) throw Error(ErrorCode::ConfigInvalid, "generated data is a regression task");
    if (cfg.pretrain.backbone != Backbone::linear_gcn) {
      throw Error(ErrorCode::ConfigInvalid, "generated data uses the linear_gcn backbone");
    }
  }
  if (cfg.task == Task::classification && cfg.pretrain.backbone != Backbone::gcn) {
    throw Error(ErrorCode::ConfigInvalid, "classification needs the gcn backbone");
  }
  if (cfg.distortion.taus < 1 || cfg.distortion.prefix_m < 1 || cfg.distortion.prefix_n0 < cfg.distortion.prefix_m + 1) {
    throw Error(ErrorCode::ConfigInvalid, "distortion prefix needs taus >= 1 and n0 > m >= 1");
  }
}

std::string echo_config(const ExperimentConfig& cfg) {
  json j;
  if (cfg.generator) {
    const auto& g = *cfg.generator;
    j["data"]["generator"] = {{"kind", g.kind == GeneratorKind::ba ? "ba" : "dual_ba"},
                              {"n0", g.n0},
                              {"m", g.m},
                              {"m1", g.m1},
                              {"m2", g.m2},
                              {"p", g.p},
                              {"horizon", g.horizon},
                              {"seed_graph", to_string(g.seed_graph)},
                              {"feature_dim", g.feature_dim}};
  } else {
    j["data"]["snapshot_dir"] = cfg.snapshot_dir->string();
  }
  j["task"] = cfg.task == Task::regression ? "regression" : "classification";
  j["label_model"] = {{"kind", cfg.label_model.kind == LabelModel::closeness ? "closeness" : "power"},
                      {"alpha", cfg.label_model.alpha},
                      {"col", cfg.label_model.col}};
  j["t_deploy"] = cfg.t_deploy;
  j["warmup_mask"] = {{"fraction", cfg.warmup_mask.fraction}, {"policy", to_string(cfg.warmup_mask.policy)}};
  j["pretrain"] = {{"backbone", cfg.pretrain.backbone == Backbone::linear_gcn ? "linear_gcn" : "gcn"},
                   {"layers", cfg.pretrain.gcn.layers},
                   {"hidden", cfg.pretrain.gcn.hidden},
                   {"label_fraction", cfg.pretrain.label_fraction},
                   {"epochs", cfg.pretrain.gcn.epochs},
                   {"lr", cfg.pretrain.gcn.lr}};
  const auto& s = cfg.smart;
  j["smart"] = {{"lambda", s.lambda},
                {"rnn_dim", s.rnn_dim},
                {"lstm_hidden", s.lstm_hidden},
                {"gat_heads", s.gat_heads},
                {"augmentation", {{"kind", to_string(s.augmentation.kind)}, {"p", s.augmentation.p}}},
                {"warmup_epochs", s.warmup_epochs},
                {"finetune_epochs", s.finetune_epochs},
                {"patience", s.patience},
                {"lr", s.lr}};
  j["baselines"] = {{"linear", cfg.baselines.linear},
                    {"doc", cfg.baselines.doc},
                    {"supervised", cfg.baselines.supervised},
                    {"supervised_epochs", cfg.baselines.supervised_epochs},
                    {"supervised_window", cfg.baselines.supervised_window}};
  const auto& v = cfg.theory.variant;
  j["theory"] = {{"prefactor", v.prefactor == Prefactor::two_m_squared ? "2m^2" : "2m"},
                 {"middle_exponent", v.middle == MiddleExponent::alpha_plus_4 ? "alpha+4" : "2alpha+4"},
                 {"c_form", v.c_form == CForm::sum_ratio ? "sum_ratio" : "expectation_ratio"},
                 {"seeds", cfg.theory.seeds}};
  if (cfg.theory.alpha) j["theory"]["alpha"] = *cfg.theory.alpha;
  const auto& d = cfg.distortion;
  j["distortion"] = {{"hidden", d.mc.hidden},
                     {"xi", d.mc.xi},
                     {"slope", d.mc.slope},
                     {"param_draws", d.mc.param_draws},
                     {"evolution_draws", d.mc.evolution_draws},
                     {"prefix_n0", d.prefix_n0},
                     {"prefix_m", d.prefix_m},
                     {"prefix_steps", d.prefix_steps},
                     {"taus", d.taus},
                     {"node", d.node}};
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir.string();
  return j.dump(2) + "\n";
}

}  // namespace evograph
