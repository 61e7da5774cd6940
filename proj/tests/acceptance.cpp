// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evograph/error.hpp"
#include "evograph/evogen.hpp"
#include "evograph/harness.hpp"
#include "evograph/kernels.hpp"
#include "evograph/metrics.hpp"
#include "evograph/nn/composites.hpp"
#include "evograph/nn/layers.hpp"
#include "evograph/theory.hpp"
#include "fixtures.hpp"

using namespace evograph;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double score_of(const RunResult& r, const std::string& method) {
  for (const auto& s : r.scores) {
    if (s.method == method) return s.mape;
  }
  throw Error(ErrorCode::MissingLabels, "run has no " + method + " score");
}

std::vector<std::uint64_t> seeds_from(const ExperimentConfig& cfg, std::size_t count) {
  std::vector<std::uint64_t> s;
  for (std::size_t i = 0; i < count; ++i) s.push_back(cfg.seed + i);
  return s;
}

// Every run made here is checked for isolation at the end.
struct AuditTally {
  std::size_t runs = 0;
  std::size_t violations = 0;
  std::size_t illicit = 0;  // allowed post-deployment reads for other purposes

  void add(const RunResult& r, std::size_t t_deploy) {
    ++runs;
    violations += r.audit_violations;
    for (const auto& a : r.audit) {
      if (a.time_index > static_cast<int>(t_deploy) && a.purpose != Purpose::Scoring &&
          a.purpose != Purpose::SupervisedOracle) {
        ++illicit;
      }
    }
  }
};

// ---- 1 and 9: BA m=5, full method and the no-finetune ablation -----------

struct BaRuns {
  std::vector<RunResult> full;
  std::vector<RunResult> ablated;
};

BaRuns ba_runs(const fs::path& configs, bool ablation, AuditTally& audit) {
  const auto cfg = load_config(configs / "ba_m5.json");
  auto off = cfg;
  off.smart.finetune_epochs = 0;
  BaRuns out;
  for (auto seed : seeds_from(cfg, 10)) {
    const auto g = generate_sequence(cfg, seed);
    out.full.push_back(run_on_sequence(cfg, g, seed));
    audit.add(out.full.back(), cfg.t_deploy);
    if (ablation) {
      out.ablated.push_back(run_on_sequence(off, g, seed));
      audit.add(out.ablated.back(), cfg.t_deploy);
    }
  }
  return out;
}

Outcome criterion1(const BaRuns& runs) {
  std::vector<double> s, l;
  bool every = true;
  for (const auto& r : runs.full) {
    s.push_back(score_of(r, "smart"));
    l.push_back(score_of(r, "linear"));
    every &= s.back() < l.back();
  }
  const double ms = mean(s), ml = mean(l);
  Outcome o;
  o.pass = ms <= 15.0 && ml >= 40.0 && every;
  o.detail = "smart MAPE " + fmt("%.2f", ms) + " +- " + fmt("%.2f", standard_error(s)) + " (<= 15), linear " +
             fmt("%.2f", ml) + " (>= 40), smart < linear on every seed: " + (every ? "yes" : "no");
  return o;
}

Outcome criterion9(const BaRuns& runs) {
  std::vector<double> full, off;
  for (const auto& r : runs.full) full.push_back(score_of(r, "smart"));
  for (const auto& r : runs.ablated) off.push_back(score_of(r, "smart"));
  Outcome o;
  o.pass = mean(off) > mean(full);
  o.detail = "mean smart MAPE without finetune " + fmt("%.3f", mean(off)) + " vs full " + fmt("%.3f", mean(full)) +
             " (must be strictly worse)";
  return o;
}

// ---- 2: dual-BA ordering ---------------------------------------------------

Outcome criterion2(const fs::path& configs, AuditTally& audit) {
  Outcome o;
  o.pass = true;
  for (int m2 : {2, 5, 10}) {
    const auto cfg = load_config(configs / ("dual_ba_m1_" + std::to_string(m2) + ".json"));
    int wins = 0;
    std::vector<double> s, l;
    for (auto seed : seeds_from(cfg, 10)) {
      const auto r = run_experiment(cfg, seed);
      audit.add(r, cfg.t_deploy);
      s.push_back(score_of(r, "smart"));
      l.push_back(score_of(r, "linear"));
      wins += s.back() < l.back() ? 1 : 0;
    }
    o.pass &= wins >= 9;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += "m2=" + std::to_string(m2) + ": " + std::to_string(wins) + "/10 (smart " + fmt("%.2f", mean(s)) +
                ", linear " + fmt("%.2f", mean(l)) + ")";
  }
  o.detail += "; need >= 9/10 each";
  return o;
}

// ---- 3: graph-error shape ----------------------------------------------------

Outcome criterion3(const fs::path& configs) {
  const auto cfg = load_config(configs / "theory_ba_m5.json");
  const auto rows = theory_curve(cfg);
  std::vector<double> t, e;
  bool monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.push_back(static_cast<double>(rows[i].tau));
    e.push_back(rows[i].estimate);
    if (i > 0) monotone &= rows[i].bound > rows[i - 1].bound;
  }
  const double r = pearson(t, e);
  Outcome o;
  o.pass = r >= 0.95 && monotone;
  o.detail = "Pearson r of realized error vs t " + fmt("%.4f", r) + " (>= 0.95) over " +
             std::to_string(cfg.theory.seeds) + " seeds, error " + fmt("%.4f", e.front()) + " -> " +
             fmt("%.4f", e.back()) + "; closed-form curve increasing: " + (monotone ? "yes" : "no");
  return o;
}

// ---- 4: distortion bound ----------------------------------------------------

EvolvingGraph hand_fixture() {
  EvolvingGraph g;
  GraphSnapshot s0, s1;
  s0.n = 2;
  s0.edges = {{0, 1}};
  s0.features = Matrix(2, 2);
  s0.features << 1, 0, 0, 1;
  s1.n = 3;
  s1.edges = {{0, 1}, {0, 2}};
  s1.features = Matrix(3, 2);
  s1.features << 1, 0, 0, 1, 1, 0;
  g.snapshots = {s0, s1};
  g.feature_dim = 2;
  return g;
}

// Node 0 of a path gains one neighbor per step.
EvolvingGraph star_growth(std::size_t steps, std::size_t d, RngStream& rng) {
  EvolvingGraph g;
  Matrix X(static_cast<Eigen::Index>(3 + steps), static_cast<Eigen::Index>(d));
  for (auto& v : X.reshaped()) v = rng.normal();
  std::vector<Edge> edges{{0, 1}, {1, 2}};
  for (std::size_t k = 0; k <= steps; ++k) {
    if (k > 0) edges.push_back({0, static_cast<NodeId>(2 + k)});
    GraphSnapshot s;
    s.n = 3 + k;
    s.edges = canonical_edges(edges);
    s.features = X.topRows(static_cast<Eigen::Index>(s.n));
    g.snapshots.push_back(s);
  }
  g.feature_dim = d;
  return g;
}

struct FixtureCheck {
  bool holds = true;
  bool increasing = true;
  double worst_margin = INFINITY;  // min over tau of (mean + 2 se) / bound
};

FixtureCheck check_realized(const EvolvingGraph& g, const DistortionConfig& mc, std::size_t taus, RngStream& rng) {
  const auto evo = realized(g);
  auto init = rng.child("init");
  const auto theta = random_shallow_gcn(mc.hidden, g.feature_dim, init);
  FixtureCheck c;
  double prev = -1;
  for (std::size_t tau = 0; tau <= taus; ++tau) {
    auto pert = rng.child("perturbation" + std::to_string(tau));
    const auto est = empirical_distortion(evo, theta, mc, 0, tau, pert);
    const double b = distortion_lower_bound(evo, mc, 0, tau);
    c.holds &= est.mean + 2 * est.se >= b;
    c.increasing &= b > prev;
    if (b > 0) c.worst_margin = std::min(c.worst_margin, (est.mean + 2 * est.se) / b);
    prev = b;
  }
  return c;
}

Outcome criterion4(const fs::path& configs) {
  const auto cfg = load_config(configs / "distortion.json");
  std::vector<std::pair<std::string, FixtureCheck>> checks;
  RngStream hand(cfg.seed, "hand");
  checks.emplace_back("hand", check_realized(hand_fixture(), cfg.distortion.mc, 1, hand));
  RngStream star(cfg.seed, "star");
  checks.emplace_back("star", check_realized(star_growth(cfg.distortion.taus, 4, star), cfg.distortion.mc,
                                             cfg.distortion.taus, star));
  for (std::uint64_t i = 0; i < 4; ++i) {
    auto c = cfg;
    c.seed = cfg.seed + i;
    const auto rows = distortion_curve(c);
    FixtureCheck fc;
    double prev = 0;  // the bound is 0 at tau = 0
    for (const auto& row : rows) {
      fc.holds &= row.estimate + 2 * row.se >= row.bound;
      fc.increasing &= row.bound > prev;
      fc.worst_margin = std::min(fc.worst_margin, (row.estimate + 2 * row.se) / row.bound);
      prev = row.bound;
    }
    checks.emplace_back("ba" + std::to_string(c.seed), fc);
  }
  Outcome o;
  o.pass = true;
  for (const auto& [name, c] : checks) {
    o.pass &= c.holds && c.increasing;
    if (!o.detail.empty()) o.detail += ", ";
    o.detail += name + (c.holds ? " ok" : " VIOLATED") + (c.increasing ? "" : " (bound not increasing)") +
                " margin " + fmt("%.3g", c.worst_margin);
  }
  o.detail = std::to_string(checks.size()) + " fixtures, tau <= " + std::to_string(cfg.distortion.taus) + ": " +
             o.detail;
  return o;
}

// ---- 5: gradients ------------------------------------------------------------

Outcome criterion5() {
  std::size_t fixtures = 0, bad = 0;
  double worst = 0;
  for (const auto& name : nn::composite_names()) {
    for (std::uint64_t f = 0; f < 20; ++f) {
      RngStream rng(f, "composite-" + name);
      const auto c = nn::make_composite(name, rng);
      const Vector theta = c->parameters();
      Vector g;
      c->evaluate(theta, &g);
      bool ok = true;
      for (Eigen::Index k = 0; k < theta.size(); ++k) {
        Vector tp = theta, tm = theta;
        tp[k] += 1e-5;
        tm[k] -= 1e-5;
        const double num = (c->evaluate(tp, nullptr) - c->evaluate(tm, nullptr)) / 2e-5;
        const double err = std::abs(num - g[k]);
        worst = std::max(worst, err);
        ok &= err <= 1e-7 || err <= 1e-4 * std::max(std::abs(num), std::abs(g[k]));
      }
      ++fixtures;
      bad += ok ? 0 : 1;
    }
  }
  Outcome o;
  o.pass = bad == 0;
  o.detail = std::to_string(nn::composite_names().size()) + " composites x 20 fixtures, " + std::to_string(bad) +
             " failing, worst abs error " + fmt("%.2e", worst);
  return o;
}

// ---- 6: oracle equivalences ---------------------------------------------------

Outcome criterion6() {
  RngStream rng(6, "oracles");
  std::size_t mismatched = 0;
  for (int k = 0; k < 50; ++k) {
    const auto n = 20 + rng.below(281);
    const auto g = fixtures::random_connected(n, rng.below(2 * n), 2, rng);
    if (closeness_labels(g) != fixtures::bfs_closeness(g)) ++mismatched;
  }

  const auto g = fixtures::random_graph(50, 0.1, 3, rng);
  Vector Y(50);
  for (auto& y : Y) y = rng.normal();
  const Matrix LX = fixtures::dense_normalized(g) * g.features;
  Vector w = Vector::Zero(3);
  for (int step = 0; step < 100000; ++step) w -= 1e-3 * 2.0 * LX.transpose() * (LX * w - Y);
  const Vector W = fit_linear_gcn(normalize(g), g.features, Y);
  const double gd = (LX * w - Y).squaredNorm();
  const double rel = std::abs((LX * W - Y).squaredNorm() - gd) / gd;

  double forward = 0;
  for (int k = 0; k < 5; ++k) {
    const auto h = fixtures::random_graph(20, 0.2, 4, rng);
    const Matrix Ld = fixtures::dense_normalized(h);
    const auto p = nn::make_gcn({4, 6, 3}, rng);
    const Matrix dense = (Ld * (Ld * h.features * p.tensors()[0].value).cwiseMax(0.0)) * p.tensors()[1].value;
    forward = std::max(forward, (nn::gcn_forward(normalize(h), h.features, p, {}) - dense).cwiseAbs().maxCoeff());
    const auto gat = nn::make_gat(4, 3, 2, rng);
    nn::GatSpec spec;
    spec.heads = 2;
    const Matrix F = nn::gat_forward(build_adjacency(h.n, h.edges), h.features, gat, spec);
    forward = std::max(
        forward, (F - fixtures::dense_gat(fixtures::dense_adjacency(h), h.features, gat, 2, 0.2)).cwiseAbs().maxCoeff());
    const auto dec = nn::make_decoder(5, 3, rng);
    forward = std::max(forward, (nn::feature_decode(F, dec) - F * dec["a"].transpose()).cwiseAbs().maxCoeff());
  }
  Outcome o;
  o.pass = mismatched == 0 && rel <= 1e-6 && forward <= 1e-10;
  o.detail = "closeness mismatches " + std::to_string(mismatched) + "/50, fit vs GD objective rel " +
             fmt("%.2e", rel) + " (<= 1e-6), forward max error " + fmt("%.2e", forward) + " (<= 1e-10)";
  return o;
}

// ---- 7: generator statistics ----------------------------------------------------

Outcome criterion7() {
  RngStream rng(7, "graph-gen");
  const auto big = ba_final(BaConfig{1000, 5, 5000, SeedGraph::ba}, rng);
  const double slope = tail_slope(degree_histogram(big), 10);

  bool counts = true;
  auto check = [&](const EvolvingGraph& g, std::size_t n0, std::set<std::size_t> steps) {
    for (std::size_t k = 0; k < g.snapshots.size(); ++k) {
      counts &= g.snapshots[k].n == n0 + k;
      if (k > 0) counts &= steps.count(g.snapshots[k].edges.size() - g.snapshots[k - 1].edges.size()) == 1;
    }
  };
  RngStream a(7, "ba"), b(7, "dual");
  check(ba_evolve(BaConfig{1000, 5, 180, SeedGraph::ba}, a), 1000, {5});
  check(dual_ba_evolve(DualBaConfig{1000, 1, 10, 0.5, 180, SeedGraph::ba}, b), 1000, {1, 10});
  Outcome o;
  o.pass = slope >= -3.3 && slope <= -2.7 && counts && big.n == 6000;
  o.detail = "tail slope " + fmt("%.3f", slope) + " at n=" + std::to_string(big.n) + " (in [-3.3, -2.7]), counts " +
             (counts ? "exact" : "WRONG");
  return o;
}

// ---- 8: metrics ---------------------------------------------------------------

Outcome criterion8() {
  int failed = 0;
  auto expect = [&](bool ok) { failed += ok ? 0 : 1; };
  auto ulp_eq = [](double a, double b) { return std::abs(a - b) <= 4 * std::numeric_limits<double>::epsilon() * b; };
  expect(mape({{0.3, 0.5}, {0.3, 0.5}}) == 0.0);
  expect(ulp_eq(mape({{1.1, 0.9}, {1.0, 1.0}}), 10.0));
  expect(mape({{2.0}, {1.0}}) == 100.0);
  expect(rmse({{1, 2}, {1, 2}}) == 0.0 && mae({{1, 2}, {1, 2}}) == 0.0);
  expect(rmse({{3, -4}, {0, 0}}) == std::sqrt(12.5) && mae({{3, -4}, {0, 0}}) == 3.5);
  RngStream rng(8, "traces");
  for (int k = 0; k < 200; ++k) {
    LossTrace t;
    for (int i = 0; i < 1 + k % 17; ++i) {
      t.predicted.push_back(rng.normal());
      t.actual.push_back(rng.uniform(0.1, 2.0));
    }
    expect(rmse(t) >= mae(t));
  }
  expect(standard_error({3, 3, 3, 3}) == 0.0);
  expect(standard_error({0, 2}) == 1.0);
  expect(ulp_eq(standard_error({1, 2, 3}), 1.0 / std::sqrt(3.0)));
  Outcome o;
  o.pass = failed == 0;
  o.detail = std::to_string(failed) + " failing checks (MAPE 0/10/100, RMSE/MAE examples, RMSE >= MAE, SE cases)";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evograph acceptance checks"};
  std::string only;
  std::string configs = EVOGRAPH_CONFIG_DIR;
  app.add_option("--only", only, "Comma-separated criterion numbers to run (default: all)");
  app.add_option("--configs", configs, "Directory holding the acceptance configs");
  CLI11_PARSE(app, argc, argv);
  kernels::set_thread_cap(kernels::thread_cap_from_env());

  std::set<int> want;
  std::stringstream ss(only);
  for (std::string tok; std::getline(ss, tok, ',');) want.insert(std::stoi(tok));
  auto on = [&](int c) { return want.empty() || want.count(c) > 0; };

  const fs::path dir = configs;
  AuditTally audit;
  int failed = 0, ran = 0;
  auto report = [&](int id, const char* title, const std::function<Outcome()>& fn) {
    if (!on(id)) return;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ++ran;
    failed += o.pass ? 0 : 1;
    std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << " [" << title << "] " << o.detail << " ("
              << fmt("%.1f", secs) << " s)" << std::endl;
  };

  BaRuns ba;
  if (on(1) || on(9)) {
    const auto start = std::chrono::steady_clock::now();
    try {
      ba = ba_runs(dir, on(9), audit);
    } catch (const std::exception& e) {
      std::cerr << "BA runs failed: " << e.what() << "\n";
    }
    std::cout << "BA m=5 runs done in "
              << fmt("%.1f", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()) << " s"
              << std::endl;
  }
  report(1, "BA reproduction", [&] { return criterion1(ba); });
  report(2, "dual-BA ordering", [&] { return criterion2(dir, audit); });
  report(3, "graph-error shape", [&] { return criterion3(dir); });
  report(4, "distortion bound", [&] { return criterion4(dir); });
  report(5, "gradient suite", criterion5);
  report(6, "oracle equivalences", criterion6);
  report(7, "generator statistics", criterion7);
  report(8, "metric unit suite", criterion8);
  report(9, "ablation direction", [&] { return criterion9(ba); });
  report(10, "label-isolation audit", [&] {
    Outcome o;
    o.pass = audit.runs > 0 && audit.violations == 0 && audit.illicit == 0;
    o.detail = std::to_string(audit.runs) + " runs audited, " + std::to_string(audit.violations) + " violations, " +
               std::to_string(audit.illicit) + " post-deployment reads outside scoring/oracle";
    return o;
  });
  std::cout << "acceptance: " << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
