// SPDX-License-Identifier: Apache-2.0
// Command-line front end: generate, run, sweep, theory-curve, distortion, eval.
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "evograph/harness.hpp"
#include "evograph/io.hpp"
#include "evograph/kernels.hpp"

using namespace evograph;

namespace {

void print_scores(const std::vector<MethodScore>& scores) {
  std::cout << "method,mape,rmse,mae\n";
  for (const auto& s : scores) {
    std::cout << s.method << ',' << format_double(s.mape) << ',' << format_double(s.rmse) << ','
              << format_double(s.mae) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evolving-graph generalization estimation harness"};
  app.require_subcommand(1);

  std::string config, out, trace;
  std::uint64_t seed = 0;
  std::size_t seeds = 10;
  bool seed_given = false;

  auto* gen = app.add_subcommand("generate", "write a generated snapshot sequence");
  gen->add_option("--config", config, "experiment config (JSON)")->required();
  gen->add_option("--out", out, "output directory")->required();
  gen->add_option("--seed", seed, "seed (defaults to the config seed)");

  auto* run = app.add_subcommand("run", "one experiment");
  run->add_option("--config", config)->required();
  run->add_option("--seed", seed)->required();
  run->add_option("--out", out)->required();

  auto* sweep = app.add_subcommand("sweep", "multi-seed aggregate");
  sweep->add_option("--config", config)->required();
  sweep->add_option("--seeds", seeds, "number of seeds, starting at the config seed")->required();
  sweep->add_option("--out", out)->required();

  auto* curve = app.add_subcommand("theory-curve", "closed-form graph error against the realized error");
  curve->add_option("--config", config)->required();
  curve->add_option("--out", out, "CSV path")->required();

  auto* dist = app.add_subcommand("distortion", "distortion lower bound against its Monte-Carlo estimate");
  dist->add_option("--config", config)->required();
  dist->add_option("--out", out, "CSV path")->required();

  auto* eval = app.add_subcommand("eval", "recompute metrics from a stored trace");
  eval->add_option("--trace", trace)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  seed_given = gen->count("--seed") > 0;

  try {
    kernels::set_thread_cap(kernels::thread_cap_from_env());
    if (*eval) {
      print_scores(score_trace(read_trace_csv(trace)));
      return 0;
    }
    const auto cfg = load_config(config);
    if (*gen) {
      save_sequence(generate_sequence(cfg, seed_given ? seed : cfg.seed), out);
    } else if (*run) {
      const auto r = run_experiment(cfg, seed);
      write_run_report(cfg, r, out);
      print_scores(r.scores);
      if (r.audit_violations) {
        std::cerr << "label isolation violations: " << r.audit_violations << '\n';
        return 3;
      }
    } else if (*sweep) {
      std::vector<std::uint64_t> list;
      for (std::size_t i = 0; i < seeds; ++i) list.push_back(cfg.seed + i);
      const auto runs = multi_seed(cfg, list);
      write_sweep_report(cfg, runs, out);
      std::cout << "method,mape,se,seeds\n";
      for (const auto& s : summarize(runs)) {
        std::cout << s.method << ',' << format_double(s.mape) << ',' << format_double(s.se) << ',' << s.seeds << '\n';
      }
    } else if (*curve) {
      std::cerr << "graph error variant: " << describe(cfg.theory.variant) << '\n';
      write_curve_csv(theory_curve(cfg), out);
    } else if (*dist) {
      std::cerr << "distortion: hidden=" << cfg.distortion.mc.hidden << " xi=" << format_double(cfg.distortion.mc.xi)
                << " draws=" << cfg.distortion.mc.param_draws << 'x' << cfg.distortion.mc.evolution_draws << '\n';
      write_curve_csv(distortion_curve(cfg), out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
