#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vnet/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective RL suite for a mixed sub-6GHz/THz vehicular network"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Train an agent from a config file");
  std::string train_config;
  std::vector<std::string> train_overrides;
  long long train_seed = -1;
  int train_episodes = -1;
  std::string train_out;
  train->add_option("--config", train_config, "experiment config file")->required();
  train->add_option("--seed", train_seed, "override [run] seed");
  train->add_option("--episodes", train_episodes, "override [run] episodes");
  train->add_option("--out", train_out, "override [run] out_dir");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint with greedy rollouts");
  std::string eval_config, eval_checkpoint, eval_out;
  long long eval_seed = -1;
  int eval_episodes = 500;
  std::vector<double> eval_omegas;
  int eval_sweep = 0;
  eval->add_option("--config", eval_config, "experiment config file")->required();
  eval->add_option("--checkpoint", eval_checkpoint, "checkpoint JSON")->required();
  eval->add_option("--episodes", eval_episodes, "evaluation episodes");
  eval->add_option("--omega", eval_omegas, "preference weight(s) on the transportation objective");
  eval->add_option("--omega-sweep", eval_sweep, "evaluate N evenly spaced preferences");
  eval->add_option("--out", eval_out, "output directory");
  eval->add_option("--seed", eval_seed, "override evaluation seed");

  // pareto
  auto* pareto = app.add_subcommand("pareto", "Front/CCS/hypervolume report from returns CSVs");
  std::vector<std::string> pareto_inputs;
  std::string pareto_out = ".";
  std::vector<double> pareto_ref{0.0, 0.0};
  pareto->add_option("inputs", pareto_inputs, "returns CSV files")->required();
  pareto->add_option("--out", pareto_out, "output directory");
  pareto->add_option("--ref", pareto_ref, "hypervolume reference point (two values)")
      ->expected(2);

  // check
  auto* check = app.add_subcommand("check", "Run built-in oracle suites");
  std::string check_suite = "all";
  check->add_option("--suite", check_suite, "channel | gradient | ccs | envelope | all");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      vnet::ExperimentConfig cfg = vnet::load_config(train_config);
      if (train_seed >= 0) cfg.seed = static_cast<std::uint64_t>(train_seed);
      if (train_episodes >= 0) cfg.episodes = train_episodes;
      if (!train_out.empty()) cfg.out_dir = train_out;
      const auto result = vnet::run_train(cfg);
      std::cout << "metrics: " << result.metrics_csv.string() << "\n";
      std::cout << "checkpoint: " << result.checkpoint_json.string() << "\n";
      return 0;
    }
    if (*eval) {
      vnet::ExperimentConfig cfg = vnet::load_config(eval_config);
      vnet::EvalOptions opts;
      opts.checkpoint = eval_checkpoint;
      opts.episodes = eval_episodes;
      opts.omegas = eval_omegas;
      if (eval_sweep > 0) {
        opts.omegas.clear();
        for (int i = 0; i < eval_sweep; ++i)
          opts.omegas.push_back(eval_sweep == 1 ? 0.5
                                                : static_cast<double>(i) / (eval_sweep - 1));
      }
      if (!eval_out.empty()) opts.out_dir = eval_out;
      if (eval_seed >= 0) opts.seed = static_cast<std::uint64_t>(eval_seed);
      const auto result = vnet::run_eval(cfg, opts);
      std::cout << "summary: " << result.summary_json.string() << "\n";
      return 0;
    }
    if (*pareto) {
      vnet::ParetoOptions opts;
      for (const auto& p : pareto_inputs) opts.inputs.emplace_back(p);
      opts.out_dir = pareto_out;
      opts.reference = {pareto_ref[0], pareto_ref[1]};
      const auto result = vnet::run_pareto(opts);
      std::cout << "report: " << result.report_json.string() << "\n";
      return 0;
    }
    if (*check) {
      return vnet::run_check(check_suite) == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
