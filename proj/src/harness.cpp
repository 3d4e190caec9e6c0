#include "vnet/harness.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "vnet/metrics.hpp"
#include "vnet/pareto.hpp"

namespace vnet {

namespace {

TrafficConfig traffic_for(const ExperimentConfig& cfg) {
  TrafficConfig t = cfg.traffic;
  t.v_min = cfg.instance.v_min;
  t.v_max = cfg.instance.v_max;
  return t;
}

MomdpEnv make_env(const ExperimentConfig& cfg, std::uint64_t seed) {
  return MomdpEnv(cfg.instance, cfg.radio, traffic_for(cfg), cfg.reward, seed);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ScalarAgentConfig scalar_config(const ExperimentConfig& cfg) {
  ScalarAgentConfig a;
  a.gamma = cfg.agent.gamma;
  a.epsilon = cfg.agent.epsilon;
  a.batch = cfg.agent.batch;
  a.target_period = cfg.agent.target_period;
  a.variant = cfg.algorithm == "mo_dqn" ? ScalarAgentConfig::Variant::kDqn
                                        : ScalarAgentConfig::Variant::kDdqn;
  a.optimizer.learning_rate = cfg.agent.learning_rate;
  a.optimizer.kind = cfg.agent.optimizer;
  a.pool_capacity = cfg.agent.pool_capacity;
  return a;
}

EnvelopeAgentConfig envelope_config(const ExperimentConfig& cfg) {
  EnvelopeAgentConfig a;
  a.gamma = cfg.agent.gamma;
  a.epsilon = cfg.agent.epsilon;
  a.batch = cfg.agent.batch;
  a.n_omega = cfg.agent.n_omega;
  a.target_period = cfg.agent.target_period;
  a.lambda.kind = cfg.agent.lambda_kind;
  a.lambda.total_steps =
      std::max(1L, static_cast<long>(cfg.episodes) * cfg.instance.horizon);
  a.optimizer.learning_rate = cfg.agent.learning_rate;
  a.optimizer.kind = cfg.agent.optimizer;
  a.pool_capacity = cfg.agent.pool_capacity;
  return a;
}

std::string extra_json_for(const ExperimentConfig& cfg, int obs_dim) {
  nlohmann::json extra;
  extra["obs_dim"] = obs_dim;
  extra["gamma"] = cfg.agent.gamma;
  if (cfg.algorithm == "mo_ddqn_envelope") {
    extra["lambda_kind"] =
        cfg.agent.lambda_kind == LambdaSchedule::Kind::kCosine ? "cosine" : "linear";
    extra["lambda_total_steps"] =
        static_cast<long>(cfg.episodes) * cfg.instance.horizon;
    extra["n_omega"] = cfg.agent.n_omega;
  }
  return extra.dump();
}

}  // namespace

TrainResult run_train(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::filesystem::path out_dir(cfg.out_dir);
  std::filesystem::create_directories(out_dir);

  Rng root(cfg.seed);
  MomdpEnv env = make_env(cfg, root.substream("env").seed());
  const std::uint64_t agent_seed = root.substream("agent_root").seed();

  std::vector<MetricsRecord> records;
  const bool envelope = cfg.algorithm == "mo_ddqn_envelope";

  if (envelope) {
    EnvelopeAgent agent(env.observation_dim(), JointAction::kCount, cfg.agent.hidden,
                        envelope_config(cfg), agent_seed);
    auto hook = [&](int ep, const MetricsRecord&) {
      if ((ep + 1) % cfg.checkpoint_every == 0 && ep + 1 < cfg.episodes) {
        write_text(out_dir / ("checkpoint_ep" + std::to_string(ep + 1) + ".json"),
                   checkpoint_to_json(agent.q_eval(), cfg.algorithm,
                                      extra_json_for(cfg, env.observation_dim())));
      }
    };
    records = train_envelope(env, agent, cfg.episodes, hook);
    write_text(out_dir / "checkpoint_final.json",
               checkpoint_to_json(agent.q_eval(), cfg.algorithm,
                                  extra_json_for(cfg, env.observation_dim())));
  } else {
    NetworkSpec spec;
    spec.input_dim = env.observation_dim();
    spec.hidden = cfg.agent.hidden;
    spec.output_dim = JointAction::kCount;
    ScalarAgent agent(spec, scalar_config(cfg), agent_seed);
    auto hook = [&](int ep, const MetricsRecord&) {
      if ((ep + 1) % cfg.checkpoint_every == 0 && ep + 1 < cfg.episodes) {
        write_text(out_dir / ("checkpoint_ep" + std::to_string(ep + 1) + ".json"),
                   checkpoint_to_json(agent.q_eval(), cfg.algorithm,
                                      extra_json_for(cfg, env.observation_dim())));
      }
    };
    records = train_scalar(env, agent, cfg.episodes, hook);
    write_text(out_dir / "checkpoint_final.json",
               checkpoint_to_json(agent.q_eval(), cfg.algorithm,
                                  extra_json_for(cfg, env.observation_dim())));
  }

  TrainResult result;
  result.metrics_csv = out_dir / "metrics.csv";
  result.checkpoint_json = out_dir / "checkpoint_final.json";
  write_metrics_csv(result.metrics_csv, records, envelope);
  write_timing_csv(out_dir / "timing.csv", records);
  return result;
}

EvalResult run_eval(const ExperimentConfig& cfg, const EvalOptions& opts) {
  cfg.validate();
  if (opts.episodes < 1) throw std::runtime_error("eval: episodes must be >= 1");

  const Checkpoint ckpt = checkpoint_from_json(read_text(opts.checkpoint));
  if (ckpt.algorithm != cfg.algorithm)
    throw std::runtime_error("eval: checkpoint algorithm '" + ckpt.algorithm +
                             "' does not match configured '" + cfg.algorithm + "'");

  const std::filesystem::path out_dir =
      opts.out_dir.empty() ? std::filesystem::path(cfg.out_dir) / "eval" : opts.out_dir;
  std::filesystem::create_directories(out_dir);

  const std::uint64_t seed = opts.seed.value_or(cfg.seed);
  const std::uint64_t env_seed = Rng(seed).substream("eval").seed();
  MomdpEnv env = make_env(cfg, env_seed);

  const nlohmann::json extra = nlohmann::json::parse(ckpt.extra_json);
  const int ckpt_obs_dim = extra.value("obs_dim", -1);
  if (ckpt_obs_dim != env.observation_dim())
    throw std::runtime_error("eval: checkpoint observation dim " +
                             std::to_string(ckpt_obs_dim) + " does not match environment " +
                             std::to_string(env.observation_dim()));
  const double gamma = extra.value("gamma", cfg.agent.gamma);

  std::vector<MetricsRecord> all_records;
  std::vector<ReturnRow> returns;
  nlohmann::json summary;
  summary["algorithm"] = ckpt.algorithm;
  summary["episodes"] = opts.episodes;
  summary["seed"] = seed;
  nlohmann::json rows = nlohmann::json::array();

  auto summarize = [&](const std::vector<MetricsRecord>& records, double omega_tran,
                       bool with_omega) {
    double mean_tran = 0, mean_tele = 0, mean_delta = 0, mean_xi = 0;
    for (const auto& r : records) {
      mean_tran += r.r_tran;
      mean_tele += r.r_tele;
      mean_delta += r.delta_e;
      mean_xi += r.xi_e;
    }
    const double n = static_cast<double>(records.size());
    nlohmann::json row;
    if (with_omega) row["omega_tran"] = omega_tran;
    row["r_tran"] = mean_tran / n;
    row["r_tele"] = mean_tele / n;
    row["delta_e"] = mean_delta / n;
    row["xi_e"] = mean_xi / n;
    rows.push_back(row);

    ReturnRow rr;
    rr.label = ckpt.algorithm;
    rr.omega_tran = with_omega ? omega_tran : std::numeric_limits<double>::quiet_NaN();
    rr.r_tran = mean_tran / n;
    rr.r_tele = mean_tele / n;
    returns.push_back(rr);
  };

  const bool envelope = ckpt.algorithm == "mo_ddqn_envelope";
  if (envelope) {
    std::vector<double> omegas = opts.omegas;
    if (omegas.empty()) omegas.push_back(0.5);
    for (double w : omegas) {
      // a fresh env per preference evaluates every omega on the same episodes
      MomdpEnv sweep_env = make_env(cfg, env_seed);
      auto [records, mean_ret] = execute_policy(ckpt.params, sweep_env,
                                                PreferenceVector::of(w), opts.episodes, gamma);
      (void)mean_ret;
      summarize(records, w, true);
      all_records.insert(all_records.end(), records.begin(), records.end());
    }
  } else {
    if (!opts.omegas.empty())
      throw std::runtime_error("eval: preference sweep requires an envelope checkpoint");
    auto records = evaluate_scalar(ckpt.params, env, opts.episodes, gamma);
    summarize(records, 0.0, false);
    all_records = std::move(records);
  }

  summary["rows"] = rows;

  EvalResult result;
  result.metrics_csv = out_dir / "metrics.csv";
  result.summary_json = out_dir / "summary.json";
  result.returns_csv = out_dir / "returns.csv";
  write_metrics_csv(result.metrics_csv, all_records, envelope);
  write_text(result.summary_json, summary.dump(2) + "\n");
  write_returns_csv(result.returns_csv, returns);
  return result;
}

ParetoResult run_pareto(const ParetoOptions& opts) {
  if (opts.inputs.empty()) throw std::runtime_error("pareto: at least one returns CSV required");

  std::vector<ReturnPoint> points;
  std::map<std::string, std::vector<ReturnPoint>> by_label;
  for (const auto& path : opts.inputs) {
    for (const auto& row : read_returns_csv(path)) {
      ReturnPoint p;
      p.v = {row.r_tran, row.r_tele};
      p.label = row.label;
      points.push_back(p);
      by_label[row.label].push_back(p);
    }
  }
  if (points.empty()) throw std::runtime_error("pareto: inputs contained no points");

  const auto front = pareto_front(points);
  const auto hull = ccs(points);
  const ReturnPoint ref{{opts.reference[0], opts.reference[1]}, "reference"};

  struct LabelStats {
    std::string label;
    double hv = 0.0;
    std::size_t n = 0;
  };
  std::vector<LabelStats> stats;
  for (const auto& [label, pts] : by_label)
    stats.push_back({label, hypervolume(pts, ref), pts.size()});
  std::sort(stats.begin(), stats.end(),
            [](const LabelStats& a, const LabelStats& b) { return a.hv > b.hv; });

  std::filesystem::create_directories(opts.out_dir);
  auto write_points = [](const std::filesystem::path& path,
                         std::span<const ReturnPoint> pts) {
    std::string text = "label,r_tran,r_tele\n";
    for (const auto& p : pts)
      text += p.label + "," + format_double(p.v[0]) + "," + format_double(p.v[1]) + "\n";
    write_text(path, text);
  };

  ParetoResult result;
  result.front_csv = opts.out_dir / "front.csv";
  result.ccs_csv = opts.out_dir / "ccs.csv";
  result.report_json = opts.out_dir / "report.json";
  write_points(result.front_csv, front);
  write_points(result.ccs_csv, hull);

  nlohmann::json report;
  report["reference"] = {opts.reference[0], opts.reference[1]};
  report["points"] = points.size();
  report["front_size"] = front.size();
  report["ccs_size"] = hull.size();
  nlohmann::json ranking = nlohmann::json::array();
  for (const auto& s : stats) {
    nlohmann::json row;
    row["label"] = s.label;
    row["hypervolume"] = s.hv;
    row["points"] = s.n;
    ranking.push_back(row);
  }
  report["ranking"] = ranking;
  write_text(result.report_json, report.dump(2) + "\n");

  for (const auto& s : stats)
    std::cout << s.label << ": hypervolume " << format_double(s.hv) << " (" << s.n
              << " points)\n";
  return result;
}

}  // namespace vnet
