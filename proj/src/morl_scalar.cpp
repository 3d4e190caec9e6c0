#include "vnet/morl_scalar.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace vnet {

double EpsilonSchedule::at(int episode, int total) const {
  if (episode < 0 || total < 1) throw std::invalid_argument("EpsilonSchedule: bad episode/total");
  const int reach_ep = std::max(1, static_cast<int>(reach_frac * total));
  const double decay = std::pow(reach / start, 1.0 / reach_ep);
  return std::max(floor, start * std::pow(decay, episode));
}

void ScalarAgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("ScalarAgentConfig: gamma must be in (0, 1)");
  if (batch < 1) throw std::invalid_argument("ScalarAgentConfig: batch must be >= 1");
  if (target_period < 1)
    throw std::invalid_argument("ScalarAgentConfig: target_period must be >= 1");
  if (pool_capacity < static_cast<std::size_t>(batch))
    throw std::invalid_argument("ScalarAgentConfig: pool must hold at least one batch");
}

double scalarize(const RewardVector& r) { return r.tran + r.tele; }

int select_action(const Parameters& q_net, std::span<const double> obs, double epsilon,
                  Rng& rng) {
  if (rng.uniform() < epsilon) return rng.uniform_int(q_net.spec.output_dim);
  const std::vector<double> q = forward(q_net, obs);
  return argmax_lowest(q);
}

std::vector<double> scalar_td_targets(std::span<const Transition* const> batch,
                                      const std::vector<std::vector<double>>& q_eval_next,
                                      const std::vector<std::vector<double>>& q_target_next,
                                      double gamma, ScalarAgentConfig::Variant variant) {
  if (batch.empty()) throw std::invalid_argument("scalar_td_targets: empty batch");
  std::vector<double> targets(batch.size());
  for (std::size_t z = 0; z < batch.size(); ++z) {
    const Transition& t = *batch[z];
    const double r = scalarize(t.r);
    if (t.terminal) {
      targets[z] = r;
      continue;
    }
    double bootstrap;
    if (variant == ScalarAgentConfig::Variant::kDqn) {
      bootstrap = q_target_next[z][static_cast<std::size_t>(argmax_lowest(q_target_next[z]))];
    } else {
      bootstrap = q_target_next[z][static_cast<std::size_t>(argmax_lowest(q_eval_next[z]))];
    }
    targets[z] = r + gamma * bootstrap;
  }
  return targets;
}

ScalarAgent::ScalarAgent(const NetworkSpec& spec, const ScalarAgentConfig& cfg,
                         std::uint64_t seed)
    : cfg_(cfg),
      q_eval_(Parameters::zeros(spec)),
      q_target_(Parameters::zeros(spec)),
      pool_(cfg.pool_capacity),
      act_rng_(Rng(seed).substream("agent")),
      replay_rng_(Rng(seed).substream("replay")) {
  cfg_.validate();
  Rng init_rng = Rng(seed).substream("init");
  q_eval_ = Parameters::he_uniform(spec, init_rng);
  clone_into(q_eval_, q_target_);
  optimizer_ = Optimizer(cfg_.optimizer, spec);
}

int ScalarAgent::act(std::span<const double> obs, double epsilon) {
  return select_action(q_eval_, obs, epsilon, act_rng_);
}

std::optional<double> ScalarAgent::train_step() {
  if (pool_.size() < static_cast<std::size_t>(cfg_.batch)) return std::nullopt;

  const auto batch = pool_.sample(cfg_.batch, replay_rng_);
  std::vector<std::vector<double>> q_eval_next(batch.size()), q_target_next(batch.size());
  for (std::size_t z = 0; z < batch.size(); ++z) {
    if (batch[z]->terminal) continue;
    q_eval_next[z] = forward(q_eval_, batch[z]->s_next);
    q_target_next[z] = forward(q_target_, batch[z]->s_next);
  }
  const std::vector<double> targets =
      scalar_td_targets(batch, q_eval_next, q_target_next, cfg_.gamma, cfg_.variant);

  Parameters grads = Parameters::zeros(q_eval_.spec);
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (std::size_t z = 0; z < batch.size(); ++z) {
    ForwardCache cache;
    const std::vector<double> q = forward(q_eval_, batch[z]->s, &cache);
    const double err = q[static_cast<std::size_t>(batch[z]->action)] - targets[z];
    loss += err * err * inv_n;
    std::vector<double> out_grad(q.size(), 0.0);
    out_grad[static_cast<std::size_t>(batch[z]->action)] = 2.0 * err * inv_n;
    accumulate(grads, backward(q_eval_, cache, out_grad));
  }
  optimizer_.apply_update(q_eval_, grads);
  if (!q_eval_.all_finite())
    throw std::runtime_error("ScalarAgent: parameters became non-finite");

  ++train_steps_;
  if (train_steps_ % cfg_.target_period == 0) clone_into(q_eval_, q_target_);
  return loss;
}

std::vector<MetricsRecord> train_scalar(VectorRewardEnv& env, ScalarAgent& agent, int episodes,
                                        const EpisodeHook& hook) {
  std::vector<MetricsRecord> records;
  records.reserve(episodes);
  const int m = env.agent_count();

  for (int ep = 0; ep < episodes; ++ep) {
    const double epsilon = agent.config().epsilon.at(ep, episodes);
    std::vector<std::vector<double>> obs = env.reset();
    double disc = 1.0;
    RewardVector totals;
    bool done = false;
    int steps = 0;
    const auto started = std::chrono::steady_clock::now();
    while (!done) {
      std::vector<int> actions(m);
      for (int j = 0; j < m; ++j) actions[j] = agent.act(obs[j], epsilon);
      auto out = env.step(actions);
      for (int j = 0; j < m; ++j) {
        agent.push(Transition{obs[j], actions[j], out.rewards[j], out.obs[j], out.done});
        totals.tran += disc * out.rewards[j].tran;
        totals.tele += disc * out.rewards[j].tele;
      }
      disc *= agent.config().gamma;
      agent.train_step();
      obs = std::move(out.obs);
      done = out.done;
      ++steps;
    }
    const auto elapsed = std::chrono::duration<double, std::milli>(
        std::chrono::steady_clock::now() - started);
    MetricsRecord rec;
    rec.episode = ep;
    rec.r_tran = totals.tran / m;
    rec.r_tele = totals.tele / m;
    rec.delta_e = env.collision_rate();
    rec.xi_e = env.ho_probability();
    rec.wall_ms = steps > 0 ? elapsed.count() / steps : 0.0;
    records.push_back(rec);
    if (hook) hook(ep, records.back());
  }
  return records;
}

std::vector<MetricsRecord> evaluate_scalar(const Parameters& q_net, VectorRewardEnv& env,
                                           int episodes, double gamma) {
  if (episodes < 1) throw std::invalid_argument("evaluate_scalar: episodes must be >= 1");
  std::vector<MetricsRecord> records;
  records.reserve(episodes);
  const int m = env.agent_count();

  for (int ep = 0; ep < episodes; ++ep) {
    std::vector<std::vector<double>> obs = env.reset();
    double disc = 1.0;
    RewardVector totals;
    bool done = false;
    while (!done) {
      std::vector<int> actions(m);
      for (int j = 0; j < m; ++j) actions[j] = argmax_lowest(forward(q_net, obs[j]));
      auto out = env.step(actions);
      for (int j = 0; j < m; ++j) {
        totals.tran += disc * out.rewards[j].tran;
        totals.tele += disc * out.rewards[j].tele;
      }
      disc *= gamma;
      obs = std::move(out.obs);
      done = out.done;
    }
    MetricsRecord rec;
    rec.episode = ep;
    rec.r_tran = totals.tran / m;
    rec.r_tele = totals.tele / m;
    rec.delta_e = env.collision_rate();
    rec.xi_e = env.ho_probability();
    records.push_back(rec);
  }
  return records;
}

}  // namespace vnet
