#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "vnet/env.hpp"
#include "vnet/neural.hpp"
#include "vnet/replay.hpp"
#include "vnet/rng.hpp"
#include "vnet/types.hpp"

namespace vnet {

// Exponential epsilon decay per episode, with a floor.
struct EpsilonSchedule {
  double start = 1.0;
  double reach = 0.1;        // value hit at reach_frac of training
  double reach_frac = 0.5;
  double floor = 0.05;

  // epsilon for a given episode out of `total` planned episodes
  double at(int episode, int total) const;
};

struct ScalarAgentConfig {
  double gamma = 0.995;
  EpsilonSchedule epsilon;
  int batch = 64;
  int target_period = 200;  // clone evaluation -> target every N steps
  enum class Variant { kDqn, kDdqn };
  Variant variant = Variant::kDdqn;
  OptimizerConfig optimizer;
  std::size_t pool_capacity = 100000;

  void validate() const;
};

// Predefined-priority scalarization: the coefficients already weight the
// objectives, so the scalar reward is the plain component sum.
double scalarize(const RewardVector& r);

// Epsilon-greedy action from a scalar Q-network; greedy ties break lowest-index.
int select_action(const Parameters& q_net, std::span<const double> obs, double epsilon,
                  Rng& rng);

// TD targets for a batch given next-state Q rows from both networks.
// DQN: r + gamma * max_a Qt(s', a); DDQN: r + gamma * Qt(s', argmax_a Qe(s', a)).
std::vector<double> scalar_td_targets(std::span<const Transition* const> batch,
                                      const std::vector<std::vector<double>>& q_eval_next,
                                      const std::vector<std::vector<double>>& q_target_next,
                                      double gamma, ScalarAgentConfig::Variant variant);

// Scalarized MO-DQN / MO-DDQN with target network and experience replay.
class ScalarAgent {
 public:
  ScalarAgent(const NetworkSpec& spec, const ScalarAgentConfig& cfg, std::uint64_t seed);

  int act(std::span<const double> obs, double epsilon);
  void push(Transition t) { pool_.push(std::move(t)); }

  // One sampled mini-batch update; empty when the pool is still warming up.
  std::optional<double> train_step();

  const Parameters& q_eval() const { return q_eval_; }
  const Parameters& q_target() const { return q_target_; }
  Parameters& q_eval_mut() { return q_eval_; }
  const ScalarAgentConfig& config() const { return cfg_; }
  const TransitionPool& pool() const { return pool_; }
  long steps_trained() const { return train_steps_; }

 private:
  ScalarAgentConfig cfg_;
  Parameters q_eval_;
  Parameters q_target_;
  Optimizer optimizer_;
  TransitionPool pool_;
  Rng act_rng_;
  Rng replay_rng_;
  long train_steps_ = 0;
};

using EpisodeHook = std::function<void(int episode, const MetricsRecord& record)>;

// Full training run over an environment; one shared policy across agents.
std::vector<MetricsRecord> train_scalar(VectorRewardEnv& env, ScalarAgent& agent, int episodes,
                                        const EpisodeHook& hook = {});

// Greedy evaluation rollouts; returns per-episode metrics. Per-episode returns
// are discounted sums averaged over the env's agents.
std::vector<MetricsRecord> evaluate_scalar(const Parameters& q_net, VectorRewardEnv& env,
                                           int episodes, double gamma);

}  // namespace vnet
