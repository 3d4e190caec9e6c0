#pragma once

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "vnet/env.hpp"
#include "vnet/morl_scalar.hpp"  // EpsilonSchedule
#include "vnet/neural.hpp"
#include "vnet/replay.hpp"
#include "vnet/rng.hpp"
#include "vnet/types.hpp"

namespace vnet {

// One forward pass of the preference-conditioned network, viewed as an
// actions x objectives table.
struct VectorQ {
  std::vector<double> data;  // row-major, actions x kObjectives

  int actions() const { return static_cast<int>(data.size()) / kObjectives; }
  double at(int a, int h) const { return data[static_cast<std::size_t>(a) * kObjectives + h]; }
  std::array<double, kObjectives> row(int a) const {
    return {data[static_cast<std::size_t>(a) * kObjectives],
            data[static_cast<std::size_t>(a) * kObjectives + 1]};
  }
  double project(int a, const PreferenceVector& w) const {
    return w.w[0] * at(a, 0) + w.w[1] * at(a, 1);
  }
};

// Balance-weight path for homotopy optimization: 0 at step 0, 1 at the final step.
struct LambdaSchedule {
  enum class Kind { kLinear, kCosine };
  Kind kind = Kind::kLinear;
  long total_steps = 1;

  double at(long step) const;
};

struct EnvelopeAgentConfig {
  double gamma = 0.995;
  EpsilonSchedule epsilon;
  int batch = 64;
  int n_omega = 4;          // preferences sampled per update
  int target_period = 200;
  LambdaSchedule lambda;
  OptimizerConfig optimizer;
  std::size_t pool_capacity = 100000;

  void validate() const;
};

// Greedy action under omega-projected vector Q values; lowest-index ties.
int select_action(const VectorQ& q, const PreferenceVector& omega);

// Envelope target for one transition/preference pair: the reward plus gamma
// times the target-network vector at the (action, preference) pair that
// maximizes the omega_g-projected utility over A x W.
std::array<double, kObjectives> envelope_target(
    const RewardVector& r, bool terminal, double gamma, const PreferenceVector& omega_g,
    std::span<const VectorQ> next_q_per_pref);

// Single-preference (fixed omega) double-DQN style target; the envelope target
// dominates it in omega_g projection by construction.
std::array<double, kObjectives> fixed_pref_target(
    const RewardVector& r, bool terminal, double gamma, const PreferenceVector& omega_g,
    const VectorQ& next_q_at_omega_g);

struct EnvelopeLoss {
  double vector_mse = 0.0;   // L^A
  double utility_abs = 0.0;  // L^B
  double total(double lambda) const { return (1.0 - lambda) * vector_mse + lambda * utility_abs; }
};

// Homotopy loss over a set of (target, prediction, omega) rows.
EnvelopeLoss envelope_loss(std::span<const std::array<double, kObjectives>> targets,
                           std::span<const std::array<double, kObjectives>> predictions,
                           std::span<const PreferenceVector> omegas);

// Envelope MO-DDQN: preference-conditioned vector Q-network trained with
// envelope Bellman targets, hindsight preference re-sampling, homotopy loss,
// and periodic target cloning.
class EnvelopeAgent {
 public:
  EnvelopeAgent(int obs_dim, int n_actions, std::vector<int> hidden,
                const EnvelopeAgentConfig& cfg, std::uint64_t seed);

  int act(std::span<const double> obs, const PreferenceVector& omega, double epsilon);
  void push(Transition t) { pool_.push(std::move(t)); }
  std::optional<double> train_step();

  VectorQ q_values(const Parameters& net, std::span<const double> obs,
                   const PreferenceVector& omega) const;
  VectorQ q_values(std::span<const double> obs, const PreferenceVector& omega) const {
    return q_values(q_eval_, obs, omega);
  }

  PreferenceVector sample_preference() { return pref_pool_.sample(act_rng_); }

  const Parameters& q_eval() const { return q_eval_; }
  const EnvelopeAgentConfig& config() const { return cfg_; }
  const TransitionPool& pool() const { return pool_; }
  long steps_trained() const { return train_steps_; }
  double current_lambda() const { return cfg_.lambda.at(train_steps_); }
  int observation_dim() const { return obs_dim_; }

 private:
  EnvelopeAgentConfig cfg_;
  int obs_dim_ = 0;
  int n_actions_ = 0;
  Parameters q_eval_;
  Parameters q_target_;
  Optimizer optimizer_;
  TransitionPool pool_;
  PreferencePool pref_pool_;
  Rng act_rng_;
  Rng replay_rng_;
  long train_steps_ = 0;
};

// Full training run; the behavior preference is resampled each episode and
// held fixed within it.
std::vector<MetricsRecord> train_envelope(VectorRewardEnv& env, EnvelopeAgent& agent,
                                          int episodes, const EpisodeHook& hook = {});

// Greedy rollouts conditioned on omega; returns per-episode metrics and the
// mean discounted return vector.
std::pair<std::vector<MetricsRecord>, RewardVector> execute_policy(
    const Parameters& q_net, VectorRewardEnv& env, const PreferenceVector& omega, int episodes,
    double gamma);

// Builds the preference-conditioned network spec used by the envelope agent.
NetworkSpec envelope_network_spec(int obs_dim, std::vector<int> hidden, int n_actions);

}  // namespace vnet
