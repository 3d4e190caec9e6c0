#include "vnet/morl_envelope.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "vnet/channel.hpp"  // kPi

namespace vnet {

double LambdaSchedule::at(long step) const {
  if (total_steps < 1) throw std::invalid_argument("LambdaSchedule: total_steps must be >= 1");
  const double frac = std::clamp(static_cast<double>(step) / total_steps, 0.0, 1.0);
  switch (kind) {
    case Kind::kLinear: return frac;
    case Kind::kCosine: return 0.5 * (1.0 - std::cos(kPi * frac));
  }
  throw std::invalid_argument("LambdaSchedule: unknown kind");
}

void EnvelopeAgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("EnvelopeAgentConfig: gamma must be in (0, 1)");
  if (batch < 1) throw std::invalid_argument("EnvelopeAgentConfig: batch must be >= 1");
  if (n_omega < 1) throw std::invalid_argument("EnvelopeAgentConfig: n_omega must be >= 1");
  if (target_period < 1)
    throw std::invalid_argument("EnvelopeAgentConfig: target_period must be >= 1");
  if (pool_capacity < static_cast<std::size_t>(batch))
    throw std::invalid_argument("EnvelopeAgentConfig: pool must hold at least one batch");
}

int select_action(const VectorQ& q, const PreferenceVector& omega) {
  const int n = q.actions();
  if (n < 1) throw std::invalid_argument("select_action: empty Q table");
  int best = 0;
  double best_u = q.project(0, omega);
  for (int a = 1; a < n; ++a) {
    const double u = q.project(a, omega);
    if (u > best_u) {
      best = a;
      best_u = u;
    }
  }
  return best;
}

std::array<double, kObjectives> envelope_target(
    const RewardVector& r, bool terminal, double gamma, const PreferenceVector& omega_g,
    std::span<const VectorQ> next_q_per_pref) {
  if (terminal) return {r.tran, r.tele};
  if (next_q_per_pref.empty())
    throw std::invalid_argument("envelope_target: preference set must be nonempty");

  // sup over actions and sampled preferences of the omega_g-projected utility;
  // the backup takes the full vector at the maximizing pair
  int best_a = 0;
  std::size_t best_w = 0;
  double best_u = next_q_per_pref[0].project(0, omega_g);
  for (std::size_t w = 0; w < next_q_per_pref.size(); ++w) {
    const VectorQ& q = next_q_per_pref[w];
    for (int a = 0; a < q.actions(); ++a) {
      const double u = q.project(a, omega_g);
      if (u > best_u) {
        best_u = u;
        best_a = a;
        best_w = w;
      }
    }
  }
  const auto vec = next_q_per_pref[best_w].row(best_a);
  return {r.tran + gamma * vec[0], r.tele + gamma * vec[1]};
}

std::array<double, kObjectives> fixed_pref_target(
    const RewardVector& r, bool terminal, double gamma, const PreferenceVector& omega_g,
    const VectorQ& next_q_at_omega_g) {
  if (terminal) return {r.tran, r.tele};
  const int best_a = select_action(next_q_at_omega_g, omega_g);
  const auto vec = next_q_at_omega_g.row(best_a);
  return {r.tran + gamma * vec[0], r.tele + gamma * vec[1]};
}

EnvelopeLoss envelope_loss(std::span<const std::array<double, kObjectives>> targets,
                           std::span<const std::array<double, kObjectives>> predictions,
                           std::span<const PreferenceVector> omegas) {
  if (targets.size() != predictions.size() || targets.size() != omegas.size())
    throw std::invalid_argument("envelope_loss: mismatched row counts");
  if (targets.empty()) throw std::invalid_argument("envelope_loss: empty batch");

  EnvelopeLoss loss;
  const double inv_n = 1.0 / static_cast<double>(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double d0 = targets[i][0] - predictions[i][0];
    const double d1 = targets[i][1] - predictions[i][1];
    loss.vector_mse += (d0 * d0 + d1 * d1) * inv_n;
    const double du = omegas[i].w[0] * d0 + omegas[i].w[1] * d1;
    loss.utility_abs += std::fabs(du) * inv_n;
  }
  return loss;
}

NetworkSpec envelope_network_spec(int obs_dim, std::vector<int> hidden, int n_actions) {
  NetworkSpec spec;
  spec.input_dim = obs_dim + kObjectives;
  spec.hidden = std::move(hidden);
  spec.output_dim = n_actions * kObjectives;
  spec.validate();
  return spec;
}

EnvelopeAgent::EnvelopeAgent(int obs_dim, int n_actions, std::vector<int> hidden,
                             const EnvelopeAgentConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      obs_dim_(obs_dim),
      n_actions_(n_actions),
      q_eval_(Parameters::zeros(envelope_network_spec(obs_dim, hidden, n_actions))),
      q_target_(q_eval_),
      pool_(cfg.pool_capacity),
      pref_pool_(0),
      act_rng_(Rng(seed).substream("agent")),
      replay_rng_(Rng(seed).substream("replay")) {
  cfg_.validate();
  Rng init_rng = Rng(seed).substream("init");
  q_eval_ = Parameters::he_uniform(q_eval_.spec, init_rng);
  clone_into(q_eval_, q_target_);
  optimizer_ = Optimizer(cfg_.optimizer, q_eval_.spec);
}

VectorQ EnvelopeAgent::q_values(const Parameters& net, std::span<const double> obs,
                                const PreferenceVector& omega) const {
  std::vector<double> input;
  input.reserve(obs.size() + kObjectives);
  input.insert(input.end(), obs.begin(), obs.end());
  input.push_back(omega.w[0]);
  input.push_back(omega.w[1]);
  return VectorQ{forward(net, input)};
}

int EnvelopeAgent::act(std::span<const double> obs, const PreferenceVector& omega,
                       double epsilon) {
  if (act_rng_.uniform() < epsilon) return act_rng_.uniform_int(n_actions_);
  return select_action(q_values(obs, omega), omega);
}

std::optional<double> EnvelopeAgent::train_step() {
  if (pool_.size() < static_cast<std::size_t>(cfg_.batch)) return std::nullopt;

  // Hindsight sampling: stored transitions are replayed under freshly drawn
  // preferences, independent of the preference that generated them.
  const auto batch = pool_.sample(cfg_.batch, replay_rng_);
  const std::vector<PreferenceVector> prefs = pref_pool_.sample(cfg_.n_omega, replay_rng_);

  // Target-network vector Q at s' for every sampled preference.
  std::vector<std::vector<VectorQ>> next_q(batch.size());
  for (std::size_t z = 0; z < batch.size(); ++z) {
    if (batch[z]->terminal) continue;
    next_q[z].reserve(prefs.size());
    for (const auto& w : prefs) next_q[z].push_back(q_values(q_target_, batch[z]->s_next, w));
  }

  const double lambda = cfg_.lambda.at(train_steps_);
  const double inv_n = 1.0 / static_cast<double>(batch.size() * prefs.size());

  Parameters grads = Parameters::zeros(q_eval_.spec);
  double loss = 0.0;
  std::vector<double> input;
  for (std::size_t z = 0; z < batch.size(); ++z) {
    const Transition& t = *batch[z];
    for (std::size_t g = 0; g < prefs.size(); ++g) {
      const PreferenceVector& omega = prefs[g];
      const auto target =
          envelope_target(t.r, t.terminal, cfg_.gamma, omega, next_q[z]);

      input.assign(t.s.begin(), t.s.end());
      input.push_back(omega.w[0]);
      input.push_back(omega.w[1]);
      ForwardCache cache;
      const std::vector<double> out = forward(q_eval_, input, &cache);
      const std::size_t base = static_cast<std::size_t>(t.action) * kObjectives;
      const double d0 = out[base] - target[0];
      const double d1 = out[base + 1] - target[1];

      const double du = omega.w[0] * d0 + omega.w[1] * d1;
      loss += ((1.0 - lambda) * (d0 * d0 + d1 * d1) + lambda * std::fabs(du)) * inv_n;

      // d/dQ of (1-lambda) * ||Q - y||^2 + lambda * |omega . (Q - y)|
      const double sgn = du > 0.0 ? 1.0 : (du < 0.0 ? -1.0 : 0.0);
      std::vector<double> out_grad(out.size(), 0.0);
      out_grad[base] = ((1.0 - lambda) * 2.0 * d0 + lambda * sgn * omega.w[0]) * inv_n;
      out_grad[base + 1] = ((1.0 - lambda) * 2.0 * d1 + lambda * sgn * omega.w[1]) * inv_n;
      accumulate(grads, backward(q_eval_, cache, out_grad));
    }
  }
  optimizer_.apply_update(q_eval_, grads);
  if (!q_eval_.all_finite())
    throw std::runtime_error("EnvelopeAgent: parameters became non-finite");

  ++train_steps_;
  if (train_steps_ % cfg_.target_period == 0) clone_into(q_eval_, q_target_);
  return loss;
}

std::vector<MetricsRecord> train_envelope(VectorRewardEnv& env, EnvelopeAgent& agent,
                                          int episodes, const EpisodeHook& hook) {
  std::vector<MetricsRecord> records;
  records.reserve(episodes);
  const int m = env.agent_count();

  for (int ep = 0; ep < episodes; ++ep) {
    const double epsilon = agent.config().epsilon.at(ep, episodes);
    const PreferenceVector omega = agent.sample_preference();  // fixed within the episode
    std::vector<std::vector<double>> obs = env.reset();
    double disc = 1.0;
    RewardVector totals;
    bool done = false;
    int steps = 0;
    const auto started = std::chrono::steady_clock::now();
    while (!done) {
      std::vector<int> actions(m);
      for (int j = 0; j < m; ++j) actions[j] = agent.act(obs[j], omega, epsilon);
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
    rec.omega_tran = omega.w[0];
    rec.wall_ms = steps > 0 ? elapsed.count() / steps : 0.0;
    records.push_back(rec);
    if (hook) hook(ep, records.back());
  }
  return records;
}

std::pair<std::vector<MetricsRecord>, RewardVector> execute_policy(
    const Parameters& q_net, VectorRewardEnv& env, const PreferenceVector& omega, int episodes,
    double gamma) {
  if (episodes < 1) throw std::invalid_argument("execute_policy: episodes must be >= 1");
  omega.validate();

  std::vector<MetricsRecord> records;
  records.reserve(episodes);
  RewardVector mean;
  const int m = env.agent_count();

  for (int ep = 0; ep < episodes; ++ep) {
    std::vector<std::vector<double>> obs = env.reset();
    double disc = 1.0;
    RewardVector totals;
    bool done = false;
    std::vector<double> input;
    while (!done) {
      std::vector<int> actions(m);
      for (int j = 0; j < m; ++j) {
        input.assign(obs[j].begin(), obs[j].end());
        input.push_back(omega.w[0]);
        input.push_back(omega.w[1]);
        actions[j] = select_action(VectorQ{forward(q_net, input)}, omega);
      }
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
    rec.omega_tran = omega.w[0];
    records.push_back(rec);
    mean.tran += rec.r_tran;
    mean.tele += rec.r_tele;
  }
  mean.tran /= episodes;
  mean.tele /= episodes;
  return {std::move(records), mean};
}

}  // namespace vnet
