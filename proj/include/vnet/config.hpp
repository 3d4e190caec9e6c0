#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vnet/channel.hpp"
#include "vnet/momdp_env.hpp"
#include "vnet/morl_envelope.hpp"
#include "vnet/morl_scalar.hpp"
#include "vnet/neural.hpp"
#include "vnet/traffic.hpp"

namespace vnet {

struct AgentSettings {
  double gamma = 0.995;
  double learning_rate = 3e-4;
  std::vector<int> hidden{64, 64};
  int batch = 64;
  int target_period = 200;
  int n_omega = 4;
  std::size_t pool_capacity = 100000;
  EpsilonSchedule epsilon;
  LambdaSchedule::Kind lambda_kind = LambdaSchedule::Kind::kLinear;
  OptimizerConfig::Kind optimizer = OptimizerConfig::Kind::kAdam;
};

// Declarative experiment description: flat-sectioned key = value text with
// units in key names. Unknown keys are hard errors.
struct ExperimentConfig {
  std::string algorithm = "mo_ddqn_envelope";  // mo_dqn | mo_ddqn | mo_ddqn_envelope
  int episodes = 300;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int checkpoint_every = 100;

  InstanceConfig instance = InstanceConfig::preset("desk");
  RadioConfig radio;
  TrafficConfig traffic;
  RewardConfig reward;
  AgentSettings agent;

  void validate() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);

// Parses the same syntax from a string; `origin` names the source in errors.
ExperimentConfig parse_config(const std::string& text, const std::string& origin);

}  // namespace vnet
