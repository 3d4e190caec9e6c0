#pragma once

#include <span>
#include <vector>

#include "vnet/types.hpp"

namespace vnet {

// Episodic environment with vector rewards and a shared policy across agents.
class VectorRewardEnv {
 public:
  virtual ~VectorRewardEnv() = default;

  virtual int observation_dim() const = 0;
  virtual int action_count() const = 0;
  virtual int agent_count() const = 0;
  virtual int horizon() const = 0;

  virtual std::vector<std::vector<double>> reset() = 0;

  struct StepOut {
    std::vector<std::vector<double>> obs;
    std::vector<RewardVector> rewards;
    bool done = false;
  };
  virtual StepOut step(std::span<const int> flat_actions) = 0;

  // Episode statistics, valid once the episode is done.
  virtual double collision_rate() const { return 0.0; }
  virtual double ho_probability() const { return 0.0; }
};

}  // namespace vnet
