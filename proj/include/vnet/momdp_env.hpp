#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vnet/channel.hpp"
#include "vnet/env.hpp"
#include "vnet/rng.hpp"
#include "vnet/traffic.hpp"
#include "vnet/types.hpp"

namespace vnet {

struct BaseStation {
  int id = 0;
  enum class Kind { kRbs, kTbs };
  Kind kind = Kind::kRbs;
  double x = 0.0;
  double y = 0.0;
  int quota = 1;
};

// Scenario shape: vehicle counts, speed band, station counts, horizon.
struct InstanceConfig {
  int n_rbs = 5;
  int n_tbs = 20;
  int m_total = 25;   // all AVs
  int m_target = 5;   // policy-controlled AVs
  double v_min = 20.0;
  double v_max = 30.0;
  int horizon = 30;
  int obs_k_nearest = 0;  // surrounding rows appended to the state matrix (0 = off)

  int m_surrounding() const { return m_total - m_target; }
  void validate() const;

  // Named presets: I-(v_min,v_max,n_T,M) test instances plus "desk".
  static InstanceConfig preset(std::string_view name);
  static std::vector<std::string> preset_names();
};

struct RewardConfig {
  double c1 = 0.4;  // speed
  double c2 = 1.0;  // collision (must dominate c1..c4)
  double c3 = 0.1;  // right-most lane
  double c4 = 0.2;  // on-road
  double c5 = 4.5e-7;  // data-rate scaling
  double r_th_bps = 5e7;
  double sense_radius_m = 200.0;

  void validate() const;
};

// Per-AV transportation reward, clamped to [0, 1].
double transport_reward(const VehicleState& av, bool collided, const TrafficConfig& tcfg,
                        const RewardConfig& cfg);

// Per-AV telecommunication reward: scaled weighted rate, suppressed by the
// handover probability.
double telecom_reward(double wr_bps, double ho_prob, const RewardConfig& cfg);

// One association decision: returns the chosen station index.
//   policy 0: argmax weighted rate with the handover penalty applied;
//   policy 1: argmax weighted rate (mu = 0) over stations within quota,
//             falling back through the ranking while none is vacant;
//   policy 2: argmax raw achievable rate.
// Exact ties break to the lowest station index.
int associate_bs(int policy, int current_bs, std::span<const double> rates,
                 std::span<const BaseStation> stations, std::span<const int> loads);

// The MOMDP: highway world + multi-band radio + per-AV vector rewards.
class MomdpEnv : public VectorRewardEnv {
 public:
  MomdpEnv(const InstanceConfig& inst, const RadioConfig& radio, const TrafficConfig& traffic,
           const RewardConfig& reward, std::uint64_t seed);

  // Scripted layout for tests: reset() restores exactly this configuration.
  MomdpEnv(std::vector<VehicleState> vehicles, std::vector<BaseStation> stations,
           const InstanceConfig& inst, const RadioConfig& radio, const TrafficConfig& traffic,
           const RewardConfig& reward, std::uint64_t seed);

  int observation_dim() const override;
  int action_count() const override { return JointAction::kCount; }
  int agent_count() const override { return inst_.m_target; }
  int horizon() const override { return inst_.horizon; }

  std::vector<std::vector<double>> reset() override;
  StepOut step(std::span<const int> flat_actions) override;

  double collision_rate() const override;
  double ho_probability() const override;

  std::vector<double> observe(int target_index) const;

  bool done() const { return done_; }
  int steps_done() const { return t_; }
  const World& world() const { return world_; }
  World& world_mut() { return world_; }
  std::span<const BaseStation> base_stations() const { return stations_; }
  int serving_bs(int target_index) const { return assoc_.at(target_index); }
  int ho_count(int target_index) const { return ho_count_.at(target_index); }
  std::span<const int> bs_loads() const { return loads_; }
  double last_weighted_rate(int target_index) const { return last_wr_.at(target_index); }

  // Achievable rate of one station toward one target AV with deterministic
  // channel randomness (unit fading, expected interferer alignment).
  double deterministic_rate(const VehicleState& av, const BaseStation& bs) const;

 private:
  void init_episode_rng();
  void place_randomly();
  void sample_channel();
  void compute_rates();
  void initial_association();
  std::vector<std::vector<double>> all_observations() const;
  LinkGeometry link_geometry(const VehicleState& av, const BaseStation& bs) const;
  double sampled_rate(int target_index, int bs_index) const;

  InstanceConfig inst_;
  RadioConfig radio_;
  TrafficConfig traffic_;
  RewardConfig reward_;
  Rng root_rng_;
  Rng episode_rng_;
  long episode_counter_ = 0;

  bool scripted_ = false;
  std::vector<VehicleState> scripted_vehicles_;
  std::vector<BaseStation> scripted_stations_;

  World world_;
  std::vector<BaseStation> stations_;
  std::vector<int> assoc_;      // per target AV: serving station index
  std::vector<int> loads_;      // per station
  std::vector<int> ho_count_;   // per target AV
  std::vector<double> last_wr_; // per target AV
  std::vector<std::vector<double>> fading_;  // [target][rbs] exponential fading
  std::vector<std::vector<double>> align_;   // [target][tbs] sampled gain product
  std::vector<std::vector<double>> rates_;   // [target][station]
  int t_ = 0;
  bool done_ = true;
};

}  // namespace vnet
