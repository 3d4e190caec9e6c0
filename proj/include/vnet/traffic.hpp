#pragma once

#include <optional>
#include <set>
#include <span>
#include <vector>

#include "vnet/channel.hpp"  // kPi
#include "vnet/rng.hpp"

namespace vnet {

enum class VehicleClass { kTarget, kSurrounding };

struct VehicleState {
  int id = 0;
  VehicleClass cls = VehicleClass::kSurrounding;
  double x = 0.0;    // longitudinal position, wraps on [0, road_length)
  double y = 0.0;    // lateral position, lane centers at (lane + 0.5) * lane_width
  double v = 0.0;    // longitudinal speed
  double psi = 0.0;  // heading
  double beta = 0.0;  // slip angle
  int lane = 0;
  int target_lane = 0;
  double v_r = 0.0;  // commanded speed (target AVs)
  double length = 5.0;
  bool crashed = false;
};

struct TrafficConfig {
  int n_lanes = 5;
  double lane_width_m = 4.0;
  double road_length_m = 1500.0;
  double dt_s = 1.0 / 15.0;  // 15 Hz policy/motion update
  double k_psi = 5.0;        // heading control gain
  double k_y = 5.0 / 3.0;    // lateral control gain
  double k0_v = 5.0;         // speed control gain; settles |v_r - v| within ~1 s
  double a_c = 3.0;          // max acceleration
  double b_c = 2.0;          // comfortable braking (IDM)
  double b_hard = 5.0;       // max deceleration magnitude
  double v0 = 30.0;          // IDM desired speed
  double delta_a = 4.0;      // acceleration exponent
  double d0 = 10.0;          // jam distance
  double t_gap = 1.5;        // safe time gap
  double p_polite = 0.3;     // MOBIL politeness
  double b_safe = 4.0;       // max braking imposed on the new follower
  double da_th = 0.2;        // lane-change incentive threshold
  double v_min = 20.0;       // commanded-speed band
  double v_max = 30.0;
  double dv_action = 5.0;    // speed-target increment per action
  double v_hardmax = 60.0;   // absolute speed ceiling for integration
  double max_steer = kPi / 3.0;

  void validate() const;

  double lane_center(int lane) const { return (lane + 0.5) * lane_width_m; }
  int nearest_lane(double y) const;
};

// One explicit-Euler step of the kinematic bicycle (position/speed only;
// heading integrates separately from its own rate).
VehicleState step_kinematics(const VehicleState& s, double accel, double steer_fa, double dt,
                             double v_hardmax);

// Heading rate steering a target AV toward the given lane center. Zero at standstill.
double target_heading_rate(const VehicleState& s, double y_lane, const TrafficConfig& cfg);

// IDM car-following acceleration. dv is the closing speed (v - v_leader); d is the
// bumper-to-bumper gap (+inf for no leader). d <= 0 is an emergency: full braking.
double idm_acceleration(double v, double dv, double d, const TrafficConfig& cfg);

// Proportional speed tracking for target AVs, clamped to [-b_hard, a_c].
double target_longitudinal_accel(const VehicleState& s, const TrafficConfig& cfg);

enum class LaneChange { kStay, kLeft, kRight };

struct LaneContext {
  std::optional<VehicleState> leader;
  std::optional<VehicleState> follower;
};

struct MobilScene {
  LaneContext current;
  std::optional<LaneContext> left;   // nullopt when no lane exists on that side
  std::optional<LaneContext> right;
};

// MOBIL: a candidate lane is accepted iff the new follower stays above -b_safe
// and the politeness-weighted incentive clears da_th. Ties go right.
LaneChange mobil_decision(const VehicleState& ego, const MobilScene& scene,
                          const TrafficConfig& cfg);

// Marks and returns vehicles in longitudinal overlap that share a lane index or
// sit laterally closer than 0.9 lane widths (mid-lane-change). Ring-aware.
std::set<int> detect_collisions(std::span<VehicleState> vehicles, const TrafficConfig& cfg);

// Forward gap from the rear vehicle's front bumper to the leader's rear bumper
// on the ring road.
double ring_gap(double x_back, double x_front, double len_back, double len_front,
                double road_length);

// Shortest ring distance between two longitudinal positions.
double ring_distance(double x1, double x2, double road_length);

// Discrete-time highway world. Target AVs track commanded speed and lane;
// surrounding AVs follow IDM with MOBIL lane changes (lane index teleports).
class World {
 public:
  World() = default;
  World(TrafficConfig cfg, std::vector<VehicleState> vehicles);

  void advance();  // one dt step
  std::set<int> detect_and_mark_collisions();

  const TrafficConfig& config() const { return cfg_; }
  std::span<const VehicleState> vehicles() const { return vehicles_; }
  std::span<VehicleState> vehicles_mut() { return vehicles_; }
  double time() const { return time_; }

  // Nearest leader/follower scene around vehicle `idx` for MOBIL evaluation.
  MobilScene scene_around(int idx) const;

 private:
  LaneContext lane_context(int idx, int lane) const;

  TrafficConfig cfg_{};
  std::vector<VehicleState> vehicles_;
  double time_ = 0.0;
};

}  // namespace vnet
