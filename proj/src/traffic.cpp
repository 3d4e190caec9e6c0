#include "vnet/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vnet {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// IDM acceleration of `follower` toward an optional `leader`.
double idm_toward(const VehicleState& follower, const VehicleState* leader,
                  const TrafficConfig& cfg) {
  if (leader == nullptr) return idm_acceleration(follower.v, 0.0, kInf, cfg);
  const double gap =
      ring_gap(follower.x, leader->x, follower.length, leader->length, cfg.road_length_m);
  return idm_acceleration(follower.v, follower.v - leader->v, gap, cfg);
}

}  // namespace

void TrafficConfig::validate() const {
  require(n_lanes >= 1, "TrafficConfig: n_lanes must be >= 1");
  require(lane_width_m > 0, "TrafficConfig: lane_width_m must be > 0");
  require(road_length_m > 0, "TrafficConfig: road_length_m must be > 0");
  require(dt_s > 0, "TrafficConfig: dt_s must be > 0");
  require(a_c > 0, "TrafficConfig: a_c must be > 0");
  require(b_c > 0, "TrafficConfig: b_c must be > 0");
  require(b_hard > 0, "TrafficConfig: b_hard must be > 0");
  require(v0 > 0, "TrafficConfig: v0 must be > 0");
  require(d0 > 0, "TrafficConfig: d0 must be > 0");
  require(t_gap >= 0, "TrafficConfig: t_gap must be >= 0");
  require(v_min < v_max, "TrafficConfig: v_min must be < v_max");
  require(v_hardmax >= v_max, "TrafficConfig: v_hardmax must be >= v_max");
  require(max_steer > 0 && max_steer <= kPi / 2, "TrafficConfig: max_steer out of (0, pi/2]");
}

int TrafficConfig::nearest_lane(double y) const {
  const long lane = std::lround(y / lane_width_m - 0.5);
  return static_cast<int>(std::clamp(lane, 0L, static_cast<long>(n_lanes - 1)));
}

VehicleState step_kinematics(const VehicleState& s, double accel, double steer_fa, double dt,
                             double v_hardmax) {
  if (!(std::isfinite(accel) && std::isfinite(steer_fa) && std::isfinite(dt) && dt > 0.0))
    throw std::domain_error("step_kinematics: inputs must be finite, dt > 0");
  if (std::fabs(steer_fa) > kPi / 3.0 + 1e-12)
    throw std::domain_error("step_kinematics: |steer| exceeds the maximum steering angle");

  VehicleState out = s;
  out.beta = std::atan(std::tan(steer_fa) / 2.0);
  out.x = s.x + s.v * std::cos(s.psi + out.beta) * dt;
  out.y = s.y + s.v * std::sin(s.psi + out.beta) * dt;
  out.v = std::clamp(s.v + accel * dt, 0.0, v_hardmax);
  return out;
}

double target_heading_rate(const VehicleState& s, double y_lane, const TrafficConfig& cfg) {
  if (s.v <= 0.0) return 0.0;  // heading undefined at standstill
  const double lateral = cfg.k_y * (y_lane - s.y);
  const double ratio = std::clamp(lateral / s.v, -1.0, 1.0);
  const double psi_lane = 0.0;  // straight road
  return cfg.k_psi * (psi_lane + std::asin(ratio) - s.psi);
}

double idm_acceleration(double v, double dv, double d, const TrafficConfig& cfg) {
  if (!(std::isfinite(v) && std::isfinite(dv)))
    throw std::domain_error("idm_acceleration: speed inputs must be finite");
  if (!(d > 0.0)) return -cfg.b_hard;  // emergency

  const double desired_gap =
      cfg.d0 + std::max(0.0, cfg.t_gap * v + v * dv / (2.0 * std::sqrt(cfg.a_c * cfg.b_c)));
  const double gap_ratio = std::isinf(d) ? 0.0 : desired_gap / d;
  const double a = cfg.a_c * (1.0 - std::pow(std::fabs(v) / cfg.v0, cfg.delta_a) -
                              gap_ratio * gap_ratio);
  return std::clamp(a, -cfg.b_hard, cfg.a_c);
}

double target_longitudinal_accel(const VehicleState& s, const TrafficConfig& cfg) {
  return std::clamp(cfg.k0_v * (s.v_r - s.v), -cfg.b_hard, cfg.a_c);
}

LaneChange mobil_decision(const VehicleState& ego, const MobilScene& scene,
                          const TrafficConfig& cfg) {
  const VehicleState* cur_leader =
      scene.current.leader ? &*scene.current.leader : nullptr;
  const VehicleState* cur_follower =
      scene.current.follower ? &*scene.current.follower : nullptr;

  const double a_ego = idm_toward(ego, cur_leader, cfg);

  // Old follower's relief when ego leaves: it closes up on ego's current leader.
  double old_follower_gain = 0.0;
  if (cur_follower != nullptr) {
    const double a_old = idm_toward(*cur_follower, &ego, cfg);
    const double a_old_after = idm_toward(*cur_follower, cur_leader, cfg);
    old_follower_gain = a_old_after - a_old;
  }

  auto evaluate = [&](const LaneContext& ctx) -> std::optional<double> {
    const VehicleState* new_leader = ctx.leader ? &*ctx.leader : nullptr;
    const VehicleState* new_follower = ctx.follower ? &*ctx.follower : nullptr;

    double new_follower_change = 0.0;
    if (new_follower != nullptr) {
      const double a_new = idm_toward(*new_follower, new_leader, cfg);
      const double a_new_after = idm_toward(*new_follower, &ego, cfg);
      if (a_new_after < -cfg.b_safe) return std::nullopt;  // safety veto
      new_follower_change = a_new_after - a_new;
    }

    const double a_ego_after = idm_toward(ego, new_leader, cfg);
    const double incentive = a_ego_after - a_ego +
                             cfg.p_polite * (old_follower_gain + new_follower_change);
    if (incentive < cfg.da_th) return std::nullopt;
    return incentive;
  };

  std::optional<double> right_gain, left_gain;
  if (scene.right) right_gain = evaluate(*scene.right);
  if (scene.left) left_gain = evaluate(*scene.left);

  if (right_gain && left_gain)
    return *left_gain > *right_gain ? LaneChange::kLeft : LaneChange::kRight;
  if (right_gain) return LaneChange::kRight;
  if (left_gain) return LaneChange::kLeft;
  return LaneChange::kStay;
}

double ring_distance(double x1, double x2, double road_length) {
  double dx = std::fabs(x1 - x2);
  dx = std::fmod(dx, road_length);
  return std::min(dx, road_length - dx);
}

double ring_gap(double x_back, double x_front, double len_back, double len_front,
                double road_length) {
  double ahead = std::fmod(x_front - x_back, road_length);
  if (ahead < 0.0) ahead += road_length;
  return ahead - 0.5 * (len_back + len_front);
}

std::set<int> detect_collisions(std::span<VehicleState> vehicles, const TrafficConfig& cfg) {
  std::set<int> hit;
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    for (std::size_t j = i + 1; j < vehicles.size(); ++j) {
      auto& a = vehicles[i];
      auto& b = vehicles[j];
      const double dx = ring_distance(a.x, b.x, cfg.road_length_m);
      if (dx >= 0.5 * (a.length + b.length)) continue;
      const bool lateral_overlap = std::fabs(a.y - b.y) < 0.9 * cfg.lane_width_m;
      if (a.lane != b.lane && !lateral_overlap) continue;
      a.crashed = true;
      b.crashed = true;
      hit.insert(a.id);
      hit.insert(b.id);
    }
  }
  return hit;
}

World::World(TrafficConfig cfg, std::vector<VehicleState> vehicles)
    : cfg_(cfg), vehicles_(std::move(vehicles)) {
  cfg_.validate();
}

LaneContext World::lane_context(int idx, int lane) const {
  const VehicleState& ego = vehicles_[idx];
  LaneContext ctx;
  double best_ahead = kInf;
  double best_behind = kInf;
  for (int k = 0; k < static_cast<int>(vehicles_.size()); ++k) {
    if (k == idx) continue;
    const VehicleState& other = vehicles_[k];
    if (other.lane != lane) continue;
    double ahead = std::fmod(other.x - ego.x, cfg_.road_length_m);
    if (ahead < 0.0) ahead += cfg_.road_length_m;
    if (ahead <= 0.5 * cfg_.road_length_m) {
      if (ahead < best_ahead) {
        best_ahead = ahead;
        ctx.leader = other;
      }
    } else {
      const double behind = cfg_.road_length_m - ahead;
      if (behind < best_behind) {
        best_behind = behind;
        ctx.follower = other;
      }
    }
  }
  return ctx;
}

MobilScene World::scene_around(int idx) const {
  const VehicleState& ego = vehicles_[idx];
  MobilScene scene;
  scene.current = lane_context(idx, ego.lane);
  if (ego.lane > 0) scene.left = lane_context(idx, ego.lane - 1);
  if (ego.lane < cfg_.n_lanes - 1) scene.right = lane_context(idx, ego.lane + 1);
  return scene;
}

void World::advance() {
  const double dt = cfg_.dt_s;
  const int n = static_cast<int>(vehicles_.size());

  // Lane-change decisions for surrounding AVs, evaluated on the pre-step state
  // and applied as discrete lane teleports.
  std::vector<int> new_lane(n);
  for (int i = 0; i < n; ++i) new_lane[i] = vehicles_[i].lane;
  for (int i = 0; i < n; ++i) {
    const VehicleState& s = vehicles_[i];
    if (s.cls != VehicleClass::kSurrounding || s.crashed) continue;
    switch (mobil_decision(s, scene_around(i), cfg_)) {
      case LaneChange::kLeft: new_lane[i] = s.lane - 1; break;
      case LaneChange::kRight: new_lane[i] = s.lane + 1; break;
      case LaneChange::kStay: break;
    }
  }
  for (int i = 0; i < n; ++i) {
    VehicleState& s = vehicles_[i];
    if (new_lane[i] == s.lane) continue;
    s.lane = new_lane[i];
    s.target_lane = new_lane[i];
    s.y = cfg_.lane_center(new_lane[i]);
  }

  // Control rates from the post-lane-change state, then one simultaneous
  // explicit-Euler update.
  std::vector<double> accel(n, 0.0), psi_rate(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const VehicleState& s = vehicles_[i];
    if (s.crashed) continue;
    if (s.cls == VehicleClass::kTarget) {
      accel[i] = target_longitudinal_accel(s, cfg_);
      psi_rate[i] = target_heading_rate(s, cfg_.lane_center(s.target_lane), cfg_);
    } else {
      LaneContext ctx = lane_context(i, s.lane);
      accel[i] = idm_toward(s, ctx.leader ? &*ctx.leader : nullptr, cfg_);
    }
  }

  for (int i = 0; i < n; ++i) {
    VehicleState& s = vehicles_[i];
    if (s.crashed) continue;  // crashed vehicles freeze in place as obstacles
    VehicleState next = step_kinematics(s, accel[i], 0.0, dt, cfg_.v_hardmax);
    next.psi = s.psi + psi_rate[i] * dt;
    next.x = std::fmod(next.x, cfg_.road_length_m);
    if (next.x < 0.0) next.x += cfg_.road_length_m;
    if (s.cls == VehicleClass::kSurrounding) next.y = s.y;  // lateral motion is discrete
    next.lane = cfg_.nearest_lane(next.y);
    s = next;
  }
  time_ += dt;
}

std::set<int> World::detect_and_mark_collisions() {
  return detect_collisions(vehicles_, cfg_);
}

}  // namespace vnet
