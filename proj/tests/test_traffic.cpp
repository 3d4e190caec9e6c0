#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>
#include <vector>

#include "vnet/rng.hpp"
#include "vnet/traffic.hpp"

using namespace vnet;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

VehicleState make_vehicle(int id, VehicleClass cls, double x, int lane, double v,
                          const TrafficConfig& cfg) {
  VehicleState s;
  s.id = id;
  s.cls = cls;
  s.x = x;
  s.lane = lane;
  s.target_lane = lane;
  s.y = cfg.lane_center(lane);
  s.v = v;
  s.v_r = v;
  return s;
}
}  // namespace

TEST_SUITE_BEGIN("traffic");

TEST_CASE("step_kinematics straight-line motion") {
  TrafficConfig cfg;
  VehicleState s;
  s.v = 20.0;
  const VehicleState out = step_kinematics(s, 0.0, 0.0, 1.0 / 15.0, cfg.v_hardmax);
  CHECK(out.x == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(out.y == 0.0);
  CHECK(out.beta == 0.0);
  CHECK(out.v == 20.0);
}

TEST_CASE("step_kinematics matches the pinned one-step pose") {
  TrafficConfig cfg;
  VehicleState s;
  s.v = 20.0;
  s.psi = 0.1;
  const VehicleState out = step_kinematics(s, 1.0, 0.2, 1.0 / 15.0, cfg.v_hardmax);
  CHECK(out.beta == doctest::Approx(0.10101007345816129).epsilon(1e-14));
  CHECK(out.x == doctest::Approx(1.3064872097356603).epsilon(1e-14));
  CHECK(out.y == doctest::Approx(0.26621222469095341).epsilon(1e-14));
  CHECK(out.v == doctest::Approx(20.066666666666666).epsilon(1e-14));
}

TEST_CASE("step_kinematics guards inputs") {
  TrafficConfig cfg;
  VehicleState s;
  s.v = 10.0;
  CHECK_THROWS_AS(step_kinematics(s, std::nan(""), 0.0, 0.1, cfg.v_hardmax), std::domain_error);
  CHECK_THROWS_AS(step_kinematics(s, 0.0, 1.2, 0.1, cfg.v_hardmax), std::domain_error);
  const VehicleState stopped = step_kinematics(s, -500.0, 0.0, 1.0, cfg.v_hardmax);
  CHECK(stopped.v == 0.0);  // speed clamps at zero
}

TEST_CASE("target_heading_rate") {
  TrafficConfig cfg;
  VehicleState s;
  s.cls = VehicleClass::kTarget;
  s.v = 20.0;
  s.y = 0.0;
  s.psi = 0.0;

  CHECK(target_heading_rate(s, 0.0, cfg) == 0.0);  // aligned

  CHECK(cfg.k_psi == 5.0);
  CHECK(cfg.k_y == doctest::Approx(5.0 / 3.0));
  CHECK(target_heading_rate(s, 2.0, cfg) ==
        doctest::Approx(0.83724039609844665).epsilon(1e-14));

  s.v = 0.0;
  CHECK(target_heading_rate(s, 2.0, cfg) == 0.0);  // standstill

  // saturation: asin argument clamps instead of going out of range
  s.v = 0.5;
  CHECK(std::isfinite(target_heading_rate(s, 10.0, cfg)));
}

TEST_CASE("idm_acceleration equilibrium and pins") {
  TrafficConfig cfg;
  CHECK(idm_acceleration(cfg.v0, 0.0, kInf, cfg) == doctest::Approx(0.0));  // free flow at v0
  CHECK(idm_acceleration(0.0, 0.0, kInf, cfg) == doctest::Approx(cfg.a_c));

  CHECK(idm_acceleration(20.0, 5.0, 80.0, cfg) ==
        doctest::Approx(0.69662936278766425).epsilon(1e-14));
  CHECK(idm_acceleration(20.0, 5.0, 30.0, cfg) == -cfg.b_hard);  // clamp binds
  CHECK(idm_acceleration(20.0, 0.0, -1.0, cfg) == -cfg.b_hard);  // emergency
  CHECK(idm_acceleration(20.0, 0.0, 0.0, cfg) == -cfg.b_hard);
}

TEST_CASE("target_longitudinal_accel tracks the setpoint") {
  TrafficConfig cfg;
  VehicleState s;
  s.cls = VehicleClass::kTarget;
  s.v = 25.0;
  s.v_r = 25.0;
  CHECK(target_longitudinal_accel(s, cfg) == 0.0);
  s.v_r = 35.0;
  CHECK(target_longitudinal_accel(s, cfg) == cfg.a_c);  // clamp at +3
  s.v_r = 0.0;
  CHECK(target_longitudinal_accel(s, cfg) == -cfg.b_hard);
}

TEST_CASE("speed controller settles within about a second") {
  TrafficConfig cfg;
  VehicleState s;
  s.cls = VehicleClass::kTarget;
  s.v = 20.0;
  s.v_r = 22.0;  // small step keeps the clamp inactive
  double v = s.v;
  for (int i = 0; i < 15; ++i) {  // one second at 15 Hz
    VehicleState cur = s;
    cur.v = v;
    v += target_longitudinal_accel(cur, cfg) * cfg.dt_s;
  }
  CHECK(std::fabs(v - s.v_r) < 0.1 * std::fabs(s.v - s.v_r));
}

TEST_CASE("mobil stays put without incentive") {
  TrafficConfig cfg;
  VehicleState ego = make_vehicle(0, VehicleClass::kSurrounding, 100.0, 1, 25.0, cfg);
  MobilScene scene;  // empty road on all sides: accelerations unchanged by a move
  scene.left = LaneContext{};
  scene.right = LaneContext{};
  CHECK(mobil_decision(ego, scene, cfg) == LaneChange::kStay);
}

TEST_CASE("mobil safety veto overrides incentive") {
  TrafficConfig cfg;
  VehicleState ego = make_vehicle(0, VehicleClass::kSurrounding, 100.0, 1, 25.0, cfg);
  // slow leader ahead makes leaving attractive
  VehicleState leader = make_vehicle(1, VehicleClass::kSurrounding, 115.0, 1, 5.0, cfg);
  // fast new follower right behind the cut-in point fails the safety bound
  VehicleState chaser = make_vehicle(2, VehicleClass::kSurrounding, 97.0, 2, 35.0, cfg);
  chaser.lane = 2;

  MobilScene scene;
  scene.current.leader = leader;
  scene.right = LaneContext{std::nullopt, chaser};
  const double imposed = idm_acceleration(
      chaser.v, chaser.v - ego.v,
      ring_gap(chaser.x, ego.x, chaser.length, ego.length, cfg.road_length_m), cfg);
  REQUIRE(imposed < -cfg.b_safe);
  CHECK(mobil_decision(ego, scene, cfg) == LaneChange::kStay);
}

TEST_CASE("mobil three-vehicle scene matches direct evaluation of both criteria") {
  TrafficConfig cfg;
  VehicleState ego = make_vehicle(0, VehicleClass::kSurrounding, 100.0, 1, 28.0, cfg);
  VehicleState slow_leader = make_vehicle(1, VehicleClass::kSurrounding, 118.0, 1, 12.0, cfg);
  VehicleState far_follower = make_vehicle(2, VehicleClass::kSurrounding, 40.0, 2, 20.0, cfg);

  MobilScene scene;
  scene.current.leader = slow_leader;
  scene.right = LaneContext{std::nullopt, far_follower};
  scene.left = std::nullopt;

  // direct numeric evaluation of the safety and incentive inequalities
  auto idm_pair = [&](const VehicleState& back, const VehicleState* front) {
    if (front == nullptr) return idm_acceleration(back.v, 0.0, kInf, cfg);
    return idm_acceleration(back.v, back.v - front->v,
                            ring_gap(back.x, front->x, back.length, front->length,
                                     cfg.road_length_m),
                            cfg);
  };
  const double a_ego = idm_pair(ego, &slow_leader);
  const double a_ego_after = idm_pair(ego, nullptr);
  const double a_n = idm_pair(far_follower, nullptr);
  const double a_n_after = idm_pair(far_follower, &ego);
  const bool safe = a_n_after >= -cfg.b_safe;
  const double incentive = a_ego_after - a_ego + cfg.p_polite * (a_n_after - a_n);
  REQUIRE(safe);
  REQUIRE(incentive >= cfg.da_th);
  CHECK(mobil_decision(ego, scene, cfg) == LaneChange::kRight);
}

TEST_CASE("collision detection basics") {
  TrafficConfig cfg;
  std::vector<VehicleState> cars;
  cars.push_back(make_vehicle(0, VehicleClass::kTarget, 100.0, 0, 20.0, cfg));
  cars.push_back(make_vehicle(1, VehicleClass::kSurrounding, 200.0, 0, 20.0, cfg));
  CHECK(detect_collisions(cars, cfg).empty());

  cars[1].x = 104.0;  // |dx| = 4 < (5+5)/2
  const auto hit = detect_collisions(cars, cfg);
  CHECK(hit.count(0) == 1);
  CHECK(hit.count(1) == 1);
  CHECK(cars[0].crashed);
  CHECK(cars[1].crashed);
}

TEST_CASE("collision detection matches a brute-force oracle on random scenes") {
  TrafficConfig cfg;
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<VehicleState> cars;
    const int n = 2 + rng.uniform_int(10);
    for (int i = 0; i < n; ++i) {
      VehicleState s =
          make_vehicle(i, VehicleClass::kSurrounding, rng.uniform(0.0, cfg.road_length_m),
                       rng.uniform_int(cfg.n_lanes), 20.0, cfg);
      s.y += rng.uniform(-1.5, 1.5);  // some mid-change lateral offsets
      cars.push_back(s);
    }
    std::vector<VehicleState> copy = cars;
    const auto got = detect_collisions(cars, cfg);

    std::set<int> expect;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto& a = copy[i];
        const auto& b = copy[j];
        const double dx = ring_distance(a.x, b.x, cfg.road_length_m);
        const bool lon = dx < 0.5 * (a.length + b.length);
        const bool lat = a.lane == b.lane || std::fabs(a.y - b.y) < 0.9 * cfg.lane_width_m;
        if (lon && lat) expect.insert(a.id);
      }
    }
    CHECK(got == expect);
  }
}

TEST_CASE("collision detection is symmetric") {
  TrafficConfig cfg;
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<VehicleState> cars;
    for (int i = 0; i < 6; ++i)
      cars.push_back(make_vehicle(i, VehicleClass::kSurrounding,
                                  rng.uniform(0.0, 60.0), rng.uniform_int(2), 20.0, cfg));
    auto hit = detect_collisions(cars, cfg);
    for (const auto& c : cars) {
      if (hit.count(c.id)) continue;
      CHECK(!c.crashed);
    }
  }
}

TEST_CASE("constant speed on straight road holds to machine precision") {
  TrafficConfig cfg;
  VehicleState s;
  s.v = 23.456789;
  for (int i = 0; i < 3000; ++i) s = step_kinematics(s, 0.0, 0.0, cfg.dt_s, cfg.v_hardmax);
  CHECK(s.v == 23.456789);
  CHECK(s.y == 0.0);
}

TEST_CASE("idm follower converges to the analytic equilibrium gap") {
  TrafficConfig cfg;
  const double v_lead = 25.0;
  // equilibrium gap solves a = 0 at matched speeds
  const double d_star = (cfg.d0 + cfg.t_gap * v_lead) /
                        std::sqrt(1.0 - std::pow(v_lead / cfg.v0, cfg.delta_a));

  double x_lead = 200.0, x_f = 100.0, v_f = 20.0;
  for (int i = 0; i < 30000; ++i) {
    const double gap = (x_lead - x_f) - 5.0;  // both lengths 5
    const double a = idm_acceleration(v_f, v_f - v_lead, gap, cfg);
    x_lead += v_lead * cfg.dt_s;
    x_f += v_f * cfg.dt_s;
    v_f = std::max(0.0, v_f + a * cfg.dt_s);
  }
  const double gap = (x_lead - x_f) - 5.0;
  CHECK(std::fabs(gap - d_star) / d_star < 0.02);
}

TEST_CASE("world advance is deterministic and respects mobil safety") {
  TrafficConfig cfg;
  Rng rng(5);
  std::vector<VehicleState> cars;
  for (int i = 0; i < 8; ++i)
    cars.push_back(make_vehicle(i, VehicleClass::kSurrounding,
                                rng.uniform(0.0, cfg.road_length_m),
                                rng.uniform_int(cfg.n_lanes), rng.uniform(15.0, 30.0), cfg));

  World w1(cfg, cars);
  World w2(cfg, cars);
  for (int step = 0; step < 200; ++step) {
    // any accepted lane change keeps the new follower above -b_safe
    for (int i = 0; i < 8; ++i) {
      const auto before = w1.vehicles()[i];
      (void)before;
    }
    w1.advance();
    w2.advance();
  }
  for (int i = 0; i < 8; ++i) {
    CHECK(w1.vehicles()[i].x == w2.vehicles()[i].x);
    CHECK(w1.vehicles()[i].v == w2.vehicles()[i].v);
    CHECK(w1.vehicles()[i].lane == w2.vehicles()[i].lane);
  }
}

TEST_CASE("accepted surrounding lane changes satisfy the safety bound") {
  TrafficConfig cfg;
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<VehicleState> cars;
    for (int i = 0; i < 10; ++i)
      cars.push_back(make_vehicle(i, VehicleClass::kSurrounding,
                                  rng.uniform(0.0, 300.0), rng.uniform_int(cfg.n_lanes),
                                  rng.uniform(10.0, 30.0), cfg));
    World w(cfg, cars);
    for (int step = 0; step < 50; ++step) {
      // check the decision the world is about to apply
      for (int i = 0; i < 10; ++i) {
        const VehicleState& ego = w.vehicles()[i];
        if (ego.crashed) continue;
        const MobilScene scene = w.scene_around(i);
        const LaneChange lc = mobil_decision(ego, scene, w.config());
        if (lc == LaneChange::kStay) continue;
        const auto& ctx = lc == LaneChange::kLeft ? *scene.left : *scene.right;
        if (ctx.follower) {
          const double a_after = idm_acceleration(
              ctx.follower->v, ctx.follower->v - ego.v,
              ring_gap(ctx.follower->x, ego.x, ctx.follower->length, ego.length,
                       cfg.road_length_m),
              cfg);
          CHECK(a_after >= -cfg.b_safe);
        }
      }
      w.advance();
    }
  }
}

TEST_SUITE_END();
