#include "vnet/momdp_env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vnet {

namespace {

// Lateral setback of stations from the road edge. THz links are absorption-
// noise limited to roughly a dozen metres, so stations hug the roadside.
constexpr double kBsSideOffsetM = 1.0;

double ground_distance(double ax, double ay, double bx, double by, double road_length) {
  const double dx = ring_distance(ax, bx, road_length);
  const double dy = ay - by;
  return std::hypot(dx, dy);
}

}  // namespace

void InstanceConfig::validate() const {
  if (n_rbs < 0 || n_tbs < 0 || n_rbs + n_tbs < 1)
    throw std::invalid_argument("InstanceConfig: at least one base station required");
  if (m_target < 1) throw std::invalid_argument("InstanceConfig: m_target must be >= 1");
  if (m_total < m_target)
    throw std::invalid_argument("InstanceConfig: m_total must be >= m_target");
  if (!(v_min < v_max)) throw std::invalid_argument("InstanceConfig: v_min must be < v_max");
  if (horizon < 1) throw std::invalid_argument("InstanceConfig: horizon must be >= 1");
  if (obs_k_nearest < 0 || obs_k_nearest > m_surrounding())
    throw std::invalid_argument("InstanceConfig: obs_k_nearest out of range");
}

InstanceConfig InstanceConfig::preset(std::string_view name) {
  InstanceConfig c;
  if (name == "desk") {
    c.n_rbs = 2;
    c.n_tbs = 5;
    c.m_total = 7;
    c.m_target = 2;
    c.v_min = 20.0;
    c.v_max = 30.0;
    return c;
  }
  // I-(v_min,v_max,n_T,M), five test instances
  if (name == "I-(20,30,20,20)") { c.v_min = 20; c.v_max = 30; c.n_tbs = 20; c.m_total = 20; return c; }
  if (name == "I-(25,35,20,20)") { c.v_min = 25; c.v_max = 35; c.n_tbs = 20; c.m_total = 20; return c; }
  if (name == "I-(20,30,10,20)") { c.v_min = 20; c.v_max = 30; c.n_tbs = 10; c.m_total = 20; return c; }
  if (name == "I-(20,30,20,50)") { c.v_min = 20; c.v_max = 30; c.n_tbs = 20; c.m_total = 50; return c; }
  if (name == "I-(30,40,20,20)") { c.v_min = 30; c.v_max = 40; c.n_tbs = 20; c.m_total = 20; return c; }
  throw std::invalid_argument("InstanceConfig: unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> InstanceConfig::preset_names() {
  return {"desk", "I-(20,30,20,20)", "I-(25,35,20,20)", "I-(20,30,10,20)",
          "I-(20,30,20,50)", "I-(30,40,20,20)"};
}

void RewardConfig::validate() const {
  for (double c : {c1, c2, c3, c4, c5})
    if (!(std::isfinite(c) && c >= 0.0))
      throw std::invalid_argument("RewardConfig: coefficients must be finite and >= 0");
  if (!(c2 > c1 && c2 > c3 && c2 > c4))
    throw std::invalid_argument("RewardConfig: c2 must be strictly largest among c1..c4");
  if (!(r_th_bps >= 0)) throw std::invalid_argument("RewardConfig: r_th_bps must be >= 0");
  if (!(sense_radius_m > 0)) throw std::invalid_argument("RewardConfig: sense_radius_m must be > 0");
}

double transport_reward(const VehicleState& av, bool collided, const TrafficConfig& tcfg,
                        const RewardConfig& cfg) {
  const double span = tcfg.v_max - tcfg.v_min;
  const double speed_term = (av.v - tcfg.v_min) / span;
  const double delta2 = collided ? 1.0 : 0.0;
  const double delta3 =
      tcfg.n_lanes > 1 ? static_cast<double>(av.lane) / (tcfg.n_lanes - 1) : 1.0;
  const bool on_road = av.y >= 0.0 && av.y <= tcfg.n_lanes * tcfg.lane_width_m;
  const double delta4 = on_road ? 1.0 : 0.0;
  const double r = cfg.c1 * speed_term - cfg.c2 * delta2 + cfg.c3 * delta3 + cfg.c4 * delta4;
  return std::clamp(r, 0.0, 1.0);
}

double telecom_reward(double wr_bps, double ho_prob, const RewardConfig& cfg) {
  return cfg.c5 * wr_bps * (1.0 - std::min(1.0, ho_prob));
}

int associate_bs(int policy, int current_bs, std::span<const double> rates,
                 std::span<const BaseStation> stations, std::span<const int> loads) {
  if (stations.empty()) throw std::domain_error("associate_bs: no stations");
  if (policy < 0 || policy >= JointAction::kTeleCount)
    throw std::domain_error("associate_bs: invalid policy index");
  const int n = static_cast<int>(stations.size());

  auto wr_with_mu = [&](int i, bool apply_penalty) {
    double mu = 0.0;
    if (apply_penalty && i != current_bs)
      mu = ho_penalty(stations[i].kind == BaseStation::Kind::kTbs ? HandoverKind::kToTbs
                                                                  : HandoverKind::kToRbs);
    return weighted_rate(rates[i], stations[i].quota, loads[i], mu);
  };

  if (policy == 2) {  // max raw achievable rate
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (rates[i] > rates[best]) best = i;
    return best;
  }

  if (policy == 0) {  // max weighted rate, handover penalty on
    int best = 0;
    double best_wr = wr_with_mu(0, true);
    for (int i = 1; i < n; ++i) {
      const double wr = wr_with_mu(i, true);
      if (wr > best_wr) {
        best = i;
        best_wr = wr;
      }
    }
    return best;
  }

  // policy 1: penalty-free weighted rate over vacant stations, walking down the
  // ranking until one has quota headroom; final fallback is the top of the ranking.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return wr_with_mu(a, false) > wr_with_mu(b, false); });
  for (int i : order)
    if (stations[i].quota >= loads[i]) return i;
  return order.front();
}

MomdpEnv::MomdpEnv(const InstanceConfig& inst, const RadioConfig& radio,
                   const TrafficConfig& traffic, const RewardConfig& reward, std::uint64_t seed)
    : inst_(inst), radio_(radio), traffic_(traffic), reward_(reward),
      root_rng_(seed), episode_rng_(seed) {
  inst_.validate();
  radio_.validate();
  // the instance is authoritative for the commanded-speed band
  traffic_.v_min = inst_.v_min;
  traffic_.v_max = inst_.v_max;
  traffic_.validate();
  reward_.validate();
}

MomdpEnv::MomdpEnv(std::vector<VehicleState> vehicles, std::vector<BaseStation> stations,
                   const InstanceConfig& inst, const RadioConfig& radio,
                   const TrafficConfig& traffic, const RewardConfig& reward, std::uint64_t seed)
    : MomdpEnv(inst, radio, traffic, reward, seed) {
  scripted_ = true;
  scripted_vehicles_ = std::move(vehicles);
  scripted_stations_ = std::move(stations);
  if (static_cast<int>(scripted_vehicles_.size()) != inst_.m_total)
    throw std::invalid_argument("MomdpEnv: scripted vehicle count != m_total");
  if (static_cast<int>(scripted_stations_.size()) != inst_.n_rbs + inst_.n_tbs)
    throw std::invalid_argument("MomdpEnv: scripted station count != n_rbs + n_tbs");
}

int MomdpEnv::observation_dim() const {
  return (inst_.m_target + inst_.obs_k_nearest) * 6;
}

void MomdpEnv::init_episode_rng() {
  ++episode_counter_;
  episode_rng_ = root_rng_.substream("episode/" + std::to_string(episode_counter_));
}

void MomdpEnv::place_randomly() {
  const int n_lanes = traffic_.n_lanes;
  const double road = traffic_.road_length_m;
  std::vector<VehicleState> vehicles;
  vehicles.reserve(inst_.m_total);

  const double min_gap = traffic_.d0 / 2.0;  // bumper-to-bumper at placement
  for (int i = 0; i < inst_.m_total; ++i) {
    VehicleState s;
    s.id = i;
    s.cls = i < inst_.m_target ? VehicleClass::kTarget : VehicleClass::kSurrounding;
    s.length = 5.0;
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      s.lane = episode_rng_.uniform_int(n_lanes);
      s.x = episode_rng_.uniform(0.0, road);
      placed = true;
      for (const auto& other : vehicles) {
        if (other.lane != s.lane) continue;
        const double gap = ring_distance(s.x, other.x, road) - 0.5 * (s.length + other.length);
        if (gap < min_gap) {
          placed = false;
          break;
        }
      }
    }
    if (!placed)
      throw std::runtime_error("MomdpEnv: could not place vehicles collision-free; "
                               "reduce m_total or enlarge the road");
    s.target_lane = s.lane;
    s.y = traffic_.lane_center(s.lane);
    s.v = episode_rng_.uniform(inst_.v_min, inst_.v_max);
    s.v_r = s.v;
    s.psi = 0.0;
    s.beta = 0.0;
    s.crashed = false;
    vehicles.push_back(s);
  }
  world_ = World(traffic_, std::move(vehicles));

  stations_.clear();
  const double road_width = n_lanes * traffic_.lane_width_m;
  const int n_bs = inst_.n_rbs + inst_.n_tbs;
  for (int i = 0; i < n_bs; ++i) {
    BaseStation bs;
    bs.id = i;
    bs.kind = i < inst_.n_rbs ? BaseStation::Kind::kRbs : BaseStation::Kind::kTbs;
    bs.quota = bs.kind == BaseStation::Kind::kRbs ? radio_.q_r : radio_.q_t;
    bs.x = episode_rng_.uniform(0.0, traffic_.road_length_m);
    bs.y = episode_rng_.uniform() < 0.5 ? -kBsSideOffsetM : road_width + kBsSideOffsetM;
    stations_.push_back(bs);
  }
}

LinkGeometry MomdpEnv::link_geometry(const VehicleState& av, const BaseStation& bs) const {
  const double d = ground_distance(av.x, av.y, bs.x, bs.y, traffic_.road_length_m);
  const double h = bs.kind == BaseStation::Kind::kRbs ? radio_.h_r_m : radio_.h_t_m;
  return LinkGeometry::from_ground(d, h);
}

void MomdpEnv::sample_channel() {
  const int m1 = inst_.m_target;
  fading_.assign(m1, std::vector<double>(inst_.n_rbs, 1.0));
  align_.assign(m1, std::vector<double>(inst_.n_tbs, 0.0));
  for (int j = 0; j < m1; ++j) {
    for (int i = 0; i < inst_.n_rbs; ++i) fading_[j][i] = episode_rng_.exponential(1.0);
    for (int i = 0; i < inst_.n_tbs; ++i)
      align_[j][i] = sample_beam_alignment(episode_rng_, radio_);
  }
}

double MomdpEnv::sampled_rate(int j, int bs_index) const {
  const VehicleState& av = world_.vehicles()[j];
  const BaseStation& bs = stations_[bs_index];
  if (bs.kind == BaseStation::Kind::kRbs) {
    std::vector<RfInterferer> interferers;
    for (int k = 0; k < inst_.n_rbs; ++k) {
      if (k == bs_index) continue;
      interferers.push_back({link_geometry(av, stations_[k]), fading_[j][k]});
    }
    const double sinr = rf_sinr(link_geometry(av, bs), fading_[j][bs_index], interferers, radio_);
    return achievable_rate(sinr, radio_.w_r_hz, radio_.l_b_r_symbols, radio_.eps_c);
  }
  std::vector<ThzInterferer> interferers;
  for (int k = inst_.n_rbs; k < static_cast<int>(stations_.size()); ++k) {
    if (k == bs_index) continue;
    interferers.push_back({link_geometry(av, stations_[k]), align_[j][k - inst_.n_rbs]});
  }
  const double sinr = thz_sinr(link_geometry(av, bs), interferers, radio_);
  return achievable_rate(sinr, radio_.w_t_hz, radio_.l_b_t_symbols, radio_.eps_c);
}

void MomdpEnv::compute_rates() {
  const int m1 = inst_.m_target;
  const int n_bs = static_cast<int>(stations_.size());
  rates_.assign(m1, std::vector<double>(n_bs, 0.0));
  for (int j = 0; j < m1; ++j)
    for (int i = 0; i < n_bs; ++i) rates_[j][i] = sampled_rate(j, i);
}

double MomdpEnv::deterministic_rate(const VehicleState& av, const BaseStation& bs) const {
  if (bs.kind == BaseStation::Kind::kRbs) {
    std::vector<RfInterferer> interferers;
    for (int k = 0; k < inst_.n_rbs; ++k) {
      if (stations_[k].id == bs.id) continue;
      interferers.push_back({link_geometry(av, stations_[k]), 1.0});
    }
    const double sinr = rf_sinr(link_geometry(av, bs), 1.0, interferers, radio_);
    return achievable_rate(sinr, radio_.w_r_hz, radio_.l_b_r_symbols, radio_.eps_c);
  }
  std::vector<ThzInterferer> interferers;
  const double mean_align = mean_beam_alignment(radio_);
  for (int k = inst_.n_rbs; k < static_cast<int>(stations_.size()); ++k) {
    if (stations_[k].id == bs.id) continue;
    interferers.push_back({link_geometry(av, stations_[k]), mean_align});
  }
  const double sinr = thz_sinr(link_geometry(av, bs), interferers, radio_);
  return achievable_rate(sinr, radio_.w_t_hz, radio_.l_b_t_symbols, radio_.eps_c);
}

void MomdpEnv::initial_association() {
  const int m1 = inst_.m_target;
  assoc_.assign(m1, 0);
  ho_count_.assign(m1, 0);
  last_wr_.assign(m1, 0.0);
  loads_.assign(stations_.size(), 0);
  sample_channel();
  compute_rates();
  for (int j = 0; j < m1; ++j) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(stations_.size()); ++i)
      if (rates_[j][i] > rates_[j][best]) best = i;
    assoc_[j] = best;
  }
  for (int j = 0; j < m1; ++j) loads_[assoc_[j]] += 1;
}

std::vector<std::vector<double>> MomdpEnv::reset() {
  init_episode_rng();
  if (scripted_) {
    world_ = World(traffic_, scripted_vehicles_);
    stations_ = scripted_stations_;
  } else {
    place_randomly();
  }
  t_ = 0;
  done_ = false;
  initial_association();
  return all_observations();
}

MomdpEnv::StepOut MomdpEnv::step(std::span<const int> flat_actions) {
  if (done_) throw std::runtime_error("MomdpEnv: step() on a finished episode");
  const int m1 = inst_.m_target;
  if (static_cast<int>(flat_actions.size()) != m1)
    throw std::domain_error("MomdpEnv: one action per target AV required");

  std::vector<JointAction> actions;
  actions.reserve(m1);
  for (int a : flat_actions) actions.push_back(JointAction::from_flat(a));

  // 1. driving actions adjust the commanded lane / speed setpoints
  auto vehicles = world_.vehicles_mut();
  for (int j = 0; j < m1; ++j) {
    VehicleState& s = vehicles[j];
    switch (actions[j].tran) {
      case 0: s.target_lane = std::max(0, s.target_lane - 1); break;
      case 1: break;
      case 2: s.target_lane = std::min(traffic_.n_lanes - 1, s.target_lane + 1); break;
      case 3: s.v_r = std::min(traffic_.v_max, s.v_r + traffic_.dv_action); break;
      case 4: s.v_r = std::max(traffic_.v_min, s.v_r - traffic_.dv_action); break;
      default: throw std::domain_error("MomdpEnv: invalid driving action");
    }
  }

  // 2. advance the traffic world one dt and mark collisions
  world_.advance();
  const std::set<int> collided = world_.detect_and_mark_collisions();

  // 3. fresh channel state and achievable rates
  sample_channel();
  compute_rates();

  // 4. association round: every AV chooses against the same load snapshot,
  //    reassignments applied in ascending AV-id order
  const std::vector<int> old_assoc = assoc_;
  const std::vector<int> snapshot_loads = loads_;
  for (int j = 0; j < m1; ++j)
    assoc_[j] = associate_bs(actions[j].tele, old_assoc[j], rates_[j], stations_, snapshot_loads);
  loads_.assign(stations_.size(), 0);
  for (int j = 0; j < m1; ++j) {
    if (assoc_[j] != old_assoc[j]) ho_count_[j] += 1;
    loads_[assoc_[j]] += 1;
  }

  t_ += 1;

  // 5. rewards
  StepOut out;
  out.rewards.resize(m1);
  bool any_target_crashed = false;
  for (int j = 0; j < m1; ++j) {
    const VehicleState& s = world_.vehicles()[j];
    const bool crashed = s.crashed;
    any_target_crashed = any_target_crashed || crashed;

    const int bs = assoc_[j];
    double mu = 0.0;
    if (bs != old_assoc[j])
      mu = ho_penalty(stations_[bs].kind == BaseStation::Kind::kTbs ? HandoverKind::kToTbs
                                                                    : HandoverKind::kToRbs);
    const double wr = weighted_rate(rates_[j][bs], stations_[bs].quota, loads_[bs], mu);
    last_wr_[j] = wr;
    const double xi = static_cast<double>(ho_count_[j]) / t_;
    out.rewards[j].tran = transport_reward(s, crashed, traffic_, reward_);
    out.rewards[j].tele = telecom_reward(wr, xi, reward_);
  }

  done_ = any_target_crashed || t_ >= inst_.horizon;
  out.done = done_;
  out.obs = all_observations();
  return out;
}

double MomdpEnv::collision_rate() const {
  return 1.0 - static_cast<double>(t_) / inst_.horizon;
}

double MomdpEnv::ho_probability() const {
  if (t_ == 0) return 0.0;
  double sum = 0.0;
  for (int j = 0; j < inst_.m_target; ++j)
    sum += std::min(1.0, static_cast<double>(ho_count_[j]) / t_);
  return sum / inst_.m_target;
}

std::vector<std::vector<double>> MomdpEnv::all_observations() const {
  std::vector<std::vector<double>> obs;
  obs.reserve(inst_.m_target);
  for (int j = 0; j < inst_.m_target; ++j) obs.push_back(observe(j));
  return obs;
}

std::vector<double> MomdpEnv::observe(int target_index) const {
  const int m1 = inst_.m_target;
  if (target_index < 0 || target_index >= m1)
    throw std::domain_error("MomdpEnv: observe() index out of range");

  const double road = traffic_.road_length_m;
  const double width = traffic_.n_lanes * traffic_.lane_width_m;
  const int n_bs = static_cast<int>(stations_.size());

  auto station_counts = [&](const VehicleState& av) {
    int n_r = 0, n_t = 0;
    for (int i = 0; i < n_bs; ++i) {
      const double d = ground_distance(av.x, av.y, stations_[i].x, stations_[i].y, road);
      if (d > reward_.sense_radius_m) continue;
      if (deterministic_rate(av, stations_[i]) < reward_.r_th_bps) continue;
      (stations_[i].kind == BaseStation::Kind::kRbs ? n_r : n_t) += 1;
    }
    return std::pair<int, int>{n_r, n_t};
  };

  auto push_row = [&](std::vector<double>& row, const VehicleState& av) {
    const auto [n_r, n_t] = station_counts(av);
    row.push_back(std::clamp(2.0 * av.x / road - 1.0, -1.0, 1.0));
    row.push_back(std::clamp(2.0 * av.y / width - 1.0, -1.0, 1.0));
    row.push_back(std::clamp(
        2.0 * (av.v - traffic_.v_min) / (traffic_.v_max - traffic_.v_min) - 1.0, -1.0, 1.0));
    row.push_back(std::clamp(av.psi / kPi, -1.0, 1.0));
    row.push_back(inst_.n_rbs > 0 ? static_cast<double>(n_r) / inst_.n_rbs : 0.0);
    row.push_back(inst_.n_tbs > 0 ? static_cast<double>(n_t) / inst_.n_tbs : 0.0);
  };

  std::vector<double> out;
  out.reserve(observation_dim());
  // ego-first cyclic rotation of the target-AV rows
  for (int k = 0; k < m1; ++k) push_row(out, world_.vehicles()[(target_index + k) % m1]);

  if (inst_.obs_k_nearest > 0) {
    const VehicleState& ego = world_.vehicles()[target_index];
    std::vector<std::pair<double, int>> by_distance;
    for (int i = m1; i < inst_.m_total; ++i) {
      const VehicleState& s = world_.vehicles()[i];
      by_distance.emplace_back(ring_distance(ego.x, s.x, road), i);
    }
    std::sort(by_distance.begin(), by_distance.end());
    for (int k = 0; k < inst_.obs_k_nearest && k < static_cast<int>(by_distance.size()); ++k)
      push_row(out, world_.vehicles()[by_distance[k].second]);
  }
  return out;
}

}  // namespace vnet
