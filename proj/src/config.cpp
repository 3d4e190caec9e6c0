#include "vnet/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vnet {

namespace {

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + msg);
}

double to_double(const Entry& e, const std::string& origin) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    fail(origin, e.line, "value for '" + e.key + "' is not a number: '" + e.value + "'");
  }
}

long long to_int(const Entry& e, const std::string& origin) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    fail(origin, e.line, "value for '" + e.key + "' is not an integer: '" + e.value + "'");
  }
}

std::vector<int> to_hidden(const Entry& e, const std::string& origin) {
  if (e.value == "mlp128x3") return {128, 128, 128};
  if (e.value == "mlp256x4") return {256, 256, 256, 256};
  std::vector<int> dims;
  std::stringstream in(e.value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    try {
      dims.push_back(std::stoi(item));
    } catch (const std::exception&) {
      fail(origin, e.line, "bad hidden layer width '" + item + "'");
    }
  }
  if (dims.empty()) fail(origin, e.line, "hidden layer list is empty");
  return dims;
}

std::vector<Entry> tokenize(const std::string& text, const std::string& origin) {
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, lineno, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(origin, lineno, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected 'key = value'");
    Entry e;
    e.section = section;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = lineno;
    if (e.section.empty()) fail(origin, lineno, "key outside any [section]");
    if (e.key.empty()) fail(origin, lineno, "empty key");
    entries.push_back(std::move(e));
  }
  return entries;
}

void apply_run(ExperimentConfig& cfg, const Entry& e, const std::string& origin) {
  if (e.key == "algorithm") {
    if (e.value != "mo_dqn" && e.value != "mo_ddqn" && e.value != "mo_ddqn_envelope")
      fail(origin, e.line, "unknown algorithm '" + e.value + "'");
    cfg.algorithm = e.value;
  } else if (e.key == "episodes") {
    cfg.episodes = static_cast<int>(to_int(e, origin));
  } else if (e.key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(to_int(e, origin));
  } else if (e.key == "out_dir") {
    cfg.out_dir = e.value;
  } else if (e.key == "checkpoint_every") {
    cfg.checkpoint_every = static_cast<int>(to_int(e, origin));
  } else {
    fail(origin, e.line, "unknown key '" + e.key + "' in [run]");
  }
}

void apply_instance(ExperimentConfig& cfg, const Entry& e, const std::string& origin) {
  InstanceConfig& c = cfg.instance;
  if (e.key == "preset") {
    return;  // handled in a first pass
  } else if (e.key == "n_rbs") {
    c.n_rbs = static_cast<int>(to_int(e, origin));
  } else if (e.key == "n_tbs") {
    c.n_tbs = static_cast<int>(to_int(e, origin));
  } else if (e.key == "m_total") {
    c.m_total = static_cast<int>(to_int(e, origin));
  } else if (e.key == "m_target") {
    c.m_target = static_cast<int>(to_int(e, origin));
  } else if (e.key == "v_min_mps") {
    c.v_min = to_double(e, origin);
  } else if (e.key == "v_max_mps") {
    c.v_max = to_double(e, origin);
  } else if (e.key == "horizon_steps") {
    c.horizon = static_cast<int>(to_int(e, origin));
  } else if (e.key == "obs_k_nearest") {
    c.obs_k_nearest = static_cast<int>(to_int(e, origin));
  } else {
    fail(origin, e.line, "unknown key '" + e.key + "' in [instance]");
  }
}

void apply_radio(ExperimentConfig& cfg, const Entry& e, const std::string& origin) {
  RadioConfig& c = cfg.radio;
  if (e.key == "f_r_hz") c.f_r_hz = to_double(e, origin);
  else if (e.key == "f_t_hz") c.f_t_hz = to_double(e, origin);
  else if (e.key == "p_r_tx_w") c.p_r_tx_w = to_double(e, origin);
  else if (e.key == "p_t_tx_w") c.p_t_tx_w = to_double(e, origin);
  else if (e.key == "g_r_tx") c.g_r_tx = to_double(e, origin);
  else if (e.key == "g_r_rx") c.g_r_rx = to_double(e, origin);
  else if (e.key == "g_t_max_tx") c.g_t_max_tx = to_double(e, origin);
  else if (e.key == "g_t_max_rx") c.g_t_max_rx = to_double(e, origin);
  else if (e.key == "g_t_min") c.g_t_min = to_double(e, origin);
  else if (e.key == "theta_tx_rad") c.theta_tx_rad = to_double(e, origin);
  else if (e.key == "theta_rx_rad") c.theta_rx_rad = to_double(e, origin);
  else if (e.key == "alpha") c.alpha = to_double(e, origin);
  else if (e.key == "k_a_per_m") c.k_a_per_m = to_double(e, origin);
  else if (e.key == "w_r_hz") c.w_r_hz = to_double(e, origin);
  else if (e.key == "w_t_hz") c.w_t_hz = to_double(e, origin);
  else if (e.key == "sigma2_w") c.sigma2_w = to_double(e, origin);
  else if (e.key == "n0_w") c.n0_w = to_double(e, origin);
  else if (e.key == "h_r_m") c.h_r_m = to_double(e, origin);
  else if (e.key == "h_t_m") c.h_t_m = to_double(e, origin);
  else if (e.key == "l_b_r_symbols") c.l_b_r_symbols = to_double(e, origin);
  else if (e.key == "l_b_t_symbols") c.l_b_t_symbols = to_double(e, origin);
  else if (e.key == "eps_c") c.eps_c = to_double(e, origin);
  else if (e.key == "q_r") c.q_r = static_cast<int>(to_int(e, origin));
  else if (e.key == "q_t") c.q_t = static_cast<int>(to_int(e, origin));
  else fail(origin, e.line, "unknown key '" + e.key + "' in [radio]");
}

void apply_traffic(ExperimentConfig& cfg, const Entry& e, const std::string& origin) {
  TrafficConfig& c = cfg.traffic;
  if (e.key == "n_lanes") c.n_lanes = static_cast<int>(to_int(e, origin));
  else if (e.key == "lane_width_m") c.lane_width_m = to_double(e, origin);
  else if (e.key == "road_length_m") c.road_length_m = to_double(e, origin);
  else if (e.key == "dt_s") c.dt_s = to_double(e, origin);
  else if (e.key == "k_psi") c.k_psi = to_double(e, origin);
  else if (e.key == "k_y") c.k_y = to_double(e, origin);
  else if (e.key == "k0_v") c.k0_v = to_double(e, origin);
  else if (e.key == "a_c_mps2") c.a_c = to_double(e, origin);
  else if (e.key == "b_c_mps2") c.b_c = to_double(e, origin);
  else if (e.key == "b_hard_mps2") c.b_hard = to_double(e, origin);
  else if (e.key == "v0_mps") c.v0 = to_double(e, origin);
  else if (e.key == "delta_a") c.delta_a = to_double(e, origin);
  else if (e.key == "d0_m") c.d0 = to_double(e, origin);
  else if (e.key == "t_gap_s") c.t_gap = to_double(e, origin);
  else if (e.key == "p_polite") c.p_polite = to_double(e, origin);
  else if (e.key == "b_safe_mps2") c.b_safe = to_double(e, origin);
  else if (e.key == "da_th_mps2") c.da_th = to_double(e, origin);
  else if (e.key == "dv_action_mps") c.dv_action = to_double(e, origin);
  else if (e.key == "v_hardmax_mps") c.v_hardmax = to_double(e, origin);
  else if (e.key == "max_steer_rad") c.max_steer = to_double(e, origin);
  else fail(origin, e.line, "unknown key '" + e.key + "' in [traffic]");
}

void apply_reward(ExperimentConfig& cfg, const Entry& e, const std::string& origin) {
  RewardConfig& c = cfg.reward;
  if (e.key == "c1") c.c1 = to_double(e, origin);
  else if (e.key == "c2") c.c2 = to_double(e, origin);
  else if (e.key == "c3") c.c3 = to_double(e, origin);
  else if (e.key == "c4") c.c4 = to_double(e, origin);
  else if (e.key == "c5") c.c5 = to_double(e, origin);
  else if (e.key == "r_th_bps") c.r_th_bps = to_double(e, origin);
  else if (e.key == "sense_radius_m") c.sense_radius_m = to_double(e, origin);
  else fail(origin, e.line, "unknown key '" + e.key + "' in [reward]");
}

void apply_agent(ExperimentConfig& cfg, const Entry& e, const std::string& origin) {
  AgentSettings& c = cfg.agent;
  if (e.key == "gamma") c.gamma = to_double(e, origin);
  else if (e.key == "learning_rate") c.learning_rate = to_double(e, origin);
  else if (e.key == "hidden") c.hidden = to_hidden(e, origin);
  else if (e.key == "batch") c.batch = static_cast<int>(to_int(e, origin));
  else if (e.key == "target_period") c.target_period = static_cast<int>(to_int(e, origin));
  else if (e.key == "n_omega") c.n_omega = static_cast<int>(to_int(e, origin));
  else if (e.key == "pool_capacity") c.pool_capacity = static_cast<std::size_t>(to_int(e, origin));
  else if (e.key == "epsilon_start") c.epsilon.start = to_double(e, origin);
  else if (e.key == "epsilon_reach") c.epsilon.reach = to_double(e, origin);
  else if (e.key == "epsilon_reach_frac") c.epsilon.reach_frac = to_double(e, origin);
  else if (e.key == "epsilon_floor") c.epsilon.floor = to_double(e, origin);
  else if (e.key == "lambda_schedule") {
    if (e.value == "linear") c.lambda_kind = LambdaSchedule::Kind::kLinear;
    else if (e.value == "cosine") c.lambda_kind = LambdaSchedule::Kind::kCosine;
    else fail(origin, e.line, "lambda_schedule must be linear or cosine");
  } else if (e.key == "optimizer") {
    if (e.value == "sgd") c.optimizer = OptimizerConfig::Kind::kSgd;
    else if (e.value == "adam") c.optimizer = OptimizerConfig::Kind::kAdam;
    else fail(origin, e.line, "optimizer must be sgd or adam");
  } else {
    fail(origin, e.line, "unknown key '" + e.key + "' in [agent]");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (episodes < 1) throw std::runtime_error("config: episodes must be >= 1");
  if (checkpoint_every < 1) throw std::runtime_error("config: checkpoint_every must be >= 1");
  instance.validate();
  radio.validate();
  // the instance speed band is what the traffic layer will run with
  TrafficConfig t = traffic;
  t.v_min = instance.v_min;
  t.v_max = instance.v_max;
  t.validate();
  reward.validate();
  NetworkSpec probe;
  probe.input_dim = 1;
  probe.hidden = agent.hidden;
  probe.output_dim = 1;
  probe.validate();
  if (!(agent.learning_rate > 0)) throw std::runtime_error("config: learning_rate must be > 0");
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  const std::vector<Entry> entries = tokenize(text, origin);
  ExperimentConfig cfg;

  // instance preset first so explicit keys override it regardless of order
  for (const auto& e : entries) {
    if (e.section == "instance" && e.key == "preset") {
      try {
        cfg.instance = InstanceConfig::preset(e.value);
      } catch (const std::exception& ex) {
        fail(origin, e.line, ex.what());
      }
    }
  }

  for (const auto& e : entries) {
    if (e.section == "run") apply_run(cfg, e, origin);
    else if (e.section == "instance") apply_instance(cfg, e, origin);
    else if (e.section == "radio") apply_radio(cfg, e, origin);
    else if (e.section == "traffic") apply_traffic(cfg, e, origin);
    else if (e.section == "reward") apply_reward(cfg, e, origin);
    else if (e.section == "agent") apply_agent(cfg, e, origin);
    else fail(origin, e.line, "unknown section [" + e.section + "]");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

}  // namespace vnet
