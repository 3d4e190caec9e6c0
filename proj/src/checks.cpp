#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "vnet/channel.hpp"
#include "vnet/harness.hpp"
#include "vnet/morl_envelope.hpp"
#include "vnet/neural.hpp"
#include "vnet/pareto.hpp"
#include "vnet/rng.hpp"

namespace vnet {

namespace {

bool close_rel(double a, double b, double tol) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) <= tol * std::max(1.0, scale);
}

// Regression pins from a high-precision evaluation of the channel formulas.
bool check_channel() {
  bool ok = true;
  RadioConfig cfg;

  const auto geom = LinkGeometry::from_ground(100.0, 0.0);
  const double rf = rf_sinr(geom, 1.0, {}, cfg);
  ok &= close_rel(rf, 464525.24419536784, 1e-12);

  const auto serving = LinkGeometry::from_ground(20.0, 0.0);
  const std::vector<ThzInterferer> one{{LinkGeometry::from_ground(50.0, 0.0),
                                        cfg.g_t_max_tx * cfg.g_t_max_rx}};
  const double thz = thz_sinr(serving, one, cfg);
  ok &= close_rel(thz, 0.57002474535589041, 1e-12);

  ok &= close_rel(achievable_rate(10.0, 5e8, 25.0, 1e-5), 1116969940.3465640, 1e-10);
  ok &= std::fabs(inverse_q(1e-5) - 4.2648907939228246) < 1e-10;
  ok &= ho_penalty(HandoverKind::kKeep) == 0.0;
  ok &= ho_penalty(HandoverKind::kToRbs) == 0.1;
  ok &= ho_penalty(HandoverKind::kToTbs) == 0.5;
  return ok;
}

bool check_gradient() {
  NetworkSpec spec;
  spec.input_dim = 8;
  spec.hidden = {16, 16};
  spec.output_dim = 4;
  Rng rng(20240901);
  Parameters params = Parameters::he_uniform(spec, rng);

  std::vector<double> input(spec.input_dim), probe_dir(spec.output_dim);
  for (auto& x : input) x = rng.uniform(-1.0, 1.0);
  for (auto& g : probe_dir) g = rng.uniform(-1.0, 1.0);

  ForwardCache cache;
  forward(params, input, &cache);
  const Parameters grads = backward(params, cache, probe_dir);

  auto loss_at = [&](const Parameters& p) {
    const auto out = forward(p, input);
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += probe_dir[i] * out[i];
    return s;
  };

  const double h = 1e-6;
  bool ok = true;
  for (int probe = 0; probe < 40; ++probe) {
    const std::size_t layer = static_cast<std::size_t>(rng.uniform_int(
        static_cast<int>(params.layers.size())));
    auto& lw = params.layers[layer].w;
    const std::size_t idx = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(lw.size())));
    Parameters plus = params, minus = params;
    plus.layers[layer].w[idx] += h;
    minus.layers[layer].w[idx] -= h;
    const double fd = (loss_at(plus) - loss_at(minus)) / (2.0 * h);
    const double an = grads.layers[layer].w[idx];
    if (!close_rel(fd, an, 1e-5)) ok = false;
  }
  return ok;
}

bool check_ccs() {
  Rng rng(77);
  bool ok = true;
  for (int trial = 0; trial < 50 && ok; ++trial) {
    std::vector<ReturnPoint> pts;
    const int n = 3 + rng.uniform_int(60);
    for (int i = 0; i < n; ++i)
      pts.push_back(ReturnPoint{{rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)}, "p"});

    const auto hull = ccs(pts);
    const auto front = pareto_front(pts);

    // omega-grid brute force over the front
    std::vector<const ReturnPoint*> grid_ccs;
    for (const auto& p : front) {
      bool in = false;
      for (int k = 0; k <= 10000 && !in; ++k) {
        const double u = static_cast<double>(k) / 10000.0;
        double best = -1e300;
        for (const auto& q : front) best = std::max(best, u * q.v[0] + (1 - u) * q.v[1]);
        if (u * p.v[0] + (1 - u) * p.v[1] >= best - 1e-9) in = true;
      }
      if (in) grid_ccs.push_back(&p);
    }
    if (grid_ccs.size() != hull.size()) ok = false;
  }

  const std::vector<ReturnPoint> fig{{{1.0, 0.0}, "a"}, {{0.0, 1.0}, "b"}, {{0.4, 0.4}, "c"}};
  const auto hull = ccs(fig);
  ok &= hull.size() == 2;
  return ok;
}

bool check_envelope() {
  Rng rng(123);
  bool ok = true;

  // reduction: singleton W and a single nonzero component reproduce the
  // scalar double-DQN target bit for bit
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    VectorQ q;
    q.data.resize(JointAction::kCount * kObjectives);
    for (int a = 0; a < JointAction::kCount; ++a) {
      q.data[a * kObjectives] = rng.uniform(-5.0, 5.0);
      q.data[a * kObjectives + 1] = 0.0;
    }
    const RewardVector r{rng.uniform(0.0, 2.0), 0.0};
    const double gamma = 0.95;
    const PreferenceVector w = PreferenceVector::of(1.0);
    const auto env_target = envelope_target(r, false, gamma, w, std::vector<VectorQ>{q});

    std::vector<double> scalar_q(JointAction::kCount);
    for (int a = 0; a < JointAction::kCount; ++a) scalar_q[a] = q.at(a, 0);
    const int sel = argmax_lowest(scalar_q);
    const double ddqn = r.tran + gamma * scalar_q[sel];
    if (env_target[0] != ddqn || env_target[1] != 0.0) ok = false;
  }

  // dominance: the envelope projection never falls below the fixed-preference target's
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const int n_prefs = 1 + rng.uniform_int(4);
    std::vector<VectorQ> qs(n_prefs);
    for (auto& q : qs) {
      q.data.resize(JointAction::kCount * kObjectives);
      for (auto& v : q.data) v = rng.uniform(-5.0, 5.0);
    }
    const int g = rng.uniform_int(n_prefs);
    const PreferenceVector omega = PreferenceVector::of(rng.uniform());
    const RewardVector r{rng.uniform(0.0, 1.0), rng.uniform(0.0, 40.0)};
    const auto env_t = envelope_target(r, false, 0.99, omega, qs);
    const auto fix_t = fixed_pref_target(r, false, 0.99, omega, qs[g]);
    const double env_u = omega.w[0] * env_t[0] + omega.w[1] * env_t[1];
    const double fix_u = omega.w[0] * fix_t[0] + omega.w[1] * fix_t[1];
    if (env_u < fix_u) ok = false;
  }
  return ok;
}

struct Suite {
  const char* name;
  std::function<bool()> fn;
};

}  // namespace

int run_check(const std::string& suite) {
  const std::vector<Suite> suites{
      {"channel", check_channel},
      {"gradient", check_gradient},
      {"ccs", check_ccs},
      {"envelope", check_envelope},
  };

  bool matched = false;
  int failures = 0;
  for (const auto& s : suites) {
    if (suite != "all" && suite != s.name) continue;
    matched = true;
    const bool ok = s.fn();
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", s.name);
    if (!ok) ++failures;
  }
  if (!matched) throw std::runtime_error("check: unknown suite '" + suite + "'");
  return failures;
}

}  // namespace vnet
