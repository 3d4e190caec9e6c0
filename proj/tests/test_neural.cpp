#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstring>
#include <vector>

#include "vnet/neural.hpp"
#include "vnet/rng.hpp"

using namespace vnet;

namespace {

NetworkSpec small_spec() {
  NetworkSpec spec;
  spec.input_dim = 3;
  spec.hidden = {4};
  spec.output_dim = 2;
  return spec;
}

// independent straightforward re-implementation of the forward map
std::vector<double> naive_forward(const Parameters& p, const std::vector<double>& in) {
  std::vector<double> cur = in;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const Layer& layer = p.layers[l];
    std::vector<double> next(layer.out, 0.0);
    for (int o = 0; o < layer.out; ++o) {
      double z = layer.b[o];
      for (int i = 0; i < layer.in; ++i) z += layer.w[o * layer.in + i] * cur[i];
      next[o] = z;
    }
    if (l + 1 < p.layers.size())
      for (auto& z : next) z = std::max(0.0, z);
    else if (p.spec.output_activation == NetworkSpec::OutputActivation::kSigmoid)
      for (auto& z : next) z = 1.0 / (1.0 + std::exp(-z));
    cur = next;
  }
  return cur;
}

}  // namespace

TEST_SUITE_BEGIN("neural");

TEST_CASE("zero parameters give zero output") {
  Parameters p = Parameters::zeros(small_spec());
  const auto out = forward(p, std::vector<double>{1.0, -2.0, 3.0});
  CHECK(out == std::vector<double>{0.0, 0.0});
}

TEST_CASE("identity weights pass input through ReLU") {
  NetworkSpec spec;
  spec.input_dim = 3;
  spec.hidden = {3};
  spec.output_dim = 3;
  Parameters p = Parameters::zeros(spec);
  for (int i = 0; i < 3; ++i) {
    p.layers[0].w[i * 3 + i] = 1.0;
    p.layers[1].w[i * 3 + i] = 1.0;
  }
  const auto out = forward(p, std::vector<double>{1.5, -2.0, 0.25});
  CHECK(out[0] == 1.5);
  CHECK(out[1] == 0.0);  // negative clipped by the hidden ReLU
  CHECK(out[2] == 0.25);
}

TEST_CASE("forward matches an independent re-implementation") {
  NetworkSpec spec;
  spec.input_dim = 7;
  spec.hidden = {11, 5};
  spec.output_dim = 4;
  for (auto act : {NetworkSpec::OutputActivation::kLinear,
                   NetworkSpec::OutputActivation::kSigmoid}) {
    spec.output_activation = act;
    Rng rng(31);
    Parameters p = Parameters::he_uniform(spec, rng);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> in(spec.input_dim);
      for (auto& x : in) x = rng.uniform(-2.0, 2.0);
      const auto a = forward(p, in);
      const auto b = naive_forward(p, in);
      for (int i = 0; i < spec.output_dim; ++i) CHECK(std::fabs(a[i] - b[i]) <= 1e-12);
    }
  }
}

TEST_CASE("forward rejects shape mismatches") {
  Parameters p = Parameters::zeros(small_spec());
  CHECK_THROWS_AS(forward(p, std::vector<double>{1.0}), std::domain_error);
}

TEST_CASE("zero output gradient gives zero parameter gradient") {
  Rng rng(5);
  Parameters p = Parameters::he_uniform(small_spec(), rng);
  ForwardCache cache;
  forward(p, std::vector<double>{0.3, -0.4, 0.9}, &cache);
  const Parameters g = backward(p, cache, std::vector<double>{0.0, 0.0});
  for (const auto& layer : g.layers) {
    for (double w : layer.w) CHECK(w == 0.0);
    for (double b : layer.b) CHECK(b == 0.0);
  }
}

TEST_CASE("output-layer weight gradient is the outer product") {
  Rng rng(6);
  Parameters p = Parameters::he_uniform(small_spec(), rng);
  ForwardCache cache;
  forward(p, std::vector<double>{0.3, 0.4, 0.9}, &cache);
  const std::vector<double> og{1.25, -0.5};
  const Parameters g = backward(p, cache, og);
  const auto& hidden_act = cache.acts[1];
  const Layer& last = g.layers.back();
  for (int o = 0; o < last.out; ++o) {
    CHECK(last.b[o] == og[o]);
    for (int i = 0; i < last.in; ++i)
      CHECK(last.w[o * last.in + i] == doctest::Approx(og[o] * hidden_act[i]).epsilon(1e-15));
  }
}

TEST_CASE("backward matches central finite differences") {
  NetworkSpec spec;
  spec.input_dim = 6;
  spec.hidden = {12, 8};
  spec.output_dim = 1;
  Rng rng(7);
  Parameters p = Parameters::he_uniform(spec, rng);
  std::vector<double> in(spec.input_dim);
  for (auto& x : in) x = rng.uniform(-1.0, 1.0);

  ForwardCache cache;
  forward(p, in, &cache);
  const Parameters g = backward(p, cache, std::vector<double>{1.0});

  const double h = 1e-5;
  int checked = 0;
  for (int probe = 0; probe < 100; ++probe) {
    const int layer = rng.uniform_int(static_cast<int>(p.layers.size()));
    const int idx = rng.uniform_int(static_cast<int>(p.layers[layer].w.size()));
    Parameters plus = p, minus = p;
    plus.layers[layer].w[idx] += h;
    minus.layers[layer].w[idx] -= h;
    const double fd = (forward(plus, in)[0] - forward(minus, in)[0]) / (2.0 * h);
    const double an = g.layers[layer].w[idx];
    if (std::fabs(fd) < 1e-10 && std::fabs(an) < 1e-10) continue;  // inactive ReLU path
    CHECK(std::fabs(fd - an) <= 1e-4 * std::max(1.0, std::fabs(fd)));
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("sgd with zero learning rate leaves parameters unchanged") {
  Rng rng(8);
  Parameters p = Parameters::he_uniform(small_spec(), rng);
  const Parameters before = p;
  Parameters g = Parameters::he_uniform(small_spec(), rng);
  OptimizerConfig cfg;
  cfg.kind = OptimizerConfig::Kind::kSgd;
  cfg.learning_rate = 0.0;
  Optimizer opt(cfg, p.spec);
  opt.apply_update(p, g);
  for (std::size_t l = 0; l < p.layers.size(); ++l)
    CHECK(p.layers[l].w == before.layers[l].w);
}

TEST_CASE("one sgd step scales the distance to a quadratic minimum") {
  // gradient of 0.5 * ||theta - target||^2 is theta - target, so a step with
  // rate k moves every coordinate to (1 - k) of its distance
  Rng rng(9);
  Parameters p = Parameters::he_uniform(small_spec(), rng);
  Parameters target = Parameters::he_uniform(small_spec(), rng);
  Parameters grad = p;
  accumulate(grad, target, -1.0);  // grad = p - target

  OptimizerConfig cfg;
  cfg.kind = OptimizerConfig::Kind::kSgd;
  cfg.learning_rate = 0.5;
  Optimizer opt(cfg, p.spec);
  Parameters before = p;
  opt.apply_update(p, grad);
  for (std::size_t l = 0; l < p.layers.size(); ++l)
    for (std::size_t i = 0; i < p.layers[l].w.size(); ++i) {
      const double want =
          target.layers[l].w[i] + 0.5 * (before.layers[l].w[i] - target.layers[l].w[i]);
      CHECK(p.layers[l].w[i] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("non-finite gradients are rejected") {
  Parameters p = Parameters::zeros(small_spec());
  Parameters g = Parameters::zeros(small_spec());
  g.layers[0].w[0] = std::numeric_limits<double>::infinity();
  OptimizerConfig cfg;
  cfg.kind = OptimizerConfig::Kind::kSgd;
  Optimizer opt(cfg, p.spec);
  CHECK_THROWS_AS(opt.apply_update(p, g), std::domain_error);
}

TEST_CASE("clone_into isolates and is idempotent") {
  Rng rng(10);
  Parameters src = Parameters::he_uniform(small_spec(), rng);
  Parameters dst = Parameters::zeros(small_spec());
  clone_into(src, dst);
  clone_into(src, dst);  // idempotent
  const double kept = dst.layers[0].w[0];
  src.layers[0].w[0] += 17.0;
  CHECK(dst.layers[0].w[0] == kept);

  NetworkSpec other = small_spec();
  other.hidden = {5};
  Parameters mismatched = Parameters::zeros(other);
  CHECK_THROWS_AS(clone_into(src, mismatched), std::domain_error);
}

TEST_CASE("initialization is deterministic per seed") {
  Rng a(123), b(123);
  const Parameters pa = Parameters::he_uniform(small_spec(), a);
  const Parameters pb = Parameters::he_uniform(small_spec(), b);
  for (std::size_t l = 0; l < pa.layers.size(); ++l) CHECK(pa.layers[l].w == pb.layers[l].w);
}

TEST_CASE("checkpoint JSON round-trips bit-exactly") {
  NetworkSpec spec;
  spec.input_dim = 5;
  spec.hidden = {9, 3};
  spec.output_dim = 30;
  Rng rng(11);
  const Parameters p = Parameters::he_uniform(spec, rng);

  const std::string text = checkpoint_to_json(p, "mo_ddqn_envelope", "{\"obs_dim\":3}");
  const Checkpoint ck = checkpoint_from_json(text);
  CHECK(ck.algorithm == "mo_ddqn_envelope");
  REQUIRE(ck.params.spec == spec);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    REQUIRE(ck.params.layers[l].w.size() == p.layers[l].w.size());
    CHECK(std::memcmp(ck.params.layers[l].w.data(), p.layers[l].w.data(),
                      p.layers[l].w.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(ck.params.layers[l].b.data(), p.layers[l].b.data(),
                      p.layers[l].b.size() * sizeof(double)) == 0);
  }

  CHECK_THROWS(checkpoint_from_json("{\"format\":\"bogus\"}"));
  CHECK_THROWS(checkpoint_from_json("not json at all"));
}

TEST_SUITE_END();
