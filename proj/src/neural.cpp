#include "vnet/neural.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace vnet {

namespace {

std::vector<int> layer_dims(const NetworkSpec& spec) {
  std::vector<int> dims;
  dims.push_back(spec.input_dim);
  dims.insert(dims.end(), spec.hidden.begin(), spec.hidden.end());
  dims.push_back(spec.output_dim);
  return dims;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void NetworkSpec::validate() const {
  if (input_dim < 1 || output_dim < 1)
    throw std::invalid_argument("NetworkSpec: dims must be >= 1");
  if (hidden.empty()) throw std::invalid_argument("NetworkSpec: at least one hidden layer");
  for (int h : hidden)
    if (h < 1) throw std::invalid_argument("NetworkSpec: hidden widths must be >= 1");
}

Parameters Parameters::zeros(const NetworkSpec& spec) {
  spec.validate();
  Parameters p;
  p.spec = spec;
  const auto dims = layer_dims(spec);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.in = dims[l];
    layer.out = dims[l + 1];
    layer.w.assign(static_cast<std::size_t>(layer.in) * layer.out, 0.0);
    layer.b.assign(layer.out, 0.0);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

Parameters Parameters::he_uniform(const NetworkSpec& spec, Rng& rng) {
  Parameters p = zeros(spec);
  for (auto& layer : p.layers) {
    const double limit = std::sqrt(6.0 / layer.in);
    for (auto& w : layer.w) w = rng.uniform(-limit, limit);
  }
  return p;
}

bool Parameters::same_shape(const Parameters& other) const { return spec == other.spec; }

bool Parameters::all_finite() const {
  for (const auto& layer : layers) {
    for (double w : layer.w)
      if (!std::isfinite(w)) return false;
    for (double b : layer.b)
      if (!std::isfinite(b)) return false;
  }
  return true;
}

std::size_t Parameters::count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.w.size() + layer.b.size();
  return n;
}

void clone_into(const Parameters& src, Parameters& dst) {
  if (!src.same_shape(dst)) throw std::domain_error("clone_into: NetworkSpec mismatch");
  dst.layers = src.layers;
}

std::vector<double> forward(const Parameters& params, std::span<const double> input,
                            ForwardCache* cache) {
  if (static_cast<int>(input.size()) != params.spec.input_dim)
    throw std::domain_error("forward: input length != input_dim");

  std::vector<double> cur(input.begin(), input.end());
  if (cache != nullptr) {
    cache->acts.clear();
    cache->acts.push_back(cur);
  }

  const std::size_t n_layers = params.layers.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    const Layer& layer = params.layers[l];
    std::vector<double> next(layer.out);
    for (int o = 0; o < layer.out; ++o) {
      double z = layer.b[o];
      const double* row = &layer.w[static_cast<std::size_t>(o) * layer.in];
      for (int i = 0; i < layer.in; ++i) z += row[i] * cur[i];
      next[o] = z;
    }
    const bool last = (l + 1 == n_layers);
    if (!last) {
      for (double& z : next) z = z > 0.0 ? z : 0.0;  // ReLU
    } else if (params.spec.output_activation == NetworkSpec::OutputActivation::kSigmoid) {
      for (double& z : next) z = sigmoid(z);
    }
    cur = std::move(next);
    if (cache != nullptr) cache->acts.push_back(cur);
  }
  return cur;
}

Parameters backward(const Parameters& params, const ForwardCache& cache,
                    std::span<const double> output_gradient) {
  if (cache.acts.size() != params.layers.size() + 1)
    throw std::domain_error("backward: cache does not match network depth");
  if (static_cast<int>(output_gradient.size()) != params.spec.output_dim)
    throw std::domain_error("backward: gradient length != output_dim");

  Parameters grads = Parameters::zeros(params.spec);
  const std::size_t n_layers = params.layers.size();

  // delta = dL/d(pre-activation) of the current layer, built from the output side.
  std::vector<double> delta(output_gradient.begin(), output_gradient.end());
  if (params.spec.output_activation == NetworkSpec::OutputActivation::kSigmoid) {
    const auto& out = cache.acts.back();
    for (std::size_t i = 0; i < delta.size(); ++i) delta[i] *= out[i] * (1.0 - out[i]);
  }

  for (std::size_t l = n_layers; l-- > 0;) {
    const Layer& layer = params.layers[l];
    Layer& g = grads.layers[l];
    const auto& below = cache.acts[l];

    for (int o = 0; o < layer.out; ++o) {
      g.b[o] = delta[o];
      double* grow = &g.w[static_cast<std::size_t>(o) * layer.in];
      for (int i = 0; i < layer.in; ++i) grow[i] = delta[o] * below[i];
    }

    if (l == 0) break;
    std::vector<double> prev_delta(layer.in, 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double* row = &layer.w[static_cast<std::size_t>(o) * layer.in];
      for (int i = 0; i < layer.in; ++i) prev_delta[i] += row[i] * delta[o];
    }
    // ReLU mask: below holds post-activation values of the hidden layer l-1.
    for (int i = 0; i < layer.in; ++i)
      if (below[i] <= 0.0) prev_delta[i] = 0.0;
    delta = std::move(prev_delta);
  }
  return grads;
}

void accumulate(Parameters& acc, const Parameters& grad, double scale) {
  if (!acc.same_shape(grad)) throw std::domain_error("accumulate: shape mismatch");
  for (std::size_t l = 0; l < acc.layers.size(); ++l) {
    auto& a = acc.layers[l];
    const auto& g = grad.layers[l];
    for (std::size_t i = 0; i < a.w.size(); ++i) a.w[i] += scale * g.w[i];
    for (std::size_t i = 0; i < a.b.size(); ++i) a.b[i] += scale * g.b[i];
  }
}

Optimizer::Optimizer(OptimizerConfig cfg, const NetworkSpec& spec) : cfg_(cfg) {
  if (!(cfg.learning_rate >= 0.0))
    throw std::invalid_argument("Optimizer: learning_rate must be >= 0");
  if (cfg_.kind == OptimizerConfig::Kind::kAdam) {
    m_ = Parameters::zeros(spec);
    v_ = Parameters::zeros(spec);
  }
}

void Optimizer::apply_update(Parameters& params, const Parameters& grads) {
  if (!params.same_shape(grads)) throw std::domain_error("apply_update: shape mismatch");
  if (!grads.all_finite()) throw std::domain_error("apply_update: non-finite gradients rejected");

  if (cfg_.kind == OptimizerConfig::Kind::kSgd) {
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      auto& p = params.layers[l];
      const auto& g = grads.layers[l];
      for (std::size_t i = 0; i < p.w.size(); ++i) p.w[i] -= cfg_.learning_rate * g.w[i];
      for (std::size_t i = 0; i < p.b.size(); ++i) p.b[i] -= cfg_.learning_rate * g.b[i];
    }
    return;
  }

  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  auto adam = [&](double& p, double& m, double& v, double g) {
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g * g;
    p -= cfg_.learning_rate * (m / bc1) / (std::sqrt(v / bc2) + cfg_.eps);
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto& p = params.layers[l];
    const auto& g = grads.layers[l];
    auto& m = m_.layers[l];
    auto& v = v_.layers[l];
    for (std::size_t i = 0; i < p.w.size(); ++i) adam(p.w[i], m.w[i], v.w[i], g.w[i]);
    for (std::size_t i = 0; i < p.b.size(); ++i) adam(p.b[i], m.b[i], v.b[i], g.b[i]);
  }
}

namespace {
constexpr int kCheckpointVersion = 1;
}

std::string checkpoint_to_json(const Parameters& params, const std::string& algorithm,
                               const std::string& extra_json) {
  nlohmann::json j;
  j["format"] = "vnet-checkpoint";
  j["version"] = kCheckpointVersion;
  j["algorithm"] = algorithm;
  j["extra"] = nlohmann::json::parse(extra_json);
  nlohmann::json spec;
  spec["input_dim"] = params.spec.input_dim;
  spec["hidden"] = params.spec.hidden;
  spec["output_dim"] = params.spec.output_dim;
  spec["output_activation"] =
      params.spec.output_activation == NetworkSpec::OutputActivation::kSigmoid ? "sigmoid"
                                                                               : "linear";
  j["spec"] = spec;
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : params.layers) {
    nlohmann::json lj;
    lj["in"] = layer.in;
    lj["out"] = layer.out;
    lj["w"] = layer.w;
    lj["b"] = layer.b;
    layers.push_back(std::move(lj));
  }
  j["layers"] = std::move(layers);
  return j.dump(2);
}

Checkpoint checkpoint_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "vnet-checkpoint")
    throw std::runtime_error("checkpoint: unrecognized format tag");
  if (j.value("version", -1) != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version");

  Checkpoint out;
  out.algorithm = j.at("algorithm").get<std::string>();
  out.extra_json = j.at("extra").dump();

  NetworkSpec spec;
  spec.input_dim = j.at("spec").at("input_dim").get<int>();
  spec.hidden = j.at("spec").at("hidden").get<std::vector<int>>();
  spec.output_dim = j.at("spec").at("output_dim").get<int>();
  spec.output_activation = j.at("spec").at("output_activation").get<std::string>() == "sigmoid"
                               ? NetworkSpec::OutputActivation::kSigmoid
                               : NetworkSpec::OutputActivation::kLinear;
  out.params = Parameters::zeros(spec);

  const auto& layers = j.at("layers");
  if (layers.size() != out.params.layers.size())
    throw std::runtime_error("checkpoint: layer count does not match spec");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& dst = out.params.layers[l];
    const auto& src = layers[l];
    if (src.at("in").get<int>() != dst.in || src.at("out").get<int>() != dst.out)
      throw std::runtime_error("checkpoint: layer shape does not match spec");
    dst.w = src.at("w").get<std::vector<double>>();
    dst.b = src.at("b").get<std::vector<double>>();
    if (dst.w.size() != static_cast<std::size_t>(dst.in) * dst.out ||
        dst.b.size() != static_cast<std::size_t>(dst.out))
      throw std::runtime_error("checkpoint: layer array size mismatch");
  }
  if (!out.params.all_finite()) throw std::runtime_error("checkpoint: non-finite parameters");
  return out;
}

}  // namespace vnet
