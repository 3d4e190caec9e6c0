#pragma once

#include <span>
#include <string>
#include <vector>

#include "vnet/rng.hpp"

namespace vnet {

struct NetworkSpec {
  int input_dim = 1;
  std::vector<int> hidden{64};  // at least one hidden layer, ReLU
  int output_dim = 1;
  enum class OutputActivation { kLinear, kSigmoid };
  OutputActivation output_activation = OutputActivation::kLinear;

  void validate() const;
  bool operator==(const NetworkSpec&) const = default;
};

struct Layer {
  int in = 0;
  int out = 0;
  std::vector<double> w;  // row-major, out x in
  std::vector<double> b;
};

// Weights and biases for every layer of a NetworkSpec; doubles throughout.
struct Parameters {
  NetworkSpec spec;
  std::vector<Layer> layers;

  static Parameters zeros(const NetworkSpec& spec);
  static Parameters he_uniform(const NetworkSpec& spec, Rng& rng);

  bool same_shape(const Parameters& other) const;
  bool all_finite() const;
  std::size_t count() const;  // total scalar parameters
};

// Copies src into dst; the two must share a spec. Storage is value-owned, so
// later updates to src never alias dst.
void clone_into(const Parameters& src, Parameters& dst);

// Activations kept from a forward pass for use by backward().
struct ForwardCache {
  std::vector<std::vector<double>> acts;  // acts[0] = input, acts.back() = output
};

std::vector<double> forward(const Parameters& params, std::span<const double> input,
                            ForwardCache* cache = nullptr);

// Exact reverse-mode gradients of the forward map, in Parameters shape.
Parameters backward(const Parameters& params, const ForwardCache& cache,
                    std::span<const double> output_gradient);

// Accumulates grad into acc (same shapes).
void accumulate(Parameters& acc, const Parameters& grad, double scale = 1.0);

struct OptimizerConfig {
  double learning_rate = 3e-4;
  enum class Kind { kSgd, kAdam };
  Kind kind = Kind::kAdam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Gradient-descent step on a parameter set; Adam keeps per-parameter moments.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerConfig cfg, const NetworkSpec& spec);

  // theta <- theta - lr * step(grad). Non-finite gradients are rejected.
  void apply_update(Parameters& params, const Parameters& grads);

 private:
  OptimizerConfig cfg_{};
  Parameters m_, v_;
  long step_ = 0;
};

// Versioned JSON checkpoint; doubles survive a round-trip bit-exactly.
std::string checkpoint_to_json(const Parameters& params,
                               const std::string& algorithm,
                               const std::string& extra_json = "{}");
struct Checkpoint {
  Parameters params;
  std::string algorithm;
  std::string extra_json;
};
Checkpoint checkpoint_from_json(const std::string& text);

}  // namespace vnet
