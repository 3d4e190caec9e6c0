#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "vnet/rng.hpp"
#include "vnet/types.hpp"

namespace vnet {

struct Transition {
  std::vector<double> s;
  int action = 0;  // flat joint-action index
  RewardVector r;
  std::vector<double> s_next;
  bool terminal = false;
};

// Fixed-capacity FIFO ring of transitions with uniform with-replacement sampling.
class TransitionPool {
 public:
  explicit TransitionPool(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return full_ ? buf_.size() : head_; }
  std::size_t capacity() const { return buf_.size(); }

  // i = 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const;

  // n independent uniform draws; pointers stay valid until the next push.
  std::vector<const Transition*> sample(std::size_t n, Rng& rng) const;

 private:
  std::vector<Transition> buf_;
  std::size_t head_ = 0;
  bool full_ = false;
};

// Preference sampler over the 1-simplex (uniform), with an optional ring of
// recently emitted vectors.
class PreferencePool {
 public:
  explicit PreferencePool(std::size_t history_capacity = 0);

  PreferenceVector sample(Rng& rng);
  std::vector<PreferenceVector> sample(std::size_t n, Rng& rng);
  std::span<const PreferenceVector> history() const { return history_; }

 private:
  std::size_t history_capacity_;
  std::vector<PreferenceVector> history_;
};

}  // namespace vnet
