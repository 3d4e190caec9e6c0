#include "vnet/replay.hpp"

#include <stdexcept>

namespace vnet {

TransitionPool::TransitionPool(std::size_t capacity) {
  if (capacity == 0) throw std::invalid_argument("TransitionPool: capacity must be > 0");
  buf_.reserve(capacity);
  buf_.resize(capacity);
}

void TransitionPool::push(Transition t) {
  buf_[head_] = std::move(t);
  head_ = (head_ + 1) % buf_.size();
  if (head_ == 0) full_ = true;
}

const Transition& TransitionPool::at(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("TransitionPool: index out of range");
  const std::size_t base = full_ ? head_ : 0;
  return buf_[(base + i) % buf_.size()];
}

std::vector<const Transition*> TransitionPool::sample(std::size_t n, Rng& rng) const {
  if (size() == 0) throw std::runtime_error("TransitionPool: cannot sample from an empty pool");
  std::vector<const Transition*> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k)
    out.push_back(&at(static_cast<std::size_t>(rng.uniform_int(static_cast<int>(size())))));
  return out;
}

PreferencePool::PreferencePool(std::size_t history_capacity)
    : history_capacity_(history_capacity) {}

PreferenceVector PreferencePool::sample(Rng& rng) {
  // Uniform on the 1-simplex: for H = 2 a single uniform coordinate suffices.
  PreferenceVector p = PreferenceVector::of(rng.uniform());
  if (history_capacity_ > 0) {
    if (history_.size() == history_capacity_) history_.erase(history_.begin());
    history_.push_back(p);
  }
  return p;
}

std::vector<PreferenceVector> PreferencePool::sample(std::size_t n, Rng& rng) {
  std::vector<PreferenceVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample(rng));
  return out;
}

}  // namespace vnet
