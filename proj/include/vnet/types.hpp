#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace vnet {

// Two objectives throughout: transportation and telecommunication.
inline constexpr int kObjectives = 2;

struct RewardVector {
  double tran = 0.0;
  double tele = 0.0;
};

// Nonnegative weights over the two objectives, summing to 1.
struct PreferenceVector {
  std::array<double, kObjectives> w{1.0, 0.0};

  static PreferenceVector of(double w_tran) {
    PreferenceVector p;
    p.w = {w_tran, 1.0 - w_tran};
    p.validate();
    return p;
  }

  void validate() const {
    for (double x : w) {
      if (!(std::isfinite(x) && x >= 0.0))
        throw std::domain_error("PreferenceVector: weights must be finite and nonnegative");
    }
    if (std::fabs(w[0] + w[1] - 1.0) > 1e-12)
      throw std::domain_error("PreferenceVector: weights must sum to 1");
  }

  double dot(const RewardVector& r) const { return w[0] * r.tran + w[1] * r.tele; }
  double dot(std::span<const double, kObjectives> v) const { return w[0] * v[0] + w[1] * v[1]; }
};

// Joint driving/network-selection action: 3 association policies x 5 maneuvers.
struct JointAction {
  int tele = 0;  // 0..2
  int tran = 0;  // 0..4

  static constexpr int kTeleCount = 3;
  static constexpr int kTranCount = 5;
  static constexpr int kCount = kTeleCount * kTranCount;

  static JointAction from_flat(int flat) {
    if (flat < 0 || flat >= kCount)
      throw std::domain_error("JointAction: flat index out of range");
    return JointAction{flat / kTranCount, flat % kTranCount};
  }

  int flat() const { return tele * kTranCount + tran; }
};

// Per-episode aggregates written to the metrics CSV.
struct MetricsRecord {
  int episode = 0;
  double r_tran = 0.0;  // discounted episode total, averaged over target AVs
  double r_tele = 0.0;
  double delta_e = 0.0;  // collision rate: 1 - T_e / T_hl
  double xi_e = 0.0;     // mean handover probability at episode end
  double omega_tran = std::numeric_limits<double>::quiet_NaN();  // preference-conditioned runs only
  double wall_ms = 0.0;
};

// Lowest-index argmax, the tie-break used by every greedy action selection.
inline int argmax_lowest(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax_lowest: empty input");
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace vnet
