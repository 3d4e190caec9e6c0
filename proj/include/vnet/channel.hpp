#pragma once

#include <span>
#include <vector>

#include "vnet/rng.hpp"

namespace vnet {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Radio parameters for both bands. sigma2/n0/eps_c, antenna heights, and
// beamwidths are not fixed by the system tables; the defaults here are the
// documented assumptions and all of them are config keys.
struct RadioConfig {
  double f_r_hz = 3.5e9;   // RF carrier
  double f_t_hz = 1e12;    // THz carrier
  double p_r_tx_w = 1.0;
  double p_t_tx_w = 1.0;
  double g_r_tx = 316.2;
  double g_r_rx = 316.2;
  double g_t_max_tx = 316.2;
  double g_t_max_rx = 316.2;
  double g_t_min = 0.0;  // side lobes treated as negligible
  double theta_tx_rad = 10.0 * kPi / 180.0;
  double theta_rx_rad = 10.0 * kPi / 180.0;
  double alpha = 4.0;       // RF path-loss exponent
  double k_a_per_m = 0.05;  // molecular absorption coefficient
  double w_r_hz = 4e7;
  double w_t_hz = 5e8;
  double sigma2_w = 1e-13;  // RF receiver noise power
  double n0_w = 1e-12;      // THz thermal noise power
  double h_r_m = 10.0;      // RBS antenna height
  double h_t_m = 5.0;       // TBS antenna height
  double l_b_r_symbols = 16.0;  // W_R * 4e-7 s
  double l_b_t_symbols = 25.0;  // W_T * 5e-8 s
  double eps_c = 1e-5;          // decoding error probability
  int q_r = 5;   // per-RBS AV quota
  int q_t = 10;  // per-TBS AV quota

  void validate() const;  // throws std::invalid_argument naming the bad field
};

// One link: 2-D ground distance, antenna height, 3-D distance.
struct LinkGeometry {
  double d = 0.0;
  double h = 0.0;
  double r = 0.0;

  static LinkGeometry from_ground(double d, double h);
};

struct RfInterferer {
  LinkGeometry geom;
  double fading = 1.0;  // exponential(1) channel fading power
};

struct ThzInterferer {
  LinkGeometry geom;
  double gain_product = 0.0;  // sampled tx*rx alignment gain
};

// Linear SINR of an RF link with exponential fading and cumulative
// co-channel interference from the other RBSs.
double rf_sinr(const LinkGeometry& serving, double fading_serving,
               std::span<const RfInterferer> interferers, const RadioConfig& cfg);

// Linear SINR of a THz link: molecular absorption on the serving path, plus
// thermal + absorption noise and alignment-weighted interference. The serving
// beam pair is always aligned (main/main).
double thz_sinr(const LinkGeometry& serving,
                std::span<const ThzInterferer> interferers, const RadioConfig& cfg);

// Draws a tx*rx gain product for an interfering TBS beam pair: each side is
// main-lobe with probability theta / 2*pi, side-lobe otherwise.
double sample_beam_alignment(Rng& rng, const RadioConfig& cfg);

// Expected value of sample_beam_alignment; used for deterministic observation features.
double mean_beam_alignment(const RadioConfig& cfg);

// x such that Q(x) = p, Q the standard Gaussian tail. Accurate to < 1e-10.
double inverse_q(double p);

// Finite-blocklength achievable rate (bit/s), clamped below at zero; the
// dispersion penalty can otherwise drive it negative at low SINR.
double achievable_rate(double sinr, double w_hz, double block_len, double eps_c);

enum class HandoverKind { kKeep, kToRbs, kToTbs };

// Handover penalty mu: 0 keep, 0.1 switch to RBS, 0.5 switch to TBS.
double ho_penalty(HandoverKind kind);

// Load-balanced, handover-aware weighted data rate. A zero-load divisor is
// replaced by 1: the candidate AV itself would be the first association.
double weighted_rate(double rate, int quota, int load, double mu);

}  // namespace vnet
