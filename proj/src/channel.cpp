#include "vnet/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vnet {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void require_domain(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

double square(double x) { return x * x; }

// (c / 4 pi f)^2, the isotropic path-loss factor shared by both bands.
double freq_factor(double f_hz) { return square(kSpeedOfLight / (4.0 * kPi * f_hz)); }

}  // namespace

void RadioConfig::validate() const {
  require(f_r_hz > 0, "RadioConfig: f_r_hz must be > 0");
  require(f_t_hz > 0, "RadioConfig: f_t_hz must be > 0");
  require(p_r_tx_w > 0, "RadioConfig: p_r_tx_w must be > 0");
  require(p_t_tx_w > 0, "RadioConfig: p_t_tx_w must be > 0");
  require(g_r_tx > 0 && g_r_rx > 0, "RadioConfig: RF gains must be > 0");
  require(g_t_max_tx > 0 && g_t_max_rx > 0, "RadioConfig: THz main-lobe gains must be > 0");
  require(g_t_min >= 0, "RadioConfig: g_t_min must be >= 0");
  require(theta_tx_rad >= 0 && theta_tx_rad < 2 * kPi, "RadioConfig: theta_tx_rad out of [0, 2pi)");
  require(theta_rx_rad >= 0 && theta_rx_rad < 2 * kPi, "RadioConfig: theta_rx_rad out of [0, 2pi)");
  require(alpha >= 2, "RadioConfig: alpha must be >= 2");
  require(k_a_per_m >= 0, "RadioConfig: k_a_per_m must be >= 0");
  require(w_r_hz > 0 && w_t_hz > 0, "RadioConfig: bandwidths must be > 0");
  require(sigma2_w > 0, "RadioConfig: sigma2_w must be > 0");
  require(n0_w > 0, "RadioConfig: n0_w must be > 0");
  require(h_r_m >= 0 && h_t_m >= 0, "RadioConfig: antenna heights must be >= 0");
  require(l_b_r_symbols >= 1 && l_b_t_symbols >= 1, "RadioConfig: blocklengths must be >= 1");
  require(eps_c > 0 && eps_c < 0.5, "RadioConfig: eps_c must be in (0, 0.5)");
  require(q_r >= 1 && q_t >= 1, "RadioConfig: quotas must be >= 1");
}

LinkGeometry LinkGeometry::from_ground(double d, double h) {
  if (!(std::isfinite(d) && std::isfinite(h) && d >= 0.0 && h >= 0.0))
    throw std::domain_error("LinkGeometry: d and h must be finite and >= 0");
  return LinkGeometry{d, h, std::hypot(d, h)};
}

double rf_sinr(const LinkGeometry& serving, double fading_serving,
               std::span<const RfInterferer> interferers, const RadioConfig& cfg) {
  require_domain(std::isfinite(fading_serving) && fading_serving >= 0.0,
                 "rf_sinr: fading must be finite and >= 0");
  require_domain(std::isfinite(serving.r) && serving.r > 0.0, "rf_sinr: serving distance must be > 0");

  const double gamma_r = cfg.g_r_tx * cfg.g_r_rx * freq_factor(cfg.f_r_hz);
  double interference = 0.0;
  for (const auto& it : interferers) {
    require_domain(std::isfinite(it.geom.r) && it.geom.r > 0.0,
                   "rf_sinr: interferer distance must be > 0");
    require_domain(std::isfinite(it.fading) && it.fading >= 0.0,
                   "rf_sinr: interferer fading must be finite and >= 0");
    interference += cfg.p_r_tx_w * gamma_r * std::pow(it.geom.r, -cfg.alpha) * it.fading;
  }
  const double numerator = cfg.p_r_tx_w * gamma_r * fading_serving;
  return numerator / (std::pow(serving.r, cfg.alpha) * (cfg.sigma2_w + interference));
}

double thz_sinr(const LinkGeometry& serving,
                std::span<const ThzInterferer> interferers, const RadioConfig& cfg) {
  require_domain(std::isfinite(serving.r) && serving.r > 0.0, "thz_sinr: serving distance must be > 0");

  const double chi = freq_factor(cfg.f_t_hz);
  const double gamma_t = cfg.g_t_max_tx * cfg.g_t_max_rx * chi;
  const double f_tx = cfg.theta_tx_rad / (2.0 * kPi);
  const double f_rx = cfg.theta_rx_rad / (2.0 * kPi);
  const double ka = cfg.k_a_per_m;

  const double r = serving.r;
  const double numerator = gamma_t * cfg.p_t_tx_w * std::exp(-ka * r) / (r * r);

  // Thermal noise plus molecular re-emission from the serving and interfering paths.
  double noise = cfg.n0_w + cfg.p_t_tx_w * gamma_t / (r * r) * (-std::expm1(-ka * r));
  double interference = 0.0;
  for (const auto& it : interferers) {
    const double ri = it.geom.r;
    require_domain(std::isfinite(ri) && ri > 0.0, "thz_sinr: interferer distance must be > 0");
    require_domain(std::isfinite(it.gain_product) && it.gain_product >= 0.0,
                   "thz_sinr: gain product must be finite and >= 0");
    noise += gamma_t * f_tx * f_rx * cfg.p_t_tx_w / (ri * ri) * (-std::expm1(-ka * ri));
    interference += chi * it.gain_product * cfg.p_t_tx_w / (ri * ri) * std::exp(-ka * ri);
  }
  return numerator / (noise + interference);
}

double sample_beam_alignment(Rng& rng, const RadioConfig& cfg) {
  const double f_tx = cfg.theta_tx_rad / (2.0 * kPi);
  const double f_rx = cfg.theta_rx_rad / (2.0 * kPi);
  const double g_tx = rng.uniform() < f_tx ? cfg.g_t_max_tx : cfg.g_t_min;
  const double g_rx = rng.uniform() < f_rx ? cfg.g_t_max_rx : cfg.g_t_min;
  return g_tx * g_rx;
}

double mean_beam_alignment(const RadioConfig& cfg) {
  const double f_tx = cfg.theta_tx_rad / (2.0 * kPi);
  const double f_rx = cfg.theta_rx_rad / (2.0 * kPi);
  const double e_tx = f_tx * cfg.g_t_max_tx + (1.0 - f_tx) * cfg.g_t_min;
  const double e_rx = f_rx * cfg.g_t_max_rx + (1.0 - f_rx) * cfg.g_t_min;
  return e_tx * e_rx;
}

double inverse_q(double p) {
  require_domain(std::isfinite(p) && p > 0.0 && p < 1.0, "inverse_q: p must be in (0, 1)");

  // Acklam's rational approximation to the standard normal quantile,
  // then Newton refinement on Q(x) - p with an erfc-based forward map.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double z;  // normal quantile of p
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Q(x) = p at x = -Phi^{-1}(p).
  double x = -z;
  constexpr double half_log_2pi = 0.9189385332046727;
  for (int i = 0; i < 3; ++i) {
    const double err = 0.5 * std::erfc(x / std::sqrt(2.0)) - p;
    if (err == 0.0) break;
    // err / phi(x), evaluated in log space so extreme tails stay finite
    const double log_step = std::log(std::fabs(err)) + half_log_2pi + 0.5 * x * x;
    x += std::copysign(std::exp(log_step), err);
  }
  return x;
}

double achievable_rate(double sinr, double w_hz, double block_len, double eps_c) {
  require_domain(std::isfinite(sinr) && sinr >= 0.0, "achievable_rate: sinr must be finite and >= 0");
  require_domain(std::isfinite(w_hz) && w_hz > 0.0, "achievable_rate: bandwidth must be > 0");
  require_domain(std::isfinite(block_len) && block_len >= 1.0,
                 "achievable_rate: blocklength must be >= 1");
  require_domain(eps_c > 0.0 && eps_c < 0.5, "achievable_rate: eps_c must be in (0, 0.5)");

  if (sinr == 0.0) return 0.0;
  const double one = 1.0 + sinr;
  const double dispersion = 1.0 - 1.0 / (one * one);
  const double rate = w_hz / std::log(2.0) *
                      (std::log1p(sinr) - std::sqrt(dispersion / block_len) * inverse_q(eps_c));
  return rate > 0.0 ? rate : 0.0;
}

double ho_penalty(HandoverKind kind) {
  switch (kind) {
    case HandoverKind::kKeep: return 0.0;
    case HandoverKind::kToRbs: return 0.1;
    case HandoverKind::kToTbs: return 0.5;
  }
  throw std::domain_error("ho_penalty: invalid handover kind");
}

double weighted_rate(double rate, int quota, int load, double mu) {
  require_domain(std::isfinite(rate) && rate >= 0.0, "weighted_rate: rate must be >= 0");
  require_domain(quota >= 1, "weighted_rate: quota must be >= 1");
  require_domain(load >= 0, "weighted_rate: load must be >= 0");
  require_domain(std::isfinite(mu) && mu >= 0.0 && mu <= 1.0, "weighted_rate: mu must be in [0, 1]");
  const int divisor = std::max(1, std::min(quota, load));
  return rate / static_cast<double>(divisor) * (1.0 - mu);
}

}  // namespace vnet
