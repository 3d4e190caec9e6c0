#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "vnet/channel.hpp"
#include "vnet/rng.hpp"

using namespace vnet;

namespace {

double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
}

}  // namespace

TEST_SUITE_BEGIN("channel");

TEST_CASE("rf_sinr matches the pinned high-precision value") {
  RadioConfig cfg;  // defaults carry the experiment parameters
  CHECK(cfg.p_r_tx_w == 1.0);
  CHECK(cfg.g_r_tx == 316.2);
  CHECK(cfg.f_r_hz == 3.5e9);
  CHECK(cfg.alpha == 4.0);

  const auto geom = LinkGeometry::from_ground(100.0, 0.0);
  const double sinr = rf_sinr(geom, 1.0, {}, cfg);
  CHECK(rel_err(sinr, 464525.24419536784) < 1e-12);
}

TEST_CASE("rf_sinr is zero when the serving fade is zero") {
  RadioConfig cfg;
  const auto geom = LinkGeometry::from_ground(50.0, 10.0);
  CHECK(rf_sinr(geom, 0.0, {}, cfg) == 0.0);
}

TEST_CASE("rf_sinr interference lowers the ratio") {
  RadioConfig cfg;
  const auto geom = LinkGeometry::from_ground(100.0, 0.0);
  const std::vector<RfInterferer> one{{LinkGeometry::from_ground(200.0, 0.0), 1.0}};
  CHECK(rf_sinr(geom, 1.0, one, cfg) < rf_sinr(geom, 1.0, {}, cfg));
}

TEST_CASE("rf_sinr rejects bad inputs") {
  RadioConfig cfg;
  const auto geom = LinkGeometry::from_ground(100.0, 0.0);
  CHECK_THROWS_AS(rf_sinr(LinkGeometry{0, 0, 0}, 1.0, {}, cfg), std::domain_error);
  CHECK_THROWS_AS(rf_sinr(geom, std::nan(""), {}, cfg), std::domain_error);
}

TEST_CASE("thz_sinr matches the pinned high-precision value") {
  RadioConfig cfg;
  const auto serving = LinkGeometry::from_ground(20.0, 0.0);
  const std::vector<ThzInterferer> one{
      {LinkGeometry::from_ground(50.0, 0.0), cfg.g_t_max_tx * cfg.g_t_max_rx}};
  CHECK(rel_err(thz_sinr(serving, one, cfg), 0.57002474535589041) < 1e-12);
}

TEST_CASE("thz_sinr reduces to free space with no absorption or interferers") {
  RadioConfig cfg;
  cfg.k_a_per_m = 0.0;
  const double r = 30.0;
  const auto geom = LinkGeometry::from_ground(r, 0.0);
  const double chi = std::pow(kSpeedOfLight / (4.0 * kPi * cfg.f_t_hz), 2);
  const double expected = cfg.g_t_max_tx * cfg.g_t_max_rx * chi * cfg.p_t_tx_w / (r * r) / cfg.n0_w;
  CHECK(rel_err(thz_sinr(geom, {}, cfg), expected) < 1e-12);
}

TEST_CASE("sinr decreases monotonically with serving distance") {
  RadioConfig cfg;
  double prev_rf = 1e308, prev_thz = 1e308;
  for (double r = 10.0; r <= 1000.0; r += 5.0) {
    const auto geom = LinkGeometry::from_ground(r, 0.0);
    const double rf = rf_sinr(geom, 1.0, {}, cfg);
    const double thz = thz_sinr(geom, {}, cfg);
    CHECK(rf < prev_rf);
    CHECK(thz < prev_thz);
    prev_rf = rf;
    prev_thz = thz;
  }
}

TEST_CASE("beam alignment sampling follows the four-case distribution") {
  RadioConfig cfg;

  SUBCASE("full beamwidth always aligns") {
    cfg.theta_tx_rad = 2.0 * kPi - 1e-12;
    cfg.theta_rx_rad = 2.0 * kPi - 1e-12;
    Rng rng(1);
    for (int i = 0; i < 100; ++i)
      CHECK(sample_beam_alignment(rng, cfg) == cfg.g_t_max_tx * cfg.g_t_max_rx);
  }

  SUBCASE("zero beamwidth never aligns") {
    cfg.theta_tx_rad = 0.0;
    cfg.theta_rx_rad = 0.0;
    Rng rng(2);
    for (int i = 0; i < 100; ++i) CHECK(sample_beam_alignment(rng, cfg) == 0.0);
  }

  SUBCASE("theta = pi gives main-main frequency 1/4") {
    cfg.theta_tx_rad = kPi;
    cfg.theta_rx_rad = kPi;
    Rng rng(3);
    const int n = 1000000;
    int hits = 0;
    const double main_main = cfg.g_t_max_tx * cfg.g_t_max_rx;
    for (int i = 0; i < n; ++i)
      if (sample_beam_alignment(rng, cfg) == main_main) ++hits;
    CHECK(std::fabs(hits / static_cast<double>(n) - 0.25) < 0.005);
  }
}

TEST_CASE("mean_beam_alignment matches the sampler's expectation") {
  RadioConfig cfg;
  Rng rng(4);
  double sum = 0.0;
  const int n = 2000000;
  for (int i = 0; i < n; ++i) sum += sample_beam_alignment(rng, cfg);
  const double mean = mean_beam_alignment(cfg);
  CHECK(std::fabs(sum / n - mean) / mean < 0.05);
}

TEST_CASE("inverse_q hits the pinned values") {
  CHECK(inverse_q(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::fabs(inverse_q(0.15865525393145705) - 1.0) < 1e-9);  // p = Q(1)
  CHECK(std::fabs(inverse_q(1e-5) - 4.2648907939228246) < 1e-10);
  CHECK_THROWS_AS(inverse_q(0.0), std::domain_error);
  CHECK_THROWS_AS(inverse_q(1.0), std::domain_error);
  CHECK_THROWS_AS(inverse_q(-0.1), std::domain_error);
}

TEST_CASE("inverse_q round-trips the forward tail across magnitudes") {
  for (double p : {0.4, 0.1, 1e-2, 1e-3, 1e-5, 1e-8, 1e-12, 0.6, 0.9, 0.99}) {
    const double x = inverse_q(p);
    const double back = 0.5 * std::erfc(x / std::sqrt(2.0));
    CHECK(std::fabs(back - p) / p < 1e-10);
  }
}

TEST_CASE("achievable_rate matches the pinned high-precision value") {
  CHECK(rel_err(achievable_rate(10.0, 5e8, 25.0, 1e-5), 1116969940.3465640) < 1e-10);
}

TEST_CASE("achievable_rate trivial and limiting cases") {
  CHECK(achievable_rate(0.0, 5e8, 25.0, 1e-5) == 0.0);

  // blocklength to infinity approaches Shannon capacity
  const double sinr = 1000.0;
  const double shannon = 5e8 * std::log2(1.0 + sinr);
  const double rate = achievable_rate(sinr, 5e8, 1e12, 1e-5);
  CHECK(std::fabs(rate - shannon) / shannon < 1e-6);

  CHECK_THROWS_AS(achievable_rate(1.0, 5e8, 25.0, 0.7), std::domain_error);
  CHECK_THROWS_AS(achievable_rate(1.0, 5e8, 0.5, 1e-5), std::domain_error);
}

TEST_CASE("achievable_rate is nondecreasing in sinr and blocklength") {
  double prev = -1.0;
  for (double s = 0.0; s <= 100.0; s += 0.5) {
    const double r = achievable_rate(s, 4e7, 16.0, 1e-5);
    CHECK(r >= prev);
    prev = r;
  }
  prev = -1.0;
  for (double lb = 1.0; lb <= 1e6; lb *= 2.0) {
    const double r = achievable_rate(5.0, 4e7, lb, 1e-5);
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("achievable_rate never exceeds Shannon capacity") {
  Rng rng(9);
  for (int i = 0; i < 500; ++i) {
    const double s = rng.uniform(0.0, 1e4);
    const double w = rng.uniform(1e6, 1e9);
    const double lb = 1.0 + rng.uniform(0.0, 1e4);
    const double eps = rng.uniform(1e-9, 0.49);
    CHECK(achievable_rate(s, w, lb, eps) <= w * std::log2(1.0 + s) + 1e-9);
  }
}

TEST_CASE("handover penalty table is exact") {
  CHECK(ho_penalty(HandoverKind::kKeep) == 0.0);
  CHECK(ho_penalty(HandoverKind::kToRbs) == 0.1);
  CHECK(ho_penalty(HandoverKind::kToTbs) == 0.5);
}

TEST_CASE("weighted_rate follows the load-balanced form") {
  CHECK(weighted_rate(1e8, 10, 4, 0.0) == doctest::Approx(2.5e7));
  CHECK(weighted_rate(1e8, 5, 8, 0.5) == doctest::Approx(1e7));  // min clamps at quota
  CHECK(weighted_rate(1e8, 5, 0, 0.0) == doctest::Approx(1e8));  // zero load divides by 1
  CHECK_THROWS_AS(weighted_rate(-1.0, 5, 1, 0.0), std::domain_error);
}

TEST_CASE("weighted_rate penalty ordering") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double rate = rng.uniform(0.0, 1e9);
    const int quota = 1 + rng.uniform_int(10);
    const int load = rng.uniform_int(15);
    const double mu = rng.uniform(1e-3, 1.0);
    CHECK(weighted_rate(rate, quota, load, 0.0) >= weighted_rate(rate, quota, load, mu));
    if (rate > 0.0)
      CHECK(weighted_rate(rate, quota, load, 0.0) > weighted_rate(rate, quota, load, mu));
  }
}

TEST_CASE("channel functions are pure") {
  RadioConfig cfg;
  const auto geom = LinkGeometry::from_ground(123.0, 10.0);
  const std::vector<RfInterferer> ints{{LinkGeometry::from_ground(321.0, 10.0), 0.7}};
  const double a = rf_sinr(geom, 1.3, ints, cfg);
  const double b = rf_sinr(geom, 1.3, ints, cfg);
  CHECK(a == b);
  CHECK(achievable_rate(3.3, 4e7, 16.0, 1e-5) == achievable_rate(3.3, 4e7, 16.0, 1e-5));
}

TEST_CASE("radio config invariants are enforced") {
  RadioConfig cfg;
  cfg.eps_c = 0.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = RadioConfig{};
  cfg.alpha = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = RadioConfig{};
  CHECK_NOTHROW(cfg.validate());
}

TEST_SUITE_END();
