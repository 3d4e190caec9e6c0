#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "vnet/replay.hpp"
#include "vnet/rng.hpp"

using namespace vnet;

namespace {
Transition make_transition(int tag) {
  Transition t;
  t.s = {static_cast<double>(tag)};
  t.s_next = {static_cast<double>(tag) + 0.5};
  t.action = tag % 15;
  t.r.tran = tag;
  return t;
}
}  // namespace

TEST_SUITE_BEGIN("replay");

TEST_CASE("fifo eviction at capacity") {
  TransitionPool pool(4);
  for (int i = 0; i < 5; ++i) pool.push(make_transition(i));
  CHECK(pool.size() == 4);
  CHECK(pool.at(0).s[0] == 1.0);  // the first item is gone
  CHECK(pool.at(3).s[0] == 4.0);
  for (int i = 5; i < 8; ++i) pool.push(make_transition(i));
  CHECK(pool.size() == 4);
  CHECK(pool.at(0).s[0] == 4.0);
}

TEST_CASE("sampling from a single-item pool returns it") {
  TransitionPool pool(8);
  pool.push(make_transition(42));
  Rng rng(1);
  const auto s = pool.sample(3, rng);
  REQUIRE(s.size() == 3);
  for (const auto* t : s) CHECK(t->s[0] == 42.0);
}

TEST_CASE("sampling zero items and empty-pool error") {
  TransitionPool pool(8);
  Rng rng(2);
  CHECK_THROWS_AS(pool.sample(1, rng), std::runtime_error);
  pool.push(make_transition(1));
  CHECK(pool.sample(0, rng).empty());
}

TEST_CASE("sampling is uniform (chi-squared at p > 0.01)") {
  TransitionPool pool(16);
  for (int i = 0; i < 10; ++i) pool.push(make_transition(i));
  Rng rng(3);
  const int draws = 100000;
  std::vector<int> counts(10, 0);
  for (const auto* t : pool.sample(draws, rng)) counts[static_cast<int>(t->s[0])]++;
  double chi2 = 0.0;
  const double expected = draws / 10.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 21.666);  // chi-squared critical value, 9 dof, p = 0.01
}

TEST_CASE("sampling sequence is reproducible per seed") {
  TransitionPool pool(32);
  for (int i = 0; i < 20; ++i) pool.push(make_transition(i));
  Rng a(9), b(9);
  const auto sa = pool.sample(50, a);
  const auto sb = pool.sample(50, b);
  for (std::size_t i = 0; i < sa.size(); ++i) CHECK(sa[i] == sb[i]);
}

TEST_CASE("interleaved push and sample replays identically") {
  auto run = [](std::uint64_t seed) {
    TransitionPool pool(8);
    Rng rng(seed);
    std::vector<double> log;
    for (int i = 0; i < 100; ++i) {
      pool.push(make_transition(i));
      if (pool.size() >= 3)
        for (const auto* t : pool.sample(2, rng)) log.push_back(t->s[0]);
    }
    return log;
  };
  CHECK(run(5) == run(5));
}

TEST_CASE("preferences lie on the simplex") {
  PreferencePool pool;
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const PreferenceVector p = pool.sample(rng);
    CHECK(p.w[0] >= 0.0);
    CHECK(p.w[1] >= 0.0);
    CHECK(std::fabs(p.w[0] + p.w[1] - 1.0) <= 1e-12);
  }
  CHECK(pool.sample(1, rng).size() == 1);
}

TEST_CASE("preference coordinate is uniform in the mean") {
  PreferencePool pool;
  Rng rng(6);
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) sum += pool.sample(rng).w[0];
  CHECK(std::fabs(sum / n - 0.5) < 0.002);
}

TEST_CASE("preference history ring keeps the most recent draws") {
  PreferencePool pool(3);
  Rng rng(7);
  for (int i = 0; i < 10; ++i) pool.sample(rng);
  CHECK(pool.history().size() == 3);
}

TEST_SUITE_END();
