#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hu/rng.hpp"

using hu::Rng;

TEST_CASE("same seed gives identical sequences") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("different streams from one seed diverge") {
  Rng a = Rng::stream(42, 1);
  Rng b = Rng::stream(42, 2);
  int equal = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++equal;
  }
  CHECK(equal == 0);
}

TEST_CASE("substreams are reproducible and index-dependent") {
  const auto first = Rng::substream(7, 1, 5).next_u64();
  CHECK(Rng::substream(7, 1, 5).next_u64() == first);
  CHECK(Rng::substream(7, 1, 6).next_u64() != first);
}

TEST_CASE("uniform01 stays in (0, 1]") {
  Rng rng(3);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    REQUIRE(u > 0.0);
    REQUIRE(u <= 1.0);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("gaussian moments are plausible") {
  Rng rng(11);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("below is unbiased across a small modulus") {
  Rng rng(5);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    counts[static_cast<std::size_t>(rng.below(7))]++;
  }
  for (int c : counts) {
    CHECK(c > n / 7 - 600);
    CHECK(c < n / 7 + 600);
  }
}

TEST_CASE("shuffle permutes without losing elements") {
  Rng rng(9);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[static_cast<std::size_t>(i)] = i;
  auto w = v;
  rng.shuffle(w.begin(), w.end());
  CHECK(w != v);
  std::sort(w.begin(), w.end());
  CHECK(w == v);
}
