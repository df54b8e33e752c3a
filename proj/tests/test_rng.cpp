#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "parasim/rng.hpp"

using parasim::Rng;
using parasim::seed_stream;

TEST_CASE("philox zero-vector known answer") {
  // Philox4x32-10, counter = {0,0,0,0}, key = {0,0} produces the block
  // {0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}; the generator packs it
  // into two 64-bit words (x3:x2 first, then x1:x0).
  Rng rng(0, 0);
  CHECK(rng.u64() == UINT64_C(0x9b00dbd8bc57ac4c));
  CHECK(rng.u64() == UINT64_C(0xe169c58d6627e8d5));
}

TEST_CASE("same master seed and stream reproduce the same sequence") {
  Rng a(123456789, 42);
  Rng b(123456789, 42);
  for (int i = 0; i < 1000; ++i) CHECK(a.u64() == b.u64());
}

TEST_CASE("seed_stream is the (master, replicate) constructor") {
  Rng a = seed_stream(42, 7);
  Rng b(42, 7);
  for (int i = 0; i < 64; ++i) CHECK(a.u64() == b.u64());
}

TEST_CASE("one million replicate streams have distinct 128-bit prefixes") {
  std::vector<std::pair<uint64_t, uint64_t>> prefixes;
  prefixes.reserve(1000000);
  for (uint64_t i = 0; i < 1000000; ++i) {
    Rng rng = seed_stream(42, i);
    const uint64_t hi = rng.u64();
    const uint64_t lo = rng.u64();
    prefixes.emplace_back(hi, lo);
  }
  std::sort(prefixes.begin(), prefixes.end());
  CHECK(std::adjacent_find(prefixes.begin(), prefixes.end()) ==
        prefixes.end());
}

TEST_CASE("distinct streams and distinct masters decorrelate immediately") {
  Rng a(9, 0), b(9, 1), c(10, 0);
  CHECK(a.u64() != b.u64());
  Rng a2(9, 0);
  CHECK(a2.u64() != c.u64());
}

TEST_CASE("uniform moments and support") {
  Rng rng(2024, 0);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("uniform_pos is strictly positive and at most 1") {
  Rng rng(7, 3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_pos();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("exponential has the requested mean") {
  Rng rng(5, 1);
  const int n = 200000;
  const double rate = 2.0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.exponential(rate);
  const double mean = sum / n;
  CHECK(std::abs(mean - 0.5) < 4.0 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("bernoulli frequency matches p") {
  Rng rng(11, 0);
  const int n = 200000;
  const double p = 0.3;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += rng.bernoulli(p) ? 1 : 0;
  const double freq = double(hits) / n;
  CHECK(std::abs(freq - p) < 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("below(n) is in range and roughly uniform") {
  Rng rng(13, 0);
  const uint64_t n = 10;
  const int draws = 200000;
  std::vector<int> counts(n, 0);
  for (int i = 0; i < draws; ++i) {
    const uint64_t x = rng.below(n);
    REQUIRE(x < n);
    ++counts[static_cast<size_t>(x)];
  }
  const double expect = double(draws) / double(n);
  const double tol = 5.0 * std::sqrt(expect);
  for (uint64_t k = 0; k < n; ++k)
    CHECK(std::abs(counts[static_cast<size_t>(k)] - expect) < tol);
  CHECK(Rng(1, 1).below(1) == 0);
}
