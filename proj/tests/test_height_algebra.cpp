#include <doctest.h>

#include "mixlab/errors.hpp"
#include "mixlab/height_algebra.hpp"

#include <random>

using namespace mixlab;

namespace {

CutVector cv(std::vector<int> entries) {
  CutVector r;
  for (int e : entries) r.entries.emplace_back(e);
  return r;
}

}  // namespace

TEST_CASE("height functional") {
  CHECK(height_functional(cv({2, 2}), 2, 3) == 11);
  CHECK(height_functional(cv({3, 2}), 2, 2) == 9);
  CHECK(height_functional(cv({3, 2}), 2, 3) == 19);
  CHECK(height_functional(cv({4, 7, 9}), 5, 1) == 5);
  CHECK_THROWS_AS(height_functional(cv({2}), 1, 3), PreconditionError);
}

TEST_CASE("per-flip increment stays below the ratio bound") {
  // H_{i+1}(r + e_i) - H_{i+1}(r) = h_i + r_i < (1/r_i + 1/h_i) h_{i+1}
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> entries;
    std::size_t len = 1 + rng() % 6;
    int cur = 2 + static_cast<int>(rng() % 4);
    for (std::size_t i = 0; i < len; ++i) {
      entries.push_back(cur);
      cur += static_cast<int>(rng() % 3);
    }
    CutVector r = cv(entries);
    BigInt h1 = 1 + static_cast<std::int64_t>(rng() % 50);
    for (std::size_t i = 1; i <= len; ++i) {
      BigInt hi = height_functional(r, h1, i);
      BigInt hi1 = height_functional(r, h1, i + 1);
      BinaryMask e;
      e.first = i;
      e.bits = {true};
      BigInt bumped = height_functional_masked(r, e, h1, i + 1);
      CHECK(bumped - hi1 == hi + r.at(i));
      CHECK(Rational(hi + r.at(i)) < (Rational(1, r.at(i)) + Rational(1, hi)) * Rational(hi1));
    }
  }
}

TEST_CASE("mask approximation, worked example") {
  // candidates over masks on [1, 2]: 11, 18, 19, 30; only 11 fits under 17
  auto res = lemma1_mask(cv({2, 2}), 2, 1, 3, 17);
  CHECK(res.mask.popcount() == 0);
  CHECK(res.achieved_height == 11);
  CHECK(res.residual == 6);
  CHECK(Rational(res.residual) < res.residual_ratio_bound * Rational(res.achieved_height));
}

TEST_CASE("mask approximation at the exact height") {
  auto res = lemma1_mask(cv({3, 3, 3}), 2, 1, 4, height_functional(cv({3, 3, 3}), 2, 4));
  CHECK(res.mask.popcount() == 0);
  CHECK(res.residual == 0);
}

TEST_CASE("preconditions are reported individually") {
  CHECK_THROWS_WITH_AS(lemma1_mask(cv({3, 2}), 2, 1, 3, 20), doctest::Contains("nondecreasing"),
                       PreconditionError);
  CHECK_THROWS_WITH_AS(lemma1_mask(cv({2, 2}), 2, 1, 3, 10), doctest::Contains("below H_n"),
                       PreconditionError);
  CHECK_THROWS_WITH_AS(lemma1_mask(cv({2, 2, 2}), 2, 1, 3, 25), doctest::Contains("H_{n+1}"),
                       PreconditionError);
  // k inside [H_n, H_{n+1}) but beyond what masks can reach:
  // r = (2), h1 = 20: H_2 = 43, H_3(r+1 everywhere) beyond, but with n = 2
  // the reach is (2+1)*20 = 60 <= k possible for k in [43, 59]...
  CHECK_THROWS_WITH_AS(lemma1_mask(cv({2, 2}), 20, 1, 2, 61), doctest::Contains("cannot reach"),
                       PreconditionError);
}

TEST_CASE("search equals the exhaustive maximizer on random instances") {
  std::mt19937_64 rng(1234);
  int accepted = 0;
  while (accepted < 300) {
    std::size_t dim = 1 + rng() % 8;
    std::size_t j = 1 + rng() % 3;
    std::size_t n = j + dim;
    std::vector<int> entries;
    int cur = 2 + static_cast<int>(rng() % 5);
    for (std::size_t i = 0; i < n; ++i) {
      entries.push_back(cur);
      if (rng() % 2) cur += static_cast<int>(rng() % 2);
    }
    CutVector r = cv(entries);
    BigInt h1 = 1 + static_cast<std::int64_t>(rng() % 20);
    BigInt lo = height_functional(r, h1, n);
    BigInt hi = height_functional(r, h1, n + 1);
    BigInt reach = height_functional(r, h1, j);
    for (std::size_t i = j; i < n; ++i) reach *= r.at(i) + 1;
    if (reach <= lo) continue;
    BigInt top = hi < reach ? hi : reach;
    BigInt k = lo + BigInt(rng() % 1000) % (top - lo);
    auto fast = lemma1_mask(r, h1, j, n, k);
    auto slow = lemma1_mask_exhaustive(r, h1, j, n, k);
    CHECK(fast.achieved_height == slow.achieved_height);
    CHECK(fast.mask.bits == slow.mask.bits);
    CHECK(fast.residual == slow.residual);
    ++accepted;
  }
}

TEST_CASE("maximality certificate: flipping any zero bit overshoots") {
  std::mt19937_64 rng(777);
  int accepted = 0;
  while (accepted < 100) {
    std::size_t dim = 2 + rng() % 6;
    std::vector<int> entries(dim + 1, 2 + static_cast<int>(rng() % 3));
    CutVector r = cv(entries);
    BigInt h1 = 1 + static_cast<std::int64_t>(rng() % 10);
    std::size_t j = 1, n = dim + 1;
    BigInt lo = height_functional(r, h1, n);
    BigInt hi = height_functional(r, h1, n + 1);
    BigInt reach = h1;
    for (std::size_t i = j; i < n; ++i) reach *= r.at(i) + 1;
    BigInt top = hi < reach ? hi : reach;
    if (top <= lo) continue;
    BigInt k = lo + BigInt(rng() % 997) % (top - lo);
    auto res = lemma1_mask(r, h1, j, n, k);
    for (std::size_t i = j; i < n; ++i) {
      if (res.mask.bit(i)) continue;
      BinaryMask flipped = res.mask;
      flipped.bits[i - j] = true;
      CHECK(height_functional_masked(r, flipped, h1, n) > k);
    }
    ++accepted;
  }
}

TEST_CASE("mask search is deterministic") {
  auto a = lemma1_mask(cv({2, 2, 3, 3}), 3, 1, 5, 150);
  auto b = lemma1_mask(cv({2, 2, 3, 3}), 3, 1, 5, 150);
  CHECK(a.mask.bits == b.mask.bits);
  CHECK(a.achieved_height == b.achieved_height);
}

TEST_CASE("number approximation step") {
  // rho = 4, h_j = 100, eps just above (rho+1)^2/h_j = 1/4
  ApproximationState state;
  state.rho = 4;
  state.j = 1;
  state.h1 = 100;
  Rational eps(26, 100);

  SUBCASE("k equal to a height gives a zero pad") {
    BigInt k = height_functional(cv({4, 4}), 100, 3);
    ApproximationState s = state;
    auto step = number_approximation_step(s, k, eps);
    CHECK(step.pad == 0);
    CHECK(step.n == 3);
    CHECK(step.new_height == k);
  }

  SUBCASE("smallest doubled power-interval element beyond H_3") {
    // H_2 = 406, H_3 = 1630; the interval [1024, 2047] reaches past H_3
    auto step = number_approximation_step(state, 1630, eps);
    CHECK(step.pad_proportion < Rational(1, 2));
    auto step2 = number_approximation_step(state, 2000, eps);
    CHECK(step2.pad_proportion < Rational(1, 2));
    CHECK(step2.new_height + step2.pad == 2000);
  }

  SUBCASE("k below the segment start is rejected") {
    CHECK_THROWS_WITH_AS(number_approximation_step(state, 50, eps),
                         doctest::Contains("k too small"), PreconditionError);
  }

  SUBCASE("rho too small for eps is rejected") {
    CHECK_THROWS_WITH_AS(number_approximation_step(state, 1630, Rational(1, 5)),
                         doctest::Contains("1/rho"), PreconditionError);
  }

  SUBCASE("h_j too small is rejected") {
    ApproximationState s = state;
    s.h1 = 20;
    CHECK_THROWS_WITH_AS(number_approximation_step(s, 500, eps),
                         doctest::Contains("(rho+1)^2"), PreconditionError);
  }
}
