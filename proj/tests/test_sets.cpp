#include <doctest.h>

#include "mixlab/errors.hpp"
#include "mixlab/index_set.hpp"

#include <set>

using namespace mixlab;

namespace {

// The doubled power-interval thick set used throughout: union of
// [2^(2n), 2^(2n+1) - 1].
IndexSet vv_set() { return IndexSet::thick_power_set(2, 2); }

bool grid_inside(const IndexSet& S, const ThickWitness& w) {
  for (unsigned j = 1; j <= w.multiplicity; ++j) {
    for (BigInt i = -w.radius; i <= w.radius; ++i) {
      if (!S.contains(BigInt(j) * w.center + i)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("power-interval membership and enumeration") {
  auto K = vv_set();
  CHECK(K.contains(4));
  CHECK(K.contains(7));
  CHECK(!K.contains(8));
  CHECK(K.contains(16));
  CHECK(K.contains(31));
  CHECK(!K.contains(32));
  CHECK(!K.contains(3));
  auto vals = K.enumerate({1, 40});
  std::vector<BigInt> expect;
  for (int v = 4; v <= 7; ++v) expect.emplace_back(v);
  for (int v = 16; v <= 31; ++v) expect.emplace_back(v);
  CHECK(vals == expect);
}

TEST_CASE("thick witness inside a window") {
  auto K = vv_set();
  auto res = is_thick_in_window(K, {1, 100}, 3);
  REQUIRE(res.witness.has_value());
  CHECK(grid_inside(K, *res.witness));
  CHECK(res.witness->center >= 19);

  // all of N: witness everywhere
  auto nat = is_thick_in_window(IndexSet::naturals(), {0, 50}, 5);
  CHECK(nat.witness.has_value());

  // even numbers contain no run of length 3
  std::vector<BigInt> evens;
  for (int v = 0; v <= 100; v += 2) evens.emplace_back(v);
  auto none = is_thick_in_window(IndexSet::explicit_set(evens), {0, 100}, 1);
  CHECK(!none.witness.has_value());
  CHECK(none.note.find("not a proof") != std::string::npos);
}

TEST_CASE("syndetic sets fail the window test once it spans their gaps") {
  // arithmetic progression 5k: gap 5, so no radius-2 witness anywhere
  std::vector<BigInt> ap;
  for (int v = 0; v <= 400; v += 5) ap.emplace_back(v);
  auto S = IndexSet::explicit_set(ap);
  CHECK(!is_thick_in_window(S, {0, 400}, 2).witness.has_value());
  CHECK(!is_thick_in_window(S, {0, 400}, 1).witness.has_value());
}

TEST_CASE("r-thick witness on the generalized power set") {
  // r = 2: union of [3^(3n), 3^(3n+1) - 1]
  auto K2 = IndexSet::thick_power_set(3, 3);
  CHECK(K2.contains(27));
  CHECK(K2.contains(80));
  CHECK(!K2.contains(81));
  auto res = r_thick_witness(K2, 2, {1, 200}, 3);
  REQUIRE(res.witness.has_value());
  CHECK(grid_inside(K2, *res.witness));

  // an (r+1)-witness is accepted as an r-witness
  ThickWitness w = *res.witness;
  w.multiplicity = 1;
  CHECK(grid_inside(K2, w));

  // r = 1 reduces to the plain thick test, witness for witness
  auto plain = is_thick_in_window(K2, {1, 200}, 3);
  auto reduced = r_thick_witness(K2, 1, {1, 200}, 3);
  REQUIRE(plain.witness.has_value());
  REQUIRE(reduced.witness.has_value());
  CHECK(plain.witness->center == reduced.witness->center);

  auto K3 = IndexSet::thick_power_set(4, 4);
  auto res3 = r_thick_witness(K3, 3, {1, 2000}, 2);
  REQUIRE(res3.witness.has_value());
  CHECK(grid_inside(K3, *res3.witness));
}

TEST_CASE("doubling-free scan") {
  auto K = vv_set();
  CHECK(doubling_free_check(K, {1, 1 << 10}, 2).empty());

  auto S = IndexSet::explicit_set({BigInt(1), BigInt(2)});
  auto viol = doubling_free_check(S, {1, 2}, 2);
  REQUIRE(viol.size() == 1);
  CHECK(viol[0] == 1);

  auto K2 = IndexSet::thick_power_set(3, 3);
  CHECK(doubling_free_check(K2, {1, 1 << 12}, 3).empty());
}

TEST_CASE("riesz support enumeration") {
  DissociatedSequence d({5, 125});
  auto sup = riesz_support(d, std::nullopt, 0, {0, 130});
  CHECK(sup == std::vector<BigInt>{0, 5, 120, 125, 130});

  CHECK(riesz_support(d, 0u, 9, {0, 20}) == std::vector<BigInt>{9});
  CHECK(riesz_support(d, std::nullopt, 0, {6, 100}).empty());

  // word-length cap: length-2 words excluded with max_word = 1
  auto short_words = riesz_support(d, 1u, 0, {-130, 130});
  CHECK(short_words == std::vector<BigInt>{-125, -5, 0, 5, 125});

  CHECK_THROWS_AS(DissociatedSequence({5, 9}), PreconditionError);
}

TEST_CASE("riesz support is symmetric about the shift") {
  DissociatedSequence d({3, 8, 30});
  BigInt t = 4;
  auto sup = riesz_support(d, std::nullopt, t, {t - 50, t + 50});
  std::set<BigInt> s(sup.begin(), sup.end());
  for (const auto& x : sup) CHECK(s.count(2 * t - x) == 1);
}

TEST_CASE("riesz-support index set agrees with the enumeration") {
  DissociatedSequence d({5, 125});
  auto S = IndexSet::riesz_support_set(DissociatedSequence({5, 125}), std::nullopt, 0);
  auto listed = riesz_support(d, std::nullopt, 0, {-260, 260});
  for (BigInt v = -260; v <= 260; ++v) {
    bool in_list = std::binary_search(listed.begin(), listed.end(), v);
    CHECK(S.contains(v) == in_list);
  }
}

TEST_CASE("window test of the arithmetic continuity condition") {
  DissociatedSequence d({5, 125, 3125, 78125});

  // against the empty set every support word escapes
  auto empty_m = rajchman_dissociated_property_check(IndexSet::explicit_set({}), d, std::nullopt,
                                                     0, {0, 1000});
  CHECK(!empty_m.empty_in_window());

  // against all naturals nothing escapes on a nonnegative window
  auto all = rajchman_dissociated_property_check(IndexSet::naturals(), d, std::nullopt, 0,
                                                 {0, 1000000});
  CHECK(all.empty_in_window());

  // against the squares: report exactly what escapes, by brute re-check
  auto squares = IndexSet::squares();
  auto res = rajchman_dissociated_property_check(squares, d, std::nullopt, 0, {0, 1000000});
  auto words = riesz_support(d, std::nullopt, 0, {0, 1000000});
  std::vector<BigInt> brute;
  for (const auto& w : words) {
    if (!squares.contains(w)) brute.push_back(w);
  }
  CHECK(res.intersection == brute);
}

TEST_CASE("prime powers") {
  auto primes = IndexSet::prime_powers(1);
  CHECK(primes.contains(2));
  CHECK(primes.contains(97));
  CHECK(!primes.contains(91));
  auto sq = IndexSet::prime_powers(2);
  CHECK(sq.contains(49));
  CHECK(!sq.contains(36));  // 6^2, not a prime square
  CHECK(sq.enumerate({1, 50}) == std::vector<BigInt>{4, 9, 25, 49});
}

TEST_CASE("squares enumeration and density") {
  auto sq = IndexSet::squares();
  CHECK(sq.enumerate({0, 20}) == std::vector<BigInt>{0, 1, 4, 9, 16});
  Rational d = sq.density_in_window({0, 1000000});
  CHECK(d == Rational(1001, 1000001));
}

TEST_CASE("complement, shift, union composition") {
  auto comp = IndexSet::complement(vv_set());
  CHECK(comp.contains(3));
  CHECK(!comp.contains(4));
  // double complement folds back
  auto back = IndexSet::complement(comp);
  CHECK(back.contains(4));

  auto sh = IndexSet::shifted(IndexSet::squares(), 3);
  CHECK(sh.contains(12));  // 9 + 3
  CHECK(sh.enumerate({3, 20}) == std::vector<BigInt>{3, 4, 7, 12, 19});

  auto u = IndexSet::set_union({IndexSet::squares(), vv_set()});
  CHECK(u.contains(9));
  CHECK(u.contains(6));
  CHECK(!u.contains(8));
}

TEST_CASE("index set documents round-trip byte-stable") {
  auto sets = {
      IndexSet::squares(),
      vv_set(),
      IndexSet::complement(vv_set()),
      IndexSet::shifted(IndexSet::prime_powers(2), -5),
      IndexSet::riesz_support_set(DissociatedSequence({5, 125}), 2u, 1),
      IndexSet::set_union({IndexSet::squares(), IndexSet::naturals()}),
      IndexSet::explicit_set({BigInt(3), BigInt(1), BigInt(3)}),
  };
  for (const auto& s : sets) {
    std::string doc = s.to_json();
    auto parsed = IndexSet::from_json(doc);
    CHECK(parsed.to_json() == doc);
    for (BigInt v = -5; v <= 40; ++v) CHECK(parsed.contains(v) == s.contains(v));
  }
}

TEST_CASE("star discrepancy by sorting") {
  // single point: D* = max(x, 1 - x)
  auto one = equidistribution_discrepancy(IndexSet::explicit_set({BigInt(1)}),
                                          Rational(1, 3), Rational(0), 1);
  CHECK(one.star_discrepancy == Rational(2, 3));

  auto golden = golden_conjugate_approx(40);
  auto res = equidistribution_discrepancy(IndexSet::naturals(), golden,
                                          Rational(1, pow_big(10, 40)), 10000);
  CHECK(res.star_discrepancy < Rational(1, 100));
  CHECK(res.perturbation_bound < Rational(1, 1000000));

  auto rt2 = sqrt2_approx(40);
  auto sq = equidistribution_discrepancy(IndexSet::squares(), rt2, Rational(1, pow_big(10, 40)),
                                         10000);
  CHECK(sq.star_discrepancy < Rational(1, 20));

  CHECK_THROWS_AS(equidistribution_discrepancy(IndexSet::naturals(), golden, 0, 0),
                  PreconditionError);
}

TEST_CASE("irrational approximants are accurate") {
  // (sqrt 5 - 1)/2 and sqrt 2 to 30 digits: check against squared relations
  auto g = golden_conjugate_approx(30);
  // g^2 + g - 1 should be within 10^-29 of zero
  Rational residue = g * g + g - 1;
  CHECK(abs(residue) < Rational(1, pow_big(10, 29)));
  auto r2 = sqrt2_approx(30);
  CHECK(abs(r2 * r2 - 2) < Rational(1, pow_big(10, 29)));
}
