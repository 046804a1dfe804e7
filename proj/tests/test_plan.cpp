#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mixlab/errors.hpp"
#include "mixlab/plan.hpp"

using namespace mixlab;

namespace {

ConstructionPlan staircase_plan(BigInt h1, std::vector<std::uint64_t> cuts) {
  ConstructionPlan p;
  p.initial_height = std::move(h1);
  for (auto r : cuts) p.stages.push_back(CutStage::staircase(r));
  return p;
}

}  // namespace

TEST_CASE("height recursion on staircase stages") {
  auto h = heights_of(staircase_plan(1, {2}), 1);
  CHECK(h == std::vector<BigInt>{1, 3});

  h = heights_of(staircase_plan(2, {2, 2}), 2);
  CHECK(h == std::vector<BigInt>{2, 5, 11});

  h = heights_of(staircase_plan(5, {}), 0);
  CHECK(h == std::vector<BigInt>{5});
}

TEST_CASE("heights include pads and arbitrary spacers") {
  ConstructionPlan p;
  p.initial_height = 3;
  CutStage st;
  st.cuts = 2;
  st.spacers = {BigInt(4), BigInt(1)};
  p.stages.push_back(st);
  p.pads[0] = 2;
  // h1 = 2*(3+2) + 5 = 15
  CHECK(heights_of(p, 1) == std::vector<BigInt>{3, 15});
  CHECK_THROWS_AS(heights_of(p, 2), PreconditionError);
}

TEST_CASE("spacer mass ledger") {
  auto p = staircase_plan(1, {2});
  p.initial_width = 1;
  CHECK(total_added_measure(p) == Rational(1, 2));

  ConstructionPlan no_spacers;
  no_spacers.initial_height = 4;
  no_spacers.stages.push_back(CutStage::uniform(3, 0));
  CHECK(total_added_measure(no_spacers) == 0);

  // pads enter at full column width
  ConstructionPlan padded = no_spacers;
  padded.pads[0] = 5;
  CHECK(total_added_measure(padded) == Rational(5));
  CHECK(added_measure_at_stage(padded, 0) == Rational(5));
}

TEST_CASE("width divides per cut and is exact") {
  auto p = staircase_plan(1, {2, 3});
  CHECK(width_at(p, 0) == Rational(1));
  CHECK(width_at(p, 1) == Rational(1, 2));
  CHECK(width_at(p, 2) == Rational(1, 6));
}

TEST_CASE("plan document round-trip is byte-stable") {
  ConstructionPlan p = staircase_plan(2, {2, 3});
  p.initial_width = Rational(2, 3);
  CutStage custom;
  custom.cuts = 2;
  custom.spacers = {BigInt(0), BigInt(0)};
  p.stages.push_back(custom);
  p.pads[2] = 7;
  p.rigid_times.push_back({2, BigInt(37)});

  std::string doc = plan_to_json(p);
  ConstructionPlan q = plan_from_json(doc);
  CHECK(plan_to_json(q) == doc);
  CHECK(q.initial_height == p.initial_height);
  CHECK(q.initial_width == p.initial_width);
  CHECK(q.stages.size() == p.stages.size());
  CHECK(q.pad_at(2) == 7);
  CHECK(q.rigid_times.size() == 1);
}

TEST_CASE("staircase shorthand is canonical") {
  // explicit spacers matching the staircase pattern serialize as "staircase"
  ConstructionPlan p;
  p.initial_height = 1;
  CutStage st;
  st.cuts = 3;
  st.spacers = {BigInt(0), BigInt(1), BigInt(2)};
  p.stages.push_back(st);
  std::string doc = plan_to_json(p);
  CHECK(doc.find("staircase") != std::string::npos);
  CHECK(plan_to_json(plan_from_json(doc)) == doc);
}

TEST_CASE("malformed documents are rejected") {
  CHECK_THROWS_AS(plan_from_json("not json"), ConfigError);
  CHECK_THROWS_AS(plan_from_json("{\"format\":\"other\"}"), ConfigError);
  ConstructionPlan bad;
  bad.initial_height = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CutStage st;
  st.cuts = 2;
  st.spacers = {BigInt(1)};
  CHECK_THROWS_AS(st.validate(), ConfigError);
}
