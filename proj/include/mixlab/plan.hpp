#pragma once

#include "mixlab/numeric.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace mixlab {

/// One cut-and-stack stage: cut the column into `cuts` subcolumns and put
/// spacers[j] spacer levels on top of subcolumn j before stacking left to
/// right. A staircase stage has spacers[j] == j.
struct CutStage {
  std::uint64_t cuts = 1;
  std::vector<BigInt> spacers;

  static CutStage staircase(std::uint64_t r);
  static CutStage uniform(std::uint64_t r, const BigInt& spacer_count);

  bool is_staircase() const;
  BigInt spacer_sum() const;
  void validate() const;
};

struct RigidTime {
  std::size_t stage = 0;  // the stage whose cut introduces this time
  BigInt time;            // post-pad column height (times j for multi-cut rigidity)
};

/// Full symbolic recipe for a cutting-and-stacking transformation.
///
/// pads[t] spacer levels are placed on top of the whole column *before*
/// stage t cuts it, at the column width of stage t. Heights then follow
///   h[t+1] = cuts_t * (h[t] + pad_t) + sum(spacers_t).
struct ConstructionPlan {
  BigInt initial_height = 1;
  Rational initial_width = 1;
  std::vector<CutStage> stages;
  std::map<std::size_t, BigInt> pads;
  std::vector<RigidTime> rigid_times;

  BigInt pad_at(std::size_t stage) const;
  std::size_t depth() const { return stages.size(); }
  void validate() const;
};

/// Heights h[0..upto] of the plan's columns; h[0] is the initial height.
std::vector<BigInt> heights_of(const ConstructionPlan& plan, std::size_t upto);

/// Level width of column k (spacers inherit the width of the column they
/// are inserted into, then get cut along with it).
Rational width_at(const ConstructionPlan& plan, std::size_t k);

/// Spacer + pad mass added by stage t, in absolute (unrenormalized) measure.
Rational added_measure_at_stage(const ConstructionPlan& plan, std::size_t t);

/// Exact ledger sum of all spacer mass through the whole plan.
Rational total_added_measure(const ConstructionPlan& plan);
Rational total_added_measure(const ConstructionPlan& plan, std::size_t from_stage,
                             std::size_t to_stage);

/// Canonical JSON document (stable key order, staircase shorthand), so that
/// load/save round-trips are byte-identical.
std::string plan_to_json(const ConstructionPlan& plan);
ConstructionPlan plan_from_json(const std::string& text);
void save_plan(const ConstructionPlan& plan, const std::string& path);
ConstructionPlan load_plan(const std::string& path);

}  // namespace mixlab
