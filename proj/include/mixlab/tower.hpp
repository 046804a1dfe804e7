#pragma once

#include "mixlab/numeric.hpp"
#include "mixlab/plan.hpp"

#include <cstddef>
#include <functional>
#include <utility>
#include <variant>
#include <vector>

namespace mixlab {

/// Union of levels of one column, as sorted disjoint half-open runs [a, b).
struct LevelSet {
  std::size_t stage = 0;
  std::vector<std::pair<BigInt, BigInt>> runs;

  static LevelSet from_runs(std::size_t stage, std::vector<std::pair<BigInt, BigInt>> runs);
  static LevelSet from_points(std::size_t stage, const std::vector<BigInt>& points);
  static LevelSet interval(std::size_t stage, const BigInt& lo, const BigInt& hi);  // [lo, hi)

  BigInt count() const;
  bool contains(const BigInt& level) const;
  bool empty() const { return runs.empty(); }
};

/// Where a depth level came from, relative to an ancestor column.
struct AncestorLevel {
  BigInt level;
};
struct PadSpacer {
  std::size_t stage;  // pad inserted before this stage's cut
};
struct StackSpacer {
  std::size_t stage;       // stage whose stacking inserted it
  std::uint64_t subcolumn;  // spacer sits on top of this subcolumn
  BigInt index;             // position within that spacer block
};
using LevelAncestry = std::variant<AncestorLevel, PadSpacer, StackSpacer>;

struct PowerImage {
  LevelSet image;            // at realization depth
  Rational unresolved;       // mass whose image depends on deeper stages
};

struct CorrelationValue {
  Rational value;        // resolved mass of T^n A intersected with B
  Rational error_bound;  // equals the unresolved mass of T^n A
};

/// Exact finite-depth realization of a plan prefix. Immutable once built;
/// all queries are const and safe to run concurrently.
class TowerRealization {
 public:
  TowerRealization(ConstructionPlan plan, std::size_t depth, const BigInt& height_budget);

  const ConstructionPlan& plan() const { return plan_; }
  std::size_t depth() const { return depth_; }

  const BigInt& height() const { return heights_[depth_]; }
  const BigInt& height_at(std::size_t k) const { return heights_.at(k); }
  const Rational& level_width() const { return widths_[depth_]; }
  const Rational& width_at(std::size_t k) const { return widths_.at(k); }

  /// height * level_width, exactly.
  Rational total_measure() const;
  /// Spacer mass the plan schedules beyond this depth.
  Rational remainder_measure() const;

  Rational measure_of(const LevelSet& set) const;

  /// Subcolumn start offsets of stage t's copies inside column t+1.
  const std::vector<BigInt>& stage_offsets(std::size_t t) const { return offsets_.at(t); }

  /// Expands a level set into the equivalent set of depth levels.
  LevelSet refine(const LevelSet& set, std::size_t max_runs = kDefaultRunBudget) const;

  /// Visits the start offset of every copy of column `stage` inside the
  /// depth column, in increasing order.
  void for_each_copy(std::size_t stage, const std::function<void(const BigInt&)>& fn) const;

  LevelAncestry label(const BigInt& level, std::size_t ancestor_stage) const;

  PowerImage apply_power(const BigInt& n, const LevelSet& set) const;

  /// mu(T^n A cap B) on resolved mass, with the unresolved mass as a
  /// certified error bound: the true value lies in [value, value + error].
  CorrelationValue correlation(const BigInt& n, const LevelSet& A, const LevelSet& B) const;

  static constexpr std::size_t kDefaultRunBudget = 1u << 23;

 private:
  ConstructionPlan plan_;
  std::size_t depth_;
  std::vector<BigInt> heights_;             // [0..depth]
  std::vector<Rational> widths_;            // [0..depth]
  std::vector<std::vector<BigInt>> offsets_;  // per stage t < depth
};

/// Budget-checked realization; throws ResourceError naming the offending
/// height when the configured cap would be exceeded.
TowerRealization realize(const ConstructionPlan& plan, std::size_t depth,
                         const BigInt& height_budget = BigInt(1000000000));

}  // namespace mixlab
