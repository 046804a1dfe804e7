#pragma once

#include "mixlab/index_set.hpp"
#include "mixlab/numeric.hpp"
#include "mixlab/tower.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mixlab {

/// Dense bit indicator over the depth levels of a realization. Sweeps count
/// shifted intersections word-wise; every count is exact.
class LevelMask {
 public:
  explicit LevelMask(std::int64_t bits);

  std::int64_t size() const { return bits_; }
  void set_range(std::int64_t a, std::int64_t b);  // [a, b)
  void flip_all();
  bool test(std::int64_t i) const;
  std::int64_t popcount() const;

  /// Number of set bits in [a, b); requires finalize_ranks() first.
  std::int64_t count_in(std::int64_t a, std::int64_t b) const;
  void finalize_ranks();

  /// #{ i : A[i] and B[i + n] }, both indices in range. n may be negative.
  static std::int64_t count_pairs(const LevelMask& A, const LevelMask& B, std::int64_t n);

  /// #{ i : mask[i + n_j] for all j }, all indices in range, over i in [0, size).
  static std::int64_t count_joint(const LevelMask& mask, const std::vector<std::int64_t>& shifts);

 private:
  std::int64_t bits_;
  std::vector<std::uint64_t> words_;
  std::vector<std::int64_t> ranks_;  // cumulative popcount per word
};

/// A partition atom: either a union of levels of one column, or the
/// complement of that column inside the whole space.
struct AtomSpec {
  enum class Kind { Levels, ColumnComplement };
  Kind kind = Kind::Levels;
  std::string name;
  LevelSet levels;          // Levels: the set; ColumnComplement: ignored
  std::size_t stage = 0;    // ColumnComplement: which column

  static AtomSpec of_levels(std::string name, LevelSet levels);
  static AtomSpec column_complement(std::string name, std::size_t stage);
};

/// The H_p levels of column `stage` plus its complement.
std::vector<AtomSpec> column_partition(const TowerRealization& real, std::size_t stage);
/// Coarser variant: `groups` consecutive level blocks plus the complement.
std::vector<AtomSpec> grouped_column_partition(const TowerRealization& real, std::size_t stage,
                                               std::size_t groups);

LevelMask mask_of(const TowerRealization& real, const AtomSpec& atom);
Rational measure_of_atom(const TowerRealization& real, const AtomSpec& atom);

struct CorrelationEntry {
  BigInt n;
  Rational value;      // normalized by total realized measure
  Rational error;      // unresolved-mass bound, normalized
  Rational deviation;  // |value - product * resolved_window_fraction|
};

struct CorrelationReport {
  std::string atom_a, atom_b;
  Rational mu_a, mu_b;    // normalized measures
  Rational product;       // mu_a * mu_b
  Rational mu_x;          // raw total measure of the realization
  BigInt height;
  std::vector<BigInt> stage_heights;
  std::vector<CorrelationEntry> entries;  // sorted by n
  std::string set_description;
  std::string truncation_note;
  std::string assumptions;
};

struct SweepOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Exact interval-valued correlations for every n in M ∩ window.
/// Windows beyond the realization height are truncated with a notice.
CorrelationReport sweep(const TowerRealization& real, const AtomSpec& A, const AtomSpec& B,
                        const IndexSet& M, const Window& window, const SweepOptions& opts = {});

struct BandStat {
  std::size_t band;  // index j: n in [h_j, h_{j+1})
  BigInt lo, hi;
  Rational sup_deviation;
  std::size_t samples = 0;
};

/// Sup deviation per stage band; the banding measures decay across stages.
std::vector<BandStat> band_statistics(const CorrelationReport& report);

struct RigidityEntry {
  BigInt time;
  Rational value;        // certified lower bound on mu(T^n A cap A), normalized
  Rational error;
  Rational ratio_lower;  // value / mu(A)
};

struct RigidityReport {
  Rational mu_a;
  std::vector<RigidityEntry> entries;
  std::vector<BigInt> flagged;  // times achieving >= (alpha - delta) * mu(A)
  Rational alpha, delta;
};

RigidityReport rigidity_scan(const TowerRealization& real, const AtomSpec& A,
                             const std::vector<BigInt>& times, const Rational& alpha,
                             const Rational& delta);

struct ObstructionResult {
  BigInt time;
  bool premise_met = false;      // measured ratio at t exceeds beta
  bool conclusion_holds = false;  // certified mu(T^{(r+1)t} A cap A) > mu(A)^2
  Rational ratio_at_t;
  Rational value_at_multiple;  // lower bound at (r+1) t
  Rational mu_a;
};

/// Replays the alpha-rigidity obstruction chain numerically: a measured
/// return ratio above beta at time t forces a correlation above mu(A)^2 at
/// (r+1) t, witnessing non-mixing there. Requires mu(A) < (r+1) beta - r.
std::vector<ObstructionResult> alpha_obstruction_check(const TowerRealization& real,
                                                       const AtomSpec& A, unsigned r,
                                                       const Rational& beta,
                                                       const std::vector<BigInt>& times);

struct KBoundResult {
  bool satisfied = false;
  Rational sup_ratio;        // max over tail of (value + error) / product
  BigInt tail_start;
  std::size_t tail_count = 0;
  Rational tail_fraction;
};

/// Window-relative check of limsup mu(T^{s_n} A cap B) <= K mu(A) mu(B),
/// evaluated on the trailing fraction of the report window (default 1/2).
KBoundResult k_bound_check(const CorrelationReport& report, const Rational& K,
                           const Rational& tail_fraction = Rational(1, 2));

/// Ordered copy-pair gap counts of an anchor column inside the depth
/// column: at(g) = #{ copy offsets (o, o') : o' - o = g }, |g| <= max_gap.
/// Anchor-level pair correlations at shift n reduce to single lookups:
/// pairs between level a and level b come from copies with gap n - (b - a).
class GapCounts {
 public:
  GapCounts(const TowerRealization& real, std::size_t anchor_stage, std::int64_t max_gap);
  std::int64_t at(std::int64_t gap) const;
  std::int64_t max_gap() const { return max_gap_; }

 private:
  std::int64_t max_gap_;
  std::vector<std::uint64_t> counts_;
};

struct RigidSegmentInfo {
  std::size_t segment = 0;
  BigInt rigid_height;   // H_{n_i}, the recorded rigid time
  BigInt next_height;    // column height right after the rigid stage
  BigInt mixing_horizon; // L_i
  Rational eps;          // eps_i
};

struct M1M2Classification {
  BigInt n;
  int m_class = 0;          // 1 or 2
  std::size_t segment = 0;  // for class 1
  bool excluded_gap = false;  // inside (H - L, H + L) around a rigid time
};

struct M1M2Audit {
  std::vector<M1M2Classification> classified;
  Rational m1_max_deviation, m2_max_deviation;
  std::size_t m1_count = 0, m2_count = 0, excluded_count = 0;
};

/// Mirrors the proof's case split: class M1 bands
/// [eps_i H_i, H_i - L_i] ∪ [H_i + L_i, H_{i+1}] around each rigid time,
/// class M2 elsewhere; times inside the excluded gap are flagged.
M1M2Audit m1_m2_partition_audit(const std::vector<RigidSegmentInfo>& segments,
                                const CorrelationReport& report);

/// Measure of the joint intersection of T^{t} A over the given (nonnegative)
/// shift multiples, as a certified interval.
struct JointIntersection {
  Rational value;  // normalized lower bound
  Rational error;
};
JointIntersection measure_joint_intersection(const TowerRealization& real, const AtomSpec& A,
                                             const std::vector<BigInt>& times);

// ---------------------------------------------------------------------------
// Empirical estimators. Their caps travel with every downstream verdict.

struct UcCaps {
  unsigned q_cap = 64;
  std::int64_t horizon_cap = 512;
  BigInt est_height_budget = BigInt(1) << 23;
  double grid_factor = 1.5;  // evaluation grid n_{t+1} = ceil(grid_factor * n_t)
  bool strict = false;
};

struct UcEstimate {
  std::int64_t horizon = 0;  // smallest grid point meeting the target
  bool reached = false;
  double achieved = 0.0;     // worst relative Cesaro integral at `horizon`
  Rational target;
  double coverage = 0.0;     // fraction of the space in the resolved window
  std::string note;
};

/// Uniform-Cesaro horizon for the partition of column `anchor_stage`, with
/// the sup over steps q truncated at q_cap and the horizon scanned on a
/// geometric grid. Strict mode throws EstimatorError when the target is not
/// reached; otherwise the cap hit is recorded in the estimate.
UcEstimate estimate_uniform_cesaro(const ConstructionPlan& plan, std::size_t anchor_stage,
                                   const BigInt& continuation_cut, const Rational& eps_target,
                                   const UcCaps& caps);

struct MixCaps {
  unsigned window_factor = 4;    // verification window = factor * current height
  unsigned resolve_factor = 8;   // estimation height >= resolve_factor * window
  BigInt est_height_budget = BigInt(1) << 30;
  bool strict = false;
  unsigned threads = 0;
};

struct MixEstimate {
  BigInt horizon = 1;     // L: smallest n with no violation at or past it
  bool clean = false;     // some clean suffix exists inside the window
  BigInt window_end;
  BigInt est_height;
  std::string note;
};

/// Empirical mixing horizon of the plan prefix: smallest L such that every
/// atom pair of the column partition at `anchor_stage` satisfies
/// |corr(n) - product| <= eps * product for all n in [L, window_end].
MixEstimate estimate_mixing_horizon(const ConstructionPlan& plan, const BigInt& continuation_cut,
                                    std::size_t anchor_stage, std::size_t partition_groups,
                                    const Rational& eps, const MixCaps& caps);

}  // namespace mixlab
