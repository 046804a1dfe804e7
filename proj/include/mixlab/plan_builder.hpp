#pragma once

#include "mixlab/analyzer.hpp"
#include "mixlab/index_set.hpp"
#include "mixlab/numeric.hpp"
#include "mixlab/plan.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mixlab {

/// Summable positive schedule eps_1, eps_2, ...; prefix sums are checked
/// against the configured bound whenever a prefix is consumed.
struct EpsilonSchedule {
  enum class Kind { Geometric, Explicit };
  Kind kind = Kind::Geometric;
  Rational first = Rational(1, 4);
  Rational ratio = Rational(1, 2);
  std::vector<Rational> values;
  Rational sum_bound = 1;

  static EpsilonSchedule geometric(const Rational& first, const Rational& ratio,
                                   const Rational& bound);
  static EpsilonSchedule explicit_list(std::vector<Rational> values, const Rational& bound);

  Rational at(std::size_t i) const;        // 1-based
  Rational at_index(const BigInt& i) const;  // eps_{H_p}; indices may be huge
  Rational prefix_sum(std::size_t n) const;
  void check_prefix(std::size_t n) const;
  std::string describe() const;
};

struct GrowthPolicy {
  std::string name;
  std::function<BigInt(std::size_t, const BigInt&)> cut_at;  // (1-based stage, current height)

  static GrowthPolicy linear(const BigInt& slope, const BigInt& offset);  // r_n = slope*n + offset
};

struct BuilderOptions {
  BigInt h1 = 2;
  Rational width = 1;
  BigInt alpha0 = 2;            // cut of the first uniform-Cesaro substage
  BigInt rho_min = 5;           // floor for each number-approximation cut
  BigInt margin_min = 16;       // minimum verified witness radius
  std::size_t tail_stages = 2;  // growth stages appended after the last segment
  BigInt witness_window_max = BigInt(1) << 26;
  UcCaps uc_caps;
  MixCaps mix_caps;
  std::size_t anchor_stage = 0;      // partition column for mixing estimates
  std::size_t partition_groups = 0;  // 0 = one atom per level of the anchor column
  unsigned max_rho_retries = 3;
  BigInt plan_height_budget = BigInt(1) << 40;  // symbolic heights while building
};

struct SegmentReport {
  std::size_t segment = 0;  // i, 1-based
  std::size_t p = 0;        // UC/NA cycle index p_i (strictly increasing)
  BigInt alpha;             // uniform-Cesaro cut
  BigInt rho;               // number-approximation cut
  std::size_t j_stage = 0;      // plan stage index where the rho segment starts
  std::size_t rigid_stage = 0;  // plan stage index of the rigid cut
  BigInt k;                 // chosen K element = post-pad rigid height
  BigInt ell;               // verified margin around every recorded time
  BigInt pad;
  Rational pad_proportion;
  Rational eps;
  UcEstimate uc;        // N_p
  MixEstimate mixing;   // L_i
  std::vector<bool> mask_bits;  // over stages [j_stage, rigid_stage)
  BigInt masked_height;         // H_{n_i}(r + b)
  BigInt next_height;           // column height right after the rigid stage
};

struct FriedmanCycleReport {
  std::size_t cycle = 0;
  BigInt r_mix;      // first cut, >= max(k_n, N_n / eps_n)
  BigInt r_ergo;     // second cut, >= t_n / eps_n
  BigInt t;          // t_n
  BigInt h_pre;      // height of the merged column before the second cut
  BigInt next_height;
  Rational eps;
  BigInt k_extension;          // k_n
  std::int64_t square_horizon = 0;  // N_n estimate, in root units
  bool horizon_reached = false;
  std::vector<BigInt> witnesses;  // recorded rigidity times m * h_pre
};

struct BuildReport {
  std::vector<SegmentReport> segments;
  std::vector<FriedmanCycleReport> cycles;
  Rational added_measure;
  std::vector<std::string> assumptions;
  std::vector<std::string> log;
};

std::string build_report_to_json(const BuildReport& report, const std::string& config_hash);

struct BuildResult {
  ConstructionPlan plan;
  BuildReport report;
};

/// Staircase plan from a growth policy, with the mixing conditions
/// (cuts nondecreasing and eventually growing, r_n^2 / h_n eventually
/// strictly decreasing) verified exactly on the prefix. A violating policy
/// is rejected naming the first offending stage.
ConstructionPlan build_mixing_staircase(std::size_t depth, const GrowthPolicy& policy,
                                        const BigInt& h1, const Rational& width);

/// Flow-diagram construction: per segment, a uniform-Cesaro substage, a
/// number-approximation substage approximating an element k of the thick
/// witness set inside M-complement, then a rigid cut (half for r = 1).
/// Records N_p and L_i estimates, masks, pads, and the measure ledger.
BuildResult build_half_rigid(const IndexSet& M, const EpsilonSchedule& eps, std::size_t segments,
                             const BuilderOptions& opts);

/// Same with r+1 cuts at each rigid stage; records rigid times j*k, j <= r.
BuildResult build_r_rigid(const IndexSet& M, unsigned r, const EpsilonSchedule& eps,
                          std::size_t segments, const BuilderOptions& opts);

/// Increasing rigidity r_i = i per segment; requires M to have empirically
/// vanishing density on dyadic windows.
BuildResult build_rigid_for_density_zero(const IndexSet& M, const EpsilonSchedule& eps,
                                         std::size_t segments, const BuilderOptions& opts);

struct FriedmanSchedule {
  std::vector<BigInt> t;  // t_1, t_2, ...; must satisfy b(n-1) / t_n < eps_n

  BigInt partial_sum(std::size_t n) const;  // b(n)
};

struct FriedmanOptions {
  BigInt h1 = 1;
  Rational width = 1;
  std::int64_t square_horizon_cap = 64;  // cap for the N_n estimate, in root units
  unsigned window_factor = 4;
  unsigned resolve_factor = 8;
  BigInt est_height_budget = BigInt(1) << 26;
  std::size_t partition_groups = 4;
  std::size_t recorded_witness_cap = 8;
  BigInt plan_height_budget = BigInt(1) << 40;
};

/// The two-cut tower cycle: mix cut, merge, ergodicity cut, then the
/// two-column split encoded as cuts=2, spacers=[0,1]. Records the rigidity
/// witnesses m * h_n per cycle.
BuildResult build_friedman_m_tower(const IndexSet& s, const EpsilonSchedule& eps,
                                   const FriedmanSchedule& ts, std::size_t depth,
                                   const FriedmanOptions& opts);

}  // namespace mixlab
