#include "mixlab/plan_builder.hpp"

#include "mixlab/errors.hpp"
#include "mixlab/height_algebra.hpp"

#include <json.hpp>

#include <algorithm>

namespace mixlab {

EpsilonSchedule EpsilonSchedule::geometric(const Rational& first, const Rational& ratio,
                                           const Rational& bound) {
  if (first <= 0 || ratio <= 0 || ratio >= 1) {
    throw ConfigError("geometric schedule needs first > 0 and 0 < ratio < 1");
  }
  EpsilonSchedule s;
  s.kind = Kind::Geometric;
  s.first = first;
  s.ratio = ratio;
  s.sum_bound = bound;
  // Closed-form total: first / (1 - ratio) must stay below the bound.
  if (!(first / (1 - ratio) < bound)) {
    throw ConfigError("schedule sum " + rational_to_string(first / (1 - ratio)) +
                      " not below bound " + rational_to_string(bound));
  }
  return s;
}

EpsilonSchedule EpsilonSchedule::explicit_list(std::vector<Rational> values,
                                               const Rational& bound) {
  EpsilonSchedule s;
  s.kind = Kind::Explicit;
  s.values = std::move(values);
  s.sum_bound = bound;
  for (const auto& v : s.values) {
    if (v <= 0) throw ConfigError("schedule values must be positive");
  }
  s.check_prefix(s.values.size());
  return s;
}

Rational EpsilonSchedule::at(std::size_t i) const {
  if (i < 1) throw PreconditionError("schedule index is 1-based");
  if (kind == Kind::Explicit) {
    if (i > values.size()) {
      throw PreconditionError("schedule has " + std::to_string(values.size()) +
                              " values; index " + std::to_string(i) + " requested");
    }
    return values[i - 1];
  }
  Rational v = first;
  for (std::size_t t = 1; t < i; ++t) v *= ratio;
  return v;
}

Rational EpsilonSchedule::at_index(const BigInt& i) const {
  if (i < 1) throw PreconditionError("schedule index is 1-based");
  if (i > BigInt(1) << 20) return Rational(0);  // far below any measurable tolerance
  return at(i.convert_to<std::size_t>());
}

Rational EpsilonSchedule::prefix_sum(std::size_t n) const {
  Rational s = 0;
  for (std::size_t i = 1; i <= n; ++i) s += at(i);
  return s;
}

void EpsilonSchedule::check_prefix(std::size_t n) const {
  Rational s = prefix_sum(n);
  if (!(s < sum_bound)) {
    throw ConfigError("schedule prefix sum " + rational_to_string(s) + " not below bound " +
                      rational_to_string(sum_bound));
  }
}

std::string EpsilonSchedule::describe() const {
  if (kind == Kind::Explicit) return "explicit(" + std::to_string(values.size()) + " values)";
  return "geometric(first=" + rational_to_string(first) + ", ratio=" + rational_to_string(ratio) +
         ")";
}

GrowthPolicy GrowthPolicy::linear(const BigInt& slope, const BigInt& offset) {
  GrowthPolicy p;
  p.name = "linear(" + slope.str() + "n+" + offset.str() + ")";
  p.cut_at = [slope, offset](std::size_t n, const BigInt&) -> BigInt {
    return slope * BigInt(n) + offset;
  };
  return p;
}

ConstructionPlan build_mixing_staircase(std::size_t depth, const GrowthPolicy& policy,
                                        const BigInt& h1, const Rational& width) {
  ConstructionPlan plan;
  plan.initial_height = h1;
  plan.initial_width = width;
  std::vector<BigInt> cuts;
  std::vector<Rational> ratio;  // r_n^2 / h_n
  BigInt h = h1;
  for (std::size_t n = 1; n <= depth; ++n) {
    BigInt r = policy.cut_at(n, h);
    if (r < 2) {
      throw ConfigError("policy '" + policy.name + "' produced cut " + r.str() + " < 2 at stage " +
                        std::to_string(n));
    }
    if (!cuts.empty() && r < cuts.back()) {
      throw ConfigError("policy '" + policy.name + "' is not nondecreasing at stage " +
                        std::to_string(n));
    }
    cuts.push_back(r);
    ratio.push_back(Rational(r * r) / Rational(h));
    // r_n^2 / h_n must settle into exact strict decrease over the prefix
    // tail; a violation in the second half rejects the policy outright.
    if (n >= 2 && !(ratio[n - 1] < ratio[n - 2]) && n > (depth + 1) / 2) {
      throw ConfigError("policy '" + policy.name + "': r_n^2/h_n fails to decrease at stage " +
                        std::to_string(n) + " of " + std::to_string(depth) +
                        " (condition r_n^2/h_n -> 0 violated on the prefix)");
    }
    if (r > BigInt(1) << 20) {
      throw ResourceError("policy cut " + r.str() + " too large at stage " + std::to_string(n));
    }
    plan.stages.push_back(CutStage::staircase(r.convert_to<std::uint64_t>()));
    h = r * h + r * (r - 1) / 2;
  }
  if (depth == 0) return plan;
  // r_n must eventually grow: constant policies never mix.
  if (depth >= 2 && cuts.back() == cuts[(depth - 1) / 2]) {
    throw ConfigError("policy '" + policy.name + "' does not grow over the prefix (r stays " +
                      cuts.back().str() + " across the second half)");
  }
  std::size_t settle = 0;
  for (std::size_t n = 1; n < ratio.size(); ++n) {
    if (!(ratio[n] < ratio[n - 1])) settle = n;
  }
  if (settle + 1 > (depth + 1) / 2) {
    throw ConfigError("policy '" + policy.name + "': r_n^2/h_n fails to decrease at stage " +
                      std::to_string(settle + 1) + " of " + std::to_string(depth) +
                      " (condition r_n^2/h_n -> 0 violated on the prefix)");
  }
  return plan;
}

namespace {

struct WitnessSearchResult {
  BigInt k;
  BigInt ell;
};

/// Smallest k in [lo, hi] such that { j*k + i : 1 <= j <= r, |i| <= ell }
/// lies inside K (= the complement of M).
std::optional<WitnessSearchResult> search_witness(const IndexSet& K, unsigned r, const BigInt& lo,
                                                  const BigInt& hi, const BigInt& ell,
                                                  std::size_t candidate_cap = 1u << 16) {
  if (hi < lo) return std::nullopt;
  Window enumeration{lo - ell, hi + ell};
  std::size_t scanned = 0;
  for (const auto& [a, b] : K.runs_in_window(enumeration)) {
    BigInt from = a + ell > lo ? a + ell : lo;
    BigInt to = b - ell < hi ? b - ell : hi;
    for (BigInt k = from; k <= to; ++k) {
      if (++scanned > candidate_cap) return std::nullopt;
      bool ok = true;
      for (unsigned j = 2; j <= r && ok; ++j) {
        BigInt base = BigInt(j) * k;
        for (BigInt i = -ell; i <= ell; ++i) {
          if (!K.contains(base + i)) {
            ok = false;
            break;
          }
        }
      }
      if (ok) return WitnessSearchResult{k, ell};
    }
  }
  return std::nullopt;
}

BigInt floor_div(const BigInt& a, const BigInt& b) { return a / b; }

std::uint64_t cuts_u64(const BigInt& r) {
  if (r < 1 || r > BigInt(1) << 20) throw ResourceError("cut count out of range: " + r.str());
  return r.convert_to<std::uint64_t>();
}

BuildResult build_rigid_core(const IndexSet& M, const std::function<unsigned(std::size_t)>& r_of,
                             const EpsilonSchedule& eps, std::size_t segments,
                             const BuilderOptions& opts) {
  BuildResult out;
  BuildReport& report = out.report;
  eps.check_prefix(segments);

  if (segments == 0) {
    out.plan = build_mixing_staircase(std::max<std::size_t>(opts.tail_stages, 4),
                                      GrowthPolicy::linear(1, 1), opts.h1, opts.width);
    report.added_measure = total_added_measure(out.plan);
    report.log.push_back("segments=0: plain mixing staircase");
    return out;
  }

  IndexSet K = IndexSet::complement(M);

  ConstructionPlan plan;
  plan.initial_height = opts.h1;
  plan.initial_width = opts.width;
  BigInt alpha = opts.alpha0;

  for (std::size_t i = 1; i <= segments; ++i) {
    const unsigned r_rigid = r_of(i);
    if (r_rigid < 1) throw ConfigError("rigid multiplicity must be >= 1");
    const Rational eps_i = eps.at(i);
    BigInt rho = floor_div(denominator(eps_i), numerator(eps_i)) + 1;  // 1/rho < eps_i
    if (rho < opts.rho_min) rho = opts.rho_min;
    const std::size_t seg_start_stage = plan.stages.size();

    bool segment_done = false;
    std::string last_failure;
    for (unsigned attempt = 0; attempt <= opts.max_rho_retries && !segment_done; ++attempt) {
      ConstructionPlan trial = plan;
      SegmentReport seg;
      seg.segment = i;
      seg.p = i;
      seg.alpha = alpha;
      seg.rho = rho;
      seg.eps = eps_i;

      // Uniform-Cesaro substage: constant-alpha staircases until the
      // number-approximation precondition (rho+1)^2 / h_j < eps_i holds
      // (none when the current column is already tall enough).
      auto h = heights_of(trial, trial.stages.size());
      while (!(Rational((rho + 1) * (rho + 1)) / Rational(h.back()) < eps_i)) {
        trial.stages.push_back(CutStage::staircase(cuts_u64(alpha)));
        h.push_back(BigInt(alpha) * h.back() + alpha * (alpha - 1) / 2);
        if (h.back() > opts.plan_height_budget) {
          throw ResourceError("plan height " + h.back().str() + " exceeded budget during segment " +
                              std::to_string(i));
        }
      }
      seg.j_stage = trial.stages.size();
      const BigInt h_j = h.back();

      // N_p: uniform-Cesaro horizon of this cycle's column, target eps_{H_p}.
      const BigInt h_anchor = h[seg_start_stage];
      seg.uc = estimate_uniform_cesaro(trial, seg_start_stage, alpha, eps.at_index(h_anchor),
                                       opts.uc_caps);
      if (!seg.uc.reached) report.assumptions.push_back("segment " + std::to_string(i) + ": " + seg.uc.note);

      // L_i: empirical mixing horizon of the prefix, verified on atom pairs
      // of the anchor-column partition. The clean suffix must cover at least
      // the trailing quarter of the window, else a larger rho is needed.
      seg.mixing = estimate_mixing_horizon(trial, rho, opts.anchor_stage, opts.partition_groups,
                                           eps_i, opts.mix_caps);
      if (!seg.mixing.clean ||
          4 * seg.mixing.horizon > 3 * seg.mixing.window_end) {
        last_failure = "segment " + std::to_string(i) + ": mixing horizon " +
                       seg.mixing.horizon.str() + " leaves no usable suffix in window [1, " +
                       seg.mixing.window_end.str() + "]";
        report.log.push_back(last_failure + "; retrying with larger rho");
        rho *= 2;
        continue;
      }

      const BigInt L = seg.mixing.horizon;
      const BigInt ell_req = L + 1 > opts.margin_min ? L + 1 : opts.margin_min;
      const BigInt h_min = floor_div(L * denominator(eps_i), numerator(eps_i)) + 1;  // eps_i*H > L

      // Number-approximation substage: append rho-staircases, scanning each
      // height window [h_n, h_{n+1}) for a usable k in K. Exhausting the
      // witness window sends the segment back for a larger rho.
      std::optional<WitnessSearchResult> found;
      std::size_t v = 0;
      BigInt reach = h_j;  // (rho+1)^v * h_j
      BigInt h_n = h_j;
      while (!found) {
        ++v;
        trial.stages.push_back(CutStage::staircase(cuts_u64(rho)));
        reach *= rho + 1;
        h_n = rho * h_n + rho * (rho - 1) / 2;
        if (h_n > opts.plan_height_budget) {
          throw ResourceError("plan height exceeded budget during k-search of segment " +
                              std::to_string(i));
        }
        BigInt h_next = rho * h_n + rho * (rho - 1) / 2;
        BigInt lo = h_n > h_min ? h_n : h_min;
        BigInt hi = h_next - 1 < reach - 1 ? h_next - 1 : reach - 1;
        if (BigInt(r_rigid) * hi + ell_req > opts.witness_window_max) {
          break;
        }
        if (hi < lo) continue;
        found = search_witness(K, r_rigid, lo, hi, ell_req);
      }
      if (!found) {
        last_failure = "witness exhausted inside window: segment " + std::to_string(i) +
                       " found no k with margin " + ell_req.str() + " below witness_window_max = " +
                       opts.witness_window_max.str() +
                       " (no usable thick witness at this scale)";
        report.log.push_back(last_failure + "; retrying with larger rho");
        rho *= 2;
        continue;
      }
      seg.k = found->k;
      seg.ell = found->ell;

      // Lemma mask over the rho-segment, computed relative to h_j.
      CutVector sub;
      for (std::size_t t = seg.j_stage; t < trial.stages.size(); ++t) {
        sub.entries.emplace_back(trial.stages[t].cuts);
      }
      MaskResult mask = lemma1_mask(sub, h_j, 1, v + 1, seg.k);
      seg.mask_bits.assign(v, false);
      for (std::size_t t = 0; t < v; ++t) {
        if (mask.mask.bit(1 + t)) {
          seg.mask_bits[t] = true;
          std::uint64_t bumped = trial.stages[seg.j_stage + t].cuts + 1;
          trial.stages[seg.j_stage + t] = CutStage::staircase(bumped);
        }
      }
      seg.masked_height = mask.achieved_height;
      seg.pad = mask.residual;
      auto check = heights_of(trial, trial.stages.size());
      if (check.back() != seg.masked_height) {
        throw std::logic_error("masked height mismatch: " + check.back().str() + " vs " +
                               seg.masked_height.str());
      }
      seg.pad_proportion = Rational(seg.pad) / Rational(seg.masked_height);
      if (!(seg.pad_proportion < 2 * eps_i)) {
        throw std::logic_error("pad proportion " + rational_to_string(seg.pad_proportion) +
                               " not below 2 eps_i");
      }

      // Rigid stage: pad to height k, then cut r+1 ways with no spacers.
      seg.rigid_stage = trial.stages.size();
      if (seg.pad > 0) trial.pads[seg.rigid_stage] = seg.pad;
      trial.stages.push_back(CutStage::uniform(r_rigid + 1, 0));
      for (unsigned j = 1; j <= r_rigid; ++j) {
        trial.rigid_times.push_back({seg.rigid_stage, BigInt(j) * seg.k});
      }
      seg.next_height = heights_of(trial, trial.stages.size()).back();
      if (seg.next_height != BigInt(r_rigid + 1) * seg.k) {
        throw std::logic_error("post-rigid height mismatch");
      }

      // Recorded times must sit inside K with the verified margin.
      for (unsigned j = 1; j <= r_rigid; ++j) {
        for (BigInt d = -seg.ell; d <= seg.ell; ++d) {
          if (M.contains(BigInt(j) * seg.k + d)) {
            throw std::logic_error("recorded rigid time " + (BigInt(j) * seg.k).str() +
                                   " lost its margin inside M-complement");
          }
        }
      }

      // Resume growth one below the last pre-rigid cut.
      alpha = BigInt(trial.stages[seg.rigid_stage - 1].cuts) - 1;
      if (alpha < 2) alpha = 2;

      plan = std::move(trial);
      report.segments.push_back(std::move(seg));
      segment_done = true;
    }
    if (!segment_done) {
      if (last_failure.find("witness exhausted") != std::string::npos) {
        throw ConfigError(last_failure + " after " + std::to_string(opts.max_rho_retries + 1) +
                          " attempts");
      }
      throw EstimatorError("estimator horizon not reached within budget: " + last_failure +
                           " after " + std::to_string(opts.max_rho_retries + 1) + " attempts");
    }
  }

  for (std::size_t t = 0; t < opts.tail_stages; ++t) {
    plan.stages.push_back(CutStage::staircase(cuts_u64(alpha)));
  }
  report.added_measure = total_added_measure(plan);
  out.plan = std::move(plan);
  return out;
}

}  // namespace

BuildResult build_half_rigid(const IndexSet& M, const EpsilonSchedule& eps, std::size_t segments,
                             const BuilderOptions& opts) {
  return build_r_rigid(M, 1, eps, segments, opts);
}

BuildResult build_r_rigid(const IndexSet& M, unsigned r, const EpsilonSchedule& eps,
                          std::size_t segments, const BuilderOptions& opts) {
  if (r < 1) throw ConfigError("r must be >= 1");
  return build_rigid_core(M, [r](std::size_t) { return r; }, eps, segments, opts);
}

BuildResult build_rigid_for_density_zero(const IndexSet& M, const EpsilonSchedule& eps,
                                         std::size_t segments, const BuilderOptions& opts) {
  // Empirical density gate on dyadic windows: the top half of the explored
  // range must be sparse throughout.
  const unsigned t_max = 20;
  std::vector<Rational> densities;
  for (unsigned t = 2; t <= t_max; ++t) {
    Window w{BigInt(1) << t, (BigInt(1) << (t + 1)) - 1};
    densities.push_back(M.density_in_window(w));
  }
  for (std::size_t idx = densities.size() / 2; idx < densities.size(); ++idx) {
    if (!(densities[idx] < Rational(1, 16))) {
      throw PreconditionError(
          "density check failed: M has density " + rational_to_string(densities[idx]) +
          " on the dyadic window starting at 2^" + std::to_string(idx + 2) +
          " (density does not vanish on the explored window)");
    }
  }
  auto res = build_rigid_core(M, [](std::size_t i) { return static_cast<unsigned>(i); }, eps,
                              segments, opts);
  res.report.log.push_back("density-zero gate passed on dyadic windows up to 2^" +
                           std::to_string(t_max + 1));
  return res;
}

BigInt FriedmanSchedule::partial_sum(std::size_t n) const {
  BigInt s = 0;
  for (std::size_t i = 0; i < n && i < t.size(); ++i) s += t[i];
  return s;
}

namespace {

struct SquareHorizon {
  std::int64_t horizon = 1;  // in root units
  bool reached = false;
  std::string note;
};

/// Empirical horizon for mixing along s at absolute tolerance eps: smallest
/// i0 such that every pair of partition atoms stays within tolerance for all
/// s-values in [i0^2-ish, window]. Mirrors the analyzer's mixing estimator
/// but scans only the members of s.
SquareHorizon estimate_set_mixing_horizon(const ConstructionPlan& plan, const IndexSet& s,
                                          std::size_t anchor_stage, const Rational& eps_abs,
                                          const FriedmanOptions& opts) {
  SquareHorizon out;
  auto hs = heights_of(plan, plan.stages.size());
  BigInt window_end = BigInt(opts.window_factor) * hs.back();
  ConstructionPlan ext = plan;
  {
    BigInt target = BigInt(opts.resolve_factor) * window_end;
    BigInt h = hs.back();
    while (h < target && 2 * h + 1 <= opts.est_height_budget) {
      ext.stages.push_back(CutStage::staircase(2));
      h = 2 * h + 1;
    }
  }
  TowerRealization real = realize(ext, ext.stages.size(), opts.est_height_budget);
  if (window_end >= real.height()) window_end = real.height() - 1;

  auto atoms = grouped_column_partition(real, anchor_stage, opts.partition_groups);
  std::vector<LevelMask> masks;
  for (const auto& a : atoms) masks.push_back(mask_of(real, a));
  const std::int64_t h = to_i64(real.height(), "estimation height");
  const Rational mu_x = real.total_measure();
  const Rational w_norm = real.level_width() / mu_x;

  std::vector<BigInt> points = s.enumerate(Window{1, window_end});
  BigInt last_violation = 0;
  for (const auto& np : points) {
    std::int64_t n = to_i64(np, "set member");
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      for (std::size_t b = a; b < atoms.size(); ++b) {
        Rational pa = measure_of_atom(real, atoms[a]) / mu_x;
        Rational pb = measure_of_atom(real, atoms[b]) / mu_x;
        std::int64_t cnt = LevelMask::count_pairs(masks[a], masks[b], n);
        Rational value = Rational(cnt) * w_norm;
        Rational target = pa * pb * Rational(BigInt(h - n), BigInt(h));
        if (abs(value - target) > eps_abs) {
          last_violation = np;
          goto next_point;
        }
      }
    }
  next_point:;
  }
  // Report in root units: the horizon is the first index whose s-value
  // clears the last violation.
  std::int64_t idx = 1;
  for (const auto& np : points) {
    if (np <= last_violation) ++idx;
  }
  out.horizon = std::min<std::int64_t>(idx, opts.square_horizon_cap);
  out.reached = idx <= opts.square_horizon_cap;
  if (!out.reached) {
    out.note = "set-mixing horizon exceeds cap " + std::to_string(opts.square_horizon_cap) +
               "; capped value recorded as assumption";
  }
  return out;
}

}  // namespace

BuildResult build_friedman_m_tower(const IndexSet& s, const EpsilonSchedule& eps,
                                   const FriedmanSchedule& ts, std::size_t depth,
                                   const FriedmanOptions& opts) {
  BuildResult out;
  if (depth > ts.t.size()) {
    throw ConfigError("t-schedule has " + std::to_string(ts.t.size()) + " entries for depth " +
                      std::to_string(depth));
  }
  eps.check_prefix(depth);
  for (std::size_t n = 1; n <= depth; ++n) {
    if (ts.t[n - 1] < 1) throw ConfigError("t-schedule entries must be positive");
    // b(n-1) / t_n < eps_n
    Rational lhs = Rational(ts.partial_sum(n - 1)) / Rational(ts.t[n - 1]);
    if (!(lhs < eps.at(n))) {
      throw ConfigError("t-schedule violates b(n-1)/t_n < eps_n at n = " + std::to_string(n) +
                        ": " + rational_to_string(lhs) + " vs eps = " +
                        rational_to_string(eps.at(n)));
    }
  }

  ConstructionPlan plan;
  plan.initial_height = opts.h1;
  plan.initial_width = opts.width;

  for (std::size_t n = 1; n <= depth; ++n) {
    FriedmanCycleReport cyc;
    cyc.cycle = n;
    cyc.eps = eps.at(n);
    cyc.t = ts.t[n - 1];
    cyc.k_extension = BigInt(n);

    // Mix cut: r_n >= max(k_n, N_n / eps_n), with N_n estimated empirically.
    std::size_t anchor = plan.stages.size();
    SquareHorizon sq = estimate_set_mixing_horizon(plan, s, anchor, cyc.eps, opts);
    cyc.square_horizon = sq.horizon;
    cyc.horizon_reached = sq.reached;
    if (!sq.note.empty()) out.report.assumptions.push_back("cycle " + std::to_string(n) + ": " + sq.note);
    Rational r_mix_min = Rational(BigInt(sq.horizon)) / cyc.eps;
    BigInt r_mix = numerator(r_mix_min) / denominator(r_mix_min) + 1;
    if (r_mix < cyc.k_extension) r_mix = cyc.k_extension;
    if (r_mix < 2) r_mix = 2;
    cyc.r_mix = r_mix;
    plan.stages.push_back(CutStage::uniform(cuts_u64(r_mix), 0));

    // Merge to a single column is the identity in this encoding; the merged
    // height is the ergodicity-cut base h_n.
    auto hs = heights_of(plan, plan.stages.size());
    cyc.h_pre = hs.back();

    // Ergodicity cut: r'_n >= t_n / eps_n.
    Rational r_ergo_min = Rational(cyc.t) / cyc.eps;
    BigInt r_ergo = numerator(r_ergo_min) / denominator(r_ergo_min) + 1;
    if (r_ergo < 2) r_ergo = 2;
    cyc.r_ergo = r_ergo;
    std::size_t ergo_stage = plan.stages.size();
    plan.stages.push_back(CutStage::uniform(cuts_u64(r_ergo), 0));

    // Two-column split with heights differing by one.
    CutStage twocol;
    twocol.cuts = 2;
    twocol.spacers = {BigInt(0), BigInt(1)};
    plan.stages.push_back(twocol);
    cyc.next_height = heights_of(plan, plan.stages.size()).back();
    if (cyc.next_height > opts.plan_height_budget) {
      throw ResourceError("plan height " + cyc.next_height.str() + " exceeded budget at cycle " +
                          std::to_string(n));
    }

    // Rigidity witnesses m * h_n from the ergodicity cut.
    BigInt cap = cyc.t < BigInt(opts.recorded_witness_cap) ? cyc.t : BigInt(opts.recorded_witness_cap);
    for (BigInt m = 1; m <= cap; ++m) {
      BigInt witness = m * cyc.h_pre;
      plan.rigid_times.push_back({ergo_stage, witness});
      cyc.witnesses.push_back(witness);
    }
    out.report.cycles.push_back(std::move(cyc));
  }
  out.report.added_measure = total_added_measure(plan);
  out.plan = std::move(plan);
  return out;
}

std::string build_report_to_json(const BuildReport& report, const std::string& config_hash) {
  nlohmann::json j;
  j["format"] = "mixlab-build-report/1";
  j["version"] = kToolVersion;
  j["config"] = config_hash;
  j["added_measure"] = rational_to_string(report.added_measure);
  auto segs = nlohmann::json::array();
  for (const auto& s : report.segments) {
    nlohmann::json js;
    js["segment"] = s.segment;
    js["p"] = s.p;
    js["alpha"] = s.alpha.str();
    js["rho"] = s.rho.str();
    js["j_stage"] = s.j_stage;
    js["rigid_stage"] = s.rigid_stage;
    js["k"] = s.k.str();
    js["ell"] = s.ell.str();
    js["pad"] = s.pad.str();
    js["pad_proportion"] = rational_to_string(s.pad_proportion);
    js["eps"] = rational_to_string(s.eps);
    js["masked_height"] = s.masked_height.str();
    js["next_height"] = s.next_height.str();
    js["uc_horizon"] = s.uc.horizon;
    js["uc_reached"] = s.uc.reached;
    js["uc_achieved"] = s.uc.achieved;
    js["uc_target"] = to_double(s.uc.target);
    js["mixing_horizon"] = s.mixing.horizon.str();
    js["mixing_window_end"] = s.mixing.window_end.str();
    js["mixing_est_height"] = s.mixing.est_height.str();
    std::string bits;
    for (bool b : s.mask_bits) bits += b ? '1' : '0';
    js["mask"] = bits;
    segs.push_back(std::move(js));
  }
  j["segments"] = segs;
  auto cycles = nlohmann::json::array();
  for (const auto& c : report.cycles) {
    nlohmann::json jc;
    jc["cycle"] = c.cycle;
    jc["r_mix"] = c.r_mix.str();
    jc["r_ergo"] = c.r_ergo.str();
    jc["t"] = c.t.str();
    jc["h_pre"] = c.h_pre.str();
    jc["next_height"] = c.next_height.str();
    jc["eps"] = rational_to_string(c.eps);
    jc["k_extension"] = c.k_extension.str();
    jc["square_horizon"] = c.square_horizon;
    jc["horizon_reached"] = c.horizon_reached;
    auto w = nlohmann::json::array();
    for (const auto& x : c.witnesses) w.push_back(x.str());
    jc["witnesses"] = w;
    cycles.push_back(std::move(jc));
  }
  j["cycles"] = cycles;
  j["assumptions"] = report.assumptions;
  j["log"] = report.log;
  return j.dump(2) + "\n";
}

}  // namespace mixlab
