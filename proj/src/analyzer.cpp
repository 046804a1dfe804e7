#include "mixlab/analyzer.hpp"

#include "mixlab/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

namespace mixlab {

LevelMask::LevelMask(std::int64_t bits) : bits_(bits) {
  if (bits < 0) throw PreconditionError("mask size must be nonnegative");
  words_.assign(static_cast<std::size_t>((bits + 63) / 64), 0);
}

void LevelMask::set_range(std::int64_t a, std::int64_t b) {
  if (a < 0 || b > bits_ || a > b) throw PreconditionError("set_range out of bounds");
  if (a == b) return;
  std::int64_t wa = a >> 6, wb = (b - 1) >> 6;
  std::uint64_t first = ~0ull << (a & 63);
  std::uint64_t last = ~0ull >> (63 - ((b - 1) & 63));
  if (wa == wb) {
    words_[static_cast<std::size_t>(wa)] |= first & last;
    return;
  }
  words_[static_cast<std::size_t>(wa)] |= first;
  for (std::int64_t w = wa + 1; w < wb; ++w) words_[static_cast<std::size_t>(w)] = ~0ull;
  words_[static_cast<std::size_t>(wb)] |= last;
}

void LevelMask::flip_all() {
  for (auto& w : words_) w = ~w;
  // clear bits beyond the end
  std::int64_t rem = bits_ & 63;
  if (rem && !words_.empty()) words_.back() &= ~0ull >> (64 - rem);
}

bool LevelMask::test(std::int64_t i) const {
  if (i < 0 || i >= bits_) return false;
  return (words_[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1;
}

std::int64_t LevelMask::popcount() const {
  std::int64_t c = 0;
  for (auto w : words_) c += std::popcount(w);
  return c;
}

void LevelMask::finalize_ranks() {
  ranks_.resize(words_.size() + 1);
  ranks_[0] = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    ranks_[i + 1] = ranks_[i] + std::popcount(words_[i]);
  }
}

std::int64_t LevelMask::count_in(std::int64_t a, std::int64_t b) const {
  if (ranks_.empty()) throw std::logic_error("finalize_ranks() not called");
  a = std::max<std::int64_t>(a, 0);
  b = std::min(b, bits_);
  if (a >= b) return 0;
  auto rank = [&](std::int64_t i) {  // set bits in [0, i)
    std::int64_t w = i >> 6;
    std::int64_t c = ranks_[static_cast<std::size_t>(w)];
    std::int64_t rem = i & 63;
    if (rem) c += std::popcount(words_[static_cast<std::size_t>(w)] & ((1ull << rem) - 1));
    return c;
  };
  return rank(b) - rank(a);
}

namespace {

// 64 bits of `words` starting at nonnegative bit position `pos`, zero-padded.
inline std::uint64_t gather64(const std::vector<std::uint64_t>& words, std::int64_t nwords,
                              std::int64_t pos) {
  std::int64_t s = pos >> 6;
  unsigned r = static_cast<unsigned>(pos & 63);
  std::uint64_t lo = s < nwords ? words[static_cast<std::size_t>(s)] : 0;
  if (r == 0) return lo;
  std::uint64_t hi = (s + 1) < nwords ? words[static_cast<std::size_t>(s + 1)] : 0;
  return (lo >> r) | (hi << (64 - r));
}

}  // namespace

std::int64_t LevelMask::count_pairs(const LevelMask& A, const LevelMask& B, std::int64_t n) {
  if (n < 0) return count_pairs(B, A, -n);
  // i in [0, A.size), i + n in [0, B.size)
  std::int64_t lo = 0;
  std::int64_t hi = std::min(A.bits_, B.bits_ - n);
  if (hi <= lo) return 0;
  const std::int64_t nwordsB = static_cast<std::int64_t>(B.words_.size());
  std::int64_t count = 0;
  std::int64_t wlo = lo >> 6, whi = (hi - 1) >> 6;
  for (std::int64_t w = wlo; w <= whi; ++w) {
    std::uint64_t a = A.words_[static_cast<std::size_t>(w)];
    if (w == whi) {
      std::int64_t rem = hi - (w << 6);
      if (rem < 64) a &= (1ull << rem) - 1;
    }
    if (!a) continue;
    std::uint64_t b = gather64(B.words_, nwordsB, (w << 6) + n);
    count += std::popcount(a & b);
  }
  return count;
}

std::int64_t LevelMask::count_joint(const LevelMask& mask, const std::vector<std::int64_t>& shifts) {
  if (shifts.empty()) return mask.popcount();
  std::int64_t smax = *std::max_element(shifts.begin(), shifts.end());
  std::int64_t smin = *std::min_element(shifts.begin(), shifts.end());
  if (smin < 0) throw PreconditionError("count_joint: shifts must be nonnegative");
  std::int64_t hi = mask.bits_ - smax;
  if (hi <= 0) return 0;
  const std::int64_t nwords = static_cast<std::int64_t>(mask.words_.size());
  std::int64_t count = 0;
  std::int64_t whi = (hi - 1) >> 6;
  for (std::int64_t w = 0; w <= whi; ++w) {
    std::uint64_t acc = ~0ull;
    if (w == whi) {
      std::int64_t rem = hi - (w << 6);
      if (rem < 64) acc = (1ull << rem) - 1;
    }
    for (auto s : shifts) {
      acc &= gather64(mask.words_, nwords, (w << 6) + s);
      if (!acc) break;
    }
    count += std::popcount(acc);
  }
  return count;
}

AtomSpec AtomSpec::of_levels(std::string name, LevelSet levels) {
  AtomSpec a;
  a.kind = Kind::Levels;
  a.name = std::move(name);
  a.stage = levels.stage;
  a.levels = std::move(levels);
  return a;
}

AtomSpec AtomSpec::column_complement(std::string name, std::size_t stage) {
  AtomSpec a;
  a.kind = Kind::ColumnComplement;
  a.name = std::move(name);
  a.stage = stage;
  return a;
}

std::vector<AtomSpec> column_partition(const TowerRealization& real, std::size_t stage) {
  std::vector<AtomSpec> atoms;
  std::int64_t h = to_i64(real.height_at(stage), "anchor column height");
  for (std::int64_t lvl = 0; lvl < h; ++lvl) {
    atoms.push_back(AtomSpec::of_levels("level" + std::to_string(lvl),
                                        LevelSet::interval(stage, BigInt(lvl), BigInt(lvl + 1))));
  }
  atoms.push_back(AtomSpec::column_complement("rest", stage));
  return atoms;
}

std::vector<AtomSpec> grouped_column_partition(const TowerRealization& real, std::size_t stage,
                                               std::size_t groups) {
  std::int64_t h = to_i64(real.height_at(stage), "anchor column height");
  if (groups == 0 || groups >= static_cast<std::size_t>(h)) return column_partition(real, stage);
  std::vector<AtomSpec> atoms;
  std::int64_t block = (h + static_cast<std::int64_t>(groups) - 1) / static_cast<std::int64_t>(groups);
  for (std::int64_t lo = 0; lo < h; lo += block) {
    std::int64_t hi = std::min(lo + block, h);
    atoms.push_back(AtomSpec::of_levels("levels" + std::to_string(lo) + "-" + std::to_string(hi - 1),
                                        LevelSet::interval(stage, BigInt(lo), BigInt(hi))));
  }
  atoms.push_back(AtomSpec::column_complement("rest", stage));
  return atoms;
}

LevelMask mask_of(const TowerRealization& real, const AtomSpec& atom) {
  std::int64_t h = to_i64(real.height(), "realized height");
  LevelMask mask(h);
  const LevelSet* set = &atom.levels;
  LevelSet column;
  if (atom.kind == AtomSpec::Kind::ColumnComplement) {
    column = LevelSet::interval(atom.stage, 0, real.height_at(atom.stage));
    set = &column;
  }
  std::vector<std::pair<std::int64_t, std::int64_t>> runs;
  runs.reserve(set->runs.size());
  for (const auto& r : set->runs) {
    runs.emplace_back(to_i64(r.first, "run start"), to_i64(r.second, "run end"));
  }
  real.for_each_copy(set->stage, [&](const BigInt& off_big) {
    std::int64_t off = off_big.convert_to<std::int64_t>();
    for (const auto& r : runs) mask.set_range(off + r.first, off + r.second);
  });
  if (atom.kind == AtomSpec::Kind::ColumnComplement) mask.flip_all();
  return mask;
}

Rational measure_of_atom(const TowerRealization& real, const AtomSpec& atom) {
  if (atom.kind == AtomSpec::Kind::Levels) return real.measure_of(atom.levels);
  return real.total_measure() -
         Rational(real.height_at(atom.stage)) * real.width_at(atom.stage);
}

namespace {

unsigned thread_count(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  threads = std::min<std::size_t>(thread_count(threads), count == 0 ? 1 : count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    std::size_t lo = t * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

CorrelationReport sweep(const TowerRealization& real, const AtomSpec& A, const AtomSpec& B,
                        const IndexSet& M, const Window& window, const SweepOptions& opts) {
  CorrelationReport report;
  report.atom_a = A.name;
  report.atom_b = B.name;
  report.mu_x = real.total_measure();
  report.mu_a = measure_of_atom(real, A) / report.mu_x;
  report.mu_b = measure_of_atom(real, B) / report.mu_x;
  report.product = report.mu_a * report.mu_b;
  report.height = real.height();
  report.set_description = M.describe();
  for (std::size_t k = 0; k <= real.depth(); ++k) report.stage_heights.push_back(real.height_at(k));

  Window effective = window;
  if (effective.hi >= real.height()) {
    effective.hi = real.height() - 1;
    report.truncation_note = "window truncated to height - 1 = " + effective.hi.str();
  }
  if (effective.empty()) return report;
  std::vector<BigInt> points = M.enumerate(effective);
  if (points.empty()) return report;

  LevelMask maskA = mask_of(real, A);
  LevelMask maskB = mask_of(real, B);
  maskA.finalize_ranks();
  const std::int64_t h = maskA.size();
  const Rational w_norm = real.level_width() / report.mu_x;

  report.entries.resize(points.size());
  parallel_for(points.size(), opts.threads, [&](std::size_t idx) {
    std::int64_t n = to_i64(points[idx], "sweep shift");
    std::int64_t cnt = LevelMask::count_pairs(maskA, maskB, n);
    std::int64_t out = n >= 0 ? maskA.count_in(h - n, h) : maskA.count_in(0, -n);
    CorrelationEntry e;
    e.n = points[idx];
    e.value = Rational(cnt) * w_norm;
    e.error = Rational(out) * w_norm;
    std::int64_t resolved = h - std::min<std::int64_t>(std::abs(n), h);
    Rational target = report.product * Rational(BigInt(resolved), BigInt(h));
    e.deviation = abs(e.value - target);
    report.entries[idx] = std::move(e);
  });
  return report;
}

std::vector<BandStat> band_statistics(const CorrelationReport& report) {
  std::vector<BandStat> bands;
  const auto& hs = report.stage_heights;
  if (hs.empty()) return bands;
  for (const auto& e : report.entries) {
    // band j holds n in [h_j, h_{j+1}); entries below h_0 join band 0
    std::size_t j = 0;
    while (j + 1 < hs.size() && e.n >= hs[j + 1]) ++j;
    if (bands.empty() || bands.back().band != j) {
      BandStat b;
      b.band = j;
      b.lo = hs[j];
      b.hi = j + 1 < hs.size() ? hs[j + 1] - 1 : report.height;
      b.sup_deviation = e.deviation;
      b.samples = 1;
      bands.push_back(std::move(b));
    } else {
      if (e.deviation > bands.back().sup_deviation) bands.back().sup_deviation = e.deviation;
      ++bands.back().samples;
    }
  }
  return bands;
}

RigidityReport rigidity_scan(const TowerRealization& real, const AtomSpec& A,
                             const std::vector<BigInt>& times, const Rational& alpha,
                             const Rational& delta) {
  RigidityReport report;
  Rational mu_x = real.total_measure();
  report.mu_a = measure_of_atom(real, A) / mu_x;
  report.alpha = alpha;
  report.delta = delta;
  LevelMask mask = mask_of(real, A);
  mask.finalize_ranks();
  const std::int64_t h = mask.size();
  const Rational w_norm = real.level_width() / mu_x;
  for (const auto& t : times) {
    if (abs(t) >= real.height()) {
      throw PreconditionError("rigidity_scan: time " + t.str() + " at or beyond height " +
                              real.height().str());
    }
    std::int64_t n = to_i64(t, "rigidity time");
    std::int64_t cnt = LevelMask::count_pairs(mask, mask, n);
    std::int64_t out = n >= 0 ? mask.count_in(h - n, h) : mask.count_in(0, -n);
    RigidityEntry e;
    e.time = t;
    e.value = Rational(cnt) * w_norm;
    e.error = Rational(out) * w_norm;
    e.ratio_lower = report.mu_a == 0 ? Rational(0) : e.value / report.mu_a;
    if (e.ratio_lower >= alpha - delta) report.flagged.push_back(t);
    report.entries.push_back(std::move(e));
  }
  return report;
}

std::vector<ObstructionResult> alpha_obstruction_check(const TowerRealization& real,
                                                       const AtomSpec& A, unsigned r,
                                                       const Rational& beta,
                                                       const std::vector<BigInt>& times) {
  if (r < 1) throw PreconditionError("alpha_obstruction_check: r must be >= 1");
  Rational mu_x = real.total_measure();
  Rational mu_a = measure_of_atom(real, A) / mu_x;
  Rational feasibility = Rational(r + 1) * beta - Rational(r);
  if (!(mu_a < feasibility)) {
    throw PreconditionError("mu(A) = " + rational_to_string(mu_a) + " must be below (r+1)beta - r = " +
                            rational_to_string(feasibility));
  }
  LevelMask mask = mask_of(real, A);
  mask.finalize_ranks();
  const Rational w_norm = real.level_width() / mu_x;
  std::vector<ObstructionResult> results;
  for (const auto& t : times) {
    BigInt big = BigInt(r + 1) * t;
    if (big >= real.height()) {
      throw PreconditionError("obstruction check needs (r+1)t = " + big.str() +
                              " below height " + real.height().str() + "; realize deeper");
    }
    ObstructionResult res;
    res.time = t;
    res.mu_a = mu_a;
    std::int64_t cnt_t = LevelMask::count_pairs(mask, mask, to_i64(t, "time"));
    res.ratio_at_t = mu_a == 0 ? Rational(0) : (Rational(cnt_t) * w_norm) / mu_a;
    res.premise_met = res.ratio_at_t > beta;
    std::int64_t cnt_rt = LevelMask::count_pairs(mask, mask, to_i64(big, "multiple time"));
    res.value_at_multiple = Rational(cnt_rt) * w_norm;
    res.conclusion_holds = res.value_at_multiple > mu_a * mu_a;
    results.push_back(std::move(res));
  }
  return results;
}

KBoundResult k_bound_check(const CorrelationReport& report, const Rational& K,
                           const Rational& tail_fraction) {
  if (report.entries.empty()) throw PreconditionError("k_bound_check: empty report");
  if (report.product == 0) throw PreconditionError("k_bound_check: zero product");
  KBoundResult res;
  res.tail_fraction = tail_fraction;
  const BigInt lo = report.entries.front().n;
  const BigInt hi = report.entries.back().n;
  // Tail = trailing `tail_fraction` of the swept n-range.
  Rational start = Rational(hi) - tail_fraction * Rational(hi - lo);
  BigInt tail_start = numerator(start) / denominator(start);
  res.tail_start = tail_start;
  res.sup_ratio = 0;
  for (const auto& e : report.entries) {
    if (e.n < tail_start) continue;
    ++res.tail_count;
    Rational ratio = (e.value + e.error) / report.product;
    if (ratio > res.sup_ratio) res.sup_ratio = ratio;
  }
  if (res.tail_count == 0) throw PreconditionError("k_bound_check: empty tail");
  res.satisfied = res.sup_ratio <= K;
  return res;
}

M1M2Audit m1_m2_partition_audit(const std::vector<RigidSegmentInfo>& segments,
                                const CorrelationReport& report) {
  M1M2Audit audit;
  audit.m1_max_deviation = 0;
  audit.m2_max_deviation = 0;
  for (const auto& e : report.entries) {
    M1M2Classification c;
    c.n = e.n;
    c.m_class = 2;
    for (const auto& seg : segments) {
      Rational lo1r = seg.eps * Rational(seg.rigid_height);
      BigInt lo1 = numerator(lo1r) / denominator(lo1r);  // floor; inclusive band start
      BigInt hi1 = seg.rigid_height - seg.mixing_horizon;
      BigInt lo2 = seg.rigid_height + seg.mixing_horizon;
      const BigInt& hi2 = seg.next_height;
      if ((e.n >= lo1 && e.n <= hi1) || (e.n >= lo2 && e.n <= hi2)) {
        c.m_class = 1;
        c.segment = seg.segment;
        break;
      }
      if (e.n > hi1 && e.n < lo2) {
        c.excluded_gap = true;
        c.segment = seg.segment;
        break;
      }
    }
    if (c.excluded_gap) {
      ++audit.excluded_count;
    } else if (c.m_class == 1) {
      ++audit.m1_count;
      if (e.deviation > audit.m1_max_deviation) audit.m1_max_deviation = e.deviation;
    } else {
      ++audit.m2_count;
      if (e.deviation > audit.m2_max_deviation) audit.m2_max_deviation = e.deviation;
    }
    audit.classified.push_back(std::move(c));
  }
  return audit;
}

JointIntersection measure_joint_intersection(const TowerRealization& real, const AtomSpec& A,
                                             const std::vector<BigInt>& times) {
  LevelMask mask = mask_of(real, A);
  const std::int64_t h = mask.size();
  std::int64_t smax = 0;
  std::vector<std::int64_t> shifts;
  for (const auto& t : times) {
    std::int64_t s = to_i64(t, "joint shift");
    if (s < 0) throw PreconditionError("joint intersection expects nonnegative times");
    if (s >= h) throw PreconditionError("joint shift at or beyond height");
    shifts.push_back(s);
    smax = std::max(smax, s);
  }
  // x in the intersection iff pos(x) - t is in A for every t; count positions
  // p >= smax exactly, and bound the undetermined p < smax by their partial
  // matches.
  std::vector<std::int64_t> probe;
  for (auto s : shifts) probe.push_back(smax - s);
  std::int64_t cnt = LevelMask::count_joint(mask, probe);
  std::int64_t partial = 0;
  for (std::int64_t p = 0; p < smax; ++p) {
    bool possible = true;
    for (auto s : shifts) {
      std::int64_t q = p - s;
      if (q >= 0 && !mask.test(q)) {
        possible = false;
        break;
      }
    }
    if (possible) ++partial;
  }
  Rational w_norm = real.level_width() / real.total_measure();
  JointIntersection out;
  out.value = Rational(cnt) * w_norm;
  out.error = Rational(partial) * w_norm;
  return out;
}

// ---------------------------------------------------------------------------
// Estimators

namespace {

ConstructionPlan extend_with_staircase(const ConstructionPlan& plan, const BigInt& cut,
                                       const BigInt& target_height, const BigInt& budget,
                                       std::size_t* appended = nullptr) {
  if (cut < 1 || cut > BigInt(1) << 20) {
    throw PreconditionError("continuation cut out of range: " + cut.str());
  }
  ConstructionPlan ext = plan;
  auto hs = heights_of(ext, ext.stages.size());
  BigInt h = hs.back();
  std::size_t added = 0;
  std::uint64_t r = cut.convert_to<std::uint64_t>();
  while (h < target_height) {
    CutStage st = CutStage::staircase(r);
    BigInt next = BigInt(r) * h + st.spacer_sum();
    if (next > budget) break;
    ext.stages.push_back(std::move(st));
    h = next;
    ++added;
  }
  if (appended) *appended = added;
  return ext;
}

}  // namespace

UcEstimate estimate_uniform_cesaro(const ConstructionPlan& plan, std::size_t anchor_stage,
                                   const BigInt& continuation_cut, const Rational& eps_target,
                                   const UcCaps& caps) {
  UcEstimate est;
  est.target = eps_target;

  // The estimation realization continues the anchor column's staircase far
  // enough that orbit segments of length horizon * q stay mostly resolved.
  // The budget caps the extension; a prefix already beyond it is kept as is.
  BigInt prefix_height = heights_of(plan, plan.stages.size()).back();
  BigInt budget = caps.est_height_budget > prefix_height ? caps.est_height_budget : prefix_height;
  if (budget > BigInt(1) << 28) {
    throw ResourceError("uniform-Cesaro estimation would need " + budget.str() +
                        " levels of counters; raise est_height_budget deliberately");
  }
  BigInt want = BigInt(4) * caps.horizon_cap * caps.q_cap;
  ConstructionPlan ext = extend_with_staircase(plan, continuation_cut, want, budget);
  TowerRealization real = realize(ext, ext.stages.size(), budget);
  const std::int64_t h = to_i64(real.height(), "estimation height");
  const std::int64_t hp = to_i64(real.height_at(anchor_stage), "anchor height");

  std::vector<std::int64_t> copies;
  real.for_each_copy(anchor_stage, [&](const BigInt& off) {
    copies.push_back(off.convert_to<std::int64_t>());
  });

  const double mu_x = to_double(real.total_measure());
  const double w_bar = to_double(real.level_width()) / mu_x;
  const double mu_lvl = to_double(real.width_at(anchor_stage)) / mu_x;
  const double mu_comp = 1.0 - mu_lvl * static_cast<double>(hp);
  const double target = to_double(eps_target);

  // Evaluation grid for the horizon scan.
  std::vector<std::int64_t> grid;
  for (std::int64_t n = 1; n <= caps.horizon_cap;) {
    grid.push_back(n);
    std::int64_t next = static_cast<std::int64_t>(std::ceil(static_cast<double>(n) * caps.grid_factor));
    n = std::max(n + 1, next);
  }
  if (grid.back() != caps.horizon_cap) grid.push_back(caps.horizon_cap);

  // worst[g] = worst relative integral over q and atoms at grid point g
  std::vector<double> worst(grid.size(), 0.0);
  std::vector<double> coverage(grid.size(), 1.0);

  const std::size_t extended = static_cast<std::size_t>(h + hp);
  std::vector<std::uint32_t> counts(extended);
  std::vector<double> phi_prefix(extended + 1);
  std::vector<double> g_prefix(extended + 1);

  for (unsigned q = 1; q <= caps.q_cap; ++q) {
    std::fill(counts.begin(), counts.end(), 0);
    std::int64_t i = 0;
    for (std::size_t gidx = 0; gidx < grid.size(); ++gidx) {
      const std::int64_t n = grid[gidx];
      for (; i < n; ++i) {
        std::int64_t shift = i * static_cast<std::int64_t>(q);
        for (auto o : copies) {
          std::int64_t y = o + shift;  // g(y) counts hits of O + iq
          if (y < h) ++counts[static_cast<std::size_t>(y + hp)];
        }
      }
      const std::int64_t x_lo = (n - 1) * static_cast<std::int64_t>(q);
      if (x_lo >= h / 2) {
        // window coverage too small to mean anything; stop this q
        break;
      }
      const double inv_n = 1.0 / static_cast<double>(n);
      // Prefix sums of |g/n - mu_lvl| and of g/n over the extended axis.
      for (std::size_t y = 0; y < extended; ++y) {
        double avg = counts[y] * inv_n;
        phi_prefix[y + 1] = phi_prefix[y] + std::fabs(avg - mu_lvl);
        g_prefix[y + 1] = g_prefix[y] + avg;
      }
      double q_worst = 0.0;
      // Level atoms: integral_a = w_bar * sum over x in [x_lo, h) of
      // |g(x - a)/n - mu_lvl|, a sliding window of phi.
      for (std::int64_t a = 0; a < hp; ++a) {
        std::size_t ylo = static_cast<std::size_t>(x_lo - a + hp);
        std::size_t yhi = static_cast<std::size_t>(h - a + hp);
        double integral = w_bar * (phi_prefix[yhi] - phi_prefix[ylo]);
        if (mu_lvl > 0) q_worst = std::max(q_worst, integral / mu_lvl);
      }
      // Complement atom: avg_comp(x) = 1 - sum_{a < hp} g(x - a)/n.
      if (mu_comp > 1e-15) {
        double integral = 0.0;
        for (std::int64_t x = x_lo; x < h; ++x) {
          std::size_t xi = static_cast<std::size_t>(x + hp);
          double in_col = g_prefix[xi + 1] - g_prefix[static_cast<std::size_t>(xi - hp + 1)];
          integral += std::fabs((1.0 - in_col) - mu_comp);
        }
        q_worst = std::max(q_worst, integral * w_bar / mu_comp);
      }
      worst[gidx] = std::max(worst[gidx], q_worst);
      coverage[gidx] =
          std::min(coverage[gidx], static_cast<double>(h - x_lo) / static_cast<double>(h));
    }
  }

  est.horizon = caps.horizon_cap;
  est.achieved = worst.empty() ? 0.0 : worst.back();
  for (std::size_t gidx = 0; gidx < grid.size(); ++gidx) {
    if (worst[gidx] <= target) {
      est.horizon = grid[gidx];
      est.achieved = worst[gidx];
      est.reached = true;
      est.coverage = coverage[gidx];
      break;
    }
  }
  if (!est.reached) {
    est.achieved = worst.back();
    est.coverage = coverage.back();
    est.note = "uniform-Cesaro target " + rational_to_string(eps_target) +
               " not reached within horizon cap " + std::to_string(caps.horizon_cap) +
               " (achieved " + std::to_string(est.achieved) + "); recorded as assumption";
    if (caps.strict) throw EstimatorError(est.note);
  } else {
    est.note = "horizon scanned on a geometric grid (factor " + std::to_string(caps.grid_factor) +
               "), q <= " + std::to_string(caps.q_cap);
  }
  return est;
}

GapCounts::GapCounts(const TowerRealization& real, std::size_t anchor_stage, std::int64_t max_gap)
    : max_gap_(max_gap), counts_(static_cast<std::size_t>(max_gap) + 1, 0) {
  counts_[0] = 1;
  // Gap support after processing stage t is [-(span), span] with
  // span = h_{t} - h_anchor (offset differences within one column).
  BigInt span = 0;
  const BigInt cap = max_gap;
  for (std::size_t t = anchor_stage; t < real.depth(); ++t) {
    const auto& off = real.stage_offsets(t);
    std::vector<std::uint64_t> next(counts_.size(), 0);
    std::int64_t span_i = span > cap ? max_gap : span.convert_to<std::int64_t>();
    // d = 0: every existing pair recurs once per subcolumn.
    for (std::size_t g = 0; g <= static_cast<std::size_t>(span_i); ++g) {
      next[g] = counts_[g] * off.size();
    }
    for (std::size_t j = 0; j < off.size(); ++j) {
      for (std::size_t jp = j + 1; jp < off.size(); ++jp) {
        BigInt diff = off[jp] - off[j];
        if (diff - span > cap) break;  // larger jp only grows the gap
        std::int64_t y = diff.convert_to<std::int64_t>();
        // copies y apart combine with inner gaps g0 in [-span, span]:
        // resulting gaps y + g0 (and mirrored -(y + g0))
        std::int64_t lo = std::max<std::int64_t>(0, y - span_i);
        std::int64_t hi = std::min(max_gap_, y + span_i);
        for (std::int64_t g = lo; g <= hi; ++g) {
          next[static_cast<std::size_t>(g)] +=
              counts_[static_cast<std::size_t>(g >= y ? g - y : y - g)];
        }
        // mirrored branch contributes to nonnegative gaps when g0 <= -y
        std::int64_t hi2 = std::min(max_gap_, span_i - y);
        for (std::int64_t g = 0; g <= hi2; ++g) {
          next[static_cast<std::size_t>(g)] += counts_[static_cast<std::size_t>(g + y)];
        }
      }
    }
    counts_ = std::move(next);
    span = real.height_at(t + 1) - real.height_at(anchor_stage);
  }
}

std::int64_t GapCounts::at(std::int64_t gap) const {
  std::int64_t a = gap < 0 ? -gap : gap;
  if (a > max_gap_) return 0;
  return static_cast<std::int64_t>(counts_[static_cast<std::size_t>(a)]);
}

MixEstimate estimate_mixing_horizon(const ConstructionPlan& plan, const BigInt& continuation_cut,
                                    std::size_t anchor_stage, std::size_t partition_groups,
                                    const Rational& eps, const MixCaps& caps) {
  MixEstimate est;
  auto hs = heights_of(plan, plan.stages.size());
  BigInt window_end_big = BigInt(caps.window_factor) * hs.back();
  BigInt budget = caps.est_height_budget > hs.back() ? caps.est_height_budget : hs.back();
  ConstructionPlan ext =
      extend_with_staircase(plan, continuation_cut, BigInt(caps.resolve_factor) * window_end_big,
                            budget);
  TowerRealization real = realize(ext, ext.stages.size(), budget);
  est.est_height = real.height();
  if (window_end_big >= real.height()) window_end_big = real.height() - 1;
  const std::int64_t window_end = to_i64(window_end_big, "mixing window");
  est.window_end = window_end_big;

  const std::int64_t h_anchor = to_i64(real.height_at(anchor_stage), "anchor height");
  if (partition_groups != 0 || h_anchor > 64) {
    throw PreconditionError("mixing estimator expects a small anchor column partition");
  }
  const std::int64_t h = to_i64(real.height(), "estimation height");
  const Rational mu_x = real.total_measure();
  const Rational w = real.level_width();

  GapCounts gaps(real, anchor_stage, window_end + h_anchor);
  // Copy offsets in increasing order, for the boundary ranks the complement
  // atom needs.
  std::vector<std::int64_t> offsets;
  real.for_each_copy(anchor_stage, [&](const BigInt& o) {
    offsets.push_back(o.convert_to<std::int64_t>());
  });
  const std::int64_t copies = static_cast<std::int64_t>(offsets.size());
  auto rank = [&](std::int64_t x) -> std::int64_t {  // #offsets <= x
    return std::upper_bound(offsets.begin(), offsets.end(), x) - offsets.begin();
  };

  // Atom system: one atom per anchor level plus the column complement.
  const std::size_t n_atoms = static_cast<std::size_t>(h_anchor) + 1;
  const std::size_t comp = n_atoms - 1;
  std::vector<Rational> mu(n_atoms);
  for (std::size_t a = 0; a < comp; ++a) mu[a] = real.width_at(anchor_stage) / mu_x;
  mu[comp] = 1 - Rational(h_anchor) * real.width_at(anchor_stage) / mu_x;

  // cnt(a, b, n): resolved pair count between atoms at shift n >= 1.
  auto pair_count = [&](std::size_t a, std::size_t b, std::int64_t n) -> std::int64_t {
    const bool ac = a == comp, bc = b == comp;
    if (!ac && !bc) {
      return gaps.at(n - (static_cast<std::int64_t>(b) - static_cast<std::int64_t>(a)));
    }
    if (!ac && bc) {
      // p = o + a, p + n anywhere in column minus every level b'
      std::int64_t total = rank(h - 1 - n - static_cast<std::int64_t>(a));
      for (std::int64_t b2 = 0; b2 < h_anchor; ++b2) {
        total -= gaps.at(n - (b2 - static_cast<std::int64_t>(a)));
      }
      return total;
    }
    if (ac && !bc) {
      std::int64_t total = copies - rank(n - static_cast<std::int64_t>(b) - 1);
      for (std::int64_t a2 = 0; a2 < h_anchor; ++a2) {
        total -= gaps.at(n - (static_cast<std::int64_t>(b) - a2));
      }
      return total;
    }
    // comp-comp by inclusion-exclusion over column membership
    std::int64_t in_any_left = 0, in_any_right = 0, in_both = 0;
    for (std::int64_t a2 = 0; a2 < h_anchor; ++a2) {
      in_any_left += rank(h - 1 - n - a2);
      in_any_right += copies - rank(n - a2 - 1);
      for (std::int64_t b2 = 0; b2 < h_anchor; ++b2) in_both += gaps.at(n - (b2 - a2));
    }
    return (h - n) - in_any_left - in_any_right + in_both;
  };

  // Per-pair integer comparison constants: the check
  //   | cnt * w / mu_x  -  p_hat * (h - n) / h |  <=  eps * p_hat
  // cross-multiplied to  | cnt * A1 - B1 * (h - n) | <= C1.
  struct PairCheck {
    std::size_t a, b;
    BigInt A1, B1, C1;
  };
  std::vector<PairCheck> pairs;
  for (std::size_t a = 0; a < n_atoms; ++a) {
    for (std::size_t b = a; b < n_atoms; ++b) {
      Rational p = mu[a] * mu[b];
      if (p == 0) continue;
      Rational wn = w / mu_x;
      Rational tol = eps * p;
      BigInt wn_n = numerator(wn), wn_d = denominator(wn);
      BigInt p_n = numerator(p), p_d = denominator(p);
      BigInt t_n = numerator(tol), t_d = denominator(tol);
      PairCheck pc;
      pc.a = a;
      pc.b = b;
      pc.A1 = wn_n * p_d * h * t_d;
      pc.B1 = p_n * wn_d * t_d;
      pc.C1 = t_n * wn_d * p_d * h;
      pairs.push_back(std::move(pc));
    }
  }

  std::int64_t last_violation = 0;
  for (std::int64_t n = window_end; n >= 1; --n) {
    bool bad = false;
    for (const auto& pc : pairs) {
      std::int64_t cnt = pair_count(pc.a, pc.b, n);
      BigInt lhs = abs(BigInt(cnt) * pc.A1 - pc.B1 * BigInt(h - n));
      if (lhs > pc.C1) {
        bad = true;
        break;
      }
    }
    if (bad) {
      last_violation = n;
      break;  // scanning downward: the first hit is the largest
    }
  }

  est.horizon = BigInt(last_violation + 1);
  est.clean = last_violation < window_end;
  if (!est.clean) {
    est.note = "violations persist through the verification window [1, " + est.window_end.str() +
               "]; no mixing horizon inside the window";
    if (caps.strict) throw EstimatorError(est.note);
  }
  return est;
}

}  // namespace mixlab
