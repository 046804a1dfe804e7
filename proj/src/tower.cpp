#include "mixlab/tower.hpp"

#include "mixlab/errors.hpp"

#include <algorithm>

namespace mixlab {

namespace {

std::vector<std::pair<BigInt, BigInt>> normalize_runs(std::vector<std::pair<BigInt, BigInt>> runs) {
  std::vector<std::pair<BigInt, BigInt>> out;
  std::sort(runs.begin(), runs.end());
  for (auto& r : runs) {
    if (r.second <= r.first) continue;
    if (!out.empty() && r.first <= out.back().second) {
      if (r.second > out.back().second) out.back().second = r.second;
    } else {
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace

LevelSet LevelSet::from_runs(std::size_t stage, std::vector<std::pair<BigInt, BigInt>> runs) {
  LevelSet s;
  s.stage = stage;
  s.runs = normalize_runs(std::move(runs));
  return s;
}

LevelSet LevelSet::from_points(std::size_t stage, const std::vector<BigInt>& points) {
  std::vector<std::pair<BigInt, BigInt>> runs;
  runs.reserve(points.size());
  for (const auto& p : points) runs.emplace_back(p, p + 1);
  return from_runs(stage, std::move(runs));
}

LevelSet LevelSet::interval(std::size_t stage, const BigInt& lo, const BigInt& hi) {
  LevelSet s;
  s.stage = stage;
  if (hi > lo) s.runs.emplace_back(lo, hi);
  return s;
}

BigInt LevelSet::count() const {
  BigInt total = 0;
  for (const auto& r : runs) total += r.second - r.first;
  return total;
}

bool LevelSet::contains(const BigInt& level) const {
  auto it = std::upper_bound(runs.begin(), runs.end(), level,
                             [](const BigInt& v, const auto& run) { return v < run.first; });
  if (it == runs.begin()) return false;
  --it;
  return level >= it->first && level < it->second;
}

TowerRealization::TowerRealization(ConstructionPlan plan, std::size_t depth,
                                   const BigInt& height_budget)
    : plan_(std::move(plan)), depth_(depth) {
  plan_.validate();
  if (depth_ > plan_.stages.size()) {
    throw PreconditionError("realize: depth " + std::to_string(depth_) + " exceeds plan depth " +
                            std::to_string(plan_.stages.size()));
  }
  heights_.push_back(plan_.initial_height);
  widths_.push_back(plan_.initial_width);
  if (heights_[0] > height_budget) {
    throw ResourceError("initial height " + heights_[0].str() + " exceeds budget " +
                        height_budget.str());
  }
  offsets_.reserve(depth_);
  for (std::size_t t = 0; t < depth_; ++t) {
    const CutStage& st = plan_.stages[t];
    BigInt padded = heights_[t] + plan_.pad_at(t);
    std::vector<BigInt> off;
    off.reserve(st.cuts);
    BigInt cur = 0;
    for (std::uint64_t j = 0; j < st.cuts; ++j) {
      off.push_back(cur);
      cur += padded + st.spacers[j];
    }
    offsets_.push_back(std::move(off));
    heights_.push_back(cur);
    widths_.push_back(widths_[t] / st.cuts);
    if (heights_.back() > height_budget) {
      throw ResourceError("height " + heights_.back().str() + " at stage " + std::to_string(t + 1) +
                          " exceeds budget " + height_budget.str());
    }
  }
}

Rational TowerRealization::total_measure() const {
  return Rational(height()) * level_width();
}

Rational TowerRealization::remainder_measure() const {
  return total_added_measure(plan_, depth_, plan_.stages.size());
}

Rational TowerRealization::measure_of(const LevelSet& set) const {
  if (set.stage > depth_) throw PreconditionError("level set stage beyond realization depth");
  if (!set.runs.empty() &&
      (set.runs.front().first < 0 || set.runs.back().second > heights_[set.stage])) {
    throw PreconditionError("level set exceeds column height");
  }
  return Rational(set.count()) * widths_[set.stage];
}

LevelSet TowerRealization::refine(const LevelSet& set, std::size_t max_runs) const {
  if (set.stage > depth_) throw PreconditionError("refine: level set stage beyond depth");
  measure_of(set);  // bounds check
  std::vector<std::pair<BigInt, BigInt>> runs = set.runs;
  for (std::size_t t = set.stage; t < depth_; ++t) {
    const auto& off = offsets_[t];
    if (runs.size() * off.size() > max_runs) {
      throw ResourceError("refine: run budget exceeded at stage " + std::to_string(t) + " (" +
                          std::to_string(runs.size()) + " runs x " + std::to_string(off.size()) +
                          " subcolumns)");
    }
    std::vector<std::pair<BigInt, BigInt>> next;
    next.reserve(runs.size() * off.size());
    // Copies are disjoint and offsets increasing, so order is preserved
    // per subcolumn; a final merge keeps the invariant.
    for (const auto& o : off) {
      for (const auto& r : runs) next.emplace_back(r.first + o, r.second + o);
    }
    runs = normalize_runs(std::move(next));
  }
  LevelSet out;
  out.stage = depth_;
  out.runs = std::move(runs);
  return out;
}

void TowerRealization::for_each_copy(std::size_t stage,
                                     const std::function<void(const BigInt&)>& fn) const {
  if (stage > depth_) throw PreconditionError("for_each_copy: stage beyond depth");
  // Odometer over subcolumn choices, deepest stage as the most significant
  // digit so offsets come out in increasing order.
  const std::size_t k = depth_ - stage;
  if (k == 0) {
    fn(BigInt(0));
    return;
  }
  std::vector<std::size_t> digit(k, 0);
  BigInt cur = 0;
  for (;;) {
    fn(cur);
    std::size_t i = 0;  // least significant digit = stage `stage`
    for (; i < k; ++i) {
      const auto& off = offsets_[stage + i];
      if (digit[i] + 1 < off.size()) {
        cur += off[digit[i] + 1] - off[digit[i]];
        ++digit[i];
        break;
      }
      cur -= off[digit[i]];
      digit[i] = 0;
    }
    if (i == k) return;
  }
}

LevelAncestry TowerRealization::label(const BigInt& level, std::size_t ancestor_stage) const {
  if (ancestor_stage > depth_) throw PreconditionError("label: stage beyond depth");
  if (level < 0 || level >= height()) throw PreconditionError("label: level out of range");
  BigInt cur = level;
  for (std::size_t t = depth_; t > ancestor_stage; --t) {
    const CutStage& st = plan_.stages[t - 1];
    const auto& off = offsets_[t - 1];
    auto it = std::upper_bound(off.begin(), off.end(), cur);
    std::uint64_t j = static_cast<std::uint64_t>(std::distance(off.begin(), it)) - 1;
    BigInt rel = cur - off[j];
    BigInt pad = plan_.pad_at(t - 1);
    BigInt base = heights_[t - 1];
    if (rel < base) {
      cur = rel;
      continue;
    }
    if (rel < base + pad) return PadSpacer{t - 1};
    return StackSpacer{t - 1, j, rel - base - pad};
  }
  return AncestorLevel{cur};
}

PowerImage TowerRealization::apply_power(const BigInt& n, const LevelSet& set) const {
  const BigInt h = height();
  if (n >= h || -n >= h) {
    throw PreconditionError("apply_power: |n| = " + BigInt(abs(n)).str() + " must be below height " +
                            h.str());
  }
  LevelSet fine = refine(set);
  PowerImage out;
  out.image.stage = depth_;
  out.unresolved = 0;
  BigInt lost = 0;
  for (const auto& r : fine.runs) {
    BigInt a = r.first + n;
    BigInt b = r.second + n;
    BigInt ca = a < 0 ? BigInt(0) : a;
    BigInt cb = b > h ? h : b;
    if (cb > ca) out.image.runs.emplace_back(ca, cb);
    lost += (r.second - r.first) - (cb > ca ? cb - ca : BigInt(0));
  }
  out.unresolved = Rational(lost) * level_width();
  return out;
}

CorrelationValue TowerRealization::correlation(const BigInt& n, const LevelSet& A,
                                               const LevelSet& B) const {
  PowerImage img = apply_power(n, A);
  LevelSet fineB = refine(B);
  // Linear merge of two sorted run lists.
  BigInt overlap = 0;
  std::size_t i = 0, j = 0;
  while (i < img.image.runs.size() && j < fineB.runs.size()) {
    const auto& ra = img.image.runs[i];
    const auto& rb = fineB.runs[j];
    BigInt lo = ra.first > rb.first ? ra.first : rb.first;
    BigInt hi = ra.second < rb.second ? ra.second : rb.second;
    if (hi > lo) overlap += hi - lo;
    if (ra.second < rb.second) {
      ++i;
    } else {
      ++j;
    }
  }
  CorrelationValue out;
  out.value = Rational(overlap) * level_width();
  out.error_bound = img.unresolved;
  return out;
}

TowerRealization realize(const ConstructionPlan& plan, std::size_t depth,
                         const BigInt& height_budget) {
  return TowerRealization(plan, depth, height_budget);
}

}  // namespace mixlab
