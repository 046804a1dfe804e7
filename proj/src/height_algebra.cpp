#include "mixlab/height_algebra.hpp"

#include "mixlab/errors.hpp"

#include <functional>
#include <stdexcept>
#include <utility>

namespace mixlab {

const BigInt& CutVector::at(std::size_t i) const {
  if (i < 1 || i > entries.size()) {
    throw PreconditionError("cut vector index " + std::to_string(i) + " out of range [1, " +
                            std::to_string(entries.size()) + "]");
  }
  return entries[i - 1];
}

bool CutVector::nondecreasing(std::size_t from, std::size_t to) const {
  for (std::size_t i = from; i + 1 <= to && i + 1 <= entries.size(); ++i) {
    if (at(i) > at(i + 1)) return false;
  }
  return true;
}

void CutVector::validate() const {
  for (const auto& r : entries) {
    if (r < 2) throw PreconditionError("cut parameters must be >= 2, got " + r.str());
  }
}

bool BinaryMask::bit(std::size_t i) const {
  if (i < first || i >= first + bits.size()) return false;
  return bits[i - first];
}

std::size_t BinaryMask::popcount() const {
  std::size_t c = 0;
  for (bool b : bits) c += b ? 1 : 0;
  return c;
}

BigInt height_functional(const CutVector& r, const BigInt& h1, std::size_t n) {
  if (n < 1 || n > r.size() + 1) {
    throw PreconditionError("height index " + std::to_string(n) + " out of range [1, " +
                            std::to_string(r.size() + 1) + "]");
  }
  BigInt h = h1;
  for (std::size_t i = 1; i < n; ++i) {
    const BigInt& ri = r.at(i);
    h = ri * h + ri * (ri - 1) / 2;
  }
  return h;
}

BigInt height_functional_masked(const CutVector& r, const BinaryMask& b, const BigInt& h1,
                                std::size_t n) {
  if (n < 1 || n > r.size() + 1) throw PreconditionError("height index out of range");
  BigInt h = h1;
  for (std::size_t i = 1; i < n; ++i) {
    BigInt ri = r.at(i) + (b.bit(i) ? 1 : 0);
    h = ri * h + ri * (ri - 1) / 2;
  }
  return h;
}

namespace {

void check_mask_preconditions(const CutVector& r, const BigInt& h1, std::size_t j, std::size_t n,
                              const BigInt& k) {
  if (h1 < 1) throw PreconditionError("h1 must be positive");
  if (j < 1 || j > n) throw PreconditionError("need 1 <= j <= n");
  if (n > r.size() + 1 || n < 1) throw PreconditionError("n out of range");
  r.validate();
  if (!r.nondecreasing(j, n - 1)) {
    throw PreconditionError("cut vector must be nondecreasing on [" + std::to_string(j) + ", " +
                            std::to_string(n - 1) + "]");
  }
  BigInt hn = height_functional(r, h1, n);
  if (k < hn) {
    throw PreconditionError("k = " + k.str() + " below H_n(r, h1) = " + hn.str());
  }
  if (n + 1 <= r.size() + 1) {
    BigInt hn1 = height_functional(r, h1, n + 1);
    if (k >= hn1) {
      throw PreconditionError("k = " + k.str() + " not below H_{n+1}(r, h1) = " + hn1.str());
    }
  }
  BigInt reach = height_functional(r, h1, j);
  for (std::size_t i = j; i < n; ++i) reach *= r.at(i) + 1;
  if (k >= reach) {
    throw PreconditionError("k = " + k.str() + " not below prod(r_i + 1) * H_j = " + reach.str() +
                            " (mask cannot reach k)");
  }
}

MaskResult finish_result(const CutVector& r, const BigInt& h1, std::size_t j, std::size_t n,
                         const BigInt& k, BinaryMask mask) {
  MaskResult res;
  res.achieved_height = height_functional_masked(r, mask, h1, n);
  res.mask = std::move(mask);
  res.residual = k - res.achieved_height;
  BigInt hj = height_functional(r, h1, j);
  res.residual_ratio_bound = Rational(1, r.at(j)) + Rational(1, hj);
  // The certified inequality from the maximizer argument; violation would
  // mean the search is broken, not the inputs.
  if (!(Rational(res.residual) < res.residual_ratio_bound * Rational(res.achieved_height))) {
    throw std::logic_error("mask residual bound violated");
  }
  return res;
}

bool lex_less(const std::vector<bool>& a, const std::vector<bool>& b) {
  return a < b;  // vector<bool> comparison is lexicographic
}

}  // namespace

MaskResult lemma1_mask(const CutVector& r, const BigInt& h1, std::size_t j, std::size_t n,
                       const BigInt& k) {
  check_mask_preconditions(r, h1, j, n, k);
  const std::size_t dim = n - j;

  // Depth-first over bit assignments in lexicographic order (0 before 1),
  // pruning subtrees whose all-ones extension cannot beat the incumbent and
  // whose all-zeros extension already exceeds k. Updates are strict, so the
  // first mask achieving the maximum is kept: the lexicographically
  // smallest one.
  std::vector<bool> partial(dim, false);
  std::vector<bool> best_bits;
  BigInt best_h = -1;

  // extend(cur_h, i, bit_value): height through index i given prefix height.
  auto step_height = [&](const BigInt& h, std::size_t i, bool bit) -> BigInt {
    BigInt ri = r.at(i) + (bit ? 1 : 0);
    return ri * h + ri * (ri - 1) / 2;
  };
  auto bound_final = [&](BigInt h, std::size_t idx, bool ones) {
    for (std::size_t i = idx; i < n; ++i) h = step_height(h, i, ones);
    return h;
  };

  BigInt h_prefix = height_functional(r, h1, j);

  std::function<void(std::size_t, const BigInt&)> dfs = [&](std::size_t off, const BigInt& h) {
    if (off == dim) {
      if (h <= k && h > best_h) {
        best_h = h;
        best_bits = partial;
      }
      return;
    }
    std::size_t i = j + off;
    if (bound_final(h, i, false) > k) return;       // even all-zeros overshoots
    if (bound_final(h, i, true) <= best_h) return;  // cannot strictly improve
    partial[off] = false;
    dfs(off + 1, step_height(h, i, false));
    partial[off] = true;
    dfs(off + 1, step_height(h, i, true));
    partial[off] = false;
  };
  dfs(0, h_prefix);

  if (best_h < 0) throw std::logic_error("mask search found no feasible mask");
  BinaryMask mask;
  mask.first = j;
  mask.bits = std::move(best_bits);
  return finish_result(r, h1, j, n, k, std::move(mask));
}

MaskResult lemma1_mask_exhaustive(const CutVector& r, const BigInt& h1, std::size_t j,
                                  std::size_t n, const BigInt& k) {
  check_mask_preconditions(r, h1, j, n, k);
  const std::size_t dim = n - j;
  if (dim > 24) throw ResourceError("exhaustive mask search capped at 24 bits");

  BinaryMask best;
  best.first = j;
  BigInt best_h = -1;
  for (std::uint64_t m = 0; m < (1ull << dim); ++m) {
    BinaryMask cand;
    cand.first = j;
    cand.bits.resize(dim);
    for (std::size_t t = 0; t < dim; ++t) cand.bits[t] = (m >> t) & 1;
    BigInt h = height_functional_masked(r, cand, h1, n);
    if (h > k) continue;
    if (h > best_h || (h == best_h && lex_less(cand.bits, best.bits))) {
      best_h = h;
      best.bits = cand.bits;
    }
  }
  if (best_h < 0) throw std::logic_error("exhaustive mask search found no feasible mask");
  return finish_result(r, h1, j, n, k, std::move(best));
}

ApproximationStep number_approximation_step(const ApproximationState& state, const BigInt& k,
                                            const Rational& eps) {
  const BigInt& rho = state.rho;
  if (!(Rational(1, rho) < eps)) {
    throw PreconditionError("1/rho = 1/" + rho.str() + " not below eps = " +
                            rational_to_string(eps));
  }
  BigInt hj = height_functional(state.r, state.h1, state.j);
  if (!(Rational((rho + 1) * (rho + 1), hj) < eps)) {
    throw PreconditionError("(rho+1)^2 / h_j = " + BigInt((rho + 1) * (rho + 1)).str() + "/" +
                            hj.str() + " not below eps");
  }
  // Extend the rho-segment until k falls inside [H_n, H_{n+1}).
  CutVector r = state.r;
  for (std::size_t i = state.j; i <= r.size(); ++i) {
    if (r.at(i) != rho) {
      throw PreconditionError("cut vector from j onward must carry the segment value rho");
    }
  }
  if (k < height_functional(r, state.h1, state.j)) {
    throw PreconditionError("k too small for this stage: k = " + k.str() + " < H_j = " + hj.str());
  }
  std::size_t n = state.j;
  for (;;) {
    while (r.size() + 1 <= n + 1) r.entries.push_back(rho);
    if (height_functional(r, state.h1, n + 1) > k) break;
    ++n;
  }
  MaskResult m = lemma1_mask(r, state.h1, state.j, n, k);
  ApproximationStep step;
  step.mask = m.mask;
  step.n = n;
  step.new_height = m.achieved_height;
  step.pad = m.residual;
  step.pad_proportion = Rational(step.pad) / Rational(step.new_height);
  if (!(step.pad_proportion < Rational(2) / Rational(rho)) ||
      !(Rational(2) / Rational(rho) < 2 * eps)) {
    throw std::logic_error("pad proportion bound 2/rho < 2 eps violated");
  }
  return step;
}

}  // namespace mixlab
