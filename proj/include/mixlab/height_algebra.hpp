#pragma once

#include "mixlab/numeric.hpp"

#include <cstddef>
#include <vector>

namespace mixlab {

/// Staircase cut parameters r_1, r_2, ... (1-based in the API, matching the
/// height functional H below).
struct CutVector {
  std::vector<BigInt> entries;

  const BigInt& at(std::size_t i) const;  // 1-based
  std::size_t size() const { return entries.size(); }
  bool nondecreasing(std::size_t from, std::size_t to) const;  // inclusive 1-based range
  void validate() const;                                       // all entries >= 2
};

/// Binary mask b_j..b_{n-1} supported on a contiguous 1-based index range.
struct BinaryMask {
  std::size_t first = 1;        // index of bits[0]
  std::vector<bool> bits;

  bool bit(std::size_t i) const;  // 1-based, 0 outside support
  std::size_t popcount() const;
};

/// Staircase height functional: H_1 = h1, H_{i+1} = r_i H_i + r_i (r_i - 1) / 2.
/// Index n is 1-based; n = 1 returns h1.
BigInt height_functional(const CutVector& r, const BigInt& h1, std::size_t n);

/// H with a binary mask added to the cut parameters.
BigInt height_functional_masked(const CutVector& r, const BinaryMask& b, const BigInt& h1,
                                std::size_t n);

struct MaskResult {
  BinaryMask mask;
  BigInt achieved_height;  // H_n(r + b, h1)
  BigInt residual;         // k - achieved_height
  Rational residual_ratio_bound;  // 1/r_j + 1/H_j(r, h1), the certified cap
};

/// The binary-vector approximation: maximizes H_n(r + b, h1) <= k over masks
/// supported on [j, n-1], breaking ties toward the lexicographically smallest
/// mask. The residual is certified below (1/r_j + 1/H_j) * H_n(r + b, h1).
///
/// Preconditions (each reported individually on failure):
///   - r nondecreasing on [j, n-1]
///   - H_n(r, h1) <= k < H_{n+1}(r, h1)
///   - k < prod_{i=j}^{n-1} (r_i + 1) * H_j(r, h1)
MaskResult lemma1_mask(const CutVector& r, const BigInt& h1, std::size_t j, std::size_t n,
                       const BigInt& k);

/// Exhaustive reference maximizer over all 2^(n-j) masks. Test oracle; kept
/// independent of lemma1_mask's search.
MaskResult lemma1_mask_exhaustive(const CutVector& r, const BigInt& h1, std::size_t j,
                                  std::size_t n, const BigInt& k);

struct ApproximationState {
  BigInt rho;       // constant cut value of the segment
  std::size_t j;    // 1-based index where the rho-segment starts
  CutVector r;      // cut parameters so far (indices 1..r.size())
  BigInt h1;
};

struct ApproximationStep {
  BinaryMask mask;
  std::size_t n;          // 1-based stage index with H_n <= k < H_{n+1}
  BigInt new_height;      // H_n(r + b, h1)
  BigInt pad;             // k - new_height, spacers to add on top
  Rational pad_proportion;  // pad / new_height
};

/// One number-approximation move: find n with H_n <= k < H_{n+1} (extending
/// the rho-segment virtually as needed), mask via lemma1_mask, and return the
/// padded-height bookkeeping. The pad proportion is certified below
/// 1/rho + 1/H_j <= 2/rho < 2*eps.
ApproximationStep number_approximation_step(const ApproximationState& state, const BigInt& k,
                                            const Rational& eps);

}  // namespace mixlab
