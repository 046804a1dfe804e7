#pragma once

#include "mixlab/numeric.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mixlab {

/// Inclusive integer window [lo, hi].
struct Window {
  BigInt lo;
  BigInt hi;
  bool empty() const { return hi < lo; }
};

/// Strictly increasing integers with n_j > 2 * sum(n_i, i < j).
struct DissociatedSequence {
  std::vector<BigInt> terms;

  explicit DissociatedSequence(std::vector<BigInt> terms);
  BigInt term_sum() const;
  std::size_t size() const { return terms.size(); }
};

/// Lazily enumerable set of integers. Values are nonnegative for the
/// combinatorial kinds; riesz-support and shifted sets may carry negatives.
class IndexSet {
 public:
  static IndexSet explicit_set(std::vector<BigInt> values);
  static IndexSet squares();
  static IndexSet prime_powers(unsigned exponent);
  static IndexSet naturals();
  /// Union of [base^(step*n + lo_shift), base^(step*n + hi_shift) - 1] for n >= n_start.
  static IndexSet power_intervals(const BigInt& base, unsigned step, unsigned lo_shift,
                                  unsigned hi_shift, unsigned n_start);
  static IndexSet riesz_support_set(DissociatedSequence freqs, std::optional<unsigned> max_word,
                                    const BigInt& shift);
  static IndexSet complement(IndexSet inner);
  static IndexSet shifted(IndexSet inner, const BigInt& offset);
  static IndexSet set_union(std::vector<IndexSet> parts);
  /// The thick set of eq-style doubled power intervals used throughout:
  /// union of [b^(s n), b^(s n + 1) - 1]; b = 2, s = 2 gives the canonical one.
  static IndexSet thick_power_set(const BigInt& base, unsigned step);

  bool contains(const BigInt& value) const;
  /// Sorted, duplicate-free members of the set inside the window.
  std::vector<BigInt> enumerate(const Window& window) const;
  /// Maximal runs [a, b] (inclusive) of consecutive members inside the window.
  std::vector<std::pair<BigInt, BigInt>> runs_in_window(const Window& window) const;

  Rational density_in_window(const Window& window) const;

  std::string describe() const;
  std::string to_json() const;
  static IndexSet from_json(const std::string& text);
  static IndexSet load(const std::string& path);
  void save(const std::string& path) const;

  struct Node;
  explicit IndexSet(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  const Node& node() const { return *node_; }
  const std::shared_ptr<const Node>& node_ptr() const { return node_; }

 private:
  std::shared_ptr<const Node> node_;
};

struct ThickWitness {
  BigInt center;
  BigInt radius;       // verified margin: the full grid fits with this radius
  unsigned multiplicity = 1;
};

struct WitnessResult {
  std::optional<ThickWitness> witness;
  std::string note;  // diagnosis when absent ("no witness in window" is not a proof)
};

/// Searches the window for k with [k - ell, k + ell] inside S.
WitnessResult is_thick_in_window(const IndexSet& S, const Window& window, const BigInt& ell);

/// Searches for k with { j*k + i : 1 <= j <= r, |i| <= ell } inside S.
/// r = 1 reduces exactly to is_thick_in_window.
WitnessResult r_thick_witness(const IndexSet& S, unsigned r, const Window& window,
                              const BigInt& ell, std::size_t candidate_cap = 1u << 20);

/// All k in S ∩ window with m*k also in S; empty means the window is clean.
std::vector<BigInt> doubling_free_check(const IndexSet& S, const Window& window, const BigInt& m);

/// { t + sum eps_j n_j : eps in {-1,0,1}, word length <= max_word } ∩ window,
/// enumerated exactly. Dissociation guarantees distinct sums; asserted.
std::vector<BigInt> riesz_support(const DissociatedSequence& freqs,
                                  std::optional<unsigned> max_word, const BigInt& shift,
                                  const Window& window);

struct RajchmanCheckResult {
  std::vector<BigInt> intersection;  // support words escaping M, within window
  bool empty_in_window() const { return intersection.empty(); }
};

/// Window test of the Host-Parreau condition: does the shifted word set meet
/// the complement of M inside the window?
RajchmanCheckResult rajchman_dissociated_property_check(const IndexSet& M,
                                                        const DissociatedSequence& freqs,
                                                        std::optional<unsigned> max_word,
                                                        const BigInt& shift, const Window& window);

struct DiscrepancyResult {
  Rational star_discrepancy;
  /// Bound on how far the reported value can move under the stated rational
  /// approximation of alpha (sup-norm coupling bound).
  Rational perturbation_bound;
};

/// Star discrepancy of { frac(s_i * alpha) : first `count` members of S },
/// computed exactly by sorting.
DiscrepancyResult equidistribution_discrepancy(const IndexSet& S, const Rational& alpha,
                                               const Rational& alpha_error, std::size_t count);

/// High-precision rational approximants for the two irrationals the tests
/// use; error < 10^-digits.
Rational golden_conjugate_approx(unsigned digits);
Rational sqrt2_approx(unsigned digits);

void export_enumeration_csv(const IndexSet& S, const Window& window, const std::string& path);

}  // namespace mixlab
