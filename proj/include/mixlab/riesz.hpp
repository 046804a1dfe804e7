#pragma once

#include "mixlab/index_set.hpp"
#include "mixlab/numeric.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mixlab {

struct ComplexRational {
  Rational re = 0;
  Rational im = 0;

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }
  ComplexRational conj() const { return {re, -im}; }
  ComplexRational operator*(const ComplexRational& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
};

std::string complex_to_string(const ComplexRational& c);

/// Classical Riesz product: frequencies n_j dissociated, coefficients c_j
/// with |c_j| <= 1/2. The weak-limit measure's Fourier coefficient at m is
/// the product of c_j / conj(c_j) over the signed-sum decomposition of m.
struct SpectralMeasure {
  DissociatedSequence freqs;
  std::vector<ComplexRational> coeffs;

  SpectralMeasure(DissociatedSequence freqs, std::vector<ComplexRational> coeffs);

  std::size_t factor_count() const { return freqs.size(); }
  bool all_real() const;
  /// Measure restricted to its first k factors.
  SpectralMeasure prefix(std::size_t k) const;

  std::string to_json() const;
  static SpectralMeasure from_json(const std::string& text);
  static SpectralMeasure load(const std::string& path);
  void save(const std::string& path) const;
};

/// Exact Fourier coefficient via the greedy top-down decomposition of m over
/// the dissociated frequencies; zero when no decomposition exists.
ComplexRational fourier_coefficient(const SpectralMeasure& sigma, const BigInt& m);

/// Signed digits of the decomposition, when it exists.
std::optional<std::vector<int>> decompose_over_freqs(const DissociatedSequence& freqs,
                                                     const BigInt& m);
/// Word length of the decomposition (number of nonzero digits), or nullopt.
std::optional<unsigned> word_length(const SpectralMeasure& sigma, const BigInt& m);

/// Numeric check of the k-factor polynomial density: integrates
/// z^{-m} * prod P_j over a uniform grid exceeding the trigonometric degree,
/// so the quadrature is exact up to rounding.
std::complex<double> integration_oracle(const SpectralMeasure& sigma_prefix, const BigInt& m);

/// Grid-DFT of the k-factor density giving coefficients for all |m| <= m_max
/// in one pass; matches integration_oracle up to rounding.
std::vector<std::complex<double>> integration_oracle_batch(const SpectralMeasure& sigma_prefix,
                                                           std::int64_t m_max);

struct MixingVerdictEntry {
  BigInt m;
  ComplexRational coefficient;
  unsigned word_length = 0;
};

struct SpectralMixingReport {
  std::vector<MixingVerdictEntry> hits;        // m in M ∩ window with nonzero coefficient
  std::vector<MixingVerdictEntry> witnesses;   // frequencies in window: sigma_hat(n_j) = c_j
  bool consistent_in_window = true;  // hits vanish or decay per word length
  std::string note;
};

/// Lists every member of M in the window whose coefficient is nonzero
/// (exact), plus the non-Rajchman witnesses at the frequencies themselves.
SpectralMixingReport mixing_verdict_along(const SpectralMeasure& sigma, const IndexSet& M,
                                          const Window& window);

struct CovarianceSequence {
  std::vector<Rational> values;  // C(0), C(1), ..., C(T-1)
  std::string provenance;

  Rational at(const BigInt& t) const;  // C(|t|) inside the window
  std::size_t size() const { return values.size(); }
};

/// C(t) = sigma_hat(t) on [0, length); requires real coefficients so the
/// covariance is real.
CovarianceSequence gaussian_covariance(const SpectralMeasure& sigma, std::size_t length);

/// Exact positive-semidefiniteness of the Toeplitz matrix [C(s-t)] of the
/// given order, by rational LDL^T pivots.
bool covariance_psd_check(const CovarianceSequence& cov, std::size_t order);

struct GaussianSamplerInfo {
  std::size_t circulant_size = 0;
  double min_eigenvalue = 0.0;
  double clipped_mass = 0.0;  // total negative mass clipped by the repair
};

/// Stationary Gaussian sampler via circulant embedding of the Toeplitz
/// covariance, synthesized spectrally. Deterministic per seed; tiny negative
/// circulant eigenvalues are clipped under the repair tolerance, larger ones
/// are rejected.
class GaussianSampler {
 public:
  GaussianSampler(const CovarianceSequence& cov, std::size_t length,
                  double repair_tolerance = 1e-12);

  std::size_t length() const { return length_; }
  const GaussianSamplerInfo& info() const { return info_; }

  /// One stationary sample path of `length` values for the given draw index.
  std::vector<double> sample(std::uint64_t seed, std::uint64_t draw) const;

 private:
  std::size_t length_;
  std::size_t circ_;
  std::vector<double> amp_;  // sqrt(lambda_v / V)
  GaussianSamplerInfo info_;
};

/// Convenience wrapper: `count` independent paths, deterministic per seed.
std::vector<std::vector<double>> gaussian_sample(const CovarianceSequence& cov, std::size_t length,
                                                 std::uint64_t seed, std::size_t count);

}  // namespace mixlab
