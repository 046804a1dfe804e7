#include <doctest.h>

#include "mixlab/errors.hpp"
#include "mixlab/riesz.hpp"

#include <cmath>

using namespace mixlab;

namespace {

SpectralMeasure half_measure(std::vector<BigInt> freqs) {
  std::vector<ComplexRational> c(freqs.size(), ComplexRational{Rational(1, 2), 0});
  return SpectralMeasure(DissociatedSequence(std::move(freqs)), std::move(c));
}

}  // namespace

TEST_CASE("exact coefficients of the two-frequency product") {
  auto sigma = half_measure({5, 125});
  CHECK(fourier_coefficient(sigma, 0).re == 1);
  CHECK(fourier_coefficient(sigma, 5).re == Rational(1, 2));
  CHECK(fourier_coefficient(sigma, 130).re == Rational(1, 4));
  CHECK(fourier_coefficient(sigma, 120).re == Rational(1, 4));  // 125 - 5
  CHECK(fourier_coefficient(sigma, 7).is_zero());
  CHECK(fourier_coefficient(sigma, -5).re == Rational(1, 2));
}

TEST_CASE("conjugation on negative digits") {
  SpectralMeasure sigma(DissociatedSequence({5, 125}),
                        {{Rational(1, 3), Rational(1, 4)}, {Rational(1, 2), 0}});
  auto plus = fourier_coefficient(sigma, 5);
  auto minus = fourier_coefficient(sigma, -5);
  CHECK(plus.re == Rational(1, 3));
  CHECK(plus.im == Rational(1, 4));
  CHECK(minus.re == Rational(1, 3));
  CHECK(minus.im == Rational(-1, 4));
  // mixed word 120 = 125 - 5 uses conj(c_0) * c_1
  auto w = fourier_coefficient(sigma, 120);
  CHECK(w.re == Rational(1, 6));
  CHECK(w.im == Rational(-1, 8));
}

TEST_CASE("coefficient bound follows word length") {
  auto sigma = half_measure({5, 125, 3125, 78125});
  for (const BigInt& m : {BigInt(130), BigInt(3250), BigInt(81255), BigInt(81375)}) {
    auto len = word_length(sigma, m);
    REQUIRE(len.has_value());
    auto c = fourier_coefficient(sigma, m);
    Rational bound = 1;
    for (unsigned i = 0; i < *len; ++i) bound /= 2;
    CHECK(c.re <= bound);
    CHECK(c.re > 0);
  }
}

TEST_CASE("coefficient rejects invalid measures") {
  CHECK_THROWS_AS(SpectralMeasure(DissociatedSequence({5, 125}),
                                  {{Rational(2, 3), 0}, {Rational(1, 2), 0}}),
                  ConfigError);
  CHECK_THROWS_AS(SpectralMeasure(DissociatedSequence({5, 125}), {{Rational(1, 2), 0}}),
                  ConfigError);
}

TEST_CASE("integration oracle matches exact coefficients") {
  auto sigma = half_measure({5, 125});
  auto v130 = integration_oracle(sigma, 130);
  CHECK(std::abs(v130.real() - 0.25) < 1e-10);
  CHECK(std::abs(v130.imag()) < 1e-10);

  auto beyond = integration_oracle(sigma, 1000);  // past the polynomial degree
  CHECK(std::abs(beyond.real()) < 1e-10);

  SpectralMeasure third(DissociatedSequence({5}), {{Rational(1, 3), 0}});
  auto v5 = integration_oracle(third, 5);
  CHECK(std::abs(v5.real() - 1.0 / 3.0) < 1e-10);

  // complex coefficient: oracle sees the conjugate at -m
  SpectralMeasure cplx(DissociatedSequence({4}), {{Rational(1, 4), Rational(1, 3)}});
  auto plus = integration_oracle(cplx, 4);
  CHECK(std::abs(plus.real() - 0.25) < 1e-10);
  CHECK(std::abs(plus.imag() - 1.0 / 3.0) < 1e-10);
}

TEST_CASE("batched oracle agrees with the single-m oracle") {
  auto sigma = half_measure({5, 125});
  auto batch = integration_oracle_batch(sigma, 300);
  for (std::int64_t m = -300; m <= 300; m += 7) {
    auto single = integration_oracle(sigma, m);
    auto b = batch[static_cast<std::size_t>(m + 300)];
    CHECK(std::abs(single.real() - b.real()) < 1e-9);
    CHECK(std::abs(single.imag() - b.imag()) < 1e-9);
  }
}

TEST_CASE("support identity against the set module") {
  auto sigma = half_measure({5, 125});
  auto support = riesz_support(sigma.freqs, std::nullopt, 0, {-300, 300});
  for (BigInt m = -300; m <= 300; ++m) {
    bool in_support = std::binary_search(support.begin(), support.end(), m);
    CHECK(!fourier_coefficient(sigma, m).is_zero() == in_support);
  }
}

TEST_CASE("mixing verdict along index sets") {
  auto sigma = half_measure({5, 125, 3125});

  // along the frequencies themselves every entry is a witness
  std::vector<BigInt> freqs = {5, 125, 3125};
  auto along_freqs = mixing_verdict_along(sigma, IndexSet::explicit_set(freqs), {0, 4000});
  CHECK(along_freqs.hits.size() == 3);
  CHECK(along_freqs.witnesses.size() == 3);
  for (const auto& w : along_freqs.witnesses) CHECK(w.coefficient.re == Rational(1, 2));
  CHECK(along_freqs.consistent_in_window);

  // empty set: vacuous
  auto vacuous = mixing_verdict_along(sigma, IndexSet::explicit_set({}), {0, 4000});
  CHECK(vacuous.hits.empty());

  // squares within a window: exact hit list cross-checked by brute force
  auto squares = mixing_verdict_along(sigma, IndexSet::squares(), {0, 10000});
  auto support = riesz_support(sigma.freqs, std::nullopt, 0, {0, 10000});
  std::size_t brute = 0;
  for (const auto& s : support) {
    if (IndexSet::squares().contains(s)) ++brute;
  }
  CHECK(squares.hits.size() == brute);
}

TEST_CASE("gaussian covariance from real measures") {
  auto sigma = half_measure({5, 125});
  auto cov = gaussian_covariance(sigma, 131);
  CHECK(cov.values[0] == 1);
  CHECK(cov.values[5] == Rational(1, 2));
  CHECK(cov.values[120] == Rational(1, 4));
  CHECK(cov.values[125] == Rational(1, 2));
  CHECK(cov.values[130] == Rational(1, 4));
  CHECK(cov.values[7] == 0);
  CHECK(cov.at(-5) == Rational(1, 2));

  SpectralMeasure cplx(DissociatedSequence({5}), {{Rational(1, 4), Rational(1, 4)}});
  CHECK_THROWS_AS(gaussian_covariance(cplx, 10), PreconditionError);
}

TEST_CASE("covariance PSD spot checks") {
  auto sigma = half_measure({5, 125});
  auto cov = gaussian_covariance(sigma, 16);
  CHECK(covariance_psd_check(cov, 8));
  CHECK(covariance_psd_check(cov, 16));

  CovarianceSequence white;
  white.values = {Rational(1), Rational(0), Rational(0)};
  CHECK(covariance_psd_check(white, 3));

  CovarianceSequence bad;
  bad.values = {Rational(1), Rational(2)};
  CHECK(!covariance_psd_check(bad, 2));
}

TEST_CASE("sampler determinism and white-noise sanity") {
  CovarianceSequence white;
  white.values.assign(8, Rational(0));
  white.values[0] = 1;
  GaussianSampler sampler(white, 8);
  auto a = sampler.sample(42, 0);
  auto b = sampler.sample(42, 0);
  CHECK(a == b);
  auto c = sampler.sample(43, 0);
  CHECK(a != c);

  // empirical lag-1 covariance of white noise decays like 1/sqrt(N)
  const std::size_t N = 20000;
  double acc0 = 0, acc1 = 0;
  for (std::size_t i = 0; i < N; ++i) {
    auto x = sampler.sample(7, i);
    acc0 += x[0] * x[0];
    acc1 += x[0] * x[1];
  }
  CHECK(std::abs(acc0 / N - 1.0) < 0.05);
  CHECK(std::abs(acc1 / N) < 0.05);
}

TEST_CASE("sampler reproduces a riesz covariance within three standard errors") {
  SpectralMeasure sigma(DissociatedSequence({5}), {{Rational(1, 2), 0}});
  auto cov = gaussian_covariance(sigma, 8);
  GaussianSampler sampler(cov, 8);
  const std::size_t N = 20000;
  double acc = 0, acc_sq = 0;
  for (std::size_t i = 0; i < N; ++i) {
    auto x = sampler.sample(1234, i);
    double prod = x[0] * x[5];
    acc += prod;
    acc_sq += prod * prod;
  }
  double mean = acc / N;
  double var = acc_sq / N - mean * mean;
  double se = std::sqrt(var / N);
  CHECK(std::abs(mean - 0.5) < 3 * se);
}

TEST_CASE("sampler rejects non-psd covariances and reports repairs") {
  CovarianceSequence bad;
  bad.values = {Rational(1), Rational(9, 10), Rational(-9, 10), Rational(9, 10)};
  // strongly oscillating covariance: circulant eigenvalues go negative
  CHECK_THROWS_AS(GaussianSampler(bad, 4), PreconditionError);

  auto sigma = half_measure({5, 125});
  auto cov = gaussian_covariance(sigma, 131);
  GaussianSampler good(cov, 131);
  CHECK(good.info().min_eigenvalue > -1e-9);
  CHECK(good.info().circulant_size >= 262);
}

TEST_CASE("length-1 samples are standard normals") {
  CovarianceSequence unit;
  unit.values = {Rational(1)};
  GaussianSampler sampler(unit, 1);
  const std::size_t N = 20000;
  double acc = 0, acc2 = 0;
  for (std::size_t i = 0; i < N; ++i) {
    auto x = sampler.sample(5, i);
    REQUIRE(x.size() == 1);
    acc += x[0];
    acc2 += x[0] * x[0];
  }
  CHECK(std::abs(acc / N) < 0.03);
  CHECK(std::abs(acc2 / N - 1.0) < 0.05);
}

TEST_CASE("spectral documents round-trip byte-stable") {
  SpectralMeasure sigma(DissociatedSequence({5, 125}),
                        {{Rational(1, 2), 0}, {Rational(1, 3), Rational(-1, 5)}});
  std::string doc = sigma.to_json();
  auto parsed = SpectralMeasure::from_json(doc);
  CHECK(parsed.to_json() == doc);
  CHECK(parsed.freqs.terms == sigma.freqs.terms);
}
