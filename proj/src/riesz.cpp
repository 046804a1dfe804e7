#include "mixlab/riesz.hpp"

#include "mixlab/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace mixlab {

std::string complex_to_string(const ComplexRational& c) {
  return rational_to_string(c.re) + (c.im < 0 ? "-" : "+") + rational_to_string(Rational(abs(c.im))) + "i";
}

SpectralMeasure::SpectralMeasure(DissociatedSequence f, std::vector<ComplexRational> c)
    : freqs(std::move(f)), coeffs(std::move(c)) {
  if (freqs.size() != coeffs.size()) {
    throw ConfigError("spectral measure needs one coefficient per frequency");
  }
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    Rational norm2 = coeffs[j].re * coeffs[j].re + coeffs[j].im * coeffs[j].im;
    if (norm2 > Rational(1, 4)) {
      throw ConfigError("|c_" + std::to_string(j) + "| exceeds 1/2");
    }
  }
}

bool SpectralMeasure::all_real() const {
  for (const auto& c : coeffs) {
    if (!c.is_real()) return false;
  }
  return true;
}

SpectralMeasure SpectralMeasure::prefix(std::size_t k) const {
  if (k > factor_count()) throw PreconditionError("prefix beyond factor count");
  std::vector<BigInt> f(freqs.terms.begin(), freqs.terms.begin() + static_cast<long>(k));
  std::vector<ComplexRational> c(coeffs.begin(), coeffs.begin() + static_cast<long>(k));
  return SpectralMeasure(DissociatedSequence(std::move(f)), std::move(c));
}

std::string SpectralMeasure::to_json() const {
  nlohmann::json j;
  j["format"] = "mixlab-spectral/1";
  auto f = nlohmann::json::array();
  for (const auto& v : freqs.terms) f.push_back(v.str());
  j["freqs"] = f;
  auto c = nlohmann::json::array();
  for (const auto& v : coeffs) {
    c.push_back(nlohmann::json::array({rational_to_string(v.re), rational_to_string(v.im)}));
  }
  j["coeffs"] = c;
  return j.dump(2) + "\n";
}

SpectralMeasure SpectralMeasure::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("spectral document is not valid JSON: ") + e.what());
  }
  if (j.value("format", "") != "mixlab-spectral/1") {
    throw ConfigError("not a mixlab-spectral/1 document");
  }
  std::vector<BigInt> f;
  for (const auto& v : j.at("freqs")) f.push_back(parse_bigint(v.get<std::string>()));
  std::vector<ComplexRational> c;
  for (const auto& v : j.at("coeffs")) {
    c.push_back({parse_rational(v.at(0).get<std::string>()),
                 parse_rational(v.at(1).get<std::string>())});
  }
  return SpectralMeasure(DissociatedSequence(std::move(f)), std::move(c));
}

SpectralMeasure SpectralMeasure::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

void SpectralMeasure::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << to_json();
}

std::optional<std::vector<int>> decompose_over_freqs(const DissociatedSequence& freqs,
                                                     const BigInt& m) {
  const auto& n = freqs.terms;
  std::vector<BigInt> prefix(n.size() + 1, 0);
  for (std::size_t i = 0; i < n.size(); ++i) prefix[i + 1] = prefix[i] + n[i];
  std::vector<int> digits(n.size(), 0);
  BigInt rem = m;
  // Dissociation forces each digit from the top: |rem| > prefix[j] pins the
  // sign of the j-th digit, |rem| <= prefix[j] pins it to zero.
  for (std::size_t j = n.size(); j-- > 0;) {
    if (abs(rem) > prefix[j]) {
      digits[j] = rem > 0 ? 1 : -1;
      rem -= digits[j] * n[j];
    }
  }
  if (rem != 0) return std::nullopt;
  return digits;
}

ComplexRational fourier_coefficient(const SpectralMeasure& sigma, const BigInt& m) {
  auto digits = decompose_over_freqs(sigma.freqs, m);
  if (!digits) return {0, 0};
  ComplexRational out{1, 0};
  for (std::size_t j = 0; j < digits->size(); ++j) {
    if ((*digits)[j] == 1) {
      out = out * sigma.coeffs[j];
    } else if ((*digits)[j] == -1) {
      out = out * sigma.coeffs[j].conj();
    }
  }
  return out;
}

std::optional<unsigned> word_length(const SpectralMeasure& sigma, const BigInt& m) {
  auto digits = decompose_over_freqs(sigma.freqs, m);
  if (!digits) return std::nullopt;
  unsigned len = 0;
  for (int d : *digits) len += d != 0 ? 1 : 0;
  return len;
}

namespace {

double density_at(const SpectralMeasure& sigma, const std::vector<std::int64_t>& freqs_i64,
                  std::int64_t g, std::int64_t grid) {
  double f = 1.0;
  for (std::size_t j = 0; j < freqs_i64.size(); ++j) {
    std::int64_t phase = (freqs_i64[j] % grid) * g % grid;
    double theta = 2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(grid);
    double re = to_double(sigma.coeffs[j].re);
    double im = to_double(sigma.coeffs[j].im);
    f *= 1.0 + 2.0 * (re * std::cos(theta) - im * std::sin(theta));
  }
  return f;
}

std::vector<std::int64_t> freqs_as_i64(const SpectralMeasure& sigma) {
  std::vector<std::int64_t> f;
  for (const auto& v : sigma.freqs.terms) f.push_back(to_i64(v, "frequency"));
  return f;
}

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::logic_error("fft size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

}  // namespace

std::complex<double> integration_oracle(const SpectralMeasure& sigma_prefix, const BigInt& m) {
  if (sigma_prefix.factor_count() > 8) {
    throw PreconditionError("integration oracle intended for small factor counts");
  }
  auto freqs = freqs_as_i64(sigma_prefix);
  std::int64_t degree = 0;
  for (auto f : freqs) degree += f;
  std::int64_t mi = to_i64(m, "oracle order");
  std::int64_t grid = 2 * degree + 2 * std::llabs(mi) + 1;
  if (grid < 8) grid = 8;
  // Kahan-compensated accumulation keeps the quadrature near machine-exact.
  long double re = 0, im = 0;
  for (std::int64_t g = 0; g < grid; ++g) {
    double f = density_at(sigma_prefix, freqs, g, grid);
    std::int64_t phase = ((mi % grid) * g % grid + grid) % grid;
    long double theta = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(phase) /
                        static_cast<long double>(grid);
    re += f * std::cos(theta);
    im -= f * std::sin(theta);
  }
  return {static_cast<double>(re / grid), static_cast<double>(im / grid)};
}

std::vector<std::complex<double>> integration_oracle_batch(const SpectralMeasure& sigma_prefix,
                                                           std::int64_t m_max) {
  auto freqs = freqs_as_i64(sigma_prefix);
  std::int64_t degree = 0;
  for (auto f : freqs) degree += f;
  std::size_t grid = 8;
  while (static_cast<std::int64_t>(grid) < 2 * (degree + m_max) + 2) grid <<= 1;
  std::vector<std::complex<double>> a(grid);
  for (std::size_t g = 0; g < grid; ++g) {
    a[g] = density_at(sigma_prefix, freqs, static_cast<std::int64_t>(g),
                      static_cast<std::int64_t>(grid));
  }
  fft_radix2(a, false);
  // coefficient at m = (1/G) * sum_g f(z_g) z_g^{-m} = forward-FFT bin m
  std::vector<std::complex<double>> out(static_cast<std::size_t>(2 * m_max + 1));
  for (std::int64_t m = -m_max; m <= m_max; ++m) {
    std::size_t bin = static_cast<std::size_t>((m % static_cast<std::int64_t>(grid) +
                                                static_cast<std::int64_t>(grid)) %
                                               static_cast<std::int64_t>(grid));
    out[static_cast<std::size_t>(m + m_max)] = a[bin] / static_cast<double>(grid);
  }
  return out;
}

SpectralMixingReport mixing_verdict_along(const SpectralMeasure& sigma, const IndexSet& M,
                                          const Window& window) {
  if (window.empty()) throw PreconditionError("mixing_verdict_along: empty window");
  SpectralMixingReport report;
  for (const auto& m : M.enumerate(window)) {
    ComplexRational c = fourier_coefficient(sigma, m);
    if (c.is_zero()) continue;
    MixingVerdictEntry e;
    e.m = m;
    e.coefficient = c;
    e.word_length = *word_length(sigma, m);
    // decay per word length: |c|^2 <= (1/4)^len, exact
    Rational norm2 = c.re * c.re + c.im * c.im;
    Rational bound = 1;
    for (unsigned t = 0; t < e.word_length; ++t) bound /= 4;
    if (norm2 > bound) report.consistent_in_window = false;
    report.hits.push_back(std::move(e));
  }
  for (std::size_t j = 0; j < sigma.factor_count(); ++j) {
    const BigInt& f = sigma.freqs.terms[j];
    if (f >= window.lo && f <= window.hi) {
      MixingVerdictEntry e;
      e.m = f;
      e.coefficient = sigma.coeffs[j];
      e.word_length = 1;
      report.witnesses.push_back(std::move(e));
    }
  }
  report.note = report.hits.empty()
                    ? "no members of M carry spectral mass in the window"
                    : std::to_string(report.hits.size()) +
                          " members of M carry spectral mass in the window (listed exactly)";
  return report;
}

Rational CovarianceSequence::at(const BigInt& t) const {
  BigInt a = abs(t);
  if (a >= BigInt(values.size())) {
    throw PreconditionError("covariance lag " + t.str() + " outside window of " +
                            std::to_string(values.size()));
  }
  return values[a.convert_to<std::size_t>()];
}

CovarianceSequence gaussian_covariance(const SpectralMeasure& sigma, std::size_t length) {
  if (!sigma.all_real()) {
    throw PreconditionError(
        "gaussian covariance requires real coefficients (pure-measure mode allows complex)");
  }
  CovarianceSequence cov;
  cov.provenance = "riesz(" + std::to_string(sigma.factor_count()) + " factors)";
  cov.values.reserve(length);
  for (std::size_t t = 0; t < length; ++t) {
    cov.values.push_back(fourier_coefficient(sigma, BigInt(t)).re);
  }
  return cov;
}

bool covariance_psd_check(const CovarianceSequence& cov, std::size_t order) {
  if (order > cov.size()) throw PreconditionError("order exceeds covariance window");
  // Rational LDL^T with zero-pivot handling.
  std::vector<std::vector<Rational>> a(order, std::vector<Rational>(order));
  for (std::size_t i = 0; i < order; ++i) {
    for (std::size_t j = 0; j < order; ++j) {
      a[i][j] = cov.values[i > j ? i - j : j - i];
    }
  }
  for (std::size_t k = 0; k < order; ++k) {
    if (a[k][k] < 0) return false;
    if (a[k][k] == 0) {
      for (std::size_t i = k + 1; i < order; ++i) {
        if (a[i][k] != 0) return false;  // zero pivot with nonzero column
      }
      continue;
    }
    for (std::size_t i = k + 1; i < order; ++i) {
      Rational f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < order; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return true;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

GaussianSampler::GaussianSampler(const CovarianceSequence& cov, std::size_t length,
                                 double repair_tolerance)
    : length_(length) {
  if (length < 1) throw PreconditionError("sample length must be >= 1");
  if (cov.size() < length) {
    throw PreconditionError("covariance window " + std::to_string(cov.size()) +
                            " shorter than sample length " + std::to_string(length));
  }
  circ_ = 8;
  while (circ_ < 2 * length) circ_ <<= 1;
  const std::size_t V = circ_;
  // Circulant eigenvalues of the symmetrized first row.
  std::vector<double> c(length);
  for (std::size_t t = 0; t < length; ++t) c[t] = to_double(cov.values[t]);
  std::vector<double> lambda(V);
  double max_abs = 0;
  for (std::size_t v = 0; v < V; ++v) {
    double acc = c[0];
    for (std::size_t t = 1; t < length; ++t) {
      acc += 2.0 * c[t] *
             std::cos(2.0 * std::numbers::pi * static_cast<double>(v * t % V) /
                      static_cast<double>(V));
    }
    lambda[v] = acc;
    max_abs = std::max(max_abs, std::fabs(acc));
  }
  info_.circulant_size = V;
  info_.min_eigenvalue = *std::min_element(lambda.begin(), lambda.end());
  double floor = -repair_tolerance * std::max(max_abs, 1.0);
  for (auto& l : lambda) {
    if (l < floor) {
      throw PreconditionError("circulant embedding not PSD within repair tolerance: eigenvalue " +
                              std::to_string(l));
    }
    if (l < 0) {
      info_.clipped_mass += -l;
      l = 0;
    }
  }
  amp_.resize(V);
  for (std::size_t v = 0; v < V; ++v) amp_[v] = std::sqrt(lambda[v] / static_cast<double>(V));
}

std::vector<double> GaussianSampler::sample(std::uint64_t seed, std::uint64_t draw) const {
  const std::size_t V = circ_;
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(draw + 0x51a5c0de)));
  // Explicit Box-Muller keeps the stream portable across standard libraries.
  auto normal_pair = [&rng](double& x, double& y) {
    double u1, u2;
    do {
      u1 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    } while (u1 <= 0.0);
    u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    x = r * std::cos(a);
    y = r * std::sin(a);
  };
  std::vector<double> xi(V), eta(V);
  for (std::size_t v = 0; v < V; v += 1) {
    double a, b;
    normal_pair(a, b);
    xi[v] = a;
    eta[v] = b;
  }
  std::vector<double> out(length_, 0.0);
  for (std::size_t v = 0; v < V; ++v) {
    if (amp_[v] == 0.0) continue;
    const double step = 2.0 * std::numbers::pi * static_cast<double>(v) / static_cast<double>(V);
    const double cs = std::cos(step), sn = std::sin(step);
    double cp = 1.0, sp = 0.0;  // cos/sin of step * p, advanced incrementally
    const double ax = amp_[v] * xi[v], ae = amp_[v] * eta[v];
    for (std::size_t p = 0; p < length_; ++p) {
      out[p] += ax * cp + ae * sp;
      double cn = cp * cs - sp * sn;
      sp = cp * sn + sp * cs;
      cp = cn;
    }
  }
  return out;
}

std::vector<std::vector<double>> gaussian_sample(const CovarianceSequence& cov, std::size_t length,
                                                 std::uint64_t seed, std::size_t count) {
  GaussianSampler sampler(cov, length);
  std::vector<std::vector<double>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sampler.sample(seed, i));
  return out;
}

}  // namespace mixlab
