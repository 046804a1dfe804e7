#include "mixlab/numeric.hpp"

#include "mixlab/errors.hpp"

#include <cmath>
#include <limits>

namespace mixlab {

std::string rational_to_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

BigInt parse_bigint(std::string_view text) {
  if (text.empty()) throw ConfigError("empty integer literal");
  try {
    return BigInt(std::string(text));
  } catch (const std::exception&) {
    throw ConfigError("bad integer literal: '" + std::string(text) + "'");
  }
}

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    return Rational(parse_bigint(text));
  }
  BigInt num = parse_bigint(text.substr(0, slash));
  BigInt den = parse_bigint(text.substr(slash + 1));
  if (den == 0) throw ConfigError("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

BigInt isqrt(const BigInt& v) {
  if (v < 0) throw PreconditionError("isqrt of negative value");
  return boost::multiprecision::sqrt(v);
}

bool is_perfect_square(const BigInt& v) {
  if (v < 0) return false;
  BigInt r = isqrt(v);
  return r * r == v;
}

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod_u64(result, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1;
  }
  return result;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // This base set is a proven deterministic witness set for n < 2^64.
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 0; i < s - 1; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::optional<std::uint64_t> prime_root_of_power(const BigInt& v, unsigned exponent) {
  if (v < 2 || exponent == 0) return std::nullopt;
  if (v > BigInt(std::numeric_limits<std::uint64_t>::max())) return std::nullopt;
  std::uint64_t x = v.convert_to<std::uint64_t>();
  // Integer exponent-th root by floating guess plus local correction.
  auto ipow_fits = [&](std::uint64_t b) -> std::optional<std::uint64_t> {
    unsigned __int128 acc = 1;
    for (unsigned i = 0; i < exponent; ++i) {
      acc *= b;
      if (acc > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
    }
    return static_cast<std::uint64_t>(acc);
  };
  auto guess = static_cast<std::uint64_t>(std::pow(static_cast<double>(x), 1.0 / exponent));
  for (std::uint64_t b = (guess > 2 ? guess - 2 : 1); b <= guess + 2; ++b) {
    auto p = ipow_fits(b);
    if (p && *p == x) {
      return is_prime_u64(b) ? std::optional<std::uint64_t>(b) : std::nullopt;
    }
  }
  return std::nullopt;
}

BigInt pow_big(const BigInt& base, unsigned long exp) {
  BigInt result = 1;
  BigInt b = base;
  while (exp > 0) {
    if (exp & 1) result *= b;
    b *= b;
    exp >>= 1;
  }
  return result;
}

std::int64_t to_i64(const BigInt& v, const char* what) {
  static const BigInt lo = std::numeric_limits<std::int64_t>::min();
  static const BigInt hi = std::numeric_limits<std::int64_t>::max();
  if (v < lo || v > hi) {
    throw ResourceError(std::string(what) + " does not fit a 64-bit index: " + v.str());
  }
  return v.convert_to<std::int64_t>();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace mixlab
