#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mixlab {

// Exact arithmetic everywhere: heights are big integers, widths/measures are
// big rationals. Floating point appears only inside estimators and plots.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const BigInt& v) { return v.str(); }

/// Canonical "p/q" form, always with an explicit denominator.
std::string rational_to_string(const Rational& r);

BigInt parse_bigint(std::string_view text);
Rational parse_rational(std::string_view text);

double to_double(const Rational& r);

/// Floor of the integer square root.
BigInt isqrt(const BigInt& v);
bool is_perfect_square(const BigInt& v);

/// Deterministic Miller-Rabin, valid for the full uint64 range.
bool is_prime_u64(std::uint64_t n);

/// If v = p^exponent for a prime p, returns p.
std::optional<std::uint64_t> prime_root_of_power(const BigInt& v, unsigned exponent);

BigInt pow_big(const BigInt& base, unsigned long exp);

/// Checked narrowing for realized-scale indices.
std::int64_t to_i64(const BigInt& v, const char* what);

/// FNV-1a over a byte string; used to stamp outputs with a config hash.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace mixlab
