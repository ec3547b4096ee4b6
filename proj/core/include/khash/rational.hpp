#pragma once

#include <concepts>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace khash {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Scalar types the closed-form evaluators are instantiated for: `double` for
/// pipelines, `Rational` for exact identities.
template <class T>
concept Field = std::same_as<T, double> || std::same_as<T, Rational>;

template <Field T>
[[nodiscard]] T ipow(T base, int exponent) {
  T result{1};
  for (int i = 0; i < exponent; ++i) result *= base;
  return result;
}

[[nodiscard]] inline BigInt factorial(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

/// b (b - 1) ... (b - m + 1); equals 1 when m = 0.
[[nodiscard]] inline BigInt falling_factorial(int b, int m) {
  BigInt r = 1;
  for (int i = 0; i < m; ++i) r *= (b - i);
  return r;
}

[[nodiscard]] inline BigInt binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  BigInt out = 1;
  for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

template <Field T>
[[nodiscard]] T from_integer(const BigInt& v) {
  if constexpr (std::same_as<T, double>) {
    return v.convert_to<double>();
  } else {
    return Rational(v);
  }
}

[[nodiscard]] inline double to_double(const Rational& r) {
  return r.convert_to<double>();
}

[[nodiscard]] inline std::string to_string(const Rational& r) { return r.str(); }

/// log2(r) when it is an integer (r = 2^m for integer m), otherwise nullopt.
[[nodiscard]] inline std::optional<int> exact_log2(const Rational& r) {
  if (r <= 0) return std::nullopt;
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  auto power_of_two = [](const BigInt& v) -> std::optional<int> {
    if (v <= 0 || (v & (v - 1)) != 0) return std::nullopt;
    return static_cast<int>(boost::multiprecision::msb(v));
  };
  auto pn = power_of_two(num);
  auto pd = power_of_two(den);
  if (!pn || !pd) return std::nullopt;
  return *pn - *pd;
}

}  // namespace khash
