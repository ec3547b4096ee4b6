#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "khash/errors.hpp"
#include "khash/rational.hpp"

// Closed-form rate bounds for k-hash codes. All logarithms are base 2.
//
// The polynomial and rational pieces (alpha, G, xi, Q, beta*, theta) are
// templates over `Field` so identities can be checked exactly with
// `Rational`; anything involving a logarithm is double only.

namespace khash {

namespace detail {

inline void require_alphabet(int k, int min_k, const char* what) {
  if (k < min_k) {
    throw std::invalid_argument(std::string(what) + ": alphabet size k=" +
                                std::to_string(k) + " must be >= " +
                                std::to_string(min_k));
  }
}

template <Field T>
void require_threshold(int k, const T& gamma, const char* what) {
  if (!(gamma > T(0)) || gamma > T(1) / T(k)) {
    throw std::domain_error(std::string(what) + ": threshold must lie in (0, 1/k]");
  }
}

}  // namespace detail

/// Fredman-Komlos bound k! / k^(k-1).
template <Field T = double>
[[nodiscard]] T fk_alpha(int k) {
  detail::require_alphabet(k, 2, "fk_alpha");
  return from_integer<T>(factorial(k)) / ipow(T(k), k - 1);
}

/// First-moment bound log2(k / (k - 1)).
[[nodiscard]] double trivial_upper(int k);

/// Random-coding lower bound (1 / (k - 1)) log2(1 / (1 - k!/k^k)).
[[nodiscard]] double prob_lower(int k);

/// log2(k / (k - 3)): the per-coordinate exponent of the subcode averaging.
[[nodiscard]] double subcode_exponent(int k);

/// G_k(y) = (k-1)! y^(k-2) ((k-1) - (k^2 - 2k) y) on [0, 1/(k-1)].
template <Field T>
[[nodiscard]] T g_poly(int k, const T& y) {
  detail::require_alphabet(k, 4, "g_poly");
  if (y < T(0) || y > T(1) / T(k - 1)) {
    throw std::domain_error("g_poly: y must lie in [0, 1/(k-1)]");
  }
  return from_integer<T>(factorial(k - 1)) * ipow(y, k - 2) *
         (T(k - 1) - T(k * k - 2 * k) * y);
}

/// Derivative of G_k; used by the monotonicity checks.
template <Field T>
[[nodiscard]] T g_poly_derivative(int k, const T& y) {
  detail::require_alphabet(k, 4, "g_poly_derivative");
  return from_integer<T>(factorial(k - 1)) * T((k - 1) * (k - 2)) *
         ipow(y, k - 3) * (T(1) - T(k) * y);
}

/// xi_k(gamma) = G_k((1 - gamma) / (k - 1)), the per-coordinate cap on
/// skewed coordinates.
template <Field T>
[[nodiscard]] T xi(int k, const T& gamma) {
  detail::require_alphabet(k, 4, "xi");
  detail::require_threshold(k, gamma, "xi");
  return from_integer<T>(factorial(k - 2)) * ipow(T(1) - gamma, k - 2) *
         (T(k * k - 2 * k) * gamma + T(1)) / ipow(T(k - 1), k - 2);
}

template <Field T>
[[nodiscard]] T eps(int k, const T& gamma) {
  return fk_alpha<T>(k) - xi(k, gamma);
}

/// Unbalanced-case rate bound alpha / (1 + (alpha - xi) / log2(k/(k-3))).
[[nodiscard]] double r_unbal(int k, double gamma);

/// Exact value of r_unbal when it is rational, i.e. when eps(k, gamma) = 0
/// and the bound collapses to alpha_k. nullopt otherwise.
[[nodiscard]] std::optional<Rational> r_unbal_exact(int k, const Rational& gamma);

/// Balanced-case rate bound theta / (1 + theta / log2(k/(k-3))).
[[nodiscard]] double r_bal(int k, double theta);

enum class BetaRange {
  kStrict,     ///< reject beta outside [0, 1/(k-1)]
  kUnclamped,  ///< evaluate the polynomial anywhere
};

/// Q_k^gamma(beta) = (k-1)! beta^(k-3) (beta (1 - (k^2-2k) gamma) + (k-2) gamma),
/// the conjectured functional on the profile (beta, ..., beta, 1 - (k-1) beta).
template <Field T>
[[nodiscard]] T q_poly(int k, const T& gamma, const T& beta,
                       BetaRange range = BetaRange::kStrict) {
  detail::require_alphabet(k, 4, "q_poly");
  if (range == BetaRange::kStrict && (beta < T(0) || beta > T(1) / T(k - 1))) {
    throw std::domain_error("q_poly: beta must lie in [0, 1/(k-1)]");
  }
  return from_integer<T>(factorial(k - 1)) * ipow(beta, k - 3) *
         (beta * (T(1) - T(k * k - 2 * k) * gamma) + T(k - 2) * gamma);
}

/// Stationary point (k-3) gamma / ((k^2 - 2k) gamma - 1) of q_poly.
template <Field T>
[[nodiscard]] T beta_star(int k, const T& gamma) {
  detail::require_alphabet(k, 4, "beta_star");
  const T denom = T(k * k - 2 * k) * gamma - T(1);
  if (!(denom > T(0))) {
    throw PoleError("beta_star: requires (k^2 - 2k) gamma > 1");
  }
  return T(k - 3) * gamma / denom;
}

/// Closed form Q_k^gamma(beta*) =
///   (k-1)! (k-3)^(k-3) gamma^(k-2) / ((k^2 - 2k) gamma - 1)^(k-3).
template <Field T>
[[nodiscard]] T theta_closed(int k, const T& gamma) {
  detail::require_alphabet(k, 4, "theta_closed");
  const T denom = T(k * k - 2 * k) * gamma - T(1);
  if (!(denom > T(0))) {
    throw PoleError("theta_closed: requires (k^2 - 2k) gamma > 1");
  }
  return from_integer<T>(factorial(k - 1)) * ipow(T(k - 3), k - 3) *
         ipow(gamma, k - 2) / ipow(denom, k - 3);
}

struct ClampedTheta {
  double value = 0.0;
  double beta = 0.0;
};

/// max of q_poly over beta in [1/k, 1/(k-1)]. q_poly has at most one
/// stationary point there, so the max is over the endpoints and beta*.
[[nodiscard]] ClampedTheta theta_clamped(int k, double gamma);

/// gamma below 1/(2k-3), where the concavity argument for the closed form
/// no longer applies.
[[nodiscard]] bool below_concavity_range(int k, double gamma);

/// Korner-Marton bound min_j (b^{j+1 falling} / b^{j+1}) log2((b-j)/(k-j-1)).
struct KmBound {
  double value = 0.0;
  int j = 0;
  std::vector<double> terms;      ///< term for j = 0 .. k-2
  std::optional<Rational> exact;  ///< set when the minimizing log is an integer
};

[[nodiscard]] KmBound km_bound(int b, int k);

/// Arikan's alpha_j(x) constraint function for the (b, k) problem.
[[nodiscard]] double arikan_alpha(int b, int k, int j, double x);

/// sup { x : x <= alpha_j(x) for j = 2 .. k-2 }, by bisection on [0, log2 b].
[[nodiscard]] double arikan_bound(int b, int k, double tolerance = 1e-9);

}  // namespace khash
