#include "khash/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace khash {

double trivial_upper(int k) {
  detail::require_alphabet(k, 2, "trivial_upper");
  return std::log2(static_cast<double>(k) / (k - 1));
}

double prob_lower(int k) {
  detail::require_alphabet(k, 2, "prob_lower");
  // 1 - k!/k^k is formed exactly; only the final log is floating point.
  const Rational miss = Rational(1) - Rational(factorial(k)) / ipow(Rational(k), k);
  return -std::log2(to_double(miss)) / (k - 1);
}

double subcode_exponent(int k) {
  detail::require_alphabet(k, 4, "subcode_exponent");
  return std::log2(static_cast<double>(k) / (k - 3));
}

double r_unbal(int k, double gamma) {
  const double alpha = fk_alpha(k);
  return alpha / (1.0 + eps(k, gamma) / subcode_exponent(k));
}

std::optional<Rational> r_unbal_exact(int k, const Rational& gamma) {
  if (eps(k, gamma) != 0) return std::nullopt;
  return fk_alpha<Rational>(k);
}

double r_bal(int k, double theta) {
  if (theta < 0.0) throw std::domain_error("r_bal: theta must be >= 0");
  return theta / (1.0 + theta / subcode_exponent(k));
}

ClampedTheta theta_clamped(int k, double gamma) {
  detail::require_alphabet(k, 4, "theta_clamped");
  const double lo = 1.0 / k;
  const double hi = 1.0 / (k - 1);
  ClampedTheta best{q_poly(k, gamma, lo), lo};
  auto consider = [&](double beta) {
    const double v = q_poly(k, gamma, beta);
    if (v > best.value) best = {v, beta};
  };
  consider(hi);
  if (static_cast<double>(k * k - 2 * k) * gamma > 1.0) {
    const double b = beta_star(k, gamma);
    if (b > lo && b < hi) consider(b);
  }
  return best;
}

bool below_concavity_range(int k, double gamma) {
  return gamma < 1.0 / (2 * k - 3);
}

KmBound km_bound(int b, int k) {
  detail::require_alphabet(k, 2, "km_bound");
  if (b < k) throw std::invalid_argument("km_bound: requires b >= k");
  KmBound out;
  out.value = std::numeric_limits<double>::infinity();
  Rational best_coef;
  Rational best_arg;
  for (int j = 0; j <= k - 2; ++j) {
    const Rational coef =
        Rational(falling_factorial(b, j + 1)) / ipow(Rational(b), j + 1);
    const Rational arg(BigInt(b - j), BigInt(k - j - 1));
    const double term = to_double(coef) * std::log2(to_double(arg));
    out.terms.push_back(term);
    if (term < out.value) {
      out.value = term;
      out.j = j;
      best_coef = coef;
      best_arg = arg;
    }
  }
  if (auto lg = exact_log2(best_arg)) {
    out.exact = best_coef * (*lg);
    out.value = to_double(*out.exact);
  }
  return out;
}

double arikan_alpha(int b, int k, int j, double x) {
  if (j < 2 || j > k - 2) throw std::invalid_argument("arikan_alpha: j out of range");
  const double log_b = std::log2(static_cast<double>(b));
  const double falling =
      to_double(Rational(falling_factorial(b, j)) / ipow(Rational(b), j));
  const double tail = (1.0 - x / log_b) * falling *
                      std::log2(static_cast<double>(b - j) / (k - 1 - j));
  if (j <= b - k) {
    return static_cast<double>(b - j) / (k - 1) * std::exp2(-x) * tail;
  }
  return (1.0 - static_cast<double>(j) / (b - k + 1) * (1.0 - std::exp2(-x))) * tail;
}

double arikan_bound(int b, int k, double tolerance) {
  if (b < k) throw std::invalid_argument("arikan_bound: requires b >= k");
  if (k < 4) {
    throw std::invalid_argument("arikan_bound: constraint range j = 2..k-2 is empty for k < 4");
  }
  auto feasible = [&](double x) {
    for (int j = 2; j <= k - 2; ++j) {
      if (x > arikan_alpha(b, k, j, x)) return false;
    }
    return true;
  };
  if (!feasible(0.0)) throw NumericFailure("arikan_bound: x = 0 is infeasible");
  double lo = 0.0;
  double hi = std::log2(static_cast<double>(b));
  if (feasible(hi)) return hi;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace khash
