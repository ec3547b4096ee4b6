#include "khash/pipeline.hpp"

#include <cmath>
#include <stdexcept>

#include "khash/bounds.hpp"
#include "khash/errors.hpp"

namespace khash {

double balance_gap(int k, double gamma) {
  return r_bal(k, theta_closed(k, gamma)) - r_unbal(k, gamma);
}

ThresholdSolution solve_threshold(int k, const ThresholdOptions& options) {
  if (k < 4) throw std::invalid_argument("solve_threshold: requires k >= 4");
  ThresholdSolution sol;
  sol.k = k;
  const double pole = 1.0 / (k * k - 2 * k);
  double hi = 1.0 / k;
  double lo = 1.0 / (2 * k - 3);
  if (!(balance_gap(k, hi) < 0.0)) {
    throw NumericFailure("solve_threshold: balance gap is not negative at 1/k");
  }
  while (!(balance_gap(k, lo) > 0.0)) {
    if (sol.widenings == options.max_widenings) {
      throw NumericFailure("solve_threshold: no sign change found above the pole");
    }
    lo = pole + 0.5 * (lo - pole);
    ++sol.widenings;
  }
  sol.lo = lo;
  sol.hi = hi;
  for (int it = 0; it < options.max_iterations && hi - lo > options.gamma_tolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    (balance_gap(k, mid) > 0.0 ? lo : hi) = mid;
  }
  sol.gamma_star = 0.5 * (lo + hi);
  sol.rate = r_unbal(k, sol.gamma_star);
  sol.residual = std::abs(balance_gap(k, sol.gamma_star));
  sol.below_concavity_range = below_concavity_range(k, sol.gamma_star);
  return sol;
}

ConjectureVerdict verify_conjecture(int k, double gamma, const OptimizerConfig& config,
                                    double tolerance) {
  const SelectionSweep sweep = maximize_all_selections(k, gamma, config);
  const TopSelection conj = conjectured_selection(k);

  ConjectureVerdict v;
  v.k = k;
  v.gamma = gamma;
  v.tolerance = tolerance;
  v.conjectured_id = conj.id();
  v.converged = true;
  bool found = false;
  for (const auto& entry : sweep.per_selection) {
    const auto& r = entry.result;
    v.per_selection.push_back({entry.selection.id(), r.value, r.starts_converged,
                               r.starts_total, r.best_converged, r.argmax});
    v.converged = v.converged && r.best_converged;
    if (entry.selection == conj) {
      v.conjectured_value = r.value;
      found = true;
    } else if (!v.best_other_value || r.value > *v.best_other_value) {
      v.best_other_value = r.value;
    }
  }
  if (!found) throw std::logic_error("verify_conjecture: conjectured selection not enumerated");
  v.margin = v.best_other_value ? v.conjectured_value - *v.best_other_value : 0.0;
  v.holds = v.margin >= -tolerance;
  return v;
}

std::vector<ContinuityRow> continuity_probe(int k, std::span<const double> gammas,
                                            const OptimizerConfig& config, bool with_phi) {
  const double pole = 1.0 / (k * k - 2 * k);
  std::vector<ContinuityRow> rows;
  for (double gamma : gammas) {
    if (!(gamma > 0.0) || gamma > 1.0 / k) {
      throw std::domain_error("continuity_probe: gamma must lie in (0, 1/k]");
    }
    const SelectionSweep sweep = maximize_all_selections(k, gamma, config);
    ContinuityRow row;
    row.gamma = gamma;
    row.theta_hat = sweep.max_value();
    row.best_selection = sweep.per_selection[sweep.best_index].selection.id();
    if (gamma > pole) {
      row.theta_closed = theta_closed(k, gamma);
      row.theta_clamped = theta_clamped(k, gamma).value;
    }
    if (with_phi) row.theta_phi = maximize(phi_objective(k, gamma), config).value;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string to_string(ThetaMode mode) {
  return mode == ThetaMode::kClosed ? "closed" : "verified";
}

ThetaMode parse_theta_mode(const std::string& text) {
  if (text == "closed") return ThetaMode::kClosed;
  if (text == "verified") return ThetaMode::kVerified;
  throw std::invalid_argument("unknown theta mode '" + text + "'");
}

BoundReport compute_beta(int k, const BetaOptions& options) {
  BoundReport rep;
  rep.k = k;
  rep.mode = options.mode;
  rep.alpha = fk_alpha(k);
  rep.alpha_exact = to_string(fk_alpha<Rational>(k));
  rep.threshold = solve_threshold(k, options.threshold);

  const double g = rep.threshold.gamma_star;
  rep.theta_closed_at_gamma_star = theta_closed(k, g);
  rep.theta_constrained_at_gamma_star = theta_clamped(k, g).value;
  rep.beta_star_at_gamma_star = beta_star(k, g);
  rep.beta_closed = std::max(r_unbal(k, g), r_bal(k, rep.theta_closed_at_gamma_star));
  rep.beta = rep.beta_closed;

  const bool enumerable = k <= kMaxSelectionAlphabet;
  if (options.mode == ThetaMode::kVerified && !enumerable) {
    throw std::invalid_argument("compute_beta: verified mode needs k <= 9");
  }
  if (enumerable && (options.check_conjecture || options.mode == ThetaMode::kVerified)) {
    rep.conjecture = verify_conjecture(k, g, options.optimizer, options.conjecture_tolerance);
    double theta_hat = rep.conjecture->conjectured_value;
    if (rep.conjecture->best_other_value) {
      theta_hat = std::max(theta_hat, *rep.conjecture->best_other_value);
    }
    rep.theta_verified_at_gamma_star = theta_hat;
    rep.beta_verified = std::max(r_unbal(k, g), r_bal(k, theta_hat));
    if (options.mode == ThetaMode::kVerified) rep.beta = *rep.beta_verified;
  }

  rep.references.trivial_upper = trivial_upper(k);
  rep.references.prob_lower = prob_lower(k);
  rep.references.km = km_bound(k, k).value;
  rep.references.arikan = arikan_bound(k, k);

  if (!(rep.beta < rep.alpha)) {
    throw NumericFailure("compute_beta: beta_k is not below alpha_k");
  }
  return rep;
}

}  // namespace khash
