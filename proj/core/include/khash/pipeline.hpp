#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "khash/simplex.hpp"

// Threshold balancing and the assembled bound beta_k.
//
// The threshold gamma* equalizes the unbalanced-case bound r_unbal(gamma) and
// the balanced-case bound r_bal(theta_closed(gamma)). beta_k is their common
// value. The conjectured functional is checked against all other top
// selections at gamma* by multi-start optimization.

namespace khash {

struct ThresholdOptions {
  double gamma_tolerance = 1e-12;
  int max_iterations = 200;
  int max_widenings = 60;
};

struct ThresholdSolution {
  int k = 0;
  double gamma_star = 0.0;
  double rate = 0.0;      ///< r_unbal(k, gamma*)
  double lo = 0.0;        ///< sign-change bracket the bisection started from
  double hi = 0.0;
  double residual = 0.0;  ///< |r_unbal - r_bal| at gamma*
  int widenings = 0;      ///< times the lower end moved below 1/(2k-3)
  bool below_concavity_range = false;
};

/// h(gamma) = r_bal(theta_closed(gamma)) - r_unbal(gamma).
[[nodiscard]] double balance_gap(int k, double gamma);

/// Bisection on balance_gap. The bracket starts at (1/(2k-3), 1/k) and the
/// lower end is pulled halfway toward the pole 1/(k^2-2k) until the gap
/// changes sign. Throws NumericFailure if it never does.
[[nodiscard]] ThresholdSolution solve_threshold(int k, const ThresholdOptions& options = {});

struct SelectionValue {
  std::string id;
  double value = 0.0;
  int starts_converged = 0;
  int starts_total = 0;
  bool best_converged = false;
  std::vector<double> argmax;
};

struct ConjectureVerdict {
  int k = 0;
  double gamma = 0.0;
  std::vector<SelectionValue> per_selection;
  std::string conjectured_id;
  double conjectured_value = 0.0;
  std::optional<double> best_other_value;
  double margin = 0.0;  ///< conjectured - best other (0 when q_k = 1)
  bool holds = false;
  bool converged = false;  ///< every selection's best start met the tolerance
  double tolerance = 1e-7;
};

[[nodiscard]] ConjectureVerdict verify_conjecture(int k, double gamma,
                                                  const OptimizerConfig& config = {},
                                                  double tolerance = 1e-7);

struct ContinuityRow {
  double gamma = 0.0;
  double theta_hat = 0.0;  ///< max over selections of the optimized functionals
  std::string best_selection;
  std::optional<double> theta_closed;   ///< absent at or below the pole
  std::optional<double> theta_clamped;  ///< absent at or below the pole
  std::optional<double> theta_phi;      ///< direct max of phi, when requested
};

[[nodiscard]] std::vector<ContinuityRow> continuity_probe(int k, std::span<const double> gammas,
                                                          const OptimizerConfig& config = {},
                                                          bool with_phi = false);

enum class ThetaMode {
  kClosed,    ///< theta from the closed form at gamma*
  kVerified,  ///< theta from the max over all selections at gamma*
};

[[nodiscard]] std::string to_string(ThetaMode mode);
[[nodiscard]] ThetaMode parse_theta_mode(const std::string& text);

struct BetaOptions {
  ThetaMode mode = ThetaMode::kClosed;
  OptimizerConfig optimizer;
  ThresholdOptions threshold;
  double conjecture_tolerance = 1e-7;
  /// Run the conjecture check in closed mode as well (always run in verified mode).
  bool check_conjecture = true;
};

struct ReferenceBounds {
  double trivial_upper = 0.0;
  double prob_lower = 0.0;
  double km = 0.0;
  std::optional<double> arikan;
};

struct BoundReport {
  int k = 0;
  ThetaMode mode = ThetaMode::kClosed;
  double alpha = 0.0;
  std::string alpha_exact;
  double beta = 0.0;
  double beta_closed = 0.0;
  std::optional<double> beta_verified;
  ThresholdSolution threshold;
  double theta_closed_at_gamma_star = 0.0;
  double theta_constrained_at_gamma_star = 0.0;
  double beta_star_at_gamma_star = 0.0;
  std::optional<double> theta_verified_at_gamma_star;
  std::optional<ConjectureVerdict> conjecture;
  ReferenceBounds references;
};

/// Full pipeline for one alphabet size. Throws NumericFailure when the
/// resulting bound is not strictly below alpha_k.
[[nodiscard]] BoundReport compute_beta(int k, const BetaOptions& options = {});

}  // namespace khash
