#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "khash/functionals.hpp"

// Multi-start projected-gradient maximization over products of (lower-bounded)
// probability simplices, plus a lattice-enumeration oracle used to cross-check
// it.

namespace khash {

/// One factor of the feasible set: { x in R^dim : sum x = 1, x_i >= lower }.
struct SimplexBlock {
  int dim = 0;
  double lower = 0.0;
};

/// Cartesian product of simplex blocks; the optimization variable is the
/// concatenation of the blocks' coordinates.
class Domain {
 public:
  Domain() = default;
  explicit Domain(std::vector<SimplexBlock> blocks);

  [[nodiscard]] const std::vector<SimplexBlock>& blocks() const noexcept { return blocks_; }
  [[nodiscard]] int dimension() const noexcept { return dim_; }
  /// Euclidean projection, block by block, in place.
  void project(std::span<double> x) const;
  [[nodiscard]] bool contains(std::span<const double> x, double tol = 1e-10) const;

 private:
  std::vector<SimplexBlock> blocks_;
  int dim_ = 0;
};

/// Euclidean projection of x onto { y : sum y = total, y >= lower }.
void project_to_simplex(std::span<double> x, double lower = 0.0, double total = 1.0);

struct Objective {
  Domain domain;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  /// Maps an optimizer variable to the reported point (identity when unset).
  std::function<std::vector<double>(std::span<const double>)> decode;
};

struct OptimizerConfig {
  int num_starts = 200;
  int max_iters = 10000;
  double tolerance = 1e-10;
  std::uint64_t seed = 0;
  int grid_resolution = 20;  ///< used by grid_oracle callers only
  int threads = 0;           ///< 0 = hardware concurrency
};

struct OptimizationResult {
  double value = 0.0;
  std::vector<double> argmax;
  int starts_total = 0;
  int starts_converged = 0;
  int best_start_index = 0;
  bool best_converged = false;
};

/// Best value over all starts; deterministic given config.seed and
/// independent of thread scheduling (ties go to the lowest start index).
[[nodiscard]] OptimizationResult maximize(const Objective& objective,
                                          const OptimizerConfig& config);

/// Projected-gradient ascent from a single start. Exposed for tests.
struct AscentTrace {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};
[[nodiscard]] AscentTrace ascend(const Objective& objective, std::vector<double> start,
                                 int max_iters, double tolerance);

/// Deterministic start list used by maximize().
[[nodiscard]] std::vector<std::vector<double>> make_starts(const Domain& domain, int count,
                                                           std::uint64_t seed);

/// Maximum of the objective over lattice points with denominator
/// `resolution` in every block. Throws BudgetExceeded past `budget` points.
[[nodiscard]] double grid_oracle(const Objective& objective, int resolution,
                                 std::uint64_t budget = 50'000'000);

/// phi_k(g, f) = sum over ordered distinct (a_1..a_{k-2}) of
/// prod g[a_s] (1 - sum f[a_s]).
[[nodiscard]] double phi(std::span<const double> g, std::span<const double> f);
/// Gradient of phi with respect to (g, f), concatenated.
void phi_gradient(std::span<const double> g, std::span<const double> f,
                  std::span<double> out);

/// Theta functional over Delta_k. With `ordered`, the search is restricted
/// to g_1 >= ... >= g_k through the cone parametrization
/// g = sum_m lambda_m (1/m, ..., 1/m, 0, ..., 0).
[[nodiscard]] Objective functional_objective(const FunctionalSpec& spec, bool ordered = false);

/// phi over Delta_k x Delta_k^(gamma), f_i >= min(gamma, 1/k).
[[nodiscard]] Objective phi_objective(int k, double gamma);

struct SelectionMax {
  TopSelection selection;
  OptimizationResult result;
};

struct SelectionSweep {
  std::vector<SelectionMax> per_selection;
  std::size_t best_index = 0;
  [[nodiscard]] double max_value() const { return per_selection.at(best_index).result.value; }
};

[[nodiscard]] SelectionSweep maximize_all_selections(int k, double gamma,
                                                     const OptimizerConfig& config,
                                                     bool ordered = false);

}  // namespace khash
