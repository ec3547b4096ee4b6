#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "khash/rational.hpp"

// The (k-2)-subsets P_j of [k], their products d_j = prod_{a in P_j} g_a, and
// the candidate sets of the k-1 largest products ("top selections") that
// index the family of polynomial functionals bounding phi_k.
//
// Symbols are 0-based internally; the canonical text form of a selection
// is 1-based to match the usual [k] = {1, ..., k} convention.

namespace khash {

/// Largest alphabet for which selections are enumerated.
inline constexpr int kMaxSelectionAlphabet = 9;

struct SubsetFamily {
  int k = 0;
  /// Lexicographically ordered (k-2)-subsets, each sorted ascending.
  std::vector<std::vector<int>> subsets;
  /// complements[j] = [k] \ subsets[j], sorted ascending.
  std::vector<std::array<int, 2>> complements;

  [[nodiscard]] std::size_t size() const noexcept { return subsets.size(); }
  /// Index of the subset whose complement is {a, b} (any order).
  [[nodiscard]] std::size_t index_of_complement(int a, int b) const;
};

[[nodiscard]] SubsetFamily enumerate_subsets(int k);

/// d_j for every subset in `family`.
template <Field T>
[[nodiscard]] std::vector<T> subset_products(const SubsetFamily& family,
                                             std::span<const T> g) {
  if (static_cast<int>(g.size()) != family.k) {
    throw std::invalid_argument("subset_products: dimension mismatch");
  }
  std::vector<T> d;
  d.reserve(family.size());
  for (const auto& subset : family.subsets) {
    T p{1};
    for (int a : subset) p *= g[a];
    d.push_back(p);
  }
  return d;
}

/// h-th elementary symmetric sum of the first t coordinates of g, by the
/// coordinate-wise recurrence e_h <- e_h + g_i e_{h-1}.
template <Field T>
[[nodiscard]] T symmetric_sum(std::span<const T> g, int h, int t) {
  if (t < 0 || t > static_cast<int>(g.size()) || h < 0 || h > t) {
    throw std::out_of_range("symmetric_sum: requires 0 <= h <= t <= dim");
  }
  std::vector<T> e(h + 1, T(0));
  e[0] = T(1);
  for (int i = 0; i < t; ++i) {
    for (int m = std::min(h, i + 1); m >= 1; --m) e[m] += g[i] * e[m - 1];
  }
  return e[h];
}

/// A candidate set of the k-1 largest subset products. Valid selections are
/// down-closed under product dominance: if complement pair {a, b} is selected
/// and {a', b'} has a' >= a, b' >= b, then {a', b'} is selected as well
/// (for g sorted descending its product is at least as large).
class TopSelection {
 public:
  TopSelection(const SubsetFamily& family, std::vector<std::size_t> selected);

  [[nodiscard]] int k() const noexcept { return k_; }
  /// Subset indices into the family, ascending.
  [[nodiscard]] const std::vector<std::size_t>& selected() const noexcept { return selected_; }
  [[nodiscard]] const std::vector<std::array<int, 2>>& complement_pairs() const noexcept {
    return pairs_;
  }
  [[nodiscard]] bool contains(std::size_t subset_index) const;
  /// Canonical text form: sorted 1-based complement pairs, e.g. "15,25,35,45".
  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  /// Down-closed under the dominance order described above.
  [[nodiscard]] bool is_dominance_closed() const;

  friend bool operator==(const TopSelection& a, const TopSelection& b) {
    return a.k_ == b.k_ && a.selected_ == b.selected_;
  }

 private:
  int k_;
  std::vector<std::size_t> selected_;
  std::vector<std::array<int, 2>> pairs_;
  std::vector<bool> mask_;
  std::string id_;
};

/// All dominance-closed selections of size k-1 (the q_k functionals), in
/// deterministic order. Throws for k > kMaxSelectionAlphabet.
[[nodiscard]] std::vector<TopSelection> enumerate_selections(int k);

/// The selection whose top products avoid the last coordinate: complement
/// pairs {a, k} for a in [k-1].
[[nodiscard]] TopSelection conjectured_selection(int k);

/// Parses the canonical text form back into a selection.
[[nodiscard]] TopSelection parse_selection(int k, const std::string& id);

struct FunctionalSpec {
  int k = 0;
  double gamma = 0.0;
  TopSelection selection;
};

/// Per-subset weight of the functional: 1 - (k-2) gamma on selected subsets,
/// 2 gamma elsewhere.
template <Field T>
[[nodiscard]] std::vector<T> functional_weights(const TopSelection& selection,
                                                std::size_t family_size, const T& gamma) {
  const int k = selection.k();
  std::vector<T> w(family_size);
  for (std::size_t j = 0; j < family_size; ++j) {
    w[j] = selection.contains(j) ? T(1) - T(k - 2) * gamma : T(2) * gamma;
  }
  return w;
}

/// Theta(g) = (k-2)! [ (1 - (k-2) gamma) sum_sel d_j + 2 gamma sum_rest d_j ].
/// g is used as given; it is not sorted.
template <Field T>
[[nodiscard]] T evaluate_functional(const TopSelection& selection, const T& gamma,
                                    std::span<const T> g) {
  const SubsetFamily family = enumerate_subsets(selection.k());
  const auto d = subset_products<T>(family, g);
  const auto w = functional_weights<T>(selection, family.size(), gamma);
  T acc{0};
  for (std::size_t j = 0; j < d.size(); ++j) acc += w[j] * d[j];
  return from_integer<T>(factorial(selection.k() - 2)) * acc;
}

[[nodiscard]] double evaluate_functional(const FunctionalSpec& spec, std::span<const double> g);

/// Fast evaluator for repeated calls with a fixed spec (value and gradient).
class FunctionalEvaluator {
 public:
  explicit FunctionalEvaluator(const FunctionalSpec& spec);

  [[nodiscard]] int dimension() const noexcept { return k_; }
  [[nodiscard]] double value(std::span<const double> g) const;
  void gradient(std::span<const double> g, std::span<double> out) const;

 private:
  int k_;
  double scale_;
  std::vector<std::vector<int>> subsets_;
  std::vector<double> weights_;
};

}  // namespace khash
