#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "khash/rational.hpp"

// Explicit codes C subset [q]^n and the combinatorial checks around them:
// k-separation, symbol frequencies, the skewed/close-to-uniform split, the
// non-isolated fractions tau_i, graph and hypergraph Hansel inequalities,
// and the subcode census over restricted symbol patterns.
//
// Symbols are 0-based in memory and 1-based in the text format.

namespace khash {

using WordIndex = std::size_t;

class Code {
 public:
  /// `words` holds 0-based symbols; throws on out-of-range symbols, ragged
  /// rows, or repeated words.
  Code(int alphabet, int length, std::vector<std::vector<int>> words);

  [[nodiscard]] int alphabet() const noexcept { return alphabet_; }
  [[nodiscard]] int length() const noexcept { return length_; }
  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] int symbol(WordIndex w, int coord) const {
    return symbols_[w * static_cast<std::size_t>(length_) + coord];
  }
  [[nodiscard]] std::span<const int> word(WordIndex w) const {
    return {symbols_.data() + w * static_cast<std::size_t>(length_),
            static_cast<std::size_t>(length_)};
  }
  /// log2 |C| / n.
  [[nodiscard]] double rate() const;

  /// Every word of [q]^n.
  [[nodiscard]] static Code full_space(int alphabet, int length);

  /// Text format: first line "q n", then one word per line as
  /// space-separated symbols in 1..q. '#' starts a comment.
  [[nodiscard]] static Code parse(std::istream& in);
  [[nodiscard]] static Code parse_string(const std::string& text);
  [[nodiscard]] std::string to_text() const;

 private:
  int alphabet_;
  int length_;
  std::size_t size_;
  std::vector<int> symbols_;  // row-major, size_ x length_
};

struct SeparationResult {
  bool separated = true;
  std::optional<std::vector<WordIndex>> witness;  ///< violating subset, colex-first
  std::uint64_t probes = 0;
};

inline constexpr std::uint64_t kDefaultProbeBudget = 100'000'000;

/// True iff every `order` distinct words have a coordinate where they are
/// pairwise distinct. `order` defaults to the alphabet size. Throws
/// BudgetExceeded past `budget` subset-coordinate probes.
[[nodiscard]] SeparationResult is_k_separated(const Code& code, int order = 0,
                                              std::uint64_t budget = kDefaultProbeBudget);

/// Per-coordinate symbol counts; f_i[a] = counts[i][a] / |C|.
struct FrequencyProfile {
  std::size_t code_size = 0;
  std::vector<std::vector<std::size_t>> counts;

  [[nodiscard]] Rational frequency(int coord, int symbol) const;
  [[nodiscard]] double frequency_value(int coord, int symbol) const;
  [[nodiscard]] std::vector<double> vector(int coord) const;
};

[[nodiscard]] FrequencyProfile frequency_profile(const Code& code);

/// floor((n R - log2 n) / log2(k/(k-3))), clamped at 0. The second member is
/// true when the clamp was applied.
struct EllValue {
  long value = 0;
  bool clamped = false;
};
[[nodiscard]] EllValue ell_for(int k, int n, double rate);

struct CoordinateClassification {
  double gamma = 0.0;
  std::vector<int> close;   ///< P_gamma: min_a f_i[a] >= gamma (0-based coordinates)
  std::vector<int> skewed;  ///< the complement
  EllValue ell;
};

[[nodiscard]] CoordinateClassification classify(const Code& code, double gamma);

/// Fraction of non-isolated vertices of the graph on C \ fixed whose edges
/// are pairs {y1, y2} making y1, y2 and all fixed words distinct at `coord`.
/// Requires |fixed| = k - 2 where k is the alphabet size.
[[nodiscard]] double tau(const Code& code, int coord, std::span<const WordIndex> fixed);

/// Closed-form count (|C|/(|C|-(k-2))) (1 - sum_s f[x_s]) 1[fixed distinct].
/// Equals tau() unless the free vertices use only one of the two remaining
/// symbols, where it is an upper bound.
[[nodiscard]] double tau_formula(const Code& code, int coord, std::span<const WordIndex> fixed);

struct HanselCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
};

/// log2(|C| - k + 2) <= sum_i tau_i. Throws NotSeparated if the code is not
/// k-separated.
[[nodiscard]] HanselCheck hansel_check(const Code& code, std::span<const WordIndex> fixed,
                                       std::uint64_t budget = kDefaultProbeBudget);

/// Fraction of non-isolated vertices of the (k-j)-uniform hypergraph on
/// C \ fixed at `coord` (edges: sets whose symbols, together with the fixed
/// words' symbols, are all distinct).
[[nodiscard]] double hyper_tau(const Code& code, int order, int coord,
                               std::span<const WordIndex> fixed);

/// log2((|C|-j)/(k-j-1)) <= log2((b-j)/(k-j-1)) sum_i tau_i for a
/// (b, k)-separated code over [b] with j = |fixed| fixed words, k - j >= 3.
/// This is the covering inequality for (k-j)-uniform (b-j)-partite
/// hypergraphs on |C|-j vertices.
[[nodiscard]] HanselCheck hypergraph_hansel_check(const Code& code, int order,
                                                  std::span<const WordIndex> fixed,
                                                  std::uint64_t budget = kDefaultProbeBudget);

/// omega assigns a (k-3)-subset of [k] (bitmask) to each coordinate of T.
struct OmegaPattern {
  std::vector<int> coords;
  std::vector<unsigned> masks;
};

struct SubcodeCensus {
  std::vector<int> coords;
  std::vector<unsigned> pattern_masks;  ///< the (k-3)-subsets of [k], in order
  std::vector<std::size_t> counts;      ///< M_omega, mixed radix over coords
  BigInt total = 0;                     ///< sum of counts
  OmegaPattern richest;
  std::size_t richest_count = 0;

  [[nodiscard]] OmegaPattern pattern(std::size_t index) const;
  /// |C| * C(k-1, 3)^|T|.
  [[nodiscard]] static BigInt expected_total(std::size_t code_size, int k, std::size_t t);
};

[[nodiscard]] SubcodeCensus subcode_census(const Code& code, std::span<const int> coords,
                                           std::uint64_t budget = kDefaultProbeBudget);

/// Words of C whose projection on T lies in omega.
[[nodiscard]] std::vector<WordIndex> subcode_members(const Code& code, const OmegaPattern& omega);

struct SearchResult {
  Code code;
  double rate = 0.0;
  double prob_lower = 0.0;
  std::uint64_t proposals = 0;
};

/// Randomized greedy growth: words drawn uniformly from [k]^n are kept
/// whenever the code stays k-separated. A run restarts from scratch after
/// 200k consecutive rejections; `trials` bounds the total number of draws
/// and the largest code found is returned.
[[nodiscard]] SearchResult random_code_search(int k, int n, std::uint64_t trials,
                                              std::uint64_t seed);

}  // namespace khash
