#include "khash/hashcode.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "khash/bounds.hpp"
#include "khash/errors.hpp"

namespace khash {

namespace {

constexpr int kMaxAlphabet = 64;

using SymbolMask = std::uint64_t;

SymbolMask bit(int symbol) { return SymbolMask{1} << symbol; }

// Advances c (strictly increasing indices into [0, n)) to the next subset in
// colex order. Returns false after the last subset.
bool next_colex(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t r = c.size();
  for (std::size_t i = 0; i < r; ++i) {
    const std::size_t limit = (i + 1 < r) ? c[i + 1] : n;
    if (c[i] + 1 < limit) {
      ++c[i];
      for (std::size_t j = 0; j < i; ++j) c[j] = j;
      return true;
    }
  }
  return false;
}

void check_fixed(const Code& code, std::span<const WordIndex> fixed) {
  std::set<WordIndex> seen;
  for (WordIndex w : fixed) {
    if (w >= code.size()) throw std::out_of_range("fixed word index out of range");
    if (!seen.insert(w).second) throw std::invalid_argument("fixed words must be distinct");
  }
}

// Symbols of the fixed words at coord as a mask, or nullopt if two collide.
std::optional<SymbolMask> fixed_symbols(const Code& code, int coord,
                                        std::span<const WordIndex> fixed) {
  SymbolMask mask = 0;
  for (WordIndex w : fixed) {
    const SymbolMask b = bit(code.symbol(w, coord));
    if (mask & b) return std::nullopt;
    mask |= b;
  }
  return mask;
}

// Per-symbol counts of the free words (C minus fixed) whose symbol at coord
// avoids `blocked`.
std::vector<std::size_t> free_symbol_counts(const Code& code, int coord,
                                            std::span<const WordIndex> fixed,
                                            SymbolMask blocked) {
  std::vector<bool> is_fixed(code.size(), false);
  for (WordIndex w : fixed) is_fixed[w] = true;
  std::vector<std::size_t> counts(code.alphabet(), 0);
  for (WordIndex w = 0; w < code.size(); ++w) {
    if (is_fixed[w]) continue;
    const int s = code.symbol(w, coord);
    if (!(blocked & bit(s))) ++counts[s];
  }
  return counts;
}

}  // namespace

Code::Code(int alphabet, int length, std::vector<std::vector<int>> words)
    : alphabet_(alphabet), length_(length), size_(words.size()) {
  if (alphabet < 2 || alphabet > kMaxAlphabet) {
    throw std::invalid_argument("Code: alphabet size must be in [2, 64]");
  }
  if (length < 1) throw std::invalid_argument("Code: length must be >= 1");
  symbols_.reserve(size_ * length);
  std::set<std::vector<int>> seen;
  for (auto& w : words) {
    if (static_cast<int>(w.size()) != length) {
      throw std::invalid_argument("Code: word length differs from n");
    }
    for (int s : w) {
      if (s < 0 || s >= alphabet) throw std::invalid_argument("Code: symbol out of range");
    }
    symbols_.insert(symbols_.end(), w.begin(), w.end());
    if (!seen.insert(std::move(w)).second) {
      throw std::invalid_argument("Code: repeated codeword");
    }
  }
}

double Code::rate() const {
  return std::log2(static_cast<double>(size_)) / length_;
}

Code Code::full_space(int alphabet, int length) {
  std::vector<std::vector<int>> words;
  std::vector<int> w(length, 0);
  while (true) {
    words.push_back(w);
    int i = length - 1;
    while (i >= 0 && ++w[i] == alphabet) w[i--] = 0;
    if (i < 0) break;
  }
  return Code(alphabet, length, std::move(words));
}

Code Code::parse(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  int q = 0;
  int n = 0;
  bool have_header = false;
  std::vector<std::vector<int>> words;
  std::set<std::vector<int>> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<long> fields;
    std::string tok;
    while (ss >> tok) {
      std::size_t used = 0;
      long v = 0;
      try {
        v = std::stol(tok, &used);
      } catch (const std::exception&) {
        throw ParseError(lineno, "not an integer: '" + tok + "'");
      }
      if (used != tok.size()) throw ParseError(lineno, "not an integer: '" + tok + "'");
      fields.push_back(v);
    }
    if (fields.empty()) continue;
    if (!have_header) {
      if (fields.size() != 2) throw ParseError(lineno, "header must be 'q n'");
      if (fields[0] < 2 || fields[0] > kMaxAlphabet) {
        throw ParseError(lineno, "alphabet size must be in [2, 64]");
      }
      if (fields[1] < 1) throw ParseError(lineno, "length must be >= 1");
      q = static_cast<int>(fields[0]);
      n = static_cast<int>(fields[1]);
      have_header = true;
      continue;
    }
    if (static_cast<int>(fields.size()) != n) {
      throw ParseError(lineno, "expected " + std::to_string(n) + " symbols, got " +
                                   std::to_string(fields.size()));
    }
    std::vector<int> w;
    for (long v : fields) {
      if (v < 1 || v > q) {
        throw ParseError(lineno, "symbol " + std::to_string(v) + " outside 1.." +
                                     std::to_string(q));
      }
      w.push_back(static_cast<int>(v - 1));
    }
    if (!seen.insert(w).second) throw ParseError(lineno, "repeated codeword");
    words.push_back(std::move(w));
  }
  if (!have_header) throw ParseError(lineno, "missing 'q n' header");
  return Code(q, n, std::move(words));
}

Code Code::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

std::string Code::to_text() const {
  std::ostringstream out;
  out << alphabet_ << ' ' << length_ << '\n';
  for (WordIndex w = 0; w < size_; ++w) {
    for (int i = 0; i < length_; ++i) out << (i ? " " : "") << symbol(w, i) + 1;
    out << '\n';
  }
  return out.str();
}

SeparationResult is_k_separated(const Code& code, int order, std::uint64_t budget) {
  if (order == 0) order = code.alphabet();
  if (order < 1) throw std::invalid_argument("is_k_separated: order must be >= 1");
  SeparationResult res;
  const std::size_t r = static_cast<std::size_t>(order);
  if (code.size() < r || r == 1) return res;

  std::vector<std::size_t> c(r);
  for (std::size_t i = 0; i < r; ++i) c[i] = i;
  do {
    bool found = false;
    for (int i = 0; i < code.length() && !found; ++i) {
      if (++res.probes > budget) {
        throw BudgetExceeded("is_k_separated: probe budget exceeded");
      }
      SymbolMask seen = 0;
      bool distinct = true;
      for (std::size_t w : c) {
        const SymbolMask b = bit(code.symbol(w, i));
        if (seen & b) {
          distinct = false;
          break;
        }
        seen |= b;
      }
      found = distinct;
    }
    if (!found) {
      res.separated = false;
      res.witness = std::vector<WordIndex>(c.begin(), c.end());
      return res;
    }
  } while (next_colex(c, code.size()));
  return res;
}

Rational FrequencyProfile::frequency(int coord, int symbol) const {
  return Rational(BigInt(counts.at(coord).at(symbol)), BigInt(code_size));
}

double FrequencyProfile::frequency_value(int coord, int symbol) const {
  return static_cast<double>(counts.at(coord).at(symbol)) / static_cast<double>(code_size);
}

std::vector<double> FrequencyProfile::vector(int coord) const {
  std::vector<double> f;
  for (std::size_t a = 0; a < counts.at(coord).size(); ++a) {
    f.push_back(frequency_value(coord, static_cast<int>(a)));
  }
  return f;
}

FrequencyProfile frequency_profile(const Code& code) {
  if (code.size() == 0) throw std::invalid_argument("frequency_profile: empty code");
  FrequencyProfile p;
  p.code_size = code.size();
  p.counts.assign(code.length(), std::vector<std::size_t>(code.alphabet(), 0));
  for (WordIndex w = 0; w < code.size(); ++w) {
    for (int i = 0; i < code.length(); ++i) ++p.counts[i][code.symbol(w, i)];
  }
  return p;
}

EllValue ell_for(int k, int n, double rate) {
  if (n < 1) throw std::invalid_argument("ell_for: n must be >= 1");
  const double raw = (n * rate - std::log2(static_cast<double>(n))) / subcode_exponent(k);
  if (raw < 0.0) return {0, true};
  return {static_cast<long>(std::floor(raw)), false};
}

CoordinateClassification classify(const Code& code, double gamma) {
  if (code.alphabet() < 4) throw std::invalid_argument("classify: requires k >= 4");
  const FrequencyProfile prof = frequency_profile(code);
  CoordinateClassification out;
  out.gamma = gamma;
  for (int i = 0; i < code.length(); ++i) {
    double lowest = 1.0;
    for (int a = 0; a < code.alphabet(); ++a) lowest = std::min(lowest, prof.frequency_value(i, a));
    (lowest >= gamma ? out.close : out.skewed).push_back(i);
  }
  out.ell = ell_for(code.alphabet(), code.length(), code.rate());
  return out;
}

double tau(const Code& code, int coord, std::span<const WordIndex> fixed) {
  const int k = code.alphabet();
  if (static_cast<int>(fixed.size()) != k - 2) {
    throw std::invalid_argument("tau: exactly k-2 fixed words required");
  }
  check_fixed(code, fixed);
  const std::size_t free_words = code.size() - fixed.size();
  if (free_words == 0) return 0.0;
  const auto mask = fixed_symbols(code, coord, fixed);
  if (!mask) return 0.0;
  const auto counts = free_symbol_counts(code, coord, fixed, *mask);
  const auto present = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
  if (present < 2) return 0.0;
  std::size_t active = 0;
  for (auto c : counts) active += c;
  return static_cast<double>(active) / static_cast<double>(free_words);
}

double tau_formula(const Code& code, int coord, std::span<const WordIndex> fixed) {
  const int k = code.alphabet();
  if (static_cast<int>(fixed.size()) != k - 2) {
    throw std::invalid_argument("tau_formula: exactly k-2 fixed words required");
  }
  check_fixed(code, fixed);
  if (code.size() == fixed.size()) return 0.0;
  if (!fixed_symbols(code, coord, fixed)) return 0.0;
  const FrequencyProfile prof = frequency_profile(code);
  double rest = 1.0;
  for (WordIndex w : fixed) rest -= prof.frequency_value(coord, code.symbol(w, coord));
  const double n = static_cast<double>(code.size());
  return n / (n - static_cast<double>(fixed.size())) * rest;
}

HanselCheck hansel_check(const Code& code, std::span<const WordIndex> fixed,
                         std::uint64_t budget) {
  const int k = code.alphabet();
  if (!is_k_separated(code, k, budget).separated) {
    throw NotSeparated("hansel_check: code is not k-separated");
  }
  HanselCheck h;
  h.lhs = std::log2(static_cast<double>(code.size()) - k + 2);
  for (int i = 0; i < code.length(); ++i) h.rhs += tau(code, i, fixed);
  h.satisfied = h.lhs <= h.rhs + 1e-12;
  return h;
}

double hyper_tau(const Code& code, int order, int coord, std::span<const WordIndex> fixed) {
  const int j = static_cast<int>(fixed.size());
  const int d = order - j;
  if (d < 2) throw std::invalid_argument("hyper_tau: need order - |fixed| >= 2");
  check_fixed(code, fixed);
  const std::size_t free_words = code.size() - fixed.size();
  if (free_words == 0) return 0.0;
  const auto mask = fixed_symbols(code, coord, fixed);
  if (!mask) return 0.0;
  const auto counts = free_symbol_counts(code, coord, fixed, *mask);
  const auto present = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
  if (present < d) return 0.0;
  std::size_t active = 0;
  for (auto c : counts) active += c;
  return static_cast<double>(active) / static_cast<double>(free_words);
}

HanselCheck hypergraph_hansel_check(const Code& code, int order,
                                    std::span<const WordIndex> fixed, std::uint64_t budget) {
  const int b = code.alphabet();
  const int j = static_cast<int>(fixed.size());
  if (order > b) throw std::invalid_argument("hypergraph_hansel_check: requires b >= k");
  if (j < 1 || j > order - 2) {
    throw std::invalid_argument("hypergraph_hansel_check: requires 1 <= j <= k-2");
  }
  if (order - j < 3) {
    throw std::invalid_argument("hypergraph_hansel_check: k - j must be >= 3; use hansel_check");
  }
  if (!is_k_separated(code, order, budget).separated) {
    throw NotSeparated("hypergraph_hansel_check: code is not (b,k)-separated");
  }
  HanselCheck h;
  const double m = static_cast<double>(code.size()) - j;
  const double d_minus_1 = order - j - 1;
  h.lhs = std::log2(m / d_minus_1);
  double sum = 0.0;
  for (int i = 0; i < code.length(); ++i) sum += hyper_tau(code, order, i, fixed);
  h.rhs = std::log2((b - j) / d_minus_1) * sum;
  h.satisfied = h.lhs <= h.rhs + 1e-12;
  return h;
}

OmegaPattern SubcodeCensus::pattern(std::size_t index) const {
  OmegaPattern p;
  p.coords = coords;
  const std::size_t radix = pattern_masks.size();
  for (std::size_t t = 0; t < coords.size(); ++t) {
    p.masks.push_back(pattern_masks[index % radix]);
    index /= radix;
  }
  return p;
}

BigInt SubcodeCensus::expected_total(std::size_t code_size, int k, std::size_t t) {
  BigInt per = binomial(k - 1, 3);
  BigInt out = code_size;
  for (std::size_t i = 0; i < t; ++i) out *= per;
  return out;
}

SubcodeCensus subcode_census(const Code& code, std::span<const int> coords,
                             std::uint64_t budget) {
  const int k = code.alphabet();
  if (k < 4) throw std::invalid_argument("subcode_census: requires k >= 4");
  std::set<int> uniq;
  for (int c : coords) {
    if (c < 0 || c >= code.length()) throw std::out_of_range("subcode_census: coordinate");
    if (!uniq.insert(c).second) throw std::invalid_argument("subcode_census: repeated coordinate");
  }
  SubcodeCensus census;
  census.coords.assign(coords.begin(), coords.end());
  for (unsigned m = 0; m < (1u << k); ++m) {
    if (std::popcount(m) == k - 3) census.pattern_masks.push_back(m);
  }
  const std::size_t radix = census.pattern_masks.size();
  std::uint64_t patterns = 1;
  for (std::size_t t = 0; t < coords.size(); ++t) {
    patterns *= radix;
    if (patterns > budget) throw BudgetExceeded("subcode_census: too many patterns");
  }
  if (patterns * std::max<std::uint64_t>(1, code.size()) > budget) {
    throw BudgetExceeded("subcode_census: pattern x word budget exceeded");
  }
  census.counts.assign(patterns, 0);
  std::vector<std::size_t> digit(coords.size(), 0);
  for (std::size_t idx = 0; idx < patterns; ++idx) {
    std::size_t m = 0;
    for (WordIndex w = 0; w < code.size(); ++w) {
      bool inside = true;
      for (std::size_t t = 0; t < coords.size() && inside; ++t) {
        inside = (census.pattern_masks[digit[t]] >> code.symbol(w, coords[t])) & 1u;
      }
      if (inside) ++m;
    }
    census.counts[idx] = m;
    census.total += m;
    if (idx == 0 || m > census.richest_count) {
      census.richest_count = m;
      census.richest = census.pattern(idx);
    }
    for (std::size_t t = 0; t < digit.size(); ++t) {
      if (++digit[t] < radix) break;
      digit[t] = 0;
    }
  }
  return census;
}

std::vector<WordIndex> subcode_members(const Code& code, const OmegaPattern& omega) {
  std::vector<WordIndex> out;
  for (WordIndex w = 0; w < code.size(); ++w) {
    bool inside = true;
    for (std::size_t t = 0; t < omega.coords.size() && inside; ++t) {
      inside = (omega.masks[t] >> code.symbol(w, omega.coords[t])) & 1u;
    }
    if (inside) out.push_back(w);
  }
  return out;
}

namespace {

// True if appending `cand` to `words` keeps every k-subset containing it
// separated.
bool extends_separated(const std::vector<std::vector<int>>& words, const std::vector<int>& cand,
                       int k) {
  const std::size_t r = static_cast<std::size_t>(k - 1);
  if (words.size() < r) return true;
  std::vector<std::size_t> c(r);
  for (std::size_t i = 0; i < r; ++i) c[i] = i;
  const int n = static_cast<int>(cand.size());
  do {
    bool found = false;
    for (int i = 0; i < n && !found; ++i) {
      SymbolMask seen = bit(cand[i]);
      bool distinct = true;
      for (std::size_t w : c) {
        const SymbolMask b = bit(words[w][i]);
        if (seen & b) {
          distinct = false;
          break;
        }
        seen |= b;
      }
      found = distinct;
    }
    if (!found) return false;
  } while (next_colex(c, words.size()));
  return true;
}

}  // namespace

SearchResult random_code_search(int k, int n, std::uint64_t trials, std::uint64_t seed) {
  if (k < 2 || k > kMaxAlphabet) throw std::invalid_argument("random_code_search: bad k");
  if (n < 1) throw std::invalid_argument("random_code_search: n must be >= 1");
  if (trials < 1) throw std::invalid_argument("random_code_search: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> sym(0, k - 1);
  // A greedy run can dead-end (k-1 words with no separating coordinate), so
  // runs restart after `patience` consecutive rejections and the largest
  // code wins.
  const std::uint64_t patience = 200 * static_cast<std::uint64_t>(k);
  std::vector<std::vector<int>> best;
  std::vector<std::vector<int>> words;
  std::set<std::vector<int>> present;
  std::uint64_t rejections = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::vector<int> cand(n);
    for (int& s : cand) s = sym(rng);
    if (!present.count(cand) && extends_separated(words, cand, k)) {
      present.insert(cand);
      words.push_back(std::move(cand));
      rejections = 0;
      if (words.size() > best.size()) best = words;
    } else if (++rejections >= patience) {
      words.clear();
      present.clear();
      rejections = 0;
    }
  }
  words = std::move(best);
  Code code(k, n, std::move(words));
  const double rate = code.rate();
  return SearchResult{std::move(code), rate, prob_lower(k), trials};
}

}  // namespace khash
