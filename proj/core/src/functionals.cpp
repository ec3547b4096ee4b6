#include "khash/functionals.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace khash {

std::size_t SubsetFamily::index_of_complement(int a, int b) const {
  if (a > b) std::swap(a, b);
  for (std::size_t j = 0; j < complements.size(); ++j) {
    if (complements[j][0] == a && complements[j][1] == b) return j;
  }
  throw std::out_of_range("SubsetFamily: no subset with that complement");
}

SubsetFamily enumerate_subsets(int k) {
  if (k < 4) throw std::invalid_argument("enumerate_subsets: requires k >= 4");
  SubsetFamily family;
  family.k = k;
  // Lexicographic (k-2)-subsets via a boolean selector mask.
  std::vector<bool> pick(k, false);
  std::fill(pick.begin(), pick.begin() + (k - 2), true);
  do {
    std::vector<int> subset;
    std::array<int, 2> comp{};
    int c = 0;
    for (int a = 0; a < k; ++a) {
      if (pick[a]) {
        subset.push_back(a);
      } else {
        comp[c++] = a;
      }
    }
    family.subsets.push_back(std::move(subset));
    family.complements.push_back(comp);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return family;
}

namespace {

std::string pair_token(const std::array<int, 2>& p) {
  if (p[1] < 9) return std::to_string(p[0] + 1) + std::to_string(p[1] + 1);
  return std::to_string(p[0] + 1) + ":" + std::to_string(p[1] + 1);
}

}  // namespace

TopSelection::TopSelection(const SubsetFamily& family, std::vector<std::size_t> selected)
    : k_(family.k), selected_(std::move(selected)), mask_(family.size(), false) {
  std::sort(selected_.begin(), selected_.end());
  if (std::adjacent_find(selected_.begin(), selected_.end()) != selected_.end()) {
    throw std::invalid_argument("TopSelection: duplicate subset index");
  }
  if (static_cast<int>(selected_.size()) != k_ - 1) {
    throw std::invalid_argument("TopSelection: must select exactly k-1 subsets");
  }
  for (std::size_t j : selected_) {
    if (j >= family.size()) throw std::out_of_range("TopSelection: subset index");
    mask_[j] = true;
    pairs_.push_back(family.complements[j]);
  }
  std::sort(pairs_.begin(), pairs_.end());
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (i) id_ += ',';
    id_ += pair_token(pairs_[i]);
  }
}

bool TopSelection::contains(std::size_t subset_index) const {
  return subset_index < mask_.size() && mask_[subset_index];
}

bool TopSelection::is_dominance_closed() const {
  auto selected_pair = [&](int a, int b) {
    return std::find(pairs_.begin(), pairs_.end(), std::array<int, 2>{a, b}) != pairs_.end();
  };
  for (const auto& p : pairs_) {
    for (int a = p[0]; a < k_; ++a) {
      for (int b = std::max(a + 1, p[1]); b < k_; ++b) {
        if (!selected_pair(a, b)) return false;
      }
    }
  }
  return true;
}

std::vector<TopSelection> enumerate_selections(int k) {
  if (k > kMaxSelectionAlphabet) {
    throw std::invalid_argument("enumerate_selections: k above supported maximum");
  }
  const SubsetFamily family = enumerate_subsets(k);
  const std::size_t t = family.size();

  // Linear extension of the dominance order: a pair's dominators have a
  // strictly larger coordinate sum, so they come first in this order.
  std::vector<std::size_t> order(t);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto& p = family.complements[x];
    const auto& q = family.complements[y];
    if (p[0] + p[1] != q[0] + q[1]) return p[0] + p[1] > q[0] + q[1];
    return p[1] > q[1];
  });

  std::vector<std::vector<std::size_t>> dominators(t);
  for (std::size_t x = 0; x < t; ++x) {
    for (std::size_t y = 0; y < t; ++y) {
      const auto& p = family.complements[x];
      const auto& q = family.complements[y];
      if (x != y && q[0] >= p[0] && q[1] >= p[1]) dominators[x].push_back(y);
    }
  }

  const std::size_t need = static_cast<std::size_t>(k - 1);
  std::vector<bool> in(t, false);
  std::vector<std::size_t> chosen;
  std::vector<TopSelection> out;

  // Include/exclude over the linear extension; an element may be included
  // only when all of its dominators already are, so each down-set of size
  // k-1 is produced exactly once.
  auto recurse = [&](auto&& self, std::size_t pos) -> void {
    if (chosen.size() == need) {
      out.emplace_back(family, chosen);
      return;
    }
    if (pos == t || t - pos < need - chosen.size()) return;
    const std::size_t x = order[pos];
    const bool allowed = std::all_of(dominators[x].begin(), dominators[x].end(),
                                     [&](std::size_t y) { return in[y]; });
    if (allowed) {
      in[x] = true;
      chosen.push_back(x);
      self(self, pos + 1);
      chosen.pop_back();
      in[x] = false;
    }
    self(self, pos + 1);
  };
  recurse(recurse, 0);

  std::sort(out.begin(), out.end(),
            [](const TopSelection& a, const TopSelection& b) { return a.id() < b.id(); });
  return out;
}

TopSelection conjectured_selection(int k) {
  const SubsetFamily family = enumerate_subsets(k);
  std::vector<std::size_t> sel;
  for (int a = 0; a < k - 1; ++a) sel.push_back(family.index_of_complement(a, k - 1));
  return TopSelection(family, std::move(sel));
}

TopSelection parse_selection(int k, const std::string& id) {
  const SubsetFamily family = enumerate_subsets(k);
  std::vector<std::size_t> sel;
  std::stringstream ss(id);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    int a = 0;
    int b = 0;
    if (const auto colon = tok.find(':'); colon != std::string::npos) {
      a = std::stoi(tok.substr(0, colon));
      b = std::stoi(tok.substr(colon + 1));
    } else if (tok.size() == 2) {
      a = tok[0] - '0';
      b = tok[1] - '0';
    } else {
      throw std::invalid_argument("parse_selection: bad pair token '" + tok + "'");
    }
    if (a < 1 || b < 1 || a > k || b > k || a == b) {
      throw std::invalid_argument("parse_selection: pair out of range '" + tok + "'");
    }
    sel.push_back(family.index_of_complement(a - 1, b - 1));
  }
  TopSelection out(family, std::move(sel));
  if (!out.is_dominance_closed()) {
    throw std::invalid_argument("parse_selection: '" + id + "' is not dominance-closed");
  }
  return out;
}

double evaluate_functional(const FunctionalSpec& spec, std::span<const double> g) {
  return FunctionalEvaluator(spec).value(g);
}

FunctionalEvaluator::FunctionalEvaluator(const FunctionalSpec& spec) : k_(spec.k) {
  if (spec.selection.k() != spec.k) {
    throw std::invalid_argument("FunctionalSpec: selection alphabet differs from k");
  }
  const SubsetFamily family = enumerate_subsets(k_);
  subsets_ = family.subsets;
  weights_ = functional_weights<double>(spec.selection, family.size(), spec.gamma);
  scale_ = to_double(Rational(factorial(k_ - 2)));
}

double FunctionalEvaluator::value(std::span<const double> g) const {
  if (static_cast<int>(g.size()) != k_) {
    throw std::invalid_argument("evaluate_functional: dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < subsets_.size(); ++j) {
    double p = weights_[j];
    for (int a : subsets_[j]) p *= g[a];
    acc += p;
  }
  return scale_ * acc;
}

void FunctionalEvaluator::gradient(std::span<const double> g, std::span<double> out) const {
  if (static_cast<int>(g.size()) != k_ || out.size() != g.size()) {
    throw std::invalid_argument("FunctionalEvaluator::gradient: dimension mismatch");
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < subsets_.size(); ++j) {
    const auto& s = subsets_[j];
    for (std::size_t m = 0; m < s.size(); ++m) {
      double p = weights_[j];
      for (std::size_t r = 0; r < s.size(); ++r) {
        if (r != m) p *= g[s[r]];
      }
      out[s[m]] += p;
    }
  }
  for (double& v : out) v *= scale_;
}

}  // namespace khash
