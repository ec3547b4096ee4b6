#include <bit>
#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "khash/bounds.hpp"
#include "khash/errors.hpp"
#include "khash/hashcode.hpp"
#include "oracles.hpp"

using namespace khash;

namespace {

Code words(int q, std::vector<std::vector<int>> one_based) {
  for (auto& w : one_based) {
    for (int& s : w) --s;
  }
  const int n = static_cast<int>(one_based.front().size());
  return Code(q, n, std::move(one_based));
}

std::string fixture(const std::string& name) {
  return std::string(KHASH_FIXTURE_DIR) + "/" + name;
}

Code load(const std::string& name) {
  std::ifstream in(fixture(name));
  return Code::parse(in);
}

}  // namespace

TEST(Code, RejectsMalformedInput) {
  EXPECT_THROW(Code(1, 1, {{0}}), std::invalid_argument);
  EXPECT_THROW(Code(3, 2, {{0}}), std::invalid_argument);
  EXPECT_THROW(Code(3, 1, {{3}}), std::invalid_argument);
  EXPECT_THROW(Code(3, 1, {{1}, {1}}), std::invalid_argument);
}

TEST(Code, ParseReportsLineNumbers) {
  const auto line_of = [](const std::string& text) -> std::size_t {
    try {
      (void)Code::parse_string(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("3 1\n1\n4\n"), 3u);
  EXPECT_EQ(line_of("# header next\n3 2\n1 2\n1\n"), 4u);
  EXPECT_EQ(line_of("3 1\n1\nx\n"), 3u);
  EXPECT_EQ(line_of("3 1\n2\n2\n"), 3u);
  EXPECT_EQ(line_of("3\n"), 1u);
  EXPECT_EQ(line_of("1 1\n"), 1u);
  EXPECT_THROW((void)Code::parse_string("# nothing\n"), ParseError);
  try {
    (void)Code::parse_string("3 1\n1\n4\n");
  } catch (const ParseError& e) {
    EXPECT_STREQ(e.what(), "line 3: symbol 4 outside 1..3");
  }
}

TEST(Code, TextRoundTrip) {
  const Code c = Code::parse_string("# skewed\n4 2\n1 1\n1 2  # trailing\n\n2 3\n2 4\n");
  EXPECT_EQ(c.size(), 4u);
  EXPECT_EQ(c.symbol(2, 1), 2);
  const Code again = Code::parse_string(c.to_text());
  EXPECT_EQ(again.to_text(), c.to_text());
  EXPECT_DOUBLE_EQ(c.rate(), 1.0);
  EXPECT_EQ(Code::full_space(3, 2).size(), 9u);
}

TEST(Separation, SmallExamples) {
  EXPECT_TRUE(is_k_separated(words(3, {{1, 1, 1}, {2, 2, 2}, {3, 3, 3}})).separated);
  const SeparationResult bad = is_k_separated(words(3, {{1, 1, 2}, {1, 2, 1}, {2, 1, 1}}));
  EXPECT_FALSE(bad.separated);
  ASSERT_TRUE(bad.witness.has_value());
  EXPECT_EQ(*bad.witness, (std::vector<WordIndex>{0, 1, 2}));
  EXPECT_TRUE(is_k_separated(Code::full_space(2, 3)).separated);
  EXPECT_TRUE(is_k_separated(Code::full_space(3, 1)).separated);
  EXPECT_FALSE(is_k_separated(Code::full_space(3, 2)).separated);
}

TEST(Separation, AgreesWithBruteForce) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> sym(0, 2);
  for (int trial = 0; trial < 200; ++trial) {
    std::set<std::vector<int>> ws;
    while (ws.size() < 6) {
      std::vector<int> w(3);
      for (int& s : w) s = sym(rng);
      ws.insert(w);
    }
    const Code c(3, 3, {ws.begin(), ws.end()});
    const SeparationResult r = is_k_separated(c);
    EXPECT_EQ(r.separated, oracle::separated(c, 3));
    if (!r.separated) {
      const Code sub(3, 3, [&] {
        std::vector<std::vector<int>> v;
        for (auto w : *r.witness) v.emplace_back(c.word(w).begin(), c.word(w).end());
        return v;
      }());
      EXPECT_FALSE(oracle::separated(sub, 3));
    }
  }
}

TEST(Separation, BudgetIsEnforced) {
  EXPECT_THROW((void)is_k_separated(Code::full_space(3, 3), 2, 10), BudgetExceeded);
}

TEST(Frequencies, HandCounts) {
  const Code skewed = load("skewed_k4.code");
  const FrequencyProfile p = frequency_profile(skewed);
  EXPECT_EQ(p.frequency(0, 0), Rational(1, 2));
  EXPECT_EQ(p.frequency(0, 2), Rational(0));
  for (int a = 0; a < 4; ++a) EXPECT_EQ(p.frequency(1, a), Rational(1, 4));
  for (int i = 0; i < 2; ++i) {
    Rational sum = 0;
    for (int a = 0; a < 4; ++a) sum += p.frequency(i, a);
    EXPECT_EQ(sum, Rational(1));
  }
  const CoordinateClassification cls = classify(skewed, 0.2);
  EXPECT_EQ(cls.close, std::vector<int>{1});
  EXPECT_EQ(cls.skewed, std::vector<int>{0});

  const Code full = Code::full_space(5, 1);
  const auto f = frequency_profile(full).vector(0);
  for (double x : f) EXPECT_DOUBLE_EQ(x, 0.2);
  EXPECT_EQ(classify(full, 0.2).close, std::vector<int>{0});
  EXPECT_THROW((void)classify(Code::full_space(3, 1), 0.2), std::invalid_argument);
}

TEST(Frequencies, Ell) {
  EXPECT_EQ(ell_for(4, 100, 0.3).value, 11);
  EXPECT_FALSE(ell_for(4, 100, 0.3).clamped);
  const EllValue tiny = ell_for(4, 4, 0.1);
  EXPECT_EQ(tiny.value, 0);
  EXPECT_TRUE(tiny.clamped);
}

TEST(Tau, SmallExamples) {
  const Code c = Code::full_space(3, 1);
  const std::vector<WordIndex> fixed{0};
  EXPECT_DOUBLE_EQ(tau(c, 0, fixed), 1.0);
  EXPECT_DOUBLE_EQ(tau_formula(c, 0, fixed), 1.0);
  const Code twin = words(4, {{1, 1}, {1, 2}, {2, 3}, {3, 4}});
  const std::vector<WordIndex> collide{0, 1};
  EXPECT_DOUBLE_EQ(tau(twin, 0, collide), 0.0);
  EXPECT_DOUBLE_EQ(tau_formula(twin, 0, collide), 0.0);
  const std::vector<WordIndex> wrong{0};
  EXPECT_THROW((void)tau(twin, 0, wrong), std::invalid_argument);
}

TEST(Tau, FormulaMatchesGraphUnlessDegenerate) {
  std::mt19937_64 rng(5);
  int strict = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 3 + trial % 2;
    const Code c = oracle::random_separated_code(k, k, 4, 9, 60, rng);
    if (c.size() < static_cast<std::size_t>(k)) continue;
    std::vector<WordIndex> fixed;
    for (int s = 0; s < k - 2; ++s) fixed.push_back(s);
    for (int i = 0; i < c.length(); ++i) {
      const double exact = tau(c, i, fixed);
      EXPECT_NEAR(exact, oracle::hypergraph_tau(c, i, fixed, 2), 1e-15);
      const double formula = tau_formula(c, i, fixed);
      EXPECT_LE(exact, formula + 1e-12);
      // Both remaining symbols present among free words: the formula is exact.
      std::set<int> fixed_syms;
      for (auto w : fixed) fixed_syms.insert(c.symbol(w, i));
      std::set<int> free_syms;
      for (WordIndex w = k - 2; w < c.size(); ++w) {
        if (!fixed_syms.count(c.symbol(w, i))) free_syms.insert(c.symbol(w, i));
      }
      if (fixed_syms.size() == fixed.size() && free_syms.size() == 2) {
        EXPECT_NEAR(exact, formula, 1e-12);
      } else if (formula > exact + 1e-12) {
        ++strict;
      }
    }
  }
  EXPECT_GT(strict, 0);
}

TEST(Hansel, SmallExamples) {
  const Code c3 = Code::full_space(3, 1);
  const std::vector<WordIndex> one{0};
  const HanselCheck h3 = hansel_check(c3, one);
  EXPECT_DOUBLE_EQ(h3.lhs, 1.0);
  EXPECT_DOUBLE_EQ(h3.rhs, 1.0);
  EXPECT_TRUE(h3.satisfied);

  const std::vector<WordIndex> two{0, 3};
  const HanselCheck h4 = hansel_check(Code::full_space(4, 1), two);
  EXPECT_DOUBLE_EQ(h4.lhs, 1.0);
  EXPECT_DOUBLE_EQ(h4.rhs, 1.0);
  EXPECT_TRUE(h4.satisfied);

  EXPECT_THROW((void)hansel_check(load("planted_violation_k3.code"), one), NotSeparated);
}

TEST(Hansel, HypergraphExamples) {
  const std::vector<WordIndex> one{0};
  const HanselCheck a = hypergraph_hansel_check(Code::full_space(4, 1), 4, one);
  EXPECT_NEAR(a.lhs, std::log2(1.5), 1e-15);
  EXPECT_NEAR(a.rhs, std::log2(1.5), 1e-15);
  EXPECT_TRUE(a.satisfied);
  const HanselCheck b = hypergraph_hansel_check(Code::full_space(5, 1), 4, one);
  EXPECT_NEAR(b.lhs, 1.0, 1e-15);
  EXPECT_NEAR(b.rhs, 1.0, 1e-15);
  EXPECT_TRUE(b.satisfied);

  const Code c = Code::full_space(5, 1);
  EXPECT_DOUBLE_EQ(hyper_tau(c, 4, 0, one), 1.0);
  EXPECT_NEAR(hyper_tau(c, 4, 0, one), oracle::hypergraph_tau(c, 0, {0}, 3), 1e-15);

  const Code twin = words(5, {{1, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
  const std::vector<WordIndex> collide{0, 1};
  EXPECT_DOUBLE_EQ(hyper_tau(twin, 5, 0, collide), 0.0);

  EXPECT_THROW((void)hypergraph_hansel_check(Code::full_space(4, 1), 5, one),
               std::invalid_argument);
  const std::vector<WordIndex> two{0, 1};
  EXPECT_THROW((void)hypergraph_hansel_check(Code::full_space(4, 1), 4, two),
               std::invalid_argument);
  EXPECT_THROW((void)hypergraph_hansel_check(Code::full_space(4, 2), 4, one), NotSeparated);
}

TEST(Hansel, HypergraphTauMatchesBruteForce) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const int b = 4 + trial % 2;
    const Code c = oracle::random_separated_code(b, 4, 3, 10, 80, rng);
    if (c.size() < 4) continue;
    const std::vector<WordIndex> fixed{0};
    for (int i = 0; i < c.length(); ++i) {
      EXPECT_NEAR(hyper_tau(c, 4, i, fixed), oracle::hypergraph_tau(c, i, {0}, 3), 1e-15);
    }
  }
}

TEST(Census, SmallExamples) {
  const std::vector<int> t1{0};
  const SubcodeCensus c4 = subcode_census(Code::full_space(4, 1), t1);
  EXPECT_EQ(c4.counts.size(), 4u);
  for (auto m : c4.counts) EXPECT_EQ(m, 1u);
  EXPECT_EQ(c4.total, BigInt(4));
  EXPECT_EQ(SubcodeCensus::expected_total(4, 4, 1), BigInt(4));

  const SubcodeCensus c5 = subcode_census(Code::full_space(5, 1), t1);
  EXPECT_EQ(c5.counts.size(), 10u);
  for (auto m : c5.counts) EXPECT_EQ(m, 2u);
  EXPECT_EQ(c5.total, BigInt(20));
  EXPECT_EQ(c5.total, SubcodeCensus::expected_total(5, 5, 1));
  for (unsigned mask : c5.pattern_masks) EXPECT_EQ(std::popcount(mask), 2);

  EXPECT_THROW((void)subcode_census(Code::full_space(3, 1), t1), std::invalid_argument);
  const std::vector<int> rep{0, 0};
  EXPECT_THROW((void)subcode_census(Code::full_space(4, 2), rep), std::invalid_argument);
  const std::vector<int> t3{0, 1, 2};
  EXPECT_THROW((void)subcode_census(Code::full_space(6, 3), t3, 100), BudgetExceeded);
}

TEST(Census, IdentityAndRichestPattern) {
  std::mt19937_64 rng(23);
  for (int k : {4, 5, 6}) {
    for (std::size_t t = 1; t <= 3; ++t) {
      const Code c = oracle::random_separated_code(k, k, 4, 14, 200, rng);
      std::vector<int> coords;
      for (std::size_t i = 0; i < t; ++i) coords.push_back(static_cast<int>(i));
      const SubcodeCensus cen = subcode_census(c, coords);
      EXPECT_EQ(cen.total, SubcodeCensus::expected_total(c.size(), k, t));
      const double floor =
          static_cast<double>(c.size()) * std::pow(static_cast<double>(k - 3) / k, t);
      EXPECT_GE(static_cast<double>(cen.richest_count), floor - 1e-9);
      EXPECT_EQ(subcode_members(c, cen.richest).size(), cen.richest_count);
      for (std::size_t p = 0; p < cen.counts.size(); p += 7) {
        EXPECT_EQ(subcode_members(c, cen.pattern(p)).size(), cen.counts[p]);
      }
    }
  }
}

TEST(Census, SubcodesStaySeparatedOnTheRestrictedAlphabet) {
  // Words sharing a pattern use only k-3 symbols on T, so any separating
  // coordinate for k of them lies outside T.
  std::mt19937_64 rng(29);
  const Code c = oracle::random_separated_code(5, 5, 4, 16, 300, rng);
  const std::vector<int> t{0};
  const SubcodeCensus cen = subcode_census(c, t);
  for (std::size_t p = 0; p < cen.counts.size(); ++p) {
    const auto members = subcode_members(c, cen.pattern(p));
    std::vector<std::vector<int>> rest;
    for (auto w : members) rest.emplace_back(c.word(w).begin() + 1, c.word(w).end());
    if (rest.size() < 5) continue;
    EXPECT_TRUE(oracle::separated(Code(5, 3, rest), 5));
  }
}

TEST(Search, SmallCasesAndDeterminism) {
  const SearchResult tiny = random_code_search(3, 1, 200, 1);
  EXPECT_EQ(tiny.code.size(), 3u);
  EXPECT_NEAR(tiny.rate, std::log2(3.0), 1e-15);

  const SearchResult a = random_code_search(4, 4, 10000, 42);
  const SearchResult b = random_code_search(4, 4, 10000, 42);
  EXPECT_EQ(a.code.to_text(), b.code.to_text());
  EXPECT_TRUE(oracle::separated(a.code, 4));
  EXPECT_TRUE(is_k_separated(a.code).separated);
  EXPECT_DOUBLE_EQ(a.prob_lower, prob_lower(4));

  const SearchResult six = random_code_search(3, 6, 5000, 7);
  EXPECT_TRUE(is_k_separated(six.code).separated);
  EXPECT_GT(six.rate, 0.0);
  EXPECT_THROW((void)random_code_search(3, 0, 10, 1), std::invalid_argument);
}
