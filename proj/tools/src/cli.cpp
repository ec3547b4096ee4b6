#include "khash_cli/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "khash/bounds.hpp"
#include "khash/errors.hpp"
#include "khash/functionals.hpp"
#include "khash/hashcode.hpp"
#include "khash/pipeline.hpp"
#include "khash/report.hpp"
#include "render.hpp"

namespace khash::cli {

namespace {

using report::Json;
using report::number;

constexpr int kMaxBetaAlphabet = 12;

struct Output {
  Format format = Format::kText;
  std::string path;
};

struct Optimizer {
  std::uint64_t seed = 0;
  int starts = OptimizerConfig{}.num_starts;
  int max_iters = OptimizerConfig{}.max_iters;
  double tolerance = OptimizerConfig{}.tolerance;
  int threads = 0;

  [[nodiscard]] OptimizerConfig config() const {
    OptimizerConfig c;
    c.seed = seed;
    c.num_starts = starts;
    c.max_iters = max_iters;
    c.tolerance = tolerance;
    c.threads = threads;
    return c;
  }
};

/// What a command hands back: the record, the CSV table key, and its status.
struct Outcome {
  Json body;
  std::string table;
  int status = kOk;
};

void add_output(CLI::App* cmd, Output& o) {
  const std::map<std::string, Format> formats{
      {"text", Format::kText}, {"json", Format::kJson}, {"csv", Format::kCsv}};
  cmd->add_option("--format", o.format, "text, json or csv")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
      ->default_str("text");
  cmd->add_option("--out", o.path, "write the report to this file instead of stdout");
}

void add_optimizer(CLI::App* cmd, Optimizer& o) {
  cmd->add_option("--seed", o.seed, "seed for the random starts")->capture_default_str();
  cmd->add_option("--starts", o.starts, "starts per optimization")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-iters", o.max_iters, "iteration cap per start")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--tolerance", o.tolerance, "projected-gradient residual tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

Json alphabet_json(const Code& code) {
  Json j;
  j["alphabet"] = code.alphabet();
  j["length"] = code.length();
  j["size"] = code.size();
  j["rate"] = number(code.rate());
  return j;
}

Json word_list(const Code& code) {
  Json words = Json::array();
  for (WordIndex w = 0; w < code.size(); ++w) {
    std::string s;
    for (int i = 0; i < code.length(); ++i) {
      s += (i ? " " : "") + std::to_string(code.symbol(w, i) + 1);
    }
    words.push_back(s);
  }
  return words;
}

Outcome cmd_bounds(int k, std::optional<int> b_opt) {
  const int b = b_opt.value_or(k);
  if (k < 3) throw CLI::ValidationError("--k", "must be >= 3");
  if (b < k) throw CLI::ValidationError("--b", "must be >= k");
  Json j;
  j["k"] = k;
  j["b"] = b;
  j["alpha"] = number(fk_alpha(k));
  j["alpha_exact"] = to_string(fk_alpha<Rational>(k));
  j["trivial_upper"] = number(trivial_upper(k));
  j["prob_lower"] = number(prob_lower(k));
  j["km"] = report::to_json(km_bound(b, k));
  j["arikan"] = k >= 4 ? number(arikan_bound(b, k)) : Json(nullptr);
  if (k >= 4 && b == k && k <= kMaxBetaAlphabet) {
    BetaOptions opts;
    opts.check_conjecture = false;
    const BoundReport rep = compute_beta(k, opts);
    j["gamma_star"] = number(rep.threshold.gamma_star);
    j["beta"] = number(rep.beta);
  } else {
    j["gamma_star"] = nullptr;
    j["beta"] = nullptr;
  }
  return {report::envelope("bounds", j), "", kOk};
}

Outcome cmd_beta(int k, const std::string& mode, const Optimizer& opt, bool no_conjecture,
                 std::ostream& err) {
  if (k < 4 || k > kMaxBetaAlphabet) {
    throw CLI::ValidationError("--k", "must lie in [4, " + std::to_string(kMaxBetaAlphabet) + "]");
  }
  BetaOptions opts;
  opts.mode = parse_theta_mode(mode);
  opts.optimizer = opt.config();
  opts.check_conjecture = !no_conjecture;
  const BoundReport rep = compute_beta(k, opts);
  Outcome res{report::envelope("beta", report::to_json(rep)), "", kOk};
  if (rep.conjecture) {
    const auto& c = *rep.conjecture;
    if (!c.converged) err << "warning: not every selection's best start converged\n";
    if (!c.holds) err << "warning: conjectured selection is not the maximum (margin " << c.margin << ")\n";
    if (opts.mode == ThetaMode::kVerified && !(c.holds && c.converged)) res.status = kNumeric;
  }
  return res;
}

Outcome cmd_theta(int k, std::vector<double> gammas, std::optional<double> from,
                  std::optional<double> to, int points, bool with_phi, const Optimizer& opt) {
  if (k < 4 || k > kMaxSelectionAlphabet) throw CLI::ValidationError("--k", "must lie in [4, 9]");
  if (from || to) {
    if (!(from && to)) throw CLI::ValidationError("--from/--to", "give both ends of the sweep");
    if (points < 2) throw CLI::ValidationError("--points", "must be >= 2");
    for (int i = 0; i < points; ++i) gammas.push_back(*from + (*to - *from) * i / (points - 1));
  }
  if (gammas.empty()) gammas.push_back(1.0 / k);
  const auto rows = continuity_probe(k, gammas, opt.config(), with_phi);
  Json j;
  j["k"] = k;
  j["rows"] = Json::array();
  for (const auto& r : rows) j["rows"].push_back(report::to_json(r));
  return {report::envelope("theta", j), "rows", kOk};
}

Outcome cmd_selections(int k) {
  if (k < 4 || k > kMaxSelectionAlphabet) throw CLI::ValidationError("--k", "must lie in [4, 9]");
  const auto all = enumerate_selections(k);
  const TopSelection conj = conjectured_selection(k);
  Json j;
  j["k"] = k;
  j["count"] = all.size();
  j["conjectured"] = conj.id();
  j["selections"] = Json::array();
  for (const auto& s : all) {
    Json row;
    row["id"] = s.id();
    row["conjectured"] = s == conj;
    j["selections"].push_back(std::move(row));
  }
  return {report::envelope("selections", j), "selections", kOk};
}

Outcome cmd_verify(int k, std::optional<double> gamma, double tol, const Optimizer& opt) {
  if (k < 4 || k > kMaxSelectionAlphabet) throw CLI::ValidationError("--k", "must lie in [4, 9]");
  const double g = gamma ? *gamma : solve_threshold(k).gamma_star;
  const ConjectureVerdict v = verify_conjecture(k, g, opt.config(), tol);
  Json body = report::to_json(v);
  body["gamma_source"] = gamma ? "flag" : "threshold";
  return {report::envelope("verify-conjecture", body), "per_selection",
          v.holds && v.converged ? kOk : kNumeric};
}

std::vector<WordIndex> to_word_indices(const std::vector<int>& one_based, const Code& code) {
  std::vector<WordIndex> out;
  for (int w : one_based) {
    if (w < 1 || static_cast<std::size_t>(w) > code.size()) {
      throw CLI::ValidationError("--fixed", "word index " + std::to_string(w) + " out of range");
    }
    out.push_back(static_cast<WordIndex>(w - 1));
  }
  return out;
}

Outcome cmd_check(const std::string& path, int order, std::optional<double> gamma,
                  std::optional<int> hansel, const std::vector<int>& fixed_arg,
                  const std::vector<int>& census_arg, std::uint64_t budget, std::ostream& err) {
  std::optional<Code> parsed;
  if (path == "-") {
    parsed = Code::parse(std::cin);
  } else {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("code file", "cannot open '" + path + "'");
    parsed = Code::parse(in);
  }
  const Code& code = *parsed;
  const int k = order > 0 ? order : code.alphabet();
  if (k < 2) throw CLI::ValidationError("--order", "must be >= 2");

  Json j = alphabet_json(code);
  j["order"] = k;
  const SeparationResult sep = is_k_separated(code, k, budget);
  j["separation"] = report::to_json(sep);
  if (sep.witness) {
    Json words = Json::array();
    for (WordIndex w : *sep.witness) {
      std::string s;
      for (int i = 0; i < code.length(); ++i) {
        s += (i ? " " : "") + std::to_string(code.symbol(w, i) + 1);
      }
      words.push_back(s);
    }
    j["separation"]["witness_words"] = std::move(words);
  }

  const FrequencyProfile prof = frequency_profile(code);
  Json freq = Json::array();
  for (int i = 0; i < code.length(); ++i) {
    Json row;
    row["coord"] = i + 1;
    Json counts = Json::array();
    for (auto c : prof.counts[i]) counts.push_back(c);
    row["counts"] = std::move(counts);
    row["min_frequency"] = number(*std::min_element(prof.counts[i].begin(), prof.counts[i].end()) /
                                  static_cast<double>(code.size()));
    freq.push_back(std::move(row));
  }
  j["frequencies"] = std::move(freq);

  if (gamma) {
    const CoordinateClassification cls = classify(code, *gamma);
    if (cls.ell.clamped) err << "warning: n R <= log2 n, ell clamped to 0\n";
    j["classification"] = report::to_json(cls);
  }

  if (hansel) {
    const int jj = *hansel;
    std::vector<WordIndex> fixed;
    if (fixed_arg.empty()) {
      for (int w = 0; w < jj && static_cast<std::size_t>(w) < code.size(); ++w) fixed.push_back(w);
    } else {
      fixed = to_word_indices(fixed_arg, code);
    }
    if (static_cast<int>(fixed.size()) != jj) {
      throw CLI::ValidationError("--fixed", "expected " + std::to_string(jj) + " word indices");
    }
    Json h;
    h["j"] = jj;
    Json fixed_json = Json::array();
    for (auto w : fixed) fixed_json.push_back(w + 1);
    h["fixed"] = std::move(fixed_json);
    Json taus = Json::array();
    HanselCheck result;
    if (jj == code.alphabet() - 2 && k == code.alphabet()) {
      h["kind"] = "graph";
      result = hansel_check(code, fixed, budget);
      for (int i = 0; i < code.length(); ++i) taus.push_back(number(tau(code, i, fixed)));
    } else {
      h["kind"] = "hypergraph";
      result = hypergraph_hansel_check(code, k, fixed, budget);
      for (int i = 0; i < code.length(); ++i) taus.push_back(number(hyper_tau(code, k, i, fixed)));
    }
    h["tau"] = std::move(taus);
    const Json check_json = report::to_json(result);
    for (const auto& [key, value] : check_json.items()) h[key] = value;
    j["hansel"] = std::move(h);
  }

  if (!census_arg.empty()) {
    std::vector<int> coords;
    for (int c : census_arg) coords.push_back(c - 1);
    const SubcodeCensus census = subcode_census(code, coords, budget);
    Json c = report::to_json(census);
    const BigInt expected = SubcodeCensus::expected_total(code.size(), code.alphabet(), coords.size());
    c["expected_total"] = expected.str();
    c["identity_holds"] = census.total == expected;
    j["census"] = std::move(c);
  }
  return {report::envelope("check", j), "frequencies", kOk};
}

Outcome cmd_search(int k, int n, std::uint64_t trials, std::uint64_t seed,
                   const std::string& code_out) {
  if (k < 2) throw CLI::ValidationError("--k", "must be >= 2");
  const SearchResult res = random_code_search(k, n, trials, seed);
  const bool separated = is_k_separated(res.code).separated;
  Json j;
  j["k"] = k;
  j["n"] = n;
  j["trials"] = trials;
  j["seed"] = seed;
  j["size"] = res.code.size();
  j["rate"] = number(res.rate);
  j["prob_lower"] = number(res.prob_lower);
  j["trivial_upper"] = k >= 3 ? number(trivial_upper(k)) : Json(nullptr);
  j["separated"] = separated;
  j["words"] = word_list(res.code);
  if (!code_out.empty()) {
    std::ofstream f(code_out);
    if (!f) throw CLI::ValidationError("--code-out", "cannot write '" + code_out + "'");
    f << res.code.to_text();
  }
  return {report::envelope("search", j), "", separated ? kOk : kNumeric};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounds and experiments for perfect k-hashing", "khash"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand help for every subcommand");

  Output output;
  Optimizer opt;
  int k = 0;
  std::optional<int> b;
  std::string mode = "closed";
  bool no_conjecture = false;
  std::vector<double> gammas;
  std::optional<double> gamma, from, to;
  int points = 10;
  bool with_phi = false;
  double conj_tol = 1e-7;
  std::string code_path;
  int order = 0;
  std::optional<int> hansel;
  std::vector<int> fixed, census;
  std::uint64_t budget = kDefaultProbeBudget;
  int n = 0;
  std::uint64_t trials = 10000;
  std::string code_out;

  auto* bounds = app.add_subcommand("bounds", "closed-form bounds for one alphabet size");
  bounds->add_option("--k", k, "k (>= 3)")->required();
  bounds->add_option("--b", b, "alphabet size for (b,k) bounds; defaults to k");
  add_output(bounds, output);

  auto* beta = app.add_subcommand("beta", "solve the threshold and assemble beta_k");
  beta->add_option("--k", k, "k in [4, 12]")->required();
  beta->add_option("--mode", mode, "closed or verified")
      ->check(CLI::IsMember({"closed", "verified"}))
      ->capture_default_str();
  beta->add_flag("--no-conjecture", no_conjecture, "skip the conjecture check in closed mode");
  add_optimizer(beta, opt);
  add_output(beta, output);

  auto* theta = app.add_subcommand("theta", "max over top selections along a gamma sweep");
  theta->add_option("--k", k, "k in [4, 9]")->required();
  theta->add_option("--gamma", gammas, "comma-separated gamma values")->delimiter(',');
  theta->add_option("--from", from, "first gamma of an even grid");
  theta->add_option("--to", to, "last gamma of an even grid");
  theta->add_option("--points", points, "grid size")->capture_default_str();
  theta->add_flag("--phi", with_phi, "also maximize the unreduced objective directly");
  add_optimizer(theta, opt);
  add_output(theta, output);

  auto* selections = app.add_subcommand("selections", "enumerate the top selections");
  selections->add_option("--k", k, "k in [4, 9]")->required();
  add_output(selections, output);

  auto* verify = app.add_subcommand("verify-conjecture", "compare all top selections at gamma");
  verify->add_option("--k", k, "k in [4, 9]")->required();
  verify->add_option("--gamma", gamma, "defaults to the solved threshold");
  verify->add_option("--conjecture-tolerance", conj_tol, "absolute slack on the comparison")
      ->capture_default_str();
  add_optimizer(verify, opt);
  add_output(verify, output);

  auto* check = app.add_subcommand("check", "verify an explicit code file ('-' for stdin)");
  check->add_option("code", code_path, "code file")->required();
  check->add_option("--order", order, "separation order (defaults to the alphabet size)");
  check->add_option("--gamma", gamma, "classify coordinates at this threshold");
  check->add_option("--hansel", hansel, "run the Hansel check with this many fixed words")
      ->check(CLI::PositiveNumber);
  check->add_option("--fixed", fixed, "1-based indices of the fixed words")->delimiter(',');
  check->add_option("--census", census, "1-based coordinates for the subcode census")
      ->delimiter(',');
  check->add_option("--budget", budget, "probe budget")->capture_default_str();
  add_output(check, output);

  auto* search = app.add_subcommand("search", "randomized greedy search for k-separated codes");
  search->add_option("--k", k, "alphabet size and separation order")->required();
  search->add_option("--n", n, "code length")->required()->check(CLI::PositiveNumber);
  search->add_option("--trials", trials, "random proposals")->capture_default_str();
  search->add_option("--seed", opt.seed, "RNG seed")->capture_default_str();
  search->add_option("--code-out", code_out, "also write the code in the text format");
  add_output(search, output);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  Outcome result;
  try {
    if (bounds->parsed()) {
      result = cmd_bounds(k, b);
    } else if (beta->parsed()) {
      result = cmd_beta(k, mode, opt, no_conjecture, err);
    } else if (theta->parsed()) {
      result = cmd_theta(k, gammas, from, to, points, with_phi, opt);
    } else if (selections->parsed()) {
      result = cmd_selections(k);
    } else if (verify->parsed()) {
      result = cmd_verify(k, gamma, conj_tol, opt);
    } else if (check->parsed()) {
      result = cmd_check(code_path, order, gamma, hansel, fixed, census, budget, err);
    } else {
      result = cmd_search(k, n, trials, opt.seed, code_out);
    }
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const NumericFailure& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const PoleError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  const std::string text = render(result.body, output.format, result.table);
  if (output.path.empty()) {
    out << text;
  } else {
    std::ofstream f(output.path, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << output.path << "'\n";
      return kUsage;
    }
    f << text;
  }
  return result.status;
}

}  // namespace khash::cli
