#include "khash/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace khash::report {

double round_sig(double v, int digits) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round_sig(v);
}

std::string format_number(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

Json envelope(const std::string& command, const Json& body) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  for (const auto& [key, value] : body.items()) j[key] = value;
  return j;
}

namespace {

template <class T>
Json optional_number(const std::optional<T>& v) {
  return v ? number(*v) : Json(nullptr);
}

Json numbers(const std::vector<double>& xs) {
  Json arr = Json::array();
  for (double x : xs) arr.push_back(number(x));
  return arr;
}

Json one_based(const std::vector<int>& xs) {
  Json arr = Json::array();
  for (int x : xs) arr.push_back(x + 1);
  return arr;
}

Json symbol_set(unsigned mask) {
  Json arr = Json::array();
  for (int s = 0; s < 32; ++s) {
    if ((mask >> s) & 1u) arr.push_back(s + 1);
  }
  return arr;
}

}  // namespace

Json to_json(const KmBound& km) {
  Json j;
  j["value"] = number(km.value);
  j["argmin_j"] = km.j;
  j["terms"] = numbers(km.terms);
  j["exact"] = km.exact ? Json(to_string(*km.exact)) : Json(nullptr);
  return j;
}

Json to_json(const ThresholdSolution& sol) {
  Json j;
  j["k"] = sol.k;
  j["gamma_star"] = number(sol.gamma_star);
  j["rate"] = number(sol.rate);
  j["bracket"] = Json::array({number(sol.lo), number(sol.hi)});
  j["residual"] = number(sol.residual);
  j["widenings"] = sol.widenings;
  j["below_concavity_range"] = sol.below_concavity_range;
  return j;
}

Json to_json(const ConjectureVerdict& v) {
  Json j;
  j["k"] = v.k;
  j["gamma"] = number(v.gamma);
  Json rows = Json::array();
  for (const auto& s : v.per_selection) {
    Json r;
    r["selection"] = s.id;
    r["value"] = number(s.value);
    r["starts_converged"] = s.starts_converged;
    r["starts_total"] = s.starts_total;
    r["best_converged"] = s.best_converged;
    r["argmax"] = numbers(s.argmax);
    rows.push_back(std::move(r));
  }
  j["per_selection"] = std::move(rows);
  j["conjectured_selection"] = v.conjectured_id;
  j["conjectured_value"] = number(v.conjectured_value);
  j["best_other_value"] = optional_number(v.best_other_value);
  j["margin"] = number(v.margin);
  j["tolerance"] = number(v.tolerance);
  j["holds"] = v.holds;
  j["converged"] = v.converged;
  return j;
}

Json to_json(const ContinuityRow& row) {
  Json j;
  j["gamma"] = number(row.gamma);
  j["theta_hat"] = number(row.theta_hat);
  j["best_selection"] = row.best_selection;
  j["theta_closed"] = optional_number(row.theta_closed);
  j["theta_clamped"] = optional_number(row.theta_clamped);
  j["theta_phi"] = optional_number(row.theta_phi);
  return j;
}

Json to_json(const BoundReport& rep) {
  Json j;
  j["k"] = rep.k;
  j["mode"] = to_string(rep.mode);
  j["alpha"] = number(rep.alpha);
  j["alpha_exact"] = rep.alpha_exact;
  j["beta"] = number(rep.beta);
  j["beta_closed"] = number(rep.beta_closed);
  j["beta_verified"] = optional_number(rep.beta_verified);
  j["threshold"] = to_json(rep.threshold);
  j["theta_closed_at_gamma_star"] = number(rep.theta_closed_at_gamma_star);
  j["theta_constrained_at_gamma_star"] = number(rep.theta_constrained_at_gamma_star);
  j["beta_star_at_gamma_star"] = number(rep.beta_star_at_gamma_star);
  j["theta_verified_at_gamma_star"] = optional_number(rep.theta_verified_at_gamma_star);
  j["conjecture"] = rep.conjecture ? to_json(*rep.conjecture) : Json(nullptr);
  Json refs;
  refs["trivial_upper"] = number(rep.references.trivial_upper);
  refs["prob_lower"] = number(rep.references.prob_lower);
  refs["km"] = number(rep.references.km);
  refs["arikan"] = optional_number(rep.references.arikan);
  j["references"] = std::move(refs);
  return j;
}

Json to_json(const SeparationResult& sep) {
  Json j;
  j["separated"] = sep.separated;
  if (sep.witness) {
    Json w = Json::array();
    for (auto idx : *sep.witness) w.push_back(idx + 1);
    j["witness"] = std::move(w);
  } else {
    j["witness"] = nullptr;
  }
  j["probes"] = sep.probes;
  return j;
}

Json to_json(const CoordinateClassification& cls) {
  Json j;
  j["gamma"] = number(cls.gamma);
  j["close"] = one_based(cls.close);
  j["skewed"] = one_based(cls.skewed);
  j["ell"] = cls.ell.value;
  j["ell_clamped"] = cls.ell.clamped;
  return j;
}

Json to_json(const HanselCheck& check) {
  Json j;
  j["lhs"] = number(check.lhs);
  j["rhs"] = number(check.rhs);
  j["satisfied"] = check.satisfied;
  return j;
}

Json to_json(const SubcodeCensus& census) {
  Json j;
  j["coords"] = one_based(census.coords);
  j["patterns"] = census.counts.size();
  j["total"] = census.total.str();
  Json richest = Json::array();
  for (unsigned m : census.richest.masks) richest.push_back(symbol_set(m));
  j["richest"] = std::move(richest);
  j["richest_count"] = census.richest_count;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string reemit(const std::string& text) { return dump(Json::parse(text)); }

}  // namespace khash::report
