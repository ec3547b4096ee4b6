#include "khash/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "khash/errors.hpp"

namespace khash {

void project_to_simplex(std::span<double> x, double lower, double total) {
  const std::size_t n = x.size();
  if (n == 0) return;
  const double mass = total - static_cast<double>(n) * lower;
  if (mass < -1e-15) throw std::domain_error("project_to_simplex: infeasible lower bound");
  if (mass <= 0.0) {
    std::fill(x.begin(), x.end(), lower);
    return;
  }
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = x[i] - lower;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cumulative += sorted[i];
    const double candidate = (cumulative - mass) / static_cast<double>(i + 1);
    if (i + 1 == n || sorted[i + 1] <= candidate) {
      shift = candidate;
      break;
    }
  }
  for (double& v : x) v = std::max(v - lower - shift, 0.0) + lower;
}

Domain::Domain(std::vector<SimplexBlock> blocks) : blocks_(std::move(blocks)) {
  for (const auto& b : blocks_) {
    if (b.dim < 1) throw std::invalid_argument("Domain: block dimension must be >= 1");
    if (b.lower < 0.0 || b.lower * b.dim > 1.0 + 1e-12) {
      throw std::invalid_argument("Domain: block lower bound infeasible");
    }
    dim_ += b.dim;
  }
}

void Domain::project(std::span<double> x) const {
  std::size_t off = 0;
  for (const auto& b : blocks_) {
    project_to_simplex(x.subspan(off, b.dim), b.lower);
    off += b.dim;
  }
}

bool Domain::contains(std::span<const double> x, double tol) const {
  if (static_cast<int>(x.size()) != dim_) return false;
  std::size_t off = 0;
  for (const auto& b : blocks_) {
    double sum = 0.0;
    for (int i = 0; i < b.dim; ++i) {
      if (x[off + i] < b.lower - tol) return false;
      sum += x[off + i];
    }
    if (std::abs(sum - 1.0) > tol) return false;
    off += b.dim;
  }
  return true;
}

namespace {

// ||P(x + grad) - x||, the unit-step projected-gradient residual.
double stationarity(const Domain& domain, std::span<const double> x,
                    std::span<const double> grad, std::vector<double>& scratch) {
  for (std::size_t i = 0; i < x.size(); ++i) scratch[i] = x[i] + grad[i];
  domain.project(scratch);
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r += (scratch[i] - x[i]) * (scratch[i] - x[i]);
  return std::sqrt(r);
}

std::vector<std::vector<double>> structured_block_starts(const SimplexBlock& b) {
  const int k = b.dim;
  std::vector<std::vector<double>> out;
  out.emplace_back(k, 1.0 / k);
  for (int v = 0; v < k; ++v) {
    std::vector<double> e(k, 0.0);
    e[v] = 1.0;
    out.push_back(std::move(e));
  }
  if (k >= 2) {
    constexpr int kProfileSteps = 4;
    for (int s = 1; s <= kProfileSteps; ++s) {
      const double beta = 1.0 / k + (1.0 / (k - 1) - 1.0 / k) * s / kProfileSteps;
      for (int odd = 0; odd < k; ++odd) {
        std::vector<double> p(k, beta);
        p[odd] = std::max(0.0, 1.0 - (k - 1) * beta);
        out.push_back(std::move(p));
      }
    }
  }
  for (auto& p : out) project_to_simplex(p, b.lower);
  return out;
}

}  // namespace

std::vector<std::vector<double>> make_starts(const Domain& domain, int count,
                                             std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("make_starts: need at least one start");
  std::vector<std::vector<std::vector<double>>> structured;
  std::size_t n_structured = 0;
  for (const auto& b : domain.blocks()) {
    structured.push_back(structured_block_starts(b));
    n_structured = std::max(n_structured, structured.back().size());
  }

  std::vector<std::vector<double>> starts;
  starts.reserve(count);
  for (int s = 0; s < count; ++s) {
    std::vector<double> x;
    x.reserve(domain.dimension());
    if (static_cast<std::size_t>(s) < n_structured) {
      for (const auto& list : structured) {
        const auto& p = list[s % list.size()];
        x.insert(x.end(), p.begin(), p.end());
      }
    } else {
      // Dirichlet(1) per block from a per-start stream, so a start's point
      // does not depend on how many other starts exist.
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(s)};
      std::mt19937_64 rng(seq);
      std::exponential_distribution<double> expo(1.0);
      for (const auto& b : domain.blocks()) {
        std::vector<double> p(b.dim);
        double sum = 0.0;
        for (double& v : p) sum += (v = expo(rng));
        const double mass = 1.0 - b.dim * b.lower;
        for (double& v : p) v = b.lower + mass * v / sum;
        x.insert(x.end(), p.begin(), p.end());
      }
    }
    domain.project(x);
    starts.push_back(std::move(x));
  }
  return starts;
}

AscentTrace ascend(const Objective& objective, std::vector<double> start, int max_iters,
                   double tolerance) {
  const Domain& domain = objective.domain;
  const std::size_t n = start.size();
  if (static_cast<int>(n) != domain.dimension()) {
    throw std::invalid_argument("ascend: start dimension mismatch");
  }
  AscentTrace tr;
  tr.x = std::move(start);
  domain.project(tr.x);
  tr.value = objective.value(tr.x);

  std::vector<double> grad(n), cand(n), cand_grad(n), scratch(n);
  objective.gradient(tr.x, grad);
  double residual = stationarity(domain, tr.x, grad, scratch);
  double step = 1.0;

  for (tr.iterations = 0; tr.iterations < max_iters; ++tr.iterations) {
    if (residual <= tolerance) {
      tr.converged = true;
      break;
    }
    step = std::min(step * 2.0, 1e8);
    bool accepted = false;
    while (step > 1e-30) {
      for (std::size_t i = 0; i < n; ++i) cand[i] = tr.x[i] + step * grad[i];
      domain.project(cand);
      const double fc = objective.value(cand);
      double moved = 0.0;
      for (std::size_t i = 0; i < n; ++i) moved += grad[i] * (cand[i] - tr.x[i]);
      // Below the rounding floor of f the Armijo test is decided by noise, so
      // such a step is only taken if it shrinks the residual.
      const double noise =
          8 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(tr.value));
      const bool armijo = fc >= tr.value + 1e-4 * moved && fc > tr.value + noise;
      if (armijo || fc >= tr.value - noise) {
        objective.gradient(cand, cand_grad);
        const double r = stationarity(domain, cand, cand_grad, scratch);
        if (armijo || r < residual) {
          tr.x.swap(cand);
          grad.swap(cand_grad);
          tr.value = fc;
          residual = r;
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  if (!tr.converged && residual <= tolerance) tr.converged = true;
  return tr;
}

OptimizationResult maximize(const Objective& objective, const OptimizerConfig& config) {
  if (config.num_starts < 1) throw std::invalid_argument("OptimizerConfig: num_starts >= 1");
  if (!(config.tolerance > 0.0)) throw std::invalid_argument("OptimizerConfig: tolerance > 0");
  const auto starts = make_starts(objective.domain, config.num_starts, config.seed);
  std::vector<AscentTrace> traces(starts.size());

  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(starts.size()));
  auto run = [&](std::size_t first, std::size_t stride) {
    for (std::size_t s = first; s < starts.size(); s += stride) {
      traces[s] = ascend(objective, starts[s], config.max_iters, config.tolerance);
    }
  };
  if (workers <= 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
    for (auto& t : pool) t.join();
  }

  OptimizationResult out;
  out.starts_total = static_cast<int>(traces.size());
  out.value = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < traces.size(); ++s) {
    if (traces[s].converged) ++out.starts_converged;
    if (traces[s].value > out.value) {
      out.value = traces[s].value;
      out.best_start_index = static_cast<int>(s);
    }
  }
  const auto& best = traces[out.best_start_index];
  out.best_converged = best.converged;
  out.argmax = objective.decode ? objective.decode(best.x) : best.x;
  return out;
}

namespace {

// All compositions of `resolution` into `dim` parts, scaled to the simplex,
// that respect the block's lower bound.
std::vector<std::vector<double>> block_lattice(const SimplexBlock& b, int resolution,
                                               std::uint64_t budget) {
  std::vector<std::vector<double>> pts;
  std::vector<int> parts(b.dim, 0);
  auto rec = [&](auto&& self, int idx, int left) -> void {
    if (idx == b.dim - 1) {
      parts[idx] = left;
      std::vector<double> p(b.dim);
      for (int i = 0; i < b.dim; ++i) {
        p[i] = static_cast<double>(parts[i]) / resolution;
        if (p[i] < b.lower - 1e-12) return;
      }
      if (pts.size() >= budget) throw BudgetExceeded("grid_oracle: lattice exceeds budget");
      pts.push_back(std::move(p));
      return;
    }
    for (int v = 0; v <= left; ++v) {
      parts[idx] = v;
      self(self, idx + 1, left - v);
    }
  };
  rec(rec, 0, resolution);
  return pts;
}

}  // namespace

double grid_oracle(const Objective& objective, int resolution, std::uint64_t budget) {
  if (resolution < 1) throw std::invalid_argument("grid_oracle: resolution >= 1");
  std::vector<std::vector<std::vector<double>>> lattices;
  std::uint64_t total = 1;
  for (const auto& b : objective.domain.blocks()) {
    lattices.push_back(block_lattice(b, resolution, budget));
    if (lattices.back().empty()) {
      throw std::domain_error("grid_oracle: no lattice point satisfies the lower bound");
    }
    total *= lattices.back().size();
    if (total > budget) throw BudgetExceeded("grid_oracle: lattice exceeds budget");
  }
  std::vector<std::size_t> idx(lattices.size(), 0);
  std::vector<double> x(objective.domain.dimension());
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t n = 0; n < total; ++n) {
    std::size_t off = 0;
    for (std::size_t b = 0; b < lattices.size(); ++b) {
      const auto& p = lattices[b][idx[b]];
      std::copy(p.begin(), p.end(), x.begin() + off);
      off += p.size();
    }
    best = std::max(best, objective.value(x));
    for (std::size_t b = 0; b < idx.size(); ++b) {
      if (++idx[b] < lattices[b].size()) break;
      idx[b] = 0;
    }
  }
  return best;
}

double phi(std::span<const double> g, std::span<const double> f) {
  if (g.size() != f.size()) throw std::invalid_argument("phi: dimension mismatch");
  const int k = static_cast<int>(g.size());
  const SubsetFamily family = enumerate_subsets(k);
  double acc = 0.0;
  for (const auto& s : family.subsets) {
    double prod = 1.0;
    double w = 1.0;
    for (int a : s) {
      prod *= g[a];
      w -= f[a];
    }
    acc += prod * w;
  }
  return to_double(Rational(factorial(k - 2))) * acc;
}

void phi_gradient(std::span<const double> g, std::span<const double> f,
                  std::span<double> out) {
  const std::size_t k = g.size();
  if (f.size() != k || out.size() != 2 * k) {
    throw std::invalid_argument("phi_gradient: dimension mismatch");
  }
  const SubsetFamily family = enumerate_subsets(static_cast<int>(k));
  const double scale = to_double(Rational(factorial(static_cast<int>(k) - 2)));
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& s : family.subsets) {
    double prod = 1.0;
    double w = 1.0;
    for (int a : s) {
      prod *= g[a];
      w -= f[a];
    }
    for (std::size_t m = 0; m < s.size(); ++m) {
      double partial = w;
      for (std::size_t r = 0; r < s.size(); ++r) {
        if (r != m) partial *= g[s[r]];
      }
      out[s[m]] += scale * partial;
      out[k + s[m]] -= scale * prod;
    }
  }
}

Objective functional_objective(const FunctionalSpec& spec, bool ordered) {
  auto eval = std::make_shared<FunctionalEvaluator>(spec);
  const int k = spec.k;
  Objective obj;
  obj.domain = Domain({SimplexBlock{k, 0.0}});
  if (!ordered) {
    obj.value = [eval](std::span<const double> x) { return eval->value(x); };
    obj.gradient = [eval](std::span<const double> x, std::span<double> out) {
      eval->gradient(x, out);
    };
    return obj;
  }
  // x_i = sum_{m >= i} lambda_m / (m + 1) maps the simplex onto the sorted
  // simplex g_1 >= ... >= g_k.
  auto to_point = [k](std::span<const double> lambda) {
    std::vector<double> x(k, 0.0);
    double tail = 0.0;
    for (int i = k - 1; i >= 0; --i) {
      tail += lambda[i] / (i + 1);
      x[i] = tail;
    }
    return x;
  };
  obj.decode = to_point;
  obj.value = [eval, to_point](std::span<const double> lambda) {
    return eval->value(to_point(lambda));
  };
  obj.gradient = [eval, to_point, k](std::span<const double> lambda, std::span<double> out) {
    const auto x = to_point(lambda);
    std::vector<double> gx(k);
    eval->gradient(x, gx);
    double head = 0.0;
    for (int m = 0; m < k; ++m) {
      head += gx[m];
      out[m] = head / (m + 1);
    }
  };
  return obj;
}

Objective phi_objective(int k, double gamma) {
  if (k < 4) throw std::invalid_argument("phi_objective: requires k >= 4");
  Objective obj;
  obj.domain = Domain({SimplexBlock{k, 0.0}, SimplexBlock{k, std::min(gamma, 1.0 / k)}});
  const auto kk = static_cast<std::size_t>(k);
  obj.value = [kk](std::span<const double> x) {
    return phi(x.subspan(0, kk), x.subspan(kk, kk));
  };
  obj.gradient = [kk](std::span<const double> x, std::span<double> out) {
    phi_gradient(x.subspan(0, kk), x.subspan(kk, kk), out);
  };
  return obj;
}

SelectionSweep maximize_all_selections(int k, double gamma, const OptimizerConfig& config,
                                       bool ordered) {
  SelectionSweep sweep;
  for (auto& sel : enumerate_selections(k)) {
    const FunctionalSpec spec{k, gamma, sel};
    auto result = maximize(functional_objective(spec, ordered), config);
    sweep.per_selection.push_back({std::move(sel), std::move(result)});
  }
  for (std::size_t i = 1; i < sweep.per_selection.size(); ++i) {
    if (sweep.per_selection[i].result.value >
        sweep.per_selection[sweep.best_index].result.value) {
      sweep.best_index = i;
    }
  }
  return sweep;
}

}  // namespace khash
