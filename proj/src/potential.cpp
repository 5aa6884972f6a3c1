#include "gdf/potential.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace gdf {

ExcessivityCertificate certify_excessive(const Vector& v, const SubMarkovGenerator& L, double alpha) {
  if (v.size() != L.size()) throw std::invalid_argument("certify_excessive: dimension mismatch");
  ExcessivityCertificate c;
  c.order = alpha;
  c.min_value = v.size() ? v.minCoeff() : 0.0;
  const Vector residual = alpha * v - L.rates * v;
  c.min_residual = residual.size() ? residual.minCoeff() : 0.0;
  return c;
}

bool is_alpha_excessive(const Vector& v, const SubMarkovGenerator& L, double alpha, double tol,
                        double* residual) {
  const ExcessivityCertificate c = certify_excessive(v, L, alpha);
  if (residual) *residual = std::min(c.min_value, c.min_residual);
  return c.holds(tol);
}

ExcessiveFunction excessive_function(Vector v, const SubMarkovGenerator& L, double alpha, double tol) {
  const ExcessivityCertificate c = certify_excessive(v, L, alpha);
  if (!c.holds(tol))
    throw NumericalError("excessivity-certificate",
                         "min value " + std::to_string(c.min_value) + ", min residual " +
                             std::to_string(c.min_residual) + " at order " + std::to_string(alpha));
  return ExcessiveFunction{alpha, std::move(v), c.min_residual};
}

static std::vector<int> checked_set(const std::vector<int>& U, int n, const char* what) {
  std::vector<int> s(U);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  for (int i : s)
    if (i < 0 || i >= n) throw std::invalid_argument(std::string(what) + ": state index " + std::to_string(i) + " out of range");
  return s;
}

Reduite reduite(const Vector& f, const std::vector<int>& U, const SubMarkovGenerator& L,
                double alpha, const ReduiteOptions& opt) {
  if (!(alpha > 0.0)) throw std::invalid_argument("reduite: order must be positive");
  const int n = L.size();
  if (f.size() != n) throw std::invalid_argument("reduite: dimension mismatch");
  Reduite r;
  r.order = alpha;
  r.set = checked_set(U, n, "reduite");
  r.base = f;

  // Obstacle: f on U and 0 elsewhere, floored at 0 (the majorant must also
  // dominate the zero function).
  Vector obstacle = Vector::Zero(n);
  for (int i : r.set) obstacle[i] = std::max(f[i], 0.0);

  double lambda = opt.lambda_factor * L.max_exit_rate();
  if (!(lambda > 0.0)) lambda = 1.0;  // zero generator: any uniformization works
  const double gamma = lambda / (lambda + alpha);
  Matrix p = L.rates / lambda;
  p.diagonal().array() += 1.0;

  // gamma/(1-gamma) converts the last increment into a bound on the distance
  // to the fixed point; stop once that certified distance is below tol.
  const double threshold = opt.tol * std::min(1.0, (1.0 - gamma) / gamma);

  Vector v = obstacle;
  Vector next(n);
  long iter = 0;
  double delta = kInf;
  while (iter < opt.max_iterations) {
    next.noalias() = gamma * (p * v);
    next = next.cwiseMax(obstacle);
    delta = (next - v).maxCoeff();
    v = next;
    ++iter;
    if (delta <= threshold) break;
  }
  if (delta > threshold)
    throw NumericalError("reduite-nonconvergence",
                         "no fixed point after " + std::to_string(iter) + " iterations (tol " +
                             std::to_string(opt.tol) + " too small for the spectral gap?)");
  r.values = std::move(v);
  r.iterations = iter;
  r.certified_error = delta * gamma / (1.0 - gamma);
  return r;
}

Vector e_U_by_definition(const std::vector<int>& U, const SubMarkovGenerator& L,
                         const StateSpace& sp, int k_max, const ReduiteOptions& opt,
                         double agreement_tol) {
  if (sp.size() != L.size()) throw std::invalid_argument("e_U_by_definition: dimension mismatch");
  ResolventFamily fam(L);
  const Vector g1phi = fam.apply(1.0, sp.phi);
  if (g1phi.minCoeff() <= 0.0)
    throw NumericalError("potential-positivity", "G_1 phi must be strictly positive");

  Vector prev = Vector::Zero(L.size());
  double k = 1.0;
  for (int step = 0; step <= k_max; ++step) {
    const Vector obstacle = (k * g1phi).cwiseMin(1.0);
    const Vector cur = reduite(obstacle, U, L, 1.0, opt).values;
    if ((prev - cur).maxCoeff() > 1e-12)
      throw NumericalError("increasing-limit", "reduites failed to increase at k = " + std::to_string(k));
    prev = cur;
    if (k * g1phi.minCoeff() >= 1.0) break;  // obstacle saturated at 1; the limit is reached
    k *= 2.0;
  }
  const Vector direct = reduite(Vector::Ones(L.size()), U, L, 1.0, opt).values;
  const double gap = (prev - direct).cwiseAbs().maxCoeff();
  if (gap > agreement_tol)
    throw NumericalError("e_U-agreement",
                         "limit construction and direct reduite differ by " + std::to_string(gap));
  return prev;
}

CapacityReport capacity(const std::vector<int>& U, const StateSpace& sp,
                        const SubMarkovGenerator& L, const ReduiteOptions& opt) {
  if (sp.size() != L.size()) throw std::invalid_argument("capacity: dimension mismatch");
  CapacityReport rep;
  Reduite r = reduite(Vector::Ones(L.size()), U, L, 1.0, opt);
  rep.set = r.set;
  rep.e_U = std::move(r.values);
  rep.value = h_inner(rep.e_U, sp.phi, sp);
  return rep;
}

double capacity_dual_lower_bound(const std::vector<int>& U, const StateSpace& sp,
                                 const SubMarkovGenerator& L, int sample_count, std::uint64_t seed,
                                 const ReduiteOptions& opt) {
  if (sample_count < 1) throw std::invalid_argument("capacity_dual_lower_bound: need at least one sample");
  const int n = L.size();
  ResolventFamily fam(L);
  const Vector g1phi_hat = adjoint(resolvent(L, 1.0), sp).matrix * sp.phi;

  // Order-1 form energy against the adjoint potential of phi.
  const auto energy = [&](const Vector& w) {
    const Vector lhs = w - L.rates * w;
    return h_inner(lhs, g1phi_hat, sp);
  };

  CounterRng rng(seed, 0);
  double best = -kInf;
  Vector prev_sample;
  for (int s = 0; s < sample_count; ++s) {
    Vector u;
    if (s == 0) {
      u = Vector::Ones(n);  // always included: attains the capacity
    } else {
      Vector g(n);
      for (int i = 0; i < n; ++i) g[i] = rng.next_unit();
      Vector pot = fam.apply(1.0, g);
      u = pot / pot.maxCoeff();
      if (s % 3 == 0 && prev_sample.size() == n) {
        const double theta = rng.next_unit();
        u = theta * prev_sample + (1.0 - theta) * u;  // convex mixtures stay 1-excessive and <= 1
      }
      prev_sample = u;
    }
    best = std::max(best, energy(reduite(u, U, L, 1.0, opt).values));
  }
  return best;
}

MarkovInequality capacity_markov_inequality(const Vector& u, double epsilon, const StateSpace& sp,
                                            const SubMarkovGenerator& L, double tol,
                                            const ReduiteOptions& opt) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("capacity_markov_inequality: epsilon must be positive");
  if (u.minCoeff() < 0.0) throw std::invalid_argument("capacity_markov_inequality: u must be nonnegative");
  const int n = L.size();
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  const Vector e_u = reduite(u, all, L, 1.0, opt).values;

  std::vector<int> level;
  for (int i = 0; i < n; ++i)
    if (u[i] > epsilon) level.push_back(i);

  MarkovInequality out;
  out.lhs = capacity(level, sp, L, opt).value;
  out.rhs = h_inner(e_u, sp.phi, sp) / epsilon;
  out.holds = out.lhs <= out.rhs + tol;
  return out;
}

ModifiedExcessiveSequence build_modified_sequence(const std::vector<std::vector<int>>& sets,
                                                  const SubMarkovGenerator& L, const StateSpace& sp,
                                                  const ModifiedSequenceOptions& opt) {
  if (sp.size() != L.size()) throw std::invalid_argument("build_modified_sequence: dimension mismatch");
  const int n = L.size();

  ModifiedExcessiveSequence seq;
  for (const auto& raw : sets) seq.sets.push_back(checked_set(raw, n, "build_modified_sequence"));
  for (std::size_t k = 0; k + 1 < seq.sets.size(); ++k)
    if (!std::includes(seq.sets[k].begin(), seq.sets[k].end(), seq.sets[k + 1].begin(), seq.sets[k + 1].end()))
      throw std::invalid_argument("build_modified_sequence: sets must be decreasing");

  seq.alpha_grid = opt.alpha_grid.empty() ? dyadic_grid(0, 10) : opt.alpha_grid;
  seq.l_grid = opt.l_grid.empty() ? dyadic_grid(0, 10) : opt.l_grid;
  std::sort(seq.alpha_grid.begin(), seq.alpha_grid.end());
  std::sort(seq.l_grid.begin(), seq.l_grid.end());
  if (seq.alpha_grid.front() < 1.0 || seq.l_grid.front() < 1.0)
    throw std::invalid_argument("build_modified_sequence: grids start at 1");

  ResolventFamily fam(L);
  const Vector g1phi = fam.apply(1.0, sp.phi);
  if (g1phi.minCoeff() <= 0.0)
    throw NumericalError("potential-positivity", "G_1 phi must be strictly positive");

  if (opt.auto_extend) {
    const double alpha_target = 8.0 * (1.0 + L.max_exit_rate());
    while (seq.alpha_grid.back() < alpha_target) seq.alpha_grid.push_back(2.0 * seq.alpha_grid.back());
    const double l_target = 1.0 / g1phi.minCoeff();
    while (seq.l_grid.back() < l_target) seq.l_grid.push_back(2.0 * seq.l_grid.back());
  }

  for (const auto& U : seq.sets) {
    Vector base = Vector::Zero(n);
    Vector top_reduite = Vector::Zero(n);
    for (double l : seq.l_grid) {
      const Vector obstacle = (l * g1phi).cwiseMin(1.0);
      const Vector w = reduite(obstacle, U, L, 1.0, opt.reduite_opt).values;
      top_reduite = w;  // reduites increase along the l grid
      for (double alpha : seq.alpha_grid)
        base = base.cwiseMax(alpha * fam.apply(alpha + 1.0, w));
    }

    std::vector<int> deficit;
    Vector lifted = base;
    for (int x : U) {
      if (base[x] < 1.0 - opt.deficit_threshold) deficit.push_back(x);
      lifted[x] = std::max(lifted[x], 1.0);
    }

    seq.capacities.push_back(h_inner(top_reduite, sp.phi, sp));
    seq.base.push_back(std::move(base));
    seq.deficit_sets.push_back(std::move(deficit));
    seq.lifted.push_back(std::move(lifted));
  }

  // Construction invariants.
  double prev_max = kInf;
  for (std::size_t k = 0; k < seq.sets.size(); ++k) {
    const Vector& hat = seq.lifted[k];
    for (int x : seq.sets[k])
      if (hat[x] < 1.0)
        throw NumericalError("modified-sequence-floor", "lifted function below 1 on U_" + std::to_string(k));
    for (double alpha : seq.alpha_grid) {
      const double viol_base = (alpha * fam.apply(alpha + 1.0, seq.base[k]) - seq.base[k]).maxCoeff();
      const double viol_hat = (alpha * fam.apply(alpha + 1.0, hat) - hat).maxCoeff();
      if (std::max(viol_base, viol_hat) > opt.invariant_tol)
        throw NumericalError("modified-sequence-excessivity",
                             "grid excessivity violated by " + std::to_string(std::max(viol_base, viol_hat)) +
                                 " at alpha = " + std::to_string(alpha));
    }
    const double cur_max = hat.size() ? hat.maxCoeff() : 0.0;
    if (cur_max > prev_max + 1e-12)
      throw NumericalError("modified-sequence-decay", "max of lifted function increased along the sequence");
    prev_max = cur_max;
    if (seq.sets[k].empty() && cur_max > 0.0)
      throw NumericalError("modified-sequence-decay", "lifted function nonzero on an empty set");
  }
  return seq;
}

}  // namespace gdf
