#include "gdf/yosida.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace gdf {

YosidaApprox yosida_generator(const SubMarkovGenerator& L, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("yosida_generator: beta must be positive");
  const ResolventKernel g = resolvent(L, beta);
  const int n = L.size();

  YosidaApprox ya;
  ya.beta = beta;
  ya.l_beta = beta * (beta * g.matrix - Matrix::Identity(n, n));
  ya.step = extend_cemetery(g);
  ya.step.matrix *= beta;

  // Rows of beta R_beta sum to 1 by construction; renormalize away the last
  // few ulps so the rows are usable as sampling distributions.
  ya.step_cdf.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    Vector row = ya.step.matrix.row(i);
    const double total = neumaier_sum(row);
    if (std::abs(total - 1.0) > 1e-12)
      throw NumericalError("chain-step-rowsum",
                           "row " + std::to_string(i) + " of beta R_beta sums to " + std::to_string(total));
    row /= total;
    ya.step.matrix.row(i) = row;
    auto& cdf = ya.step_cdf[i];
    cdf.resize(n + 1);
    double acc = 0.0, comp = 0.0;
    for (int j = 0; j <= n; ++j) {
      neumaier_add(acc, comp, row[j]);
      cdf[j] = acc + comp;
    }
    cdf[n] = 1.0;
  }
  return ya;
}

Matrix matrix_exponential(const Matrix& a) { return a.exp(); }

// Smallest K >= lambda with Poisson(lambda) mass beyond K certifiably below
// tol: Chernoff bound first, then the exact cumulative sum.
static int poisson_cutoff(double lambda, double tol, int cap) {
  if (lambda <= 0.0) return 0;
  const double log_tol = std::log(tol);
  int k = static_cast<int>(lambda) + 1;
  const auto log_chernoff = [lambda](int kk) {
    return -lambda + kk * (1.0 + std::log(lambda) - std::log(static_cast<double>(kk)));
  };
  while (k <= cap && log_chernoff(k) > log_tol) ++k;
  if (k > cap) throw NumericalError("series-term-cap", "Poisson cutoff exceeds the term cap");

  // Exact check: cumulative mass through K must leave less than tol.
  double mass = 0.0, comp = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double logw = -lambda + j * std::log(lambda) - std::lgamma(j + 1.0);
    neumaier_add(mass, comp, std::exp(logw));
  }
  while (1.0 - (mass + comp) > tol) {
    ++k;
    if (k > cap) throw NumericalError("series-term-cap", "Poisson cutoff exceeds the term cap");
    const double logw = -lambda + k * std::log(lambda) - std::lgamma(k + 1.0);
    neumaier_add(mass, comp, std::exp(logw));
  }
  return k;
}

SemigroupEvaluation approx_semigroup(const YosidaApprox& ya, double t, const Vector& f_delta,
                                     const SemigroupOptions& opt) {
  if (t < 0.0) throw std::invalid_argument("approx_semigroup: t must be nonnegative");
  const int n = ya.size();
  if (f_delta.size() != n + 1) throw std::invalid_argument("approx_semigroup: f must live on E u {cemetery}");

  SemigroupEvaluation ev;
  ev.t = t;
  if (t == 0.0) {
    ev.values = f_delta;
    return ev;
  }

  const double lambda = ya.beta * t;
  const int cutoff = poisson_cutoff(lambda, opt.tail_tol, opt.term_cap);
  ev.terms = cutoff + 1;

  const double log_lambda = std::log(lambda);
  Vector acc = Vector::Zero(n + 1);
  Vector power = f_delta;
  double mass = 0.0, mass_comp = 0.0;
  for (int k = 0; k <= cutoff; ++k) {
    const double w = std::exp(-lambda + k * log_lambda - std::lgamma(k + 1.0));
    if (w > 0.0) acc += w * power;
    neumaier_add(mass, mass_comp, w);
    if (k < cutoff) power = ya.step.matrix * power;
  }
  ev.values = std::move(acc);
  ev.truncation_bound = std::max(0.0, 1.0 - (mass + mass_comp)) * f_delta.cwiseAbs().maxCoeff();

  if (opt.cross_check) {
    const Vector direct = matrix_exponential(t * ya.l_beta) * f_delta.head(n);
    const double gap = (ev.values.head(n) - direct).cwiseAbs().maxCoeff();
    const double budget = ev.truncation_bound + opt.cross_check_slack * std::max(1.0, f_delta.cwiseAbs().maxCoeff());
    if (gap > budget)
      throw NumericalError("semigroup-cross-check",
                           "series and exponential differ by " + std::to_string(gap));
  }
  return ev;
}

Matrix approx_resolvent(const SubMarkovGenerator& L, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("approx_resolvent: orders must be positive");
  const double mixed = alpha * beta / (alpha + beta);
  const double weight = (beta / (alpha + beta)) * (beta / (alpha + beta));
  Matrix out = weight * resolvent(L, mixed).matrix;
  out.diagonal().array() += 1.0 / (alpha + beta);
  return out;
}

double approx_form_eval(const SubMarkovGenerator& L, const StateSpace& sp, double beta,
                        const Vector& u, const Vector& v) {
  if (!(beta > 0.0)) throw std::invalid_argument("approx_form_eval: beta must be positive");
  ResolventFamily fam(L);
  const Vector gu = fam.apply(beta, u);
  return beta * h_inner(u - beta * gu, v, sp);
}

ConvergenceTable convergence_table(const SubMarkovGenerator& L, const StateSpace& sp,
                                   const Vector& f, double t, const std::vector<double>& betas) {
  if (f.size() != L.size()) throw std::invalid_argument("convergence_table: dimension mismatch");
  const Vector target = matrix_exponential(t * L.rates) * f;
  ConvergenceTable table;
  for (double beta : betas) {
    const YosidaApprox ya = yosida_generator(L, beta);
    const Vector approx = matrix_exponential(t * ya.l_beta) * f;
    const Vector diff = approx - target;
    table.betas.push_back(beta);
    table.sup_error.push_back(diff.cwiseAbs().maxCoeff());
    table.l2_error.push_back(std::sqrt(std::max(0.0, h_inner(diff, diff, sp))));
  }
  // Fewer than two positive errors (e.g. f = 0) carry no order information.
  std::size_t positive = 0;
  for (double e : table.sup_error)
    if (e > 0.0) ++positive;
  table.fitted_order = positive >= 2 ? fit_loglog(table.betas, table.sup_error).slope : 0.0;
  return table;
}

}  // namespace gdf
