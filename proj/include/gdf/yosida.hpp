#ifndef GDF_YOSIDA_HPP
#define GDF_YOSIDA_HPP

#include "gdf/resolvent.hpp"

#include <vector>

namespace gdf {

// Bounded-generator approximation beta (beta G_beta - I) of L, together with
// the one-step kernel beta R_beta of its embedded chain on E u {cemetery}.
// l_beta is itself a valid sub-Markov generator with exit rates <= 2 beta.
struct YosidaApprox {
  double beta = 0.0;
  Matrix l_beta;                                // on E
  ExtendedKernel step;                          // beta R_beta; rows sum to 1
  std::vector<std::vector<double>> step_cdf;    // per-row sampling CDF, last entry exactly 1

  int size() const { return static_cast<int>(l_beta.rows()); }
  int cemetery() const { return size(); }
};

YosidaApprox yosida_generator(const SubMarkovGenerator& L, double beta);

// Pade scaling-and-squaring exponential (reference path; error budget about
// 1e-13 times the result norm for the matrices handled here).
Matrix matrix_exponential(const Matrix& a);

struct SemigroupEvaluation {
  double t = 0.0;
  Vector values;                // on E u {cemetery}
  double truncation_bound = 0.0;  // Poisson tail mass excluded by the cutoff
  int terms = 0;
};

struct SemigroupOptions {
  double tail_tol = 1e-12;
  int term_cap = 60000;         // series refused beyond this (use the exponential path)
  bool cross_check = false;     // compare against exp(t l_beta) on E
  double cross_check_slack = 1e-11;
};

// Transition semigroup of the subordinated chain as a Poisson-weighted power
// series of the step kernel, truncated once the Poisson tail beyond the last
// term is below tail_tol.
SemigroupEvaluation approx_semigroup(const YosidaApprox& ya, double t, const Vector& f_delta,
                                     const SemigroupOptions& opt = {});

// Closed form of (alpha I - l_beta)^{-1} through the resolvent of L at order
// alpha beta / (alpha + beta).
Matrix approx_resolvent(const SubMarkovGenerator& L, double alpha, double beta);

// Approximating bilinear form beta (u - beta G_beta u, v)_m.
double approx_form_eval(const SubMarkovGenerator& L, const StateSpace& sp, double beta,
                        const Vector& u, const Vector& v);

struct ConvergenceTable {
  std::vector<double> betas;
  std::vector<double> sup_error;  // ||exp(t l_beta) f - exp(t L) f||_inf
  std::vector<double> l2_error;   // same difference in the m-weighted norm
  double fitted_order = 0.0;      // log-log slope of sup_error against beta
};

ConvergenceTable convergence_table(const SubMarkovGenerator& L, const StateSpace& sp,
                                   const Vector& f, double t, const std::vector<double>& betas);

}  // namespace gdf

#endif  // GDF_YOSIDA_HPP
