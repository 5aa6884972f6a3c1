#ifndef GDF_POTENTIAL_HPP
#define GDF_POTENTIAL_HPP

#include "gdf/resolvent.hpp"
#include "gdf/rng.hpp"

#include <vector>

namespace gdf {

struct ExcessivityCertificate {
  double order = 0.0;
  double min_value = 0.0;     // min_x v(x)
  double min_residual = 0.0;  // min_x ((alpha I - L) v)(x)
  bool holds(double tol) const { return min_value >= -tol && min_residual >= -tol; }
};

ExcessivityCertificate certify_excessive(const Vector& v, const SubMarkovGenerator& L, double alpha);
bool is_alpha_excessive(const Vector& v, const SubMarkovGenerator& L, double alpha, double tol,
                        double* residual = nullptr);

// Nonnegative function together with its order and the certificate residual
// min_x ((alpha I - L) v)(x). Construction throws when the certificate fails.
struct ExcessiveFunction {
  double order;
  Vector values;
  double certificate_residual;
};
ExcessiveFunction excessive_function(Vector v, const SubMarkovGenerator& L, double alpha,
                                     double tol = 1e-10);

struct ReduiteOptions {
  double tol = 1e-10;           // certified sup-norm distance to the fixed point
  long max_iterations = 20000000;
  double lambda_factor = 1.05;  // uniformization margin over max |L_xx|
};

struct Reduite {
  double order = 0.0;
  std::vector<int> set;  // U
  Vector base;           // f
  Vector values;         // smallest alpha-excessive majorant of f on U (and of 0 everywhere)
  long iterations = 0;
  double certified_error = 0.0;
};

// Monotone value iteration v <- max(f 1_U, lambda/(lambda+alpha) P v) with
// P = I + L/lambda. The iterates increase to the fixed point from below; the
// stopping rule converts the last increment into a certified error bound via
// the contraction factor. Throws NumericalError on non-convergence.
Reduite reduite(const Vector& f, const std::vector<int>& U, const SubMarkovGenerator& L,
                double alpha, const ReduiteOptions& opt = {});

// The increasing-limit construction of the balayage of 1 on U: reduites of
// 1 ^ (k G_1 phi) along k = 1, 2, 4, ..., checked to be entrywise
// nondecreasing, with the limit compared against the direct reduite of 1.
Vector e_U_by_definition(const std::vector<int>& U, const SubMarkovGenerator& L,
                         const StateSpace& sp, int k_max = 40, const ReduiteOptions& opt = {},
                         double agreement_tol = 1e-8);

struct CapacityReport {
  std::vector<int> set;
  Vector e_U;
  double value = 0.0;
};

// Cap(U) = integral of e_U phi dm with e_U the reduite of 1 on U.
CapacityReport capacity(const std::vector<int>& U, const StateSpace& sp,
                        const SubMarkovGenerator& L, const ReduiteOptions& opt = {});

// Dual route: max over sampled 1-excessive u <= 1 of the order-1 form energy
// of reduite(u, U) against the adjoint potential of phi. The sample always
// contains u = 1, which attains the capacity on a finite space.
double capacity_dual_lower_bound(const std::vector<int>& U, const StateSpace& sp,
                                 const SubMarkovGenerator& L, int sample_count, std::uint64_t seed,
                                 const ReduiteOptions& opt = {});

struct MarkovInequality {
  double lhs = 0.0;  // Cap({u > eps})
  double rhs = 0.0;  // (1/eps) * integral of e_u phi dm
  bool holds = false;
};

// Chebyshev-type capacity bound through the smallest 1-excessive majorant of u.
MarkovInequality capacity_markov_inequality(const Vector& u, double epsilon, const StateSpace& sp,
                                            const SubMarkovGenerator& L, double tol = 1e-9,
                                            const ReduiteOptions& opt = {});

struct ModifiedSequenceOptions {
  std::vector<double> alpha_grid;  // defaults to dyadic 1..2^10
  std::vector<double> l_grid;      // defaults to dyadic 1..2^10
  // Extend alpha_grid dyadically until the top entry dominates the fastest
  // exit rate, and l_grid until l * min G_1 phi >= 1 (the truncated obstacle
  // saturates at 1). Keeps the grid supremum uniformly close to its limit.
  bool auto_extend = true;
  double deficit_threshold = 1e-12;  // membership test for the deficit set
  double invariant_tol = 1e-9;
  ReduiteOptions reduite_opt{1e-11, 20000000, 1.05};
};

struct ModifiedExcessiveSequence {
  std::vector<std::vector<int>> sets;           // decreasing U_n
  std::vector<double> capacities;               // Cap(U_n)
  std::vector<Vector> base;                     // grid supremum over alpha, l
  std::vector<std::vector<int>> deficit_sets;   // states of U_n where the supremum is still < 1
  std::vector<Vector> lifted;                   // base raised to exactly 1 on U_n
  std::vector<double> alpha_grid;               // grids actually used
  std::vector<double> l_grid;
};

// For each U_n: reduites of the truncated potentials 1 ^ (l G_1 phi) on U_n,
// swept through alpha G_{alpha+1} over the alpha grid, entrywise maximum over
// both grids. The lift fills the remaining grid-truncation deficit on U_n so
// the result is exactly 1 there while staying below the exact balayage of 1;
// this keeps the grid-alpha excessivity inequality intact. All construction
// invariants are asserted before returning.
ModifiedExcessiveSequence build_modified_sequence(const std::vector<std::vector<int>>& sets,
                                                  const SubMarkovGenerator& L,
                                                  const StateSpace& sp,
                                                  const ModifiedSequenceOptions& opt = {});

}  // namespace gdf

#endif  // GDF_POTENTIAL_HPP
