#ifndef GDF_RESOLVENT_HPP
#define GDF_RESOLVENT_HPP

#include "gdf/generator.hpp"
#include "gdf/state_space.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace gdf {

// (alpha I - L)^{-1}. Entrywise nonnegative; alpha times any row sum is at
// most 1, with the deficit equal to the killed mass.
struct ResolventKernel {
  double alpha;
  Matrix matrix;
};

// The kernel above extended to E u {cemetery}: the deficit 1/alpha - rowsum
// goes into the cemetery column, and the cemetery row keeps all its mass
// 1/alpha on the cemetery. Every row sums to exactly 1/alpha.
struct ExtendedKernel {
  double alpha;
  Matrix matrix;
  int inner_size() const { return static_cast<int>(matrix.rows()) - 1; }
};

// m-adjoint: diag(m)^{-1} K^T diag(m).
struct AdjointResolvent {
  double alpha;
  Matrix matrix;
};

ResolventKernel resolvent(const SubMarkovGenerator& L, double alpha);
ExtendedKernel extend_cemetery(const ResolventKernel& k, double defect_tol = 1e-12);
AdjointResolvent adjoint(const ResolventKernel& k, const StateSpace& sp);

struct ResidualCheck {
  bool ok = false;
  double residual = 0.0;
};

// Max-entry residual of G_a - G_b - (b - a) G_a G_b.
ResidualCheck check_resolvent_identity(const SubMarkovGenerator& L, double alpha, double beta,
                                       double tol = 1e-11);

struct YosidaResolventBound {
  bool ok = false;
  double worst_violation = 0.0;         // max over beta and states of beta G_{beta+1}u - u
  std::vector<double> sup_gap;          // per beta: ||u - beta G_{beta+1} u||_inf
};

// For a 1-excessive u, verifies beta G_{beta+1} u <= u entrywise on the given
// beta grid and reports the approach of beta G_{beta+1}u to u. Throws
// std::invalid_argument when u is not 1-excessive.
YosidaResolventBound check_yosida_resolvent_bound(const SubMarkovGenerator& L, const Vector& u,
                                                  const std::vector<double>& betas,
                                                  double tol = 1e-12);

// Shared LU cache for one generator queried at many orders. Query operations
// are reentrant; the cache is guarded internally.
class ResolventFamily {
 public:
  explicit ResolventFamily(const SubMarkovGenerator& L) : rates_(L.rates) {}

  Vector apply(double alpha, const Vector& f) const;  // G_alpha f
  Matrix dense(double alpha) const;
  int size() const { return static_cast<int>(rates_.rows()); }

 private:
  using Factor = Eigen::PartialPivLU<Matrix>;
  std::shared_ptr<const Factor> factor(double alpha) const;

  Matrix rates_;
  mutable std::mutex mu_;
  mutable std::map<double, std::shared_ptr<const Factor>> cache_;
};

}  // namespace gdf

#endif  // GDF_RESOLVENT_HPP
