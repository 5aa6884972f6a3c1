#include "gdf/resolvent.hpp"

#include <cmath>

namespace gdf {

static void check_order(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("resolvent order must be positive and finite");
}

ResolventKernel resolvent(const SubMarkovGenerator& L, double alpha) {
  check_order(alpha);
  const int n = L.size();
  Matrix a = -L.rates;
  a.diagonal().array() += alpha;
  Eigen::PartialPivLU<Matrix> lu(a);
  if (lu.rcond() < 1e-14)
    throw NumericalError("resolvent-singular",
                         "alpha I - L is numerically singular at alpha = " + std::to_string(alpha) +
                             "; the generator is invalid");
  ResolventKernel k;
  k.alpha = alpha;
  k.matrix = lu.solve(Matrix::Identity(n, n));
  return k;
}

ExtendedKernel extend_cemetery(const ResolventKernel& k, double defect_tol) {
  const int n = static_cast<int>(k.matrix.rows());
  const double inv_alpha = 1.0 / k.alpha;
  ExtendedKernel e;
  e.alpha = k.alpha;
  e.matrix = Matrix::Zero(n + 1, n + 1);
  for (int i = 0; i < n; ++i) {
    Vector row = k.matrix.row(i);
    for (int j = 0; j < n; ++j) {
      if (row[j] < -1e-14)
        throw NumericalError("kernel-positivity", "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                                      ") = " + std::to_string(row[j]));
      if (row[j] < 0.0) row[j] = 0.0;
    }
    const double defect = inv_alpha - neumaier_sum(row);
    if (defect < -defect_tol * inv_alpha)
      throw NumericalError("kernel-submarkov",
                           "row " + std::to_string(i) + " exceeds 1/alpha by " + std::to_string(-defect));
    e.matrix.row(i).head(n) = row;
    e.matrix(i, n) = std::max(defect, 0.0);
  }
  e.matrix(n, n) = inv_alpha;  // the cemetery is absorbing
  return e;
}

AdjointResolvent adjoint(const ResolventKernel& k, const StateSpace& sp) {
  const int n = static_cast<int>(k.matrix.rows());
  if (sp.size() != n) throw std::invalid_argument("adjoint: space/kernel dimension mismatch");
  AdjointResolvent a;
  a.alpha = k.alpha;
  a.matrix.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a.matrix(i, j) = k.matrix(j, i) * sp.m[j] / sp.m[i];
  return a;
}

ResidualCheck check_resolvent_identity(const SubMarkovGenerator& L, double alpha, double beta, double tol) {
  const Matrix ga = resolvent(L, alpha).matrix;
  const Matrix gb = resolvent(L, beta).matrix;
  const Matrix lhs = ga - gb;
  const Matrix rhs = (beta - alpha) * (ga * gb);
  ResidualCheck c;
  c.residual = (lhs - rhs).cwiseAbs().maxCoeff();
  c.ok = c.residual <= tol;
  return c;
}

YosidaResolventBound check_yosida_resolvent_bound(const SubMarkovGenerator& L, const Vector& u,
                                                  const std::vector<double>& betas, double tol) {
  if (u.size() != L.size()) throw std::invalid_argument("dimension mismatch");
  // 1-excessivity certificate: u >= 0 and (I - L) u >= 0.
  const Vector residual = u - L.rates * u;
  if (u.minCoeff() < -tol || residual.minCoeff() < -tol * std::max(1.0, L.max_exit_rate()))
    throw std::invalid_argument("check_yosida_resolvent_bound: input is not 1-excessive");

  ResolventFamily fam(L);
  YosidaResolventBound out;
  out.ok = true;
  for (double beta : betas) {
    const Vector v = beta * fam.apply(beta + 1.0, u);
    const double viol = (v - u).maxCoeff();
    out.worst_violation = std::max(out.worst_violation, viol);
    if (viol > tol) out.ok = false;
    out.sup_gap.push_back((u - v).cwiseAbs().maxCoeff());
  }
  return out;
}

std::shared_ptr<const ResolventFamily::Factor> ResolventFamily::factor(double alpha) const {
  check_order(alpha);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(alpha);
  if (it != cache_.end()) return it->second;
  Matrix a = -rates_;
  a.diagonal().array() += alpha;
  auto lu = std::make_shared<Factor>(a);
  if (lu->rcond() < 1e-14)
    throw NumericalError("resolvent-singular", "alpha I - L singular at alpha = " + std::to_string(alpha));
  cache_.emplace(alpha, lu);
  return lu;
}

Vector ResolventFamily::apply(double alpha, const Vector& f) const { return factor(alpha)->solve(f); }

Matrix ResolventFamily::dense(double alpha) const {
  return factor(alpha)->solve(Matrix::Identity(size(), size()));
}

}  // namespace gdf
