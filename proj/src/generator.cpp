#include "gdf/generator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace gdf {

double SubMarkovGenerator::max_exit_rate() const {
  double r = 0.0;
  for (int i = 0; i < size(); ++i) r = std::max(r, std::abs(rates(i, i)));
  return r;
}

Vector SubMarkovGenerator::row_sums() const {
  Vector s(size());
  for (int i = 0; i < size(); ++i) s[i] = neumaier_sum(Vector(rates.row(i)));
  return s;
}

bool SubMarkovGenerator::is_conservative(double tol) const {
  return row_sums().cwiseAbs().maxCoeff() <= tol;
}

void SubMarkovGenerator::validate(double tol) const {
  if (rates.rows() != rates.cols()) throw NumericalError("generator-shape", "rate matrix must be square");
  if (rates.rows() == 0) throw NumericalError("generator-shape", "empty rate matrix");
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j)
      if (i != j && rates(i, j) < -tol)
        throw NumericalError("generator-rates",
                             "negative off-diagonal rate at (" + std::to_string(i) + "," + std::to_string(j) + ")");
  const Vector s = row_sums();
  for (int i = 0; i < size(); ++i)
    if (s[i] > tol * std::max(1.0, max_exit_rate()))
      throw NumericalError("generator-rowsum", "row " + std::to_string(i) + " sums to " + std::to_string(s[i]));
}

SubMarkovGenerator model_birth_death(int n, const std::vector<double>& birth,
                                     const std::vector<double>& death,
                                     const std::vector<double>& kill) {
  if (n < 1) throw std::invalid_argument("birth_death: n must be >= 1");
  if (static_cast<int>(birth.size()) != n - 1) throw std::invalid_argument("birth_death: need n-1 birth rates");
  if (static_cast<int>(death.size()) != n - 1) throw std::invalid_argument("birth_death: need n-1 death rates");
  if (static_cast<int>(kill.size()) != n) throw std::invalid_argument("birth_death: need n killing rates");
  for (double r : birth)
    if (r < 0) throw std::invalid_argument("birth_death: negative birth rate");
  for (double r : death)
    if (r < 0) throw std::invalid_argument("birth_death: negative death rate");
  for (double r : kill)
    if (r < 0) throw std::invalid_argument("birth_death: negative killing rate");

  SubMarkovGenerator g;
  g.rates = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    g.rates(i, i + 1) = birth[i];
    g.rates(i + 1, i) = death[i];
  }
  for (int i = 0; i < n; ++i) {
    double out = kill[i];
    if (i + 1 < n) out += birth[i];
    if (i > 0) out += death[i - 1];
    g.rates(i, i) = -out;
  }
  return g;
}

SubMarkovGenerator model_absorbed_diffusion(int cells,
                                            const std::function<double(double)>& diffusion,
                                            const std::function<double(double)>& drift) {
  if (cells < 2) throw std::invalid_argument("absorbed_diffusion: need at least 2 cells");
  const double h = 1.0 / cells;
  SubMarkovGenerator g;
  g.rates = Matrix::Zero(cells, cells);
  for (int i = 0; i < cells; ++i) {
    const double x = (i + 0.5) * h;
    const double a = diffusion(x);
    const double b = drift(x);
    if (!(a > 0.0)) throw std::invalid_argument("absorbed_diffusion: diffusion coefficient must be positive");
    const double d = a / (h * h);
    double right, left;
    if (std::abs(b) * h > 2.0 * a) {
      // cell Peclet number too large for central differencing; upwind the
      // drift so the off-diagonal rates stay nonnegative
      right = d + std::max(b, 0.0) / h;
      left = d + std::max(-b, 0.0) / h;
    } else {
      right = d + b / (2.0 * h);
      left = d - b / (2.0 * h);
    }
    if (i + 1 < cells) g.rates(i, i + 1) = right;
    if (i > 0) g.rates(i, i - 1) = left;
    g.rates(i, i) = -(right + left);  // boundary faces fold into killing
  }
  return g;
}

SubMarkovGenerator model_space_time_transport(const SubMarkovGenerator& spatial, int layers) {
  if (layers < 2) throw std::invalid_argument("space_time_transport: need at least 2 layers");
  const int ns = spatial.size();
  const int n = ns * layers;
  const double hop = static_cast<double>(layers);  // unit drift across span 1
  SubMarkovGenerator g;
  g.rates = Matrix::Zero(n, n);
  for (int t = 0; t < layers; ++t) {
    g.rates.block(t * ns, t * ns, ns, ns) = spatial.rates;
    for (int x = 0; x < ns; ++x) {
      const int idx = t * ns + x;
      if (t + 1 < layers) g.rates(idx, idx + ns) += hop;
      g.rates(idx, idx) -= hop;  // last layer: the hop leaves the window
    }
  }
  return g;
}

SubMarkovGenerator block_diag(const SubMarkovGenerator& a, const SubMarkovGenerator& b) {
  const int na = a.size(), nb = b.size();
  SubMarkovGenerator g;
  g.rates = Matrix::Zero(na + nb, na + nb);
  g.rates.topLeftCorner(na, na) = a.rates;
  g.rates.bottomRightCorner(nb, nb) = b.rates;
  return g;
}

DetailedBalanceReport check_detailed_balance(const SubMarkovGenerator& L, double tol) {
  const int n = L.size();
  double max_rate = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) max_rate = std::max(max_rate, L.rates(i, j));
  const double rate_tol = tol * std::max(1.0, max_rate);

  DetailedBalanceReport rep;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const bool fwd = L.rates(i, j) > rate_tol;
      const bool bwd = L.rates(j, i) > rate_tol;
      if (fwd != bwd) {
        rep.obstruction = "one-directional edge " + std::to_string(i) + "->" + std::to_string(j);
        return rep;
      }
    }

  // Two-directional everywhere: propagate log-weights along a spanning forest
  // and check consistency on the remaining edges (cycle condition).
  std::vector<double> logw(n, 0.0);
  std::vector<char> seen(n, 0);
  for (int root = 0; root < n; ++root) {
    if (seen[root]) continue;
    seen[root] = 1;
    std::deque<int> queue{root};
    while (!queue.empty()) {
      const int x = queue.front();
      queue.pop_front();
      for (int y = 0; y < n; ++y) {
        if (y == x || L.rates(x, y) <= rate_tol) continue;
        const double step = std::log(L.rates(x, y) / L.rates(y, x));
        if (!seen[y]) {
          seen[y] = 1;
          logw[y] = logw[x] + step;
          queue.push_back(y);
        } else if (std::abs(logw[y] - (logw[x] + step)) > tol * 10.0) {
          rep.obstruction = "cycle imbalance at edge " + std::to_string(x) + "-" + std::to_string(y);
          return rep;
        }
      }
    }
  }
  rep.symmetrizable = true;
  return rep;
}

}  // namespace gdf
