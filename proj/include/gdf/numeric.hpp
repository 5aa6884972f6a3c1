#ifndef GDF_NUMERIC_HPP
#define GDF_NUMERIC_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A numerical invariant failed at run time. The CLI maps this to exit code 3
// and reports the name of the violated invariant.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string invariant, const std::string& detail)
      : std::runtime_error(invariant + ": " + detail),
        invariant_(std::move(invariant)) {}
  const std::string& invariant() const { return invariant_; }

 private:
  std::string invariant_;
};

// Bad input file or config. The CLI maps this to exit code 2. `line` is
// 1-based; 0 means "no specific line".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, const std::string& source = "", int line = 0)
      : std::runtime_error(format(msg, source, line)), line_(line) {}
  int line() const { return line_; }

 private:
  static std::string format(const std::string& msg, const std::string& source, int line) {
    if (source.empty()) return msg;
    if (line <= 0) return source + ": " + msg;
    return source + ":" + std::to_string(line) + ": " + msg;
  }
  int line_;
};

// Compensated (Neumaier) summation. Used wherever an invariant is checked at
// tolerances near machine precision, so the check itself does not drown in
// accumulation error.
inline double neumaier_sum(const double* xs, std::size_t n) {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xs[i];
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  return s + c;
}

inline double neumaier_sum(const Vector& v) { return neumaier_sum(v.data(), static_cast<std::size_t>(v.size())); }

inline void neumaier_add(double& sum, double& comp, double x) {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x))
    comp += (sum - t) + x;
  else
    comp += (x - t) + sum;
  sum = t;
}

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Least-squares line through (log x_i, log y_i). Points with y <= 0 are
// skipped (they carry no order information).
inline SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++k;
  }
  if (k < 2) throw NumericalError("slope-fit", "need at least two positive samples");
  const double n = static_cast<double>(k);
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw NumericalError("slope-fit", "degenerate abscissae");
  SlopeFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

inline std::vector<double> dyadic_grid(int log2_lo, int log2_hi) {
  std::vector<double> g;
  for (int k = log2_lo; k <= log2_hi; ++k) g.push_back(std::ldexp(1.0, k));
  return g;
}

}  // namespace gdf

#endif  // GDF_NUMERIC_HPP
