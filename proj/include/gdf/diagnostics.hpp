#ifndef GDF_DIAGNOSTICS_HPP
#define GDF_DIAGNOSTICS_HPP

#include "gdf/simulate.hpp"
#include "gdf/state_space.hpp"

#include <vector>

namespace gdf {

// A family of bounded nonnegative functions on E u {cemetery} whose order-1
// resolvent images separate all points (cemetery included). Feeds the metric
// rho and the convergence probes.
struct SeparatingFamily {
  std::vector<Vector> u_list;   // on E u {cemetery}
  std::vector<Vector> g_list;   // resolvent images R_1 u
  std::vector<double> weights;  // 2^{-(k+1)}
  int point_count = 0;          // |E| + 1
};

// Builds `count` functions: indicator bumps cycling through the states, every
// fourth one shifted by a constant on the whole extended space. Throws
// NumericalError when the images fail to separate some pair (ask for a larger
// count).
SeparatingFamily build_separating_family(const StateSpace& sp, const SubMarkovGenerator& L, int count);

// rho(x, y) = sum_k w_k (|g_k(x) - g_k(y)| ^ 1); a metric on E u {cemetery}.
double rho_distance(int x, int y, const SeparatingFamily& fam);

struct PathStats {
  double mean_jumps = 0.0;
  long max_jumps = 0;
  double mean_rho_jump = 0.0;  // over all arrivals, self-loops counting 0
  double max_rho_jump = 0.0;
  long state_changes = 0;
  double min_change_gap = kInf;  // closest spacing of consecutive state changes (cadlag modulus ingredient)
};

PathStats path_regularity_stats(const std::vector<PathSample>& paths, const SeparatingFamily& fam);

struct ConvergenceReport {
  std::vector<double> betas;
  std::vector<double> discrepancy;  // max over (f, t) cells of |MC mean - (e^{tL} f)(x)|
  std::vector<double> sigma;        // largest per-cell standard error
  std::vector<double> mean_jumps;
  std::vector<double> max_rho_jump;
  bool final_quarter_ok = false;    // last discrepancy <= first/4 up to CI slack
};

// Probes the approach of the chain laws to the target semigroup: empirical
// E[f(X_t)] started at x against (e^{tL} f)(x), for the family's functions
// that vanish at the cemetery and for every t in t_list.
ConvergenceReport weak_convergence_probe(int x, const std::vector<double>& betas,
                                         const std::vector<double>& t_list,
                                         const SeparatingFamily& fam, const SubMarkovGenerator& L,
                                         const StateSpace& sp, const MCOptions& mc);

}  // namespace gdf

#endif  // GDF_DIAGNOSTICS_HPP
