#ifndef GDF_GENERATOR_HPP
#define GDF_GENERATOR_HPP

#include "gdf/numeric.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gdf {

// Rate matrix of a sub-Markov jump process on E: nonnegative jump rates off
// the diagonal, row sums <= 0. A strictly negative row sum is killing; the
// killed mass is what the cemetery extension later routes to the extra state.
struct SubMarkovGenerator {
  Matrix rates;

  int size() const { return static_cast<int>(rates.rows()); }
  double max_exit_rate() const;
  bool is_conservative(double tol = 1e-12) const;
  Vector row_sums() const;

  // Throws NumericalError when the sub-Markov rate structure is violated.
  void validate(double tol = 1e-12) const;
};

// Birth-death chain on {0..n-1}: birth[i] is the rate i -> i+1 (n-1 entries),
// death[i] the rate i+1 -> i (n-1 entries), kill[i] a per-state killing rate
// (n entries).
SubMarkovGenerator model_birth_death(int n, const std::vector<double>& birth,
                                     const std::vector<double>& death,
                                     const std::vector<double>& kill);

// Finite-volume discretization of a one-dimensional diffusion on [0,1] with
// absorbing boundary: `cells` cells of width h = 1/cells, coefficients
// evaluated at cell centers. Jumps across the two boundary faces become
// killing. The drift is differenced centrally while |b| h <= 2 a and upwinded
// beyond that, which keeps all off-diagonal rates nonnegative.
SubMarkovGenerator model_absorbed_diffusion(int cells,
                                            const std::function<double(double)>& diffusion,
                                            const std::function<double(double)>& drift);

// Space-time product: `layers` copies of the spatial chain stacked over a
// time grid of total span 1, traversed by a unit drift (rate = layers per
// hop, one-directional). Leaving the last layer kills. State (x, t) has index
// t * spatial.size() + x. The time transitions have no reverse rate, so the
// generator is not symmetrizable by any positive weights.
SubMarkovGenerator model_space_time_transport(const SubMarkovGenerator& spatial, int layers);

// Direct sum of two generators; the two blocks never communicate.
SubMarkovGenerator block_diag(const SubMarkovGenerator& a, const SubMarkovGenerator& b);

struct DetailedBalanceReport {
  bool symmetrizable = false;
  std::string obstruction;  // empty when symmetrizable
};

// Kolmogorov criterion for reversibility with respect to some positive
// weights: every edge must be two-directional and rate ratios must be
// consistent around cycles.
DetailedBalanceReport check_detailed_balance(const SubMarkovGenerator& L, double tol = 1e-10);

}  // namespace gdf

#endif  // GDF_GENERATOR_HPP
