#ifndef GDF_SIMULATE_HPP
#define GDF_SIMULATE_HPP

#include "gdf/rng.hpp"
#include "gdf/yosida.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace gdf {

// One cadlag trajectory of the subordinated chain: piecewise constant between
// Poisson(beta) arrivals, right-continuous, absorbed once it enters the
// cemetery.
struct PathSample {
  double beta = 0.0;
  double horizon = 0.0;
  std::vector<double> jump_times;  // strictly increasing, within [0, horizon]
  std::vector<int> states;         // states[k] holds on [jump_times[k-1], jump_times[k]); states[0] at 0
  double absorbed_at = kInf;       // first entry into the cemetery, +inf if none

  int state_at(double t) const;
};

int sample_chain_step(int x, const YosidaApprox& ya, CounterRng& rng);
PathSample sample_path(int x, const YosidaApprox& ya, double horizon, CounterRng& rng);

// First time the path sits in the set; `member` is indexed over E u {cemetery}.
// Returns +inf when the set is not visited within the horizon.
double hitting_time(const PathSample& p, const std::vector<char>& member);

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n_paths = 0;
  std::uint64_t seed = 0;
};

struct MCOptions {
  long n_paths = 0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream_base = 0;  // offset so distinct estimator cells see distinct streams
  int threads = 1;
};

// Empirical mean of f(X_t) started at x. Requires t <= horizon.
MCEstimate mc_semigroup_mean(int x, const YosidaApprox& ya, double t, const Vector& f_delta,
                             const MCOptions& mc);

// Laplace-transform estimator: per-path integral of e^{-alpha t} f(X_t),
// computed in closed form over the constant pieces. The horizon truncation
// bias e^{-alpha T} ||f|| / alpha must fit inside bias_budget.
MCEstimate mc_laplace(int x, double alpha, const Vector& f_delta, const YosidaApprox& ya,
                      const MCOptions& mc, double bias_budget = 1e-6);

struct ExitBound {
  MCEstimate combined;    // upper estimator of E[e^{-2 tau}]: hit part plus horizon tail part
  double hit_mean = 0.0;  // mean of e^{-2 tau} 1_{tau <= T}
  double tail_mean = 0.0; // mean of e^{-2T} over paths still alive and unhit at T
  double bound = 0.0;     // value of the certified majorant at x
  bool verdict = false;   // combined.mean + 4 std_error <= bound + tol
};

// Statistical check of the exit-time bound E_x[e^{-2 tau_U}] <= e_hat(x).
// Paths absorbed without hitting contribute exactly 0; paths alive and unhit
// at the horizon contribute the conservative cap e^{-2T}.
ExitBound mc_exit_bound(int x, const std::vector<int>& U, const Vector& e_hat,
                        const YosidaApprox& ya, const MCOptions& mc, double tol = 1e-9);

struct TwoExcessiveReport {
  bool ok = false;
  double max_violation = 0.0;  // max over the t grid and states of e^{-2t} P_t v - v
  double smallest_t_gap = 0.0; // ||e^{-2t} P_t v - v||_inf at the smallest grid t
};

// Deterministic 2-excessivity check of v for the approximating semigroup:
// exp(t l_beta) evaluated on a t grid. Requires beta >= 2.
TwoExcessiveReport check_two_excessive(const Vector& v, const YosidaApprox& ya,
                                       const std::vector<double>& t_grid, double tol = 1e-9);

struct InvarianceReport {
  long n_paths = 0;
  long escapes = 0;
  bool ok = false;
};

// Pathwise invariance of S u {cemetery}. The kernel-level premise (no step
// mass leaving S u {cemetery} from S) is checked first and a failing premise
// refuses the run with NumericalError.
InvarianceReport invariance_check(const std::vector<int>& S, const YosidaApprox& ya,
                                  const MCOptions& mc);

// Deterministic fixed-structure parallel reduction: paths are processed in
// blocks of 4096, per-block sums are compensated, and blocks are combined in
// index order, so results are bit-identical for any thread count.
namespace detail {
inline constexpr long kMcBlock = 4096;
void run_blocks(long n_blocks, int threads, const std::function<void(long)>& block_fn);
}

template <std::size_t K, class PerPath>
std::array<double, K> mc_reduce(const MCOptions& mc, PerPath&& per_path) {
  if (mc.n_paths <= 0) throw std::invalid_argument("mc_reduce: need a positive path count");
  const long n_blocks = (mc.n_paths + detail::kMcBlock - 1) / detail::kMcBlock;
  std::vector<std::array<double, K>> block_sums(static_cast<std::size_t>(n_blocks));

  detail::run_blocks(n_blocks, mc.threads, [&](long b) {
    std::array<double, K> sum{}, comp{};
    const long lo = b * detail::kMcBlock;
    const long hi = std::min(mc.n_paths, lo + detail::kMcBlock);
    for (long i = lo; i < hi; ++i) {
      const std::array<double, K> vals = per_path(i);
      for (std::size_t c = 0; c < K; ++c) neumaier_add(sum[c], comp[c], vals[c]);
    }
    for (std::size_t c = 0; c < K; ++c) sum[c] += comp[c];
    block_sums[static_cast<std::size_t>(b)] = sum;
  });

  std::array<double, K> total{}, comp{};
  for (const auto& bs : block_sums)
    for (std::size_t c = 0; c < K; ++c) neumaier_add(total[c], comp[c], bs[c]);
  for (std::size_t c = 0; c < K; ++c) total[c] += comp[c];
  return total;
}

}  // namespace gdf

#endif  // GDF_SIMULATE_HPP
