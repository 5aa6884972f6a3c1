#include "gdf/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace gdf {

namespace detail {

void run_blocks(long n_blocks, int threads, const std::function<void(long)>& block_fn) {
  threads = std::max(1, threads);
  if (threads == 1 || n_blocks == 1) {
    for (long b = 0; b < n_blocks; ++b) block_fn(b);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mu;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const long b = next.fetch_add(1);
        if (b >= n_blocks) return;
        try {
          block_fn(b);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

int PathSample::state_at(double t) const {
  if (t < 0.0 || t > horizon) throw std::out_of_range("state_at: time outside the horizon");
  // states[k] holds on [jump_times[k-1], jump_times[k]); right continuity at
  // the jump epochs.
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  return states[static_cast<std::size_t>(it - jump_times.begin())];
}

int sample_chain_step(int x, const YosidaApprox& ya, CounterRng& rng) {
  const int cem = ya.cemetery();
  if (x == cem) return cem;  // the cemetery is absorbing, no draw needed
  if (x < 0 || x > cem) throw std::out_of_range("sample_chain_step: state index");
  return rng.next_categorical(ya.step_cdf[static_cast<std::size_t>(x)]);
}

PathSample sample_path(int x, const YosidaApprox& ya, double horizon, CounterRng& rng) {
  if (!(horizon > 0.0)) throw std::invalid_argument("sample_path: horizon must be positive");
  PathSample p;
  p.beta = ya.beta;
  p.horizon = horizon;
  p.states.push_back(x);
  if (x == ya.cemetery()) p.absorbed_at = 0.0;
  int cur = x;
  double t = 0.0;
  for (;;) {
    t += rng.next_exponential(ya.beta);
    if (t > horizon) break;
    cur = sample_chain_step(cur, ya, rng);
    p.jump_times.push_back(t);
    p.states.push_back(cur);
    if (cur == ya.cemetery() && p.absorbed_at == kInf) p.absorbed_at = t;
  }
  return p;
}

double hitting_time(const PathSample& p, const std::vector<char>& member) {
  if (p.states.empty()) throw std::invalid_argument("hitting_time: empty path");
  if (member[static_cast<std::size_t>(p.states[0])]) return 0.0;
  for (std::size_t k = 0; k < p.jump_times.size(); ++k)
    if (member[static_cast<std::size_t>(p.states[k + 1])]) return p.jump_times[k];
  return kInf;
}

static std::vector<char> membership(const std::vector<int>& set, int n_delta) {
  std::vector<char> member(static_cast<std::size_t>(n_delta), 0);
  for (int i : set) {
    if (i < 0 || i >= n_delta) throw std::invalid_argument("set index out of range");
    member[static_cast<std::size_t>(i)] = 1;
  }
  return member;
}

MCEstimate mc_semigroup_mean(int x, const YosidaApprox& ya, double t, const Vector& f_delta,
                             const MCOptions& mc) {
  if (t > mc.horizon) throw std::invalid_argument("mc_semigroup_mean: t exceeds the horizon");
  if (f_delta.size() != ya.size() + 1) throw std::invalid_argument("mc_semigroup_mean: f dimension");
  const auto sums = mc_reduce<2>(mc, [&](long i) -> std::array<double, 2> {
    CounterRng rng(mc.seed, mc.stream_base + static_cast<std::uint64_t>(i));
    const PathSample p = sample_path(x, ya, mc.horizon, rng);
    const double v = f_delta[p.state_at(t)];
    return {v, v * v};
  });
  MCEstimate est;
  est.n_paths = mc.n_paths;
  est.seed = mc.seed;
  est.mean = sums[0] / static_cast<double>(mc.n_paths);
  const double var =
      std::max(0.0, (sums[1] - static_cast<double>(mc.n_paths) * est.mean * est.mean) /
                        std::max(1.0, static_cast<double>(mc.n_paths - 1)));
  est.std_error = std::sqrt(var / static_cast<double>(mc.n_paths));
  return est;
}

MCEstimate mc_laplace(int x, double alpha, const Vector& f_delta, const YosidaApprox& ya,
                      const MCOptions& mc, double bias_budget) {
  if (!(alpha > 0.0)) throw std::invalid_argument("mc_laplace: alpha must be positive");
  if (f_delta.size() != ya.size() + 1) throw std::invalid_argument("mc_laplace: f dimension");
  if (f_delta[ya.size()] != 0.0)
    throw std::invalid_argument("mc_laplace: f must vanish at the cemetery");
  const double fmax = f_delta.cwiseAbs().maxCoeff();
  const double bias = std::exp(-alpha * mc.horizon) * fmax / alpha;
  if (bias > bias_budget)
    throw std::invalid_argument("mc_laplace: horizon too short for the bias budget (tail bound " +
                                std::to_string(bias) + ")");

  const auto sums = mc_reduce<2>(mc, [&](long i) -> std::array<double, 2> {
    CounterRng rng(mc.seed, mc.stream_base + static_cast<std::uint64_t>(i));
    const PathSample p = sample_path(x, ya, mc.horizon, rng);
    // Exact integral over the constant pieces; the cemetery contributes 0.
    double acc = 0.0, comp = 0.0;
    double weight_lo = 1.0;  // e^{-alpha * piece start}
    for (std::size_t k = 0; k <= p.jump_times.size(); ++k) {
      if (p.states[k] == ya.cemetery()) break;
      const double hi = k < p.jump_times.size() ? p.jump_times[k] : mc.horizon;
      const double weight_hi = std::exp(-alpha * hi);
      const double fx = f_delta[p.states[k]];
      if (fx != 0.0) neumaier_add(acc, comp, fx * (weight_lo - weight_hi) / alpha);
      weight_lo = weight_hi;
    }
    const double v = acc + comp;
    return {v, v * v};
  });
  MCEstimate est;
  est.n_paths = mc.n_paths;
  est.seed = mc.seed;
  est.mean = sums[0] / static_cast<double>(mc.n_paths);
  const double var =
      std::max(0.0, (sums[1] - static_cast<double>(mc.n_paths) * est.mean * est.mean) /
                        std::max(1.0, static_cast<double>(mc.n_paths - 1)));
  est.std_error = std::sqrt(var / static_cast<double>(mc.n_paths));
  return est;
}

ExitBound mc_exit_bound(int x, const std::vector<int>& U, const Vector& e_hat,
                        const YosidaApprox& ya, const MCOptions& mc, double tol) {
  if (ya.beta < 2.0) throw std::invalid_argument("mc_exit_bound: requires beta >= 2");
  if (e_hat.size() != ya.size()) throw std::invalid_argument("mc_exit_bound: e_hat dimension");
  const std::vector<char> member = membership(U, ya.size() + 1);
  // An empty target is never hit, so the future mass past the horizon is
  // exactly 0; otherwise paths still alive and unhit at the horizon carry the
  // conservative cap e^{-2T}.
  const double cap = U.empty() ? 0.0 : std::exp(-2.0 * mc.horizon);

  const auto sums = mc_reduce<4>(mc, [&](long i) -> std::array<double, 4> {
    CounterRng rng(mc.seed, mc.stream_base + static_cast<std::uint64_t>(i));
    const PathSample p = sample_path(x, ya, mc.horizon, rng);
    const double tau = hitting_time(p, member);
    double hit = 0.0, tail = 0.0;
    if (tau <= mc.horizon) {
      hit = std::exp(-2.0 * tau);
    } else if (p.absorbed_at == kInf) {
      tail = cap;
    }
    const double z = hit + tail;
    return {z, z * z, hit, tail};
  });

  ExitBound out;
  const double n = static_cast<double>(mc.n_paths);
  out.combined.n_paths = mc.n_paths;
  out.combined.seed = mc.seed;
  out.combined.mean = sums[0] / n;
  const double var = std::max(0.0, (sums[1] - n * out.combined.mean * out.combined.mean) /
                                       std::max(1.0, n - 1.0));
  out.combined.std_error = std::sqrt(var / n);
  out.hit_mean = sums[2] / n;
  out.tail_mean = sums[3] / n;
  out.bound = e_hat[x];
  out.verdict = out.combined.mean + 4.0 * out.combined.std_error <= out.bound + tol;
  return out;
}

TwoExcessiveReport check_two_excessive(const Vector& v, const YosidaApprox& ya,
                                       const std::vector<double>& t_grid, double tol) {
  if (ya.beta < 2.0) throw std::invalid_argument("check_two_excessive: requires beta >= 2");
  if (v.size() != ya.size()) throw std::invalid_argument("check_two_excessive: dimension mismatch");
  if (t_grid.empty()) throw std::invalid_argument("check_two_excessive: empty t grid");
  TwoExcessiveReport rep;
  double t_min = kInf;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("check_two_excessive: grid times must be positive");
    const Vector pt = matrix_exponential(t * ya.l_beta) * v;
    const double viol = (std::exp(-2.0 * t) * pt - v).maxCoeff();
    rep.max_violation = std::max(rep.max_violation, viol);
    if (t < t_min) {
      t_min = t;
      rep.smallest_t_gap = (std::exp(-2.0 * t) * pt - v).cwiseAbs().maxCoeff();
    }
  }
  // Strong continuity at 0: the gap at the smallest grid time is controlled
  // by the uniform generator bound ||(l_beta - 2) v|| <= (2 beta + 2)||v||.
  const double continuity_budget = (2.0 * ya.beta + 2.0) * t_min * v.cwiseAbs().maxCoeff() + tol;
  rep.ok = rep.max_violation <= tol && rep.smallest_t_gap <= continuity_budget;
  return rep;
}

InvarianceReport invariance_check(const std::vector<int>& S, const YosidaApprox& ya,
                                  const MCOptions& mc) {
  const int n = ya.size();
  std::vector<char> inside = membership(S, n + 1);
  inside[static_cast<std::size_t>(n)] = 1;  // the cemetery always belongs to the invariant set

  // Kernel-level premise: no one-step mass leaves S u {cemetery} from S.
  for (int x : S)
    for (int y = 0; y <= n; ++y)
      if (!inside[static_cast<std::size_t>(y)] && ya.step.matrix(x, y) > 1e-15)
        throw NumericalError("invariant-set-premise",
                             "step kernel carries mass " + std::to_string(ya.step.matrix(x, y)) +
                                 " from state " + std::to_string(x) + " to state " + std::to_string(y));

  if (S.empty()) throw std::invalid_argument("invariance_check: empty set");
  const auto sums = mc_reduce<1>(mc, [&](long i) -> std::array<double, 1> {
    CounterRng rng(mc.seed, mc.stream_base + static_cast<std::uint64_t>(i));
    const int start = S[static_cast<std::size_t>(i) % S.size()];
    const PathSample p = sample_path(start, ya, mc.horizon, rng);
    for (int s : p.states)
      if (!inside[static_cast<std::size_t>(s)]) return {1.0};
    return {0.0};
  });
  InvarianceReport rep;
  rep.n_paths = mc.n_paths;
  rep.escapes = static_cast<long>(sums[0] + 0.5);
  rep.ok = rep.escapes == 0;
  return rep;
}

}  // namespace gdf
