#include "gdf/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace gdf {

SeparatingFamily build_separating_family(const StateSpace& sp, const SubMarkovGenerator& L, int count) {
  if (count < 1) throw std::invalid_argument("build_separating_family: count must be >= 1");
  if (sp.size() != L.size()) throw std::invalid_argument("build_separating_family: dimension mismatch");
  const int n = sp.size();
  const ExtendedKernel r1 = extend_cemetery(resolvent(L, 1.0));

  SeparatingFamily fam;
  fam.point_count = n + 1;
  for (int k = 0; k < count; ++k) {
    Vector u = Vector::Zero(n + 1);
    u[k % n] = 1.0;
    if (k % 4 == 3) u.array() += 0.5;  // constant shift on the whole extended space
    fam.u_list.push_back(u);
    fam.g_list.push_back(r1.matrix * u);
    fam.weights.push_back(std::ldexp(1.0, -(k + 1)));
  }

  for (int x = 0; x <= n; ++x)
    for (int y = x + 1; y <= n; ++y) {
      bool separated = false;
      for (const Vector& g : fam.g_list)
        if (g[x] != g[y]) {
          separated = true;
          break;
        }
      if (!separated)
        throw NumericalError("separation-failure",
                             "no family member distinguishes states " + std::to_string(x) + " and " +
                                 std::to_string(y) + "; increase the count");
    }
  return fam;
}

double rho_distance(int x, int y, const SeparatingFamily& fam) {
  if (x < 0 || x >= fam.point_count || y < 0 || y >= fam.point_count)
    throw std::out_of_range("rho_distance: state index");
  double acc = 0.0;
  for (std::size_t k = 0; k < fam.g_list.size(); ++k)
    acc += fam.weights[k] * std::min(std::abs(fam.g_list[k][x] - fam.g_list[k][y]), 1.0);
  return acc;
}

PathStats path_regularity_stats(const std::vector<PathSample>& paths, const SeparatingFamily& fam) {
  PathStats st;
  if (paths.empty()) return st;
  double total_jumps = 0.0, total_rho = 0.0;
  long total_arrivals = 0;
  for (const PathSample& p : paths) {
    const long jumps = static_cast<long>(p.jump_times.size());
    total_jumps += static_cast<double>(jumps);
    st.max_jumps = std::max(st.max_jumps, jumps);
    double last_change = -kInf;
    for (std::size_t k = 0; k < p.jump_times.size(); ++k) {
      const int from = p.states[k];
      const int to = p.states[k + 1];
      const double r = rho_distance(from, to, fam);
      total_rho += r;
      ++total_arrivals;
      st.max_rho_jump = std::max(st.max_rho_jump, r);
      if (from != to) {
        ++st.state_changes;
        if (last_change > -kInf)
          st.min_change_gap = std::min(st.min_change_gap, p.jump_times[k] - last_change);
        last_change = p.jump_times[k];
      }
    }
  }
  st.mean_jumps = total_jumps / static_cast<double>(paths.size());
  st.mean_rho_jump = total_arrivals ? total_rho / static_cast<double>(total_arrivals) : 0.0;
  return st;
}

ConvergenceReport weak_convergence_probe(int x, const std::vector<double>& betas,
                                         const std::vector<double>& t_list,
                                         const SeparatingFamily& fam, const SubMarkovGenerator& L,
                                         const StateSpace& sp, const MCOptions& mc) {
  if (betas.empty() || t_list.empty()) throw std::invalid_argument("weak_convergence_probe: empty grids");
  for (std::size_t i = 1; i < betas.size(); ++i)
    if (betas[i] <= betas[i - 1]) throw std::invalid_argument("weak_convergence_probe: betas must increase");
  const int n = sp.size();

  // Test functions: members vanishing at the cemetery, plus their resolvent
  // images (also vanishing there), so the E-block target semigroup applies.
  std::vector<Vector> fs;
  for (std::size_t k = 0; k < fam.u_list.size(); ++k) {
    if (fam.u_list[k][n] == 0.0) fs.push_back(fam.u_list[k]);
    if (fam.g_list[k][n] == 0.0) fs.push_back(fam.g_list[k]);
  }
  if (fs.empty()) throw std::invalid_argument("weak_convergence_probe: no usable test functions");

  std::vector<Vector> targets;  // (e^{tL} f) stacked per t then f
  for (double t : t_list) {
    const Matrix pt = matrix_exponential(t * L.rates);
    for (const Vector& f : fs) targets.push_back(pt * f.head(n));
  }

  const double horizon = *std::max_element(t_list.begin(), t_list.end());
  ConvergenceReport rep;
  for (std::size_t bi = 0; bi < betas.size(); ++bi) {
    const YosidaApprox ya = yosida_generator(L, betas[bi]);
    MCOptions cell = mc;
    cell.horizon = std::max(mc.horizon, horizon);
    cell.stream_base = mc.stream_base + bi * (1ull << 40);

    double disc = 0.0, sig = 0.0;
    std::size_t cell_idx = 0;
    for (std::size_t ti = 0; ti < t_list.size(); ++ti)
      for (std::size_t fi = 0; fi < fs.size(); ++fi, ++cell_idx) {
        const MCEstimate est = mc_semigroup_mean(x, ya, t_list[ti], fs[fi], cell);
        disc = std::max(disc, std::abs(est.mean - targets[cell_idx][x]));
        sig = std::max(sig, est.std_error);
      }
    rep.betas.push_back(betas[bi]);
    rep.discrepancy.push_back(disc);
    rep.sigma.push_back(sig);

    // Jump statistics from a deterministic subsample of the same streams.
    const long stat_paths = std::min<long>(mc.n_paths, 2048);
    std::vector<PathSample> sample;
    sample.reserve(static_cast<std::size_t>(stat_paths));
    for (long i = 0; i < stat_paths; ++i) {
      CounterRng rng(cell.seed, cell.stream_base + (1ull << 39) + static_cast<std::uint64_t>(i));
      sample.push_back(sample_path(x, ya, cell.horizon, rng));
    }
    const PathStats st = path_regularity_stats(sample, fam);
    rep.mean_jumps.push_back(st.mean_jumps);
    rep.max_rho_jump.push_back(st.max_rho_jump);
  }

  const double first = rep.discrepancy.front(), last = rep.discrepancy.back();
  const double slack = 4.0 * (rep.sigma.back() + rep.sigma.front() / 4.0);
  rep.final_quarter_ok = last <= first / 4.0 + slack;
  return rep;
}

}  // namespace gdf
