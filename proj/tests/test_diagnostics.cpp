#include "gdf/diagnostics.hpp"

#include "models.hpp"

#include <doctest.h>

using namespace gdf;

TEST_CASE("resolvent images separate every pair, cemetery included") {
  for (const auto& m : zoo::panel()) {
    const int n = m.generator.size();
    const SeparatingFamily fam = build_separating_family(m.space, m.generator, n);
    for (int x = 0; x <= n; ++x)
      for (int y = 0; y <= n; ++y)
        CHECK((rho_distance(x, y, fam) > 0.0) == (x != y));
  }
  // a single bump cannot tell the second block from the cemetery
  const auto L = zoo::twoblock8();
  CHECK_THROWS_AS(build_separating_family(zoo::space_for(L), L, 1), NumericalError);
}

TEST_CASE("rho is a metric, exhaustively") {
  const auto m = zoo::panel()[2];  // 16 states
  const int n = m.generator.size();
  const SeparatingFamily fam = build_separating_family(m.space, m.generator, n);
  for (int x = 0; x <= n; ++x) {
    CHECK(rho_distance(x, x, fam) == 0.0);
    for (int y = 0; y <= n; ++y) {
      CHECK(rho_distance(x, y, fam) == rho_distance(y, x, fam));
      CHECK(rho_distance(x, y, fam) <= 1.0);
      for (int z = 0; z <= n; ++z)
        CHECK(rho_distance(x, z, fam) <= rho_distance(x, y, fam) + rho_distance(y, z, fam) + 1e-15);
    }
  }
}

TEST_CASE("family members are 1-excessive and obey the uniform generator bound") {
  const auto m = zoo::panel()[1];
  const int n = m.generator.size();
  const SeparatingFamily fam = build_separating_family(m.space, m.generator, n);
  for (std::size_t k = 0; k < fam.g_list.size(); ++k) {
    const Vector g_inner = fam.g_list[k].head(n);
    const YosidaResolventBound b = check_yosida_resolvent_bound(m.generator, g_inner, dyadic_grid(0, 8));
    CHECK(b.ok);
    const double bound = (fam.g_list[k] - fam.u_list[k]).cwiseAbs().maxCoeff();
    for (double beta : dyadic_grid(0, 10)) {
      const YosidaApprox ya = yosida_generator(m.generator, beta);
      // extended generator applied to g; the step matrix already carries beta R_beta
      const Vector lg = ya.beta * (ya.step.matrix * fam.g_list[k] - fam.g_list[k]);
      CHECK(lg.cwiseAbs().maxCoeff() <= bound + 1e-12);
    }
  }
}

TEST_CASE("path statistics: degenerate and two-point cases") {
  const auto kill = model_birth_death(1, {}, {}, {1.0});
  const StateSpace sp1 = StateSpace::uniform(1);
  const SeparatingFamily fam = build_separating_family(sp1, kill, 1);
  const YosidaApprox ya = yosida_generator(kill, 1.0);

  std::vector<PathSample> quiet;
  for (long i = 0; i < 50; ++i) {
    CounterRng rng(5, static_cast<std::uint64_t>(i));
    quiet.push_back(sample_path(0, ya, 1e-9, rng));
  }
  const PathStats st0 = path_regularity_stats(quiet, fam);
  CHECK(st0.mean_jumps == 0.0);
  CHECK(st0.max_rho_jump == 0.0);
  CHECK(st0.state_changes == 0);

  // every arrival is a self-loop or a hop to the cemetery
  const double rho_to_cemetery = rho_distance(0, 1, fam);
  std::vector<PathSample> paths;
  for (long i = 0; i < 2000; ++i) {
    CounterRng rng(6, static_cast<std::uint64_t>(i));
    paths.push_back(sample_path(0, ya, 3.0, rng));
  }
  const PathStats st = path_regularity_stats(paths, fam);
  CHECK(st.max_rho_jump == doctest::Approx(rho_to_cemetery).epsilon(1e-12));
  CHECK(st.mean_jumps > 0.0);

  // exact bound: no jump exceeds the largest rho over kernel-adjacent pairs
  double kernel_bound = 0.0;
  for (int x = 0; x <= 1; ++x)
    for (int y = 0; y <= 1; ++y)
      if (x != y && ya.step.matrix(x, y) > 0.0)
        kernel_bound = std::max(kernel_bound, rho_distance(x, y, fam));
  CHECK(st.max_rho_jump <= kernel_bound + 1e-15);
}

TEST_CASE("path statistics are stable across seeds") {
  const auto L = zoo::bdk8();
  const StateSpace sp = StateSpace::uniform(8);
  const SeparatingFamily fam = build_separating_family(sp, L, 8);
  const YosidaApprox ya = yosida_generator(L, 4.0);
  std::vector<double> means;
  for (std::uint64_t seed : {100ull, 200ull, 300ull}) {
    std::vector<PathSample> paths;
    for (long i = 0; i < 4000; ++i) {
      CounterRng rng(seed, static_cast<std::uint64_t>(i));
      paths.push_back(sample_path(3, ya, 2.0, rng));
    }
    means.push_back(path_regularity_stats(paths, fam).mean_jumps);
  }
  const double sigma = std::sqrt(8.0 / 4000.0);  // Poisson(8) mean over 4000 paths
  CHECK(std::abs(means[0] - means[1]) <= 4.0 * sigma);
  CHECK(std::abs(means[1] - means[2]) <= 4.0 * sigma);
}

TEST_CASE("weak convergence probe: scalar closed form and a small pipeline run") {
  // pure killing: the marginal is exp(-t beta/(beta+1)), so the discrepancy
  // against exp(-t) is known in closed form before any sampling
  const auto kill = model_birth_death(1, {}, {}, {1.0});
  const StateSpace sp1 = StateSpace::uniform(1);
  const SeparatingFamily fam1 = build_separating_family(sp1, kill, 1);
  const std::vector<double> betas = {1, 2, 4, 8, 16, 32};
  MCOptions mc{100000, 1.0, 2024, 0, 4};
  const ConvergenceReport rep = weak_convergence_probe(0, betas, {1.0}, fam1, kill, sp1, mc);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double predicted = std::exp(-betas[i] / (betas[i] + 1.0)) - std::exp(-1.0);
    CHECK(std::abs(rep.discrepancy[i] - predicted) <= 5.0 * rep.sigma[i] + 1e-4);
  }
  CHECK(rep.final_quarter_ok);

  // discrepancies eventually decrease (one CI-level inversion allowed)
  int inversions = 0;
  for (std::size_t i = 1; i < rep.discrepancy.size(); ++i)
    if (rep.discrepancy[i] > rep.discrepancy[i - 1] + 4.0 * (rep.sigma[i] + rep.sigma[i - 1])) ++inversions;
  CHECK(inversions <= 1);

  CHECK_THROWS_AS(weak_convergence_probe(0, {4.0, 2.0}, {1.0}, fam1, kill, sp1, mc),
                  std::invalid_argument);
}

TEST_CASE("probe ordering agrees with the deterministic table") {
  const auto L = zoo::bd8();
  const StateSpace sp = StateSpace::uniform(8);
  const SeparatingFamily fam = build_separating_family(sp, L, 8);
  const std::vector<double> betas = {2, 8, 32, 128};
  MCOptions mc{30000, 1.0, 7, 0, 4};
  const ConvergenceReport rep = weak_convergence_probe(1, betas, {0.5, 1.0}, fam, L, sp, mc);
  const Vector f = resolvent(L, 1.0).matrix * zoo::ramp(8);
  const ConvergenceTable det = convergence_table(L, sp, f, 1.0, betas);
  // when the deterministic error halves, the MC discrepancy does not grow
  // beyond its noise floor
  for (std::size_t i = 1; i < betas.size(); ++i) {
    CHECK(det.sup_error[i] < det.sup_error[i - 1]);
    CHECK(rep.discrepancy[i] <= rep.discrepancy[i - 1] + 4.0 * (rep.sigma[i] + rep.sigma[i - 1]));
  }
}
