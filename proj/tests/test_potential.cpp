#include "gdf/potential.hpp"

#include "models.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace gdf;

namespace {

std::vector<int> full_set(int n) {
  std::vector<int> s(n);
  for (int i = 0; i < n; ++i) s[i] = i;
  return s;
}

}  // namespace

TEST_CASE("the matrix certificate is equivalent to the resolvent inequalities") {
  // (alpha I - L) v >= 0 and v >= 0  <=>  beta G_{beta+alpha} v <= v for all beta
  CounterRng rng(31, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto L = zoo::random_generator(6, 100 + trial);
    ResolventFamily fam(L);
    const double alpha = 1.0;
    Vector v;
    if (trial % 2 == 0) {
      v = fam.apply(alpha, zoo::random_nonneg(6, rng));  // certified excessive
    } else {
      v = zoo::random_nonneg(6, rng);  // usually not excessive
    }
    const bool cert = is_alpha_excessive(v, L, alpha, 1e-12);
    bool kernel_side = v.minCoeff() >= -1e-12;
    for (double beta : dyadic_grid(0, 12)) {
      const Vector w = beta * fam.apply(beta + alpha, v);
      kernel_side = kernel_side && (w - v).maxCoeff() <= 1e-10 * std::max(1.0, v.cwiseAbs().maxCoeff());
    }
    CHECK(cert == kernel_side);
  }
}

TEST_CASE("reduite agrees with the complementarity enumeration oracle") {
  // pinned 2-state instance: obstacle 1 on {0} gives (1, 1/2)
  const auto sym = model_birth_death(2, {1.0}, {1.0}, {0.0, 0.0});
  const Reduite r = reduite(Vector::Ones(2), {0}, sym, 1.0);
  CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.values[1] == doctest::Approx(0.5).epsilon(1e-9));

  CounterRng rng(7, 0);
  const std::vector<SubMarkovGenerator> models = {
      zoo::random_generator(6, 41), zoo::random_generator(8, 42, false),
      model_absorbed_diffusion(8, [](double) { return 1.0; }, [](double x) { return 0.8 * x; }),
  };
  for (const auto& L : models) {
    const int n = L.size();
    for (int trial = 0; trial < 12; ++trial) {
      const Vector f = zoo::random_nonneg(n, rng, 2.0) - Vector::Constant(n, 0.5);
      const std::vector<int> U = zoo::random_subset(n, rng);
      const double alpha = trial % 3 == 0 ? 2.0 : 1.0;
      const Vector mine = reduite(f, U, L, alpha).values;
      const Vector theirs = oracle::reduite_lcp(oracle::obstacle(f, U), L.rates, alpha);
      CHECK((mine - theirs).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("reduite edge cases and the excessive fixed point") {
  const auto L = zoo::bdk8();
  CHECK(reduite(Vector::Ones(8), {}, L, 1.0).values.isZero());

  // an alpha-excessive f is its own reduite on any U
  ResolventFamily fam(L);
  CounterRng rng(9, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector f = fam.apply(1.0, zoo::random_nonneg(8, rng));
    const std::vector<int> U = zoo::random_subset(8, rng);
    const Vector r = reduite(f, U, L, 1.0).values;
    for (int x : U) CHECK(std::abs(r[x] - f[x]) < 1e-10);
    CHECK(is_alpha_excessive(r, L, 1.0, 1e-9));
  }
}

TEST_CASE("reduite is monotone in the obstacle and in the set") {
  const auto L = zoo::bd8();
  CounterRng rng(13, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const Vector f = zoo::random_nonneg(8, rng);
    const Vector g = f + zoo::random_nonneg(8, rng);  // g >= f
    std::vector<int> U = zoo::random_subset(8, rng);
    std::vector<int> V = U;
    for (int i = 0; i < 8; ++i)
      if (rng.next_unit() < 0.3) V.push_back(i);
    const Vector rf = reduite(f, U, L, 1.0).values;
    const Vector rg = reduite(g, U, L, 1.0).values;
    const Vector rv = reduite(f, V, L, 1.0).values;
    CHECK((rf - rg).maxCoeff() <= 1e-10);
    CHECK((rf - rv).maxCoeff() <= 1e-10);
  }
}

TEST_CASE("reduite minimality against sampled excessive majorants") {
  const auto L = zoo::bdk8();
  ResolventFamily fam(L);
  CounterRng rng(15, 0);
  for (int trial = 0; trial < 15; ++trial) {
    const Vector f = zoo::random_nonneg(8, rng);
    const std::vector<int> U = zoo::random_subset(8, rng);
    if (U.empty()) continue;
    const Vector r = reduite(f, U, L, 1.0).values;
    // scale a potential until it dominates f on U; it is then an excessive majorant
    const Vector pot = fam.apply(1.0, zoo::random_nonneg(8, rng) + Vector::Constant(8, 0.05));
    double scale = 0.0;
    for (int x : U) scale = std::max(scale, f[x] / pot[x]);
    const Vector w = scale * pot;
    CHECK((r - w).maxCoeff() <= 1e-9 * std::max(1.0, w.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("reduite reports non-convergence instead of returning junk") {
  // small obstacle set: the continuation region needs many sweeps to relax
  ReduiteOptions opt;
  opt.max_iterations = 5;
  opt.tol = 1e-12;
  CHECK_THROWS_AS(reduite(Vector::Ones(16), {7, 8}, zoo::diff16(), 1.0, opt), NumericalError);
}

TEST_CASE("the increasing-limit construction matches the direct reduite") {
  CounterRng rng(21, 0);
  const auto L = zoo::random_generator(8, 77);
  const StateSpace sp = StateSpace::uniform(8);
  for (int trial = 0; trial < 8; ++trial) {
    const std::vector<int> U = zoo::random_subset(8, rng);
    const Vector via_limit = e_U_by_definition(U, L, sp);
    const Vector direct = reduite(Vector::Ones(8), U, L, 1.0).values;
    CHECK((via_limit - direct).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("capacity is monotone and strongly subadditive") {
  CounterRng rng(23, 0);
  for (const auto& m : zoo::panel()) {
    const int n = m.generator.size();
    const double cap_full = capacity(full_set(n), m.space, m.generator).value;
    CHECK(capacity({}, m.space, m.generator).value == 0.0);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<int> U = zoo::random_subset(n, rng);
      std::vector<int> V = zoo::random_subset(n, rng);
      std::vector<int> uni, inter;
      for (int i = 0; i < n; ++i) {
        const bool in_u = std::count(U.begin(), U.end(), i);
        const bool in_v = std::count(V.begin(), V.end(), i);
        if (in_u || in_v) uni.push_back(i);
        if (in_u && in_v) inter.push_back(i);
      }
      const double cu = capacity(U, m.space, m.generator).value;
      const double cv = capacity(V, m.space, m.generator).value;
      const double cuv = capacity(uni, m.space, m.generator).value;
      const double cin = capacity(inter, m.space, m.generator).value;
      CHECK(cu <= cap_full + 1e-9);
      CHECK(cuv + cin <= cu + cv + 1e-9);
      CHECK(cu <= cuv + 1e-10);
    }
  }
}

TEST_CASE("the dual route never exceeds the capacity and attains it at u = 1") {
  CounterRng rng(29, 0);
  const auto m = zoo::panel()[1];  // killing present
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<int> U = zoo::random_subset(m.generator.size(), rng);
    const double cap = capacity(U, m.space, m.generator).value;
    const double dual = capacity_dual_lower_bound(U, m.space, m.generator, 16, 1000 + trial);
    CHECK(dual <= cap + 1e-9);
    CHECK(dual >= cap - 1e-9);  // u = 1 is always sampled and attains the sup
  }
}

TEST_CASE("the capacity Chebyshev bound holds across random instances") {
  CounterRng rng(37, 0);
  for (const auto& m : zoo::panel()) {
    const int n = m.generator.size();
    for (int trial = 0; trial < 50; ++trial) {
      const Vector u = zoo::random_nonneg(n, rng, 2.0);
      const double eps = 0.05 + rng.next_unit();
      const MarkovInequality mi = capacity_markov_inequality(u, eps, m.space, m.generator);
      CHECK(mi.holds);
    }
  }
  CHECK_THROWS_AS(
      capacity_markov_inequality(Vector::Ones(8), 0.0, zoo::panel()[0].space, zoo::panel()[0].generator),
      std::invalid_argument);
}

TEST_CASE("capacity does not depend on phi beyond mass ratios") {
  const auto L = zoo::bdk8();
  const StateSpace sp1 = StateSpace::uniform(8);
  Vector phi2(8);
  phi2 << 0.2, 1.0, 0.5, 0.9, 0.3, 0.6, 1.0, 0.4;
  const StateSpace sp2 = StateSpace::make(Vector::Ones(8), phi2);
  const double lo = (phi2.cwiseQuotient(sp1.phi)).minCoeff();
  const double hi = (phi2.cwiseQuotient(sp1.phi)).maxCoeff();
  CounterRng rng(41, 0);
  for (int trial = 0; trial < 15; ++trial) {
    const std::vector<int> U = zoo::random_subset(8, rng);
    const double c1 = capacity(U, sp1, L).value;
    const double c2 = capacity(U, sp2, L).value;
    CHECK(c2 <= hi * c1 + 1e-10);
    CHECK(c2 >= lo * c1 - 1e-10);
    CHECK((c1 == 0.0) == (c2 == 0.0));
    CHECK((c1 == 0.0) == U.empty());  // only the empty set is null
  }
}

TEST_CASE("modified sequence construction invariants") {
  const auto L = zoo::diff16();
  const StateSpace sp = zoo::space_for(L, true);
  std::vector<std::vector<int>> boxes = {{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13},
                                         {5, 6, 7, 8, 9, 10},
                                         {7, 8},
                                         {}};
  const ModifiedExcessiveSequence seq = build_modified_sequence(boxes, L, sp);

  ResolventFamily fam(L);
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    for (int x : seq.sets[k]) CHECK(seq.lifted[k][x] >= 1.0);
    CHECK(seq.lifted[k].maxCoeff() <= 1.0 + 1e-12);
    for (double alpha : seq.alpha_grid) {
      const double viol = (alpha * fam.apply(alpha + 1.0, seq.lifted[k]) - seq.lifted[k]).maxCoeff();
      CHECK(viol <= 1e-9);
    }
    if (k) CHECK(seq.capacities[k] <= seq.capacities[k - 1] + 1e-10);
  }
  CHECK(seq.lifted.back().isZero());
  CHECK(seq.deficit_sets.back().empty());
  // the grid supremum genuinely undershoots 1 on U_n, which is what the lift repairs
  CHECK_FALSE(seq.deficit_sets.front().empty());

  std::vector<std::vector<int>> not_decreasing = {{1, 2}, {1, 2, 3}};
  CHECK_THROWS_AS(build_modified_sequence(not_decreasing, L, sp), std::invalid_argument);
}

TEST_CASE("grid refinement drives the supremum toward the exact balayage") {
  const auto L = zoo::bd8();
  const StateSpace sp = StateSpace::uniform(8);
  const std::vector<std::vector<int>> sets = {{2, 3, 4}};
  const Vector exact = e_U_by_definition(sets[0], L, sp);

  double prev_gap = kInf;
  for (int top : {6, 9, 12}) {
    ModifiedSequenceOptions opt;
    opt.alpha_grid = dyadic_grid(0, top);
    opt.auto_extend = false;
    opt.l_grid = dyadic_grid(0, 10);
    const ModifiedExcessiveSequence seq = build_modified_sequence(sets, L, sp, opt);
    CHECK((seq.lifted[0] - exact).maxCoeff() <= 1e-9);  // dominated by the exact function
    const double gap = (exact - seq.base[0]).cwiseAbs().maxCoeff();
    CHECK(gap < prev_gap + 1e-14);
    prev_gap = gap;
  }
  CHECK(prev_gap < 2e-3);

  // conservative chain, U = E: the supremum approaches 1 as the grid grows
  ModifiedSequenceOptions opt;
  opt.alpha_grid = dyadic_grid(0, 12);
  opt.auto_extend = false;
  const auto seq = build_modified_sequence({full_set(8)}, zoo::bd8(), sp, opt);
  CHECK(seq.base[0].minCoeff() > 1.0 - 1e-3);
  CHECK(static_cast<int>(seq.deficit_sets[0].size()) == 8);  // truncation deficit is everywhere
}
