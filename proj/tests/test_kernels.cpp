#include "gdf/resolvent.hpp"

#include "gdf/io.hpp"
#include "models.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <fstream>

using namespace gdf;

TEST_CASE("resolvent equation holds on random generators") {
  const auto L = zoo::random_generator(5, 17);
  const Matrix ga = resolvent(L, 1.0).matrix;
  const Matrix gb = resolvent(L, 5.0).matrix;
  const double residual = (ga - gb - 4.0 * ga * gb).cwiseAbs().maxCoeff();
  CHECK(residual < 1e-12);

  const auto L10 = zoo::random_generator(10, 19);
  CHECK(check_resolvent_identity(L10, 1.0, 5.0, 1e-12).ok);
}

TEST_CASE("kernel positivity and the sub-Markov contraction across the alpha grid") {
  for (const auto& m : zoo::panel()) {
    for (double alpha : dyadic_grid(-4, 10)) {
      const ResolventKernel k = resolvent(m.generator, alpha);
      CHECK(k.matrix.minCoeff() >= -1e-14);
      double worst = 0.0;
      for (int i = 0; i < m.generator.size(); ++i)
        worst = std::max(worst, alpha * neumaier_sum(Vector(k.matrix.row(i))));
      CHECK(worst <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("strict positivity of the order-1 potential") {
  for (const auto& m : zoo::panel()) {
    const Vector g1phi = resolvent(m.generator, 1.0).matrix * m.space.phi;
    CHECK(g1phi.minCoeff() > 0.0);
  }
}

TEST_CASE("cemetery extension carries the defect and sums to 1/alpha") {
  for (const auto& m : zoo::panel()) {
    for (double alpha : {0.25, 1.0, 8.0}) {
      const ExtendedKernel e = extend_cemetery(resolvent(m.generator, alpha));
      CHECK(e.matrix.minCoeff() >= 0.0);
      for (int i = 0; i <= m.generator.size(); ++i)
        CHECK(std::abs(neumaier_sum(Vector(e.matrix.row(i))) - 1.0 / alpha) <= 1e-13 / alpha + 1e-15);
      // the cemetery row keeps everything on the cemetery
      CHECK(e.matrix.row(m.generator.size()).head(m.generator.size()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(e.matrix(m.generator.size(), m.generator.size()) == doctest::Approx(1.0 / alpha));
    }
  }

  // conservative chain: zero defect on inner rows
  const ExtendedKernel e = extend_cemetery(resolvent(zoo::bd8(), 2.0));
  CHECK(e.matrix.col(8).head(8).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("extension refuses a broken sub-Markov row") {
  ResolventKernel fake;
  fake.alpha = 1.0;
  fake.matrix = Matrix::Constant(2, 2, 0.6);  // row sums 1.2 > 1
  CHECK_THROWS_AS(extend_cemetery(fake), NumericalError);
}

TEST_CASE("adjoint satisfies the duality identity") {
  CounterRng rng(5, 0);
  for (const auto& m : zoo::panel()) {
    const ResolventKernel k = resolvent(m.generator, 1.0);
    const AdjointResolvent a = adjoint(k, m.space);
    CHECK((a.matrix - oracle::adjoint_conjugation(k.matrix, m.space.m)).cwiseAbs().maxCoeff() < 1e-14);
    for (int trial = 0; trial < 50; ++trial) {
      const Vector f = zoo::random_nonneg(m.generator.size(), rng);
      const Vector g = zoo::random_nonneg(m.generator.size(), rng);
      const double lhs = h_inner(Vector(k.matrix * f), g, m.space);
      const double rhs = h_inner(f, Vector(a.matrix * g), m.space);
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("adjoint of a one-directional transport flips direction") {
  // upper-triangular transport: only forward rates
  SubMarkovGenerator L;
  L.rates = Matrix::Zero(3, 3);
  L.rates(0, 1) = 1.0;
  L.rates(1, 2) = 2.0;
  L.rates.diagonal() << -1.0, -2.0, -0.5;
  const StateSpace sp = StateSpace::uniform(3);
  const ResolventKernel k = resolvent(L, 1.0);
  // forward kernel is upper triangular, adjoint lower triangular
  CHECK(k.matrix(1, 0) == 0.0);
  CHECK(k.matrix(2, 0) == 0.0);
  const AdjointResolvent a = adjoint(k, sp);
  CHECK(a.matrix(0, 1) == 0.0);
  CHECK(a.matrix(0, 2) == 0.0);
  CHECK(a.matrix(1, 0) > 0.0);
}

TEST_CASE("yosida resolvent bound for certified 1-excessive inputs") {
  const auto L = zoo::random_generator(5, 23);
  const Vector u = resolvent(L, 1.0).matrix * Vector::Ones(5);  // order-1 potential
  std::vector<double> betas = dyadic_grid(0, 10);
  const YosidaResolventBound b = check_yosida_resolvent_bound(L, u, betas);
  CHECK(b.ok);
  CHECK(b.worst_violation <= 1e-12);
  for (std::size_t i = 1; i < b.sup_gap.size(); ++i)
    CHECK(b.sup_gap[i] <= b.sup_gap[i - 1] + 1e-14);  // monotone approach

  CHECK_THROWS_AS(check_yosida_resolvent_bound(L, Vector::Constant(5, -1.0), betas),
                  std::invalid_argument);
}

TEST_CASE("singular systems are reported as invalid generators") {
  SubMarkovGenerator bad;
  bad.rates = Matrix::Constant(2, 2, 1e30);  // not a generator at all
  CHECK_THROWS_AS(resolvent(bad, 1.0), NumericalError);
  CHECK_THROWS_AS(resolvent(zoo::bd8(), 0.0), std::invalid_argument);
}

TEST_CASE("absorbed diffusion matches the exact small inverses") {
  // two cells, a = 1, b = 0: rates 4 between neighbors, absorbing faces
  const auto L2 = model_absorbed_diffusion(2, [](double) { return 1.0; }, [](double) { return 0.0; });
  CHECK(L2.rates(0, 1) == doctest::Approx(4.0));
  CHECK(L2.rates(0, 0) == doctest::Approx(-8.0));
  const Matrix g = resolvent(L2, 1.0).matrix;
  Matrix expected(2, 2);
  expected << 9, 4, 4, 9;
  expected /= 65.0;
  CHECK((g - expected).cwiseAbs().maxCoeff() < 1e-14);

  const auto L3 = model_absorbed_diffusion(3, [](double) { return 1.0; }, [](double) { return 0.0; });
  // exact inverse of (I - L3) with off-diagonal 9, diagonal -18
  Matrix a3 = Matrix::Zero(3, 3);
  a3 << 19, -9, 0, -9, 19, -9, 0, -9, 19;
  const Matrix g3 = resolvent(L3, 1.0).matrix;
  CHECK((a3 * g3 - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-13);

  for (double alpha : dyadic_grid(-2, 6)) {
    const ResolventKernel k = resolvent(zoo::diff16(), alpha);
    CHECK(k.matrix.minCoeff() >= -1e-14);
  }
}

TEST_CASE("the Peclet guard upwinds large drift") {
  // |b| h = 10 >> 2a = 0.2: central differencing would break positivity
  const auto L = model_absorbed_diffusion(4, [](double) { return 0.1; }, [](double) { return 40.0; });
  L.validate();
  for (int i = 0; i + 1 < 4; ++i) CHECK(L.rates(i, i + 1) > 0.0);
  CHECK(L.rates(1, 0) >= 0.0);
  CHECK_THROWS_AS(model_absorbed_diffusion(1, [](double) { return 1.0; }, [](double) { return 0.0; }),
                  std::invalid_argument);
  CHECK_THROWS_AS(model_absorbed_diffusion(4, [](double) { return 0.0; }, [](double) { return 0.0; }),
                  std::invalid_argument);
}

TEST_CASE("space-time transport is one-directional and not symmetrizable") {
  const auto L = zoo::stt12();
  L.validate();
  const int ns = 3;
  // one-directional time hops
  for (int t = 0; t + 1 < 4; ++t)
    for (int x = 0; x < ns; ++x) {
      CHECK(L.rates(t * ns + x, (t + 1) * ns + x) == doctest::Approx(4.0));
      CHECK(L.rates((t + 1) * ns + x, t * ns + x) == 0.0);
    }
  const DetailedBalanceReport rep = check_detailed_balance(L);
  CHECK_FALSE(rep.symmetrizable);
  CHECK(rep.obstruction.find("one-directional") != std::string::npos);

  // birth-death chains are classically reversible
  CHECK(check_detailed_balance(zoo::bd8()).symmetrizable);
  CHECK(check_detailed_balance(zoo::bdk8()).symmetrizable);

  // a genuine cycle imbalance (not just a missing reverse edge)
  SubMarkovGenerator cyc;
  cyc.rates = Matrix::Zero(3, 3);
  const double fwd[3] = {1.0, 1.0, 1.0}, bwd[3] = {2.0, 1.0, 1.0};
  for (int i = 0; i < 3; ++i) {
    cyc.rates(i, (i + 1) % 3) = fwd[i];
    cyc.rates((i + 1) % 3, i) = bwd[i];
  }
  for (int i = 0; i < 3; ++i) cyc.rates(i, i) = -cyc.rates.row(i).sum();
  const DetailedBalanceReport rep2 = check_detailed_balance(cyc);
  CHECK_FALSE(rep2.symmetrizable);
  CHECK(rep2.obstruction.find("cycle") != std::string::npos);
}

TEST_CASE("generator validation catches bad rate structure") {
  SubMarkovGenerator g;
  g.rates = Matrix::Zero(2, 2);
  g.rates(0, 1) = -1.0;
  CHECK_THROWS_AS(g.validate(), NumericalError);
  g.rates(0, 1) = 1.0;  // row sum +1 > 0
  CHECK_THROWS_AS(g.validate(), NumericalError);
  CHECK_THROWS_AS(model_birth_death(2, {1.0}, {-1.0}, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(model_birth_death(2, {1.0}, {1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(model_space_time_transport(zoo::bd8(), 1), std::invalid_argument);
}

TEST_CASE("kernel dump matches the golden file") {
  const Matrix g1 = resolvent(model_birth_death(2, {1.0}, {1.0}, {0.0, 0.0}), 1.0).matrix;
  const std::string dumped = dump_kernel_string(g1, 1.0, "resolvent");
  std::ifstream golden(std::string(GDF_SOURCE_DIR) + "/tests/golden/g1_symmetric2.txt", std::ios::binary);
  REQUIRE(golden.good());
  std::string expected((std::istreambuf_iterator<char>(golden)), std::istreambuf_iterator<char>());
  CHECK(dumped == expected);
}
