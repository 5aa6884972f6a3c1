#include "gdf/diagnostics.hpp"
#include "gdf/io.hpp"
#include "gdf/potential.hpp"
#include "gdf/runner.hpp"
#include "gdf/simulate.hpp"
#include "gdf/yosida.hpp"

#include <cmath>
#include <ostream>

namespace gdf {

namespace {

struct Battery {
  std::ostream& out;
  int failures = 0;

  void check(const std::string& name, bool ok, const std::string& detail = "") {
    out << (ok ? "ok   " : "FAIL ") << name;
    if (!ok && !detail.empty()) out << "  (" << detail << ")";
    out << "\n";
    if (!ok) ++failures;
  }
  void close(const std::string& name, double got, double want, double tol) {
    check(name, std::abs(got - want) <= tol,
          "got " + format_g17(got) + ", want " + format_g17(want));
  }
};

SubMarkovGenerator pure_killing() {
  return model_birth_death(1, {}, {}, {1.0});
}

SubMarkovGenerator symmetric2() {
  return model_birth_death(2, {1.0}, {1.0}, {0.0, 0.0});
}

}  // namespace

int run_selftest(std::ostream& out) {
  Battery b{out};

  // -- state space -----------------------------------------------------------
  {
    StateSpace sp = StateSpace::make((Vector(2) << 0.5, 0.5).finished(), Vector::Ones(2));
    b.close("integrate: zero function", integrate(Vector::Zero(2), sp), 0.0, 0.0);
    b.close("integrate: total mass", integrate(Vector::Ones(2), sp), 1.0, 0.0);
    StateSpace sp3 = StateSpace::uniform(3);
    b.close("integrate: weighted sum", integrate((Vector(3) << 1, 2, 3).finished(), sp3), 6.0, 0.0);
    b.close("h_inner: zero", h_inner(Vector::Zero(2), Vector::Zero(2), sp), 0.0, 0.0);
    b.close("h_inner: disjoint supports",
            h_inner((Vector(2) << 1, 0).finished(), (Vector(2) << 0, 1).finished(), sp), 0.0, 0.0);
    StateSpace spw = StateSpace::make((Vector(2) << 2, 3).finished(), Vector::Ones(2));
    b.close("h_inner: weighted", h_inner(Vector::Ones(2), Vector::Ones(2), spw), 5.0, 0.0);
    const Vector ext = extend_to_cemetery(Vector::Ones(3));
    b.check("cemetery extension vanishes at the cemetery", ext[3] == 0.0 && ext.head(3).isOnes());
    b.check("cemetery extension of zero", extend_to_cemetery(Vector::Zero(2)).isZero());
    b.check("StateFunction at cemetery is exactly 0", StateFunction::constant(3, 1.0)(3) == 0.0);
  }

  // -- kernels ---------------------------------------------------------------
  {
    const auto kill = pure_killing();
    b.close("resolvent: pure killing G_1", resolvent(kill, 1.0).matrix(0, 0), 0.5, 1e-15);
    const auto sym = symmetric2();
    const Matrix g1 = resolvent(sym, 1.0).matrix;
    b.close("resolvent: 2-state (0,0)", g1(0, 0), 2.0 / 3.0, 1e-14);
    b.close("resolvent: 2-state (0,1)", g1(0, 1), 1.0 / 3.0, 1e-14);
    b.close("resolvent identity at alpha=beta", check_resolvent_identity(sym, 2.0, 2.0).residual, 0.0, 0.0);
    b.close("resolvent identity scalar case", check_resolvent_identity(kill, 1.0, 2.0).residual, 0.0, 1e-15);

    const auto ext = extend_cemetery(resolvent(kill, 1.0));
    b.close("cemetery defect: pure killing", ext.matrix(0, 1), 0.5, 1e-15);
    const auto ext_cons = extend_cemetery(resolvent(sym, 1.0));
    b.close("cemetery defect: conservative chain", ext_cons.matrix.col(2).head(2).cwiseAbs().maxCoeff(), 0.0, 1e-15);
    b.close("cemetery row mass at alpha=2", extend_cemetery(resolvent(kill, 2.0)).matrix(1, 1), 0.5, 1e-15);

    StateSpace sp2 = StateSpace::uniform(2);
    const auto adj = adjoint(resolvent(sym, 1.0), sp2);
    b.close("adjoint of symmetric kernel is itself", (adj.matrix - g1).cwiseAbs().maxCoeff(), 0.0, 1e-15);
    b.check("birth_death(1,[],[],[1]) is pure killing", kill.rates(0, 0) == -1.0);
  }

  // -- potential -------------------------------------------------------------
  {
    const auto sym = symmetric2();
    StateSpace sp = StateSpace::uniform(2);
    double res = 0;
    b.check("excessive: zero function", is_alpha_excessive(Vector::Zero(2), sym, 1.0, 1e-12, &res));
    const Vector g = resolvent(sym, 1.0).matrix * (Vector(2) << 1, 2).finished();
    b.check("excessive: potential of a nonnegative function", is_alpha_excessive(g, sym, 1.0, 1e-12));
    b.check("excessive: constants on a conservative chain", is_alpha_excessive(Vector::Ones(2), sym, 1.0, 1e-12));

    b.close("reduite on the empty set", reduite(Vector::Ones(2), {}, sym, 1.0).values.cwiseAbs().maxCoeff(), 0.0, 0.0);
    const Vector red_full = reduite(Vector::Ones(2), {0, 1}, sym, 1.0).values;
    b.close("reduite of 1 on E, conservative chain", (red_full - Vector::Ones(2)).cwiseAbs().maxCoeff(), 0.0, 1e-12);

    b.close("e_U by definition: empty set", e_U_by_definition({}, sym, sp).cwiseAbs().maxCoeff(), 0.0, 0.0);
    b.close("e_U by definition: full space", (e_U_by_definition({0, 1}, sym, sp) - Vector::Ones(2)).cwiseAbs().maxCoeff(), 0.0, 1e-9);

    b.close("capacity of the empty set", capacity({}, sp, sym).value, 0.0, 0.0);
    const double cap_full = capacity({0, 1}, sp, sym).value;
    b.check("capacity monotone under inclusion", capacity({0}, sp, sym).value <= cap_full + 1e-12);
    b.close("dual bound on the empty set", capacity_dual_lower_bound({}, sp, sym, 4, 7), 0.0, 1e-12);

    const MarkovInequality mi0 = capacity_markov_inequality(Vector::Zero(2), 0.5, sp, sym);
    b.check("capacity bound: zero function", mi0.holds && mi0.lhs == 0.0);
    const MarkovInequality mi1 = capacity_markov_inequality(Vector::Ones(2), 0.5, sp, sym);
    b.check("capacity bound: constants at eps=1/2", mi1.holds);
    b.close("capacity bound rhs = 2 phi-mass", mi1.rhs, 2.0 * integrate(sp.phi, sp), 1e-9);

    const auto seq = build_modified_sequence({{}, {}}, sym, sp);
    b.check("modified sequence of empty sets is zero",
            seq.lifted[0].isZero() && seq.lifted[1].isZero() && seq.deficit_sets[0].empty());
  }

  // -- yosida ----------------------------------------------------------------
  {
    const auto kill = pure_killing();
    b.close("bounded generator: scalar value", yosida_generator(kill, 1.0).l_beta(0, 0), -0.5, 1e-15);
    b.close("bounded generator: beta=1000 near the limit", yosida_generator(kill, 1000.0).l_beta(0, 0),
            -1000.0 / 1001.0, 1e-12);

    const auto sym = symmetric2();
    const YosidaApprox ya = yosida_generator(sym, 4.0);
    const SemigroupEvaluation at0 = approx_semigroup(ya, 0.0, extend_to_cemetery(Vector::Ones(2)));
    b.check("semigroup at t=0 is the identity", at0.values.head(2).isOnes() && at0.terms == 0);
    const SemigroupEvaluation mass = approx_semigroup(ya, 1.5, Vector::Ones(3));
    b.close("semigroup preserves mass on the extended space", mass.values.head(2).maxCoeff(), 1.0, 1e-11);

    const YosidaApprox yak = yosida_generator(kill, 4.0);
    const SemigroupEvaluation scalar = approx_semigroup(yak, 1.0, extend_to_cemetery(Vector::Ones(1)));
    b.close("scalar series equals exp(t l_beta)", scalar.values[0], std::exp(-0.8), 1e-12);

    const Matrix closed = approx_resolvent(kill, 1.0, 1.0);
    b.close("closed-form resolvent, scalar case", closed(0, 0), 2.0 / 3.0, 1e-15);
    Matrix direct = Matrix::Identity(1, 1) - yosida_generator(kill, 1.0).l_beta;
    b.close("closed form matches the direct inverse", closed(0, 0), 1.0 / direct(0, 0), 1e-15);

    StateSpace sp = StateSpace::uniform(2);
    b.close("approximating form at zero arguments",
            approx_form_eval(sym, sp, 2.0, Vector::Zero(2), Vector::Zero(2)), 0.0, 0.0);
    b.close("approximating form kills constants on conservative chains",
            approx_form_eval(sym, sp, 2.0, Vector::Ones(2), (Vector(2) << 3, -1).finished()), 0.0, 1e-13);

    const ConvergenceTable tbl = convergence_table(kill, StateSpace::uniform(1), Vector::Ones(1), 1.0, {1.0, 2.0, 4.0});
    b.close("convergence error, scalar formula", tbl.sup_error[0], std::abs(std::exp(-0.5) - std::exp(-1.0)), 1e-14);
    const ConvergenceTable zero_tbl = convergence_table(sym, sp, Vector::Zero(2), 1.0, {1.0, 2.0});
    b.close("convergence table of the zero function", zero_tbl.sup_error[0] + zero_tbl.sup_error[1], 0.0, 0.0);
  }

  // -- simulator -------------------------------------------------------------
  {
    const auto kill = pure_killing();
    const YosidaApprox ya = yosida_generator(kill, 1.0);
    CounterRng rng(11, 0);
    b.check("cemetery is absorbing for the chain", sample_chain_step(1, ya, rng) == 1);
    long self = 0;
    const long draws = 100000;
    for (long i = 0; i < draws; ++i)
      if (sample_chain_step(0, ya, rng) == 0) ++self;
    const double freq = static_cast<double>(self) / draws;
    b.check("chain step frequencies near (1/2, 1/2)", std::abs(freq - 0.5) < 4.0 * 0.5 / std::sqrt(draws),
            format_g17(freq));

    CounterRng rng2(3, 5);
    const PathSample quiet = sample_path(0, ya, 1e-7, rng2);
    b.check("no arrivals before a tiny horizon", quiet.jump_times.empty() && quiet.states.size() == 1);

    PathSample fixture;
    fixture.beta = 1.0;
    fixture.horizon = 4.0;
    fixture.states = {0, 0, 1, 1};
    fixture.jump_times = {0.5, 1.25, 3.0};
    fixture.absorbed_at = 1.25;
    b.close("hitting time on a fixture path", hitting_time(fixture, {0, 1}), 1.25, 0.0);
    b.check("hitting time: start inside", hitting_time(fixture, {1, 0}) == 0.0);
    b.check("hitting time: empty target", hitting_time(fixture, {0, 0}) == kInf);

    MCOptions mc{20000, 14.0, 99, 0, 1};
    const MCEstimate lap0 = mc_laplace(0, 1.0, extend_to_cemetery(Vector::Zero(1)), ya, mc);
    b.check("laplace of the zero function", lap0.mean == 0.0 && lap0.std_error == 0.0);
    const MCEstimate lap = mc_laplace(0, 1.0, extend_to_cemetery(Vector::Ones(1)), ya, mc);
    b.check("laplace estimate hits the closed form",
            std::abs(lap.mean - 2.0 / 3.0) <= 4.0 * lap.std_error + 1e-6,
            format_g17(lap.mean) + " +- " + format_g17(lap.std_error));

    const auto sym = symmetric2();
    const YosidaApprox ya2 = yosida_generator(sym, 2.0);
    const TwoExcessiveReport t0 = check_two_excessive(Vector::Zero(2), ya2, {0.25, 1.0});
    b.check("2-excessive: zero function", t0.ok && t0.max_violation <= 0.0);
    const TwoExcessiveReport t1 = check_two_excessive(Vector::Ones(2), ya2, {0.25, 1.0});
    b.check("2-excessive: constants on a conservative chain", t1.ok);

    MCOptions mcx{4000, 10.0, 5, 0, 1};
    const ExitBound inside = mc_exit_bound(0, {0}, Vector::Ones(2), ya2, mcx);
    b.check("exit bound with the start inside the set", inside.verdict && inside.combined.mean == 1.0);
    const ExitBound empty = mc_exit_bound(0, {}, Vector::Ones(2), ya2, mcx);
    b.check("exit bound for the empty set holds trivially", empty.verdict && empty.hit_mean == 0.0);

    const InvarianceReport inv = invariance_check({0, 1}, ya2, mcx);
    b.check("full space is invariant", inv.ok && inv.escapes == 0);
    bool refused = false;
    try {
      invariance_check({0}, ya2, mcx);
    } catch (const NumericalError&) {
      refused = true;
    }
    b.check("non-invariant set is refused at the kernel level", refused);
  }

  // -- diagnostics -----------------------------------------------------------
  {
    const auto kill = pure_killing();
    StateSpace sp1 = StateSpace::uniform(1);
    const SeparatingFamily fam1 = build_separating_family(sp1, kill, 1);
    b.check("one bump separates a single state from the cemetery", rho_distance(0, 1, fam1) > 0.0);
    b.close("rho(x,x) = 0", rho_distance(0, 0, fam1), 0.0, 0.0);
    double expect = 0.0;
    for (std::size_t k = 0; k < fam1.g_list.size(); ++k)
      expect += fam1.weights[k] * std::min(std::abs(fam1.g_list[k][0]), 1.0);
    b.close("rho(x, cemetery) via vanishing images", rho_distance(0, 1, fam1), expect, 0.0);

    // deterministic discrepancy values for the pure-killing chain
    for (double beta : {1.0, 4.0}) {
      const double predicted = std::exp(-beta / (beta + 1.0));
      const YosidaApprox ya = yosida_generator(kill, beta);
      const SemigroupEvaluation ev = approx_semigroup(ya, 1.0, extend_to_cemetery(Vector::Ones(1)));
      b.close("scalar marginal at beta=" + format_g17(beta), ev.values[0], predicted, 1e-12);
    }
  }

  out << (b.failures ? "selftest: FAILED " + std::to_string(b.failures) + " checks\n"
                     : "selftest: all checks passed\n");
  return b.failures ? 3 : 0;
}

}  // namespace gdf
