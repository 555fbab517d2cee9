#include <doctest.h>

#include <cmath>

#include "qcm/coherence.hpp"
#include "qcm/models.hpp"

using namespace qcm;

namespace {

ComplexMatrix sigma_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

MeasureOptions tight(Formulation f = Formulation::reduced) {
  MeasureOptions o;
  o.formulation = f;
  o.solve.tol_gap = 1e-9;
  o.solve.tol_feas = 1e-10;
  return o;
}

// random observable with zero diagonal in the reference basis, the regime
// where the measure is faithful and the hierarchy chain holds as stated
ComplexMatrix random_zero_diag_observable(int d, std::uint64_t seed) {
  const ComplexMatrix m = random_observable(d, seed);
  const DisplacedObservable disp = displace_observable(m);
  const ComplexMatrix u = zero_diagonal_basis(disp).basis.unitary;
  return hermitize(u * m * u.adjoint());
}

}  // namespace

TEST_CASE("c_mio on sigma_x and the plus state is 1") {
  const DensityMatrix plus = max_coherent_state(2);
  for (Formulation f : {Formulation::faithful, Formulation::reduced}) {
    const MioMeasureResult r = c_mio(sigma_x(), plus, tight(f));
    CAPTURE(to_string(f));
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r.gap <= 1e-7);
    CHECK(r.channel.is_cptp);
    CHECK(r.channel.is_mio);
  }
}

TEST_CASE("c_mio interpolates linearly on mixed sigma_x states") {
  // rho = (1 + r sigma_x)/2 has measure exactly r
  for (double r : {0.2, 0.5, 0.8}) {
    ComplexMatrix rho(2, 2);
    rho << 0.5, 0.5 * r, 0.5 * r, 0.5;
    const MioMeasureResult res = c_mio(sigma_x(), DensityMatrix(rho), tight());
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(res.value == doctest::Approx(r).epsilon(1e-7));
  }
}

TEST_CASE("faithful, reduced, and conjugate programs agree") {
  for (int d : {2, 3}) {
    for (int t = 0; t < 3; ++t) {
      const ComplexMatrix m = random_observable(d, 700 + 10 * d + t);
      const DensityMatrix rho = random_state(d, 800 + 10 * d + t);
      const MioMeasureResult a = c_mio(m, rho, tight(Formulation::faithful));
      const MioMeasureResult b = c_mio(m, rho, tight(Formulation::reduced));
      REQUIRE(a.status == SolveStatus::optimal);
      REQUIRE(b.status == SolveStatus::optimal);
      CAPTURE(d);
      CAPTURE(t);
      CHECK(std::abs(a.value - b.value) <= 1e-6);

      const SdpProblem dual = build_mio_dual(m, rho);
      const SdpSolution ds = solve_sdp(dual, tight().solve);
      REQUIRE(ds.status == SolveStatus::optimal);
      CHECK(std::abs(ds.dual_value - b.raw_optimum) <= 1e-6);
    }
  }
}

TEST_CASE("trivial observables give zero without a solve") {
  const DensityMatrix rho = random_state(3, 5);
  const MioMeasureResult r =
      c_mio(ComplexMatrix(2.0 * ComplexMatrix::Identity(3, 3)), rho);
  CHECK(r.status == SolveStatus::optimal);
  CHECK(r.value == 0.0);
  CHECK(r.iterations == 0);
  CHECK(r.channel.is_cptp);
}

TEST_CASE("robustness equals the l1 norm on qubits") {
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho = random_state(2, 900 + t);
    const RobustnessResult r = robustness(rho, tight().solve);
    REQUIRE(r.status == SolveStatus::optimal);
    const double expect = 2.0 * std::abs(rho.mat()(0, 1));
    CHECK(r.value == doctest::Approx(expect).epsilon(1e-6));
    // witness certifies the value and satisfies its own constraints
    CHECK((r.witness * rho.mat()).trace().real() ==
          doctest::Approx(r.value).epsilon(1e-6));
    CHECK(r.witness.diagonal().real().maxCoeff() <= 1e-8);
    CHECK(hermitian_eig(r.witness).eigenvalues.minCoeff() >= -1.0 - 1e-8);
  }
}

TEST_CASE("robustness of pure states equals the l1 norm") {
  for (int d : {2, 3, 4}) {
    const DensityMatrix psi = random_pure_state(d, 40 + d);
    const RobustnessResult r = robustness(psi, tight().solve);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.value == doctest::Approx(l1_norm(psi.mat())).epsilon(1e-6));
  }
}

TEST_CASE("witness observables make the measure meet its upper bound") {
  // with M' = W_rho the channel bound N_M * C_R is attained; these instances
  // are degenerate, so certify at the stock 1e-8 tolerance rather than 1e-9
  MeasureOptions wopts;
  wopts.solve.tol_gap = 1e-8;
  wopts.solve.tol_feas = 1e-9;
  for (int d : {2, 3}) {
    for (int t = 0; t < 3; ++t) {
      const DensityMatrix rho = random_state(d, 1200 + 10 * d + t);
      const RobustnessResult rob = robustness(rho, wopts.solve);
      REQUIRE(rob.status == SolveStatus::optimal);
      const ComplexMatrix w = hermitize(rob.witness);
      const MioMeasureResult mio = c_mio(w, rho, wopts);
      REQUIRE(mio.status == SolveStatus::optimal);
      const double expect = normalization_nm(w) * rob.value;
      CAPTURE(d);
      CAPTURE(t);
      CHECK(std::abs(mio.value - expect) <= 1e-5);
    }
  }
}

TEST_CASE("maximally coherent input saturates every level") {
  // M = rho = |+_d><+_d|: both the IO lower bound and the MIO value are 1 - 1/d
  for (int d : {2, 3, 4}) {
    const DensityMatrix rho = max_coherent_state(d);
    const ComplexMatrix m = rho.mat();
    const double expect = 1.0 - 1.0 / d;
    CHECK(io_lower_bound(m, rho) == doctest::Approx(expect).epsilon(1e-9));
    const MioMeasureResult r = c_mio(m, rho, tight());
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.value == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("l1 norm closed forms") {
  CHECK(l1_norm(max_coherent_state(5).mat()) == doctest::Approx(4.0));
  CHECK(l1_norm(ComplexMatrix::Identity(4, 4)) == 0.0);
  ComplexMatrix rho(2, 2);
  rho << 0.5, Complex(0.1, -0.2), Complex(0.1, 0.2), 0.5;
  CHECK(l1_norm(rho) == doctest::Approx(2.0 * std::sqrt(0.05)));
}

TEST_CASE("normalization constants") {
  CHECK(normalization_nm(sigma_x()) == doctest::Approx(1.0));
  for (int n : {1, 2, 3}) {
    CHECK(normalization_nm(spin_x(n)) == doctest::Approx(0.5 * n));
  }
}

TEST_CASE("io lower bound never exceeds the MIO value") {
  for (int d : {2, 3}) {
    for (int t = 0; t < 4; ++t) {
      const ComplexMatrix m = random_zero_diag_observable(d, 1500 + 10 * d + t);
      const DensityMatrix rho = random_state(d, 1600 + 10 * d + t);
      const double io = io_lower_bound(m, rho);
      const MioMeasureResult mio = c_mio(m, rho, tight());
      REQUIRE(mio.status == SolveStatus::optimal);
      CAPTURE(d);
      CAPTURE(t);
      CHECK(io <= mio.value + 1e-7);
    }
  }
}

TEST_CASE("hierarchy report is clean on random inputs") {
  MeasureOptions opts = tight();
  for (int d : {2, 3, 4}) {
    for (int t = 0; t < 3; ++t) {
      const ComplexMatrix m = random_observable(d, 1700 + 10 * d + t);
      const DensityMatrix rho = random_state(d, 1800 + 10 * d + t);
      const HierarchyReport rep = hierarchy_report(m, rho, opts);
      CAPTURE(d);
      CAPTURE(t);
      CHECK(rep.ok());
      CHECK(rep.c_io_lower <= rep.c_mio + 1e-6);
      CHECK(rep.c_mio <= rep.nm_cr + 1e-6);
      CHECK(rep.nm_cr <= rep.nm_cl1 + 1e-6);
    }
  }
}

TEST_CASE("hierarchy report rejects trivial observables") {
  CHECK_THROWS_AS(
      hierarchy_report(ComplexMatrix(ComplexMatrix::Identity(2, 2)),
                       random_state(2, 1)),
      ValidationError);
}

TEST_CASE("faithfulness: zero on incoherent states, bounded below by Tr(M rho)") {
  for (int t = 0; t < 4; ++t) {
    const ComplexMatrix m = random_zero_diag_observable(3, 2000 + t);
    const MioMeasureResult flat =
        c_mio(m, random_diagonal_state(3, 2100 + t), tight());
    REQUIRE(flat.status == SolveStatus::optimal);
    CHECK(std::abs(flat.value) <= 1e-6);

    const DensityMatrix rho = random_state(3, 2200 + t);
    const MioMeasureResult r = c_mio(m, rho, tight());
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.value >= (m * rho.mat()).trace().real() - 1e-7);
  }
}

TEST_CASE("strong monotonicity holds and is tight for trivial instruments") {
  const ComplexMatrix m = random_zero_diag_observable(2, 2300);
  const DensityMatrix rho = random_state(2, 2301);

  KrausSet identity{{ComplexMatrix::Identity(2, 2)}};
  const MonotonicityAudit same =
      strong_monotonicity_audit(m, rho, identity, tight());
  CHECK(same.ok);
  CHECK(same.lhs == doctest::Approx(same.rhs).epsilon(1e-7));

  // full dephasing kills all coherence on the right-hand side
  KrausSet dephase{{ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2)}};
  dephase.operators[0](0, 0) = 1.0;
  dephase.operators[1](1, 1) = 1.0;
  const MonotonicityAudit gone =
      strong_monotonicity_audit(m, rho, dephase, tight());
  CHECK(gone.ok);
  CHECK(std::abs(gone.rhs) <= 1e-6);

  for (int t = 0; t < 5; ++t) {
    const KrausSet inst = random_io_instrument(2, 2, 2400 + t);
    const MonotonicityAudit a = strong_monotonicity_audit(m, rho, inst, tight());
    CAPTURE(t);
    CHECK(a.ok);
    CHECK(a.violation <= 1e-6);
  }
}

TEST_CASE("dual variable decoding satisfies the sign constraints") {
  const ComplexMatrix m = random_observable(3, 2500);
  const DensityMatrix rho = random_state(3, 2501);
  const SdpProblem dual = build_mio_dual(m, rho);
  const SdpSolution s = solve_sdp(dual, tight().solve);
  REQUIRE(s.status == SolveStatus::optimal);
  const MioDualVars vars = decode_mio_dual(3, s.dual_y);
  CHECK(vars.y_b.rows() == 3);
  REQUIRE(vars.y_a.size() == 3);
  CHECK(hermiticity_residual(vars.y_b) < 1e-12);
  for (const auto& ya : vars.y_a) {
    CHECK(hermiticity_residual(ya) < 1e-12);
    CHECK(ya.diagonal().real().maxCoeff() <= 1e-7);
  }
}
