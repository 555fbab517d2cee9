// End-to-end acceptance gate: ten numbered criteria, one pass/fail line each.
// Every numeric check is against an independent closed form or a certified
// bound, never against the solver's own bookkeeping.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "qcm/basis.hpp"
#include "qcm/coherence.hpp"
#include "qcm/models.hpp"

using namespace qcm;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& what) {
    if (ok) detail = what;  // keep the first failure
    ok = false;
  }
  void bound(double value, double limit, const std::string& what) {
    if (!(value <= limit))
      fail(what + " = " + std::to_string(value) + " > " + std::to_string(limit));
  }
};

MeasureOptions tight_measure(Formulation f = Formulation::reduced) {
  MeasureOptions o;
  o.formulation = f;
  o.solve.tol_gap = 1e-9;
  o.solve.tol_feas = 1e-10;
  return o;
}

ComplexMatrix zero_diag_observable(int d, std::uint64_t seed) {
  const DisplacedObservable disp = displace_observable(random_observable(d, seed));
  const ComplexMatrix u = zero_diagonal_basis(disp).basis.unitary;
  return hermitize(u * disp.m_prime * u.adjoint());
}

// 1. qubit robustness coincides with the l1 norm
Check criterion_robustness_qubit() {
  Check c;
  const SolveOptions solve = tight_measure().solve;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const DensityMatrix rho = random_state(2, 10'000 + t);
    const RobustnessResult r = robustness(rho, solve);
    if (r.status != SolveStatus::optimal) {
      c.fail("seed " + std::to_string(10'000 + t) + ": solver status " +
             to_string(r.status));
      continue;
    }
    worst = std::max(worst, std::abs(r.value - 2.0 * std::abs(rho.mat()(0, 1))));
  }
  c.bound(worst, 1e-6, "max |robustness - 2|rho_01||");
  return c;
}

// 2. three formulations of the channel measure agree, with certified gaps
Check criterion_duality() {
  Check c;
  const SolveOptions solve = tight_measure().solve;
  double worst_spread = 0.0, worst_gap = 0.0;
  for (int d : {2, 3}) {
    for (int t = 0; t < 20; ++t) {
      const std::uint64_t s = 20'000 + 100 * d + 2 * t;
      const ComplexMatrix m = random_observable(d, s);
      const DensityMatrix rho = random_state(d, s + 1);
      const SdpSolution sf = solve_sdp(build_mio_primal_faithful(m, rho), solve);
      const SdpSolution sr = solve_sdp(build_mio_primal_reduced(m, rho), solve);
      const SdpSolution sd = solve_sdp(build_mio_dual(m, rho), solve);
      for (const SdpSolution* sol : {&sf, &sr, &sd}) {
        if (sol->status != SolveStatus::optimal)
          c.fail("seed " + std::to_string(s) + ": status " + to_string(sol->status));
        worst_gap = std::max(
            worst_gap, std::abs(sol->gap) / (1.0 + std::abs(sol->primal_value)));
      }
      const double vf = sf.primal_value, vr = sr.primal_value, vd = sd.dual_value;
      worst_spread = std::max({worst_spread, std::abs(vf - vr),
                               std::abs(vf - vd), std::abs(vr - vd)});
    }
  }
  c.bound(worst_spread, 1e-6, "max pairwise optimum spread");
  c.bound(worst_gap, 1e-7, "max certified relative gap");
  return c;
}

// 3. full measure ordering chain on random inputs
Check criterion_hierarchy() {
  Check c;
  const MeasureOptions opts = tight_measure();
  for (int d : {2, 3, 4}) {
    for (int t = 0; t < 50; ++t) {
      const std::uint64_t s = 30'000 + 1'000 * d + 2 * t;
      const HierarchyReport rep =
          hierarchy_report(random_observable(d, s), random_state(d, s + 1), opts);
      for (const auto& [pair, excess] : rep.violations)
        c.fail("seed " + std::to_string(s) + ": " + pair + " violated by " +
               std::to_string(excess));
    }
  }
  return c;
}

// 4. witness observables attain the robustness upper bound
Check criterion_tightness() {
  Check c;
  // witness observables sit on a degenerate face of the feasible set, where
  // certifying below ~1e-8 is not attainable in double precision
  MeasureOptions opts;
  opts.solve.tol_gap = 1e-8;
  opts.solve.tol_feas = 1e-9;
  double worst = 0.0;
  for (int d : {2, 3}) {
    for (int t = 0; t < 5; ++t) {
      const DensityMatrix rho = random_state(d, 40'000 + 10 * d + t);
      const RobustnessResult rob = robustness(rho, opts.solve);
      const ComplexMatrix w = hermitize(rob.witness);
      const MioMeasureResult mio = c_mio(w, rho, opts);
      if (rob.status != SolveStatus::optimal || mio.status != SolveStatus::optimal) {
        c.fail("d=" + std::to_string(d) + " t=" + std::to_string(t) +
               ": solver did not certify optimality");
        continue;
      }
      worst = std::max(worst,
                       std::abs(mio.value - normalization_nm(w) * rob.value));
    }
  }
  c.bound(worst, 1e-5, "max |measure - N_M * C_R| at witness observables");
  return c;
}

// 5. closed-form values on sigma_x
Check criterion_analytic_qubit() {
  Check c;
  const MeasureOptions opts = tight_measure();
  ComplexMatrix sx(2, 2);
  sx << 0.0, 1.0, 1.0, 0.0;
  double worst = 0.0;
  for (int k = 1; k <= 9; ++k) {
    const double r = k / 10.0;
    ComplexMatrix rho(2, 2);
    rho << 0.5, 0.5 * r, 0.5 * r, 0.5;
    const MioMeasureResult res = c_mio(sx, DensityMatrix(rho), opts);
    if (res.status != SolveStatus::optimal) c.fail("solver failed at r=" + std::to_string(r));
    worst = std::max(worst, std::abs(res.value - r));
  }
  c.bound(worst, 1e-6, "max |measure - r| on (1 + r sigma_x)/2");
  const MioMeasureResult plus = c_mio(sx, max_coherent_state(2), opts);
  c.bound(std::abs(plus.value - 1.0), 1e-6, "|measure - 1| on the plus state");
  return c;
}

// 6. 21-point collective-spin sweep over the W-state mixture family (d = 8)
Check criterion_sweep_spin() {
  Check c;
  const MeasureOptions opts = tight_measure(Formulation::reduced);
  const ComplexMatrix m = spin_x(3);
  const double nm = normalization_nm(m);
  std::vector<double> l1(21), cr(21), mio(21);
  for (int i = 0; i < 21; ++i) {
    const double p = i / 20.0;
    const DensityMatrix rho = w_mixture(p);
    l1[i] = l1_norm(rho.mat());
    const RobustnessResult rob = robustness(rho, opts.solve);
    const MioMeasureResult mr = c_mio(m, rho, opts);
    if (rob.status != SolveStatus::optimal || mr.status != SolveStatus::optimal)
      c.fail("p=" + std::to_string(p) + ": solver did not certify optimality");
    cr[i] = rob.value;
    mio[i] = mr.value;
    if (std::abs(l1[i] - 2.0 * p / 7.0) > 1e-8)
      c.fail("p=" + std::to_string(p) + ": c_l1 off the closed form 2p/7 by " +
             std::to_string(std::abs(l1[i] - 2.0 * p / 7.0)));
    if (mio[i] > nm * cr[i] + 1e-6 || nm * cr[i] > nm * l1[i] + 1e-6)
      c.fail("p=" + std::to_string(p) + ": pointwise ordering violated");
  }
  for (int i = 1; i < 21; ++i) {
    if (l1[i] + 1e-9 < l1[i - 1] || cr[i] + 1e-6 < cr[i - 1] ||
        mio[i] + 1e-6 < mio[i - 1])
      c.fail("curves not nondecreasing at grid index " + std::to_string(i));
  }
  return c;
}

// 7. superradiance sweep on three tilted qubits
Check criterion_sweep_superradiance() {
  Check c;
  const MeasureOptions opts = tight_measure(Formulation::reduced);
  const ComplexMatrix m = superradiant_op(3);
  const double nm = normalization_nm(m);
  const int steps = 25;
  double worst_closed = 0.0;
  double best = -1.0;
  double at_quarter_pi = -1.0;
  for (int i = 0; i < steps; ++i) {
    const double theta = (std::numbers::pi / 2.0) * i / (steps - 1);
    const DensityMatrix rho = product_theta_state(theta, 3, 0);
    const double closed = std::pow(1.0 + std::sin(2.0 * theta), 3.0) - 1.0;
    const double l1 = l1_norm(rho.mat());
    const RobustnessResult rob = robustness(rho, opts.solve);
    const MioMeasureResult mr = c_mio(m, rho, opts);
    if (rob.status != SolveStatus::optimal || mr.status != SolveStatus::optimal)
      c.fail("theta=" + std::to_string(theta) + ": solver did not certify optimality");
    worst_closed = std::max({worst_closed, std::abs(l1 - closed),
                             std::abs(rob.value - closed)});
    if (mr.value > nm * rob.value + 1e-6)
      c.fail("theta=" + std::to_string(theta) + ": measure exceeds N_M * C_R");
    best = std::max(best, mr.value);
    if (i == 12) at_quarter_pi = mr.value;  // the grid point at theta = pi/4
  }
  c.bound(worst_closed, 1e-5, "max |C_R or C_l1 - (1+sin 2theta)^3 + 1|");
  // the measure saturates on a plateau around pi/4, so "peaks at pi/4" means
  // the pi/4 grid point attains the maximum (up to solver resolution)
  c.bound(best - at_quarter_pi, 1e-6, "grid max minus value at theta = pi/4");
  return c;
}

// 8. strong monotonicity under random incoherent instruments
Check criterion_monotonicity() {
  Check c;
  const MeasureOptions opts = tight_measure();
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int d = 2 + t % 2;
    const std::uint64_t s = 80'000 + 10 * t;
    const ComplexMatrix m = random_observable(d, s);
    const DensityMatrix rho = random_state(d, s + 1);
    const KrausSet inst = random_io_instrument(d, 1 + t % 3, s + 2);
    const MonotonicityAudit a = strong_monotonicity_audit(m, rho, inst, opts);
    worst = std::max(worst, a.violation);
  }
  c.bound(worst, 1e-6, "max branch-average excess over C(rho)");
  return c;
}

// 9. preferred-basis constructions at scale
Check criterion_basis() {
  Check c;
  double worst_diag = 0.0, worst_unitary = 0.0, worst_mub = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int d = 2 + t % 15;  // covers every dimension up to 16
    const ComplexMatrix m = random_observable(d, 90'000 + t);
    const DisplacedObservable disp = displace_observable(m);
    const SchurHornResult sh = zero_diagonal_basis(disp);
    worst_diag = std::max(worst_diag, sh.diagonal_residual);
    worst_unitary = std::max(
        worst_unitary, max_abs(sh.basis.unitary * sh.basis.unitary.adjoint() -
                               ComplexMatrix::Identity(d, d)));
    if (sh.rotations > d - 1)
      c.fail("d=" + std::to_string(d) + ": " + std::to_string(sh.rotations) +
             " rotations used, budget is d-1");

    const ComplexMatrix f = fourier_mub_basis(hermitian_eig(m)).unitary;
    const ComplexMatrix rotated = f.adjoint() * disp.m_prime * f;
    worst_mub = std::max(
        worst_mub, static_cast<double>(rotated.diagonal().cwiseAbs().maxCoeff()));
    worst_unitary = std::max(
        worst_unitary,
        max_abs(f.adjoint() * f - ComplexMatrix::Identity(d, d)));
  }
  c.bound(worst_diag, 1e-10, "max zero-diagonal residual");
  c.bound(worst_unitary, 1e-12, "max unitarity defect");
  c.bound(worst_mub, 1e-10, "max Fourier-basis diagonal residual");
  return c;
}

// 10. faithfulness and the witness lower bound in the preferred basis
Check criterion_faithfulness() {
  Check c;
  const MeasureOptions opts = tight_measure();
  double worst_flat = 0.0, worst_deficit = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int d = 2 + t % 2;
    const std::uint64_t s = 100'000 + 10 * t;
    const ComplexMatrix m = zero_diag_observable(d, s);

    const MioMeasureResult flat = c_mio(m, random_diagonal_state(d, s + 1), opts);
    if (flat.status != SolveStatus::optimal) c.fail("diagonal-state solve failed");
    worst_flat = std::max(worst_flat, std::abs(flat.value));

    const DensityMatrix rho = random_state(d, s + 2);
    const MioMeasureResult r = c_mio(m, rho, opts);
    if (r.status != SolveStatus::optimal) c.fail("coherent-state solve failed");
    worst_deficit = std::max(
        worst_deficit, (m * rho.mat()).trace().real() - r.value);
  }
  c.bound(worst_flat, 1e-6, "max measure on diagonal states");
  c.bound(worst_deficit, 1e-7, "max Tr(M' rho) - measure deficit");
  return c;
}

struct Criterion {
  const char* label;
  double budget_s;
  Check (*run)();
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"qubit robustness equals the l1 norm", 10.0, criterion_robustness_qubit},
      {"faithful/reduced/conjugate programs agree", 120.0, criterion_duality},
      {"measure ordering chain holds", 600.0, criterion_hierarchy},
      {"witness observables are tight", 120.0, criterion_tightness},
      {"closed-form qubit values", 60.0, criterion_analytic_qubit},
      {"collective-spin sweep on W mixtures", 1800.0, criterion_sweep_spin},
      {"superradiance sweep on tilted qubits", 1800.0,
       criterion_sweep_superradiance},
      {"strong monotonicity under instruments", 300.0, criterion_monotonicity},
      {"preferred-basis constructions", 30.0, criterion_basis},
      {"faithfulness and witness bound", 600.0, criterion_faithfulness},
  };

  int failures = 0;
  int index = 0;
  for (const Criterion& cr : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Check result = cr.run();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (elapsed > cr.budget_s)
      result.fail("runtime " + std::to_string(elapsed) + "s exceeds budget " +
                  std::to_string(cr.budget_s) + "s");
    std::printf("criterion %2d [%s]: %s (%.1fs)%s%s\n", index, cr.label,
                result.ok ? "PASS" : "FAIL", elapsed,
                result.ok ? "" : " -- ", result.ok ? "" : result.detail.c_str());
    std::fflush(stdout);
    if (!result.ok) ++failures;
  }
  if (failures) std::printf("%d of 10 criteria failed\n", failures);
  return failures ? 1 : 0;
}
