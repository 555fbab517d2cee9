#include "qcm/suites.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <utility>

#include "qcm/models.hpp"

namespace qcm {

namespace {
std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 step, enough to decorrelate per-instance seeds
  std::uint64_t z = seed + salt * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void record_failure(SuiteResult& r, std::uint64_t inst_seed,
                    const std::string& what) {
  std::ostringstream line;
  line << "seed=" << inst_seed << ": " << what;
  r.failures.push_back(line.str());
}
}  // namespace

SuiteResult run_duality_suite(std::uint64_t seed, int per_dim,
                              const std::vector<int>& dims, double agree_tol,
                              double gap_tol) {
  SuiteResult r{"duality", seed};
  SolveOptions solve;
  solve.tol_gap = 1e-9;
  solve.tol_feas = 1e-9;
  for (int d : dims) {
    for (int t = 0; t < per_dim; ++t) {
      const std::uint64_t s = mix(seed, (d * 1000ULL) + t);
      const ComplexMatrix m = random_observable(d, s);
      const DensityMatrix rho = random_state(d, s + 1);
      ++r.instances;

      const SdpProblem faithful = build_mio_primal_faithful(m, rho);
      const SdpProblem reduced = build_mio_primal_reduced(m, rho);
      const SdpProblem dual = build_mio_dual(m, rho);
      const SdpSolution sf = solve_sdp(faithful, solve);
      const SdpSolution sr = solve_sdp(reduced, solve);
      const SdpSolution sd = solve_sdp(dual, solve);

      for (const auto& [name, sol] :
           {std::pair<const char*, const SdpSolution*>{"faithful", &sf},
            {"reduced", &sr},
            {"dual", &sd}}) {
        if (sol->status != SolveStatus::optimal)
          record_failure(r, s, std::string(name) + " status " +
                                   to_string(sol->status));
        const double rel_gap =
            std::abs(sol->gap) / (1.0 + std::abs(sol->primal_value));
        if (rel_gap > gap_tol)
          record_failure(r, s, std::string(name) + " gap " +
                                   std::to_string(rel_gap));
      }
      const double vf = sf.primal_value;
      const double vr = sr.primal_value;
      const double vd = sd.dual_value;
      const double spread = std::max({std::abs(vf - vr), std::abs(vf - vd),
                                      std::abs(vr - vd)});
      r.worst = std::max(r.worst, spread);
      if (spread > agree_tol) {
        std::ostringstream what;
        what << "optima disagree by " << spread << " (faithful " << vf
             << ", reduced " << vr << ", dual " << vd << ")";
        record_failure(r, s, what.str());
      }
    }
  }
  r.passed = r.failures.empty();
  return r;
}

SuiteResult run_monotonicity_suite(std::uint64_t seed, int instruments,
                                   const std::vector<int>& dims, double slack) {
  SuiteResult r{"monotonicity", seed};
  MeasureOptions opts;
  opts.solve.tol_gap = 1e-9;
  opts.solve.tol_feas = 1e-9;
  for (int t = 0; t < instruments; ++t) {
    const std::uint64_t s = mix(seed, 7000ULL + t);
    const int d = dims[t % dims.size()];
    const ComplexMatrix m = random_observable(d, s);
    const DensityMatrix rho = random_state(d, s + 1);
    const int k = 1 + static_cast<int>(s % 3);
    const KrausSet instrument = random_io_instrument(d, k, s + 2);
    ++r.instances;
    const MonotonicityAudit audit =
        strong_monotonicity_audit(m, rho, instrument, opts, slack);
    r.worst = std::max(r.worst, audit.violation);
    if (!audit.ok) {
      std::ostringstream what;
      what << "violation " << audit.violation << " (lhs " << audit.lhs
           << ", rhs " << audit.rhs << ")";
      record_failure(r, s, what.str());
    }
  }
  r.passed = r.failures.empty();
  return r;
}

SuiteResult run_invariants_suite(std::uint64_t seed, int instances,
                                 const std::vector<int>& dims) {
  SuiteResult r{"invariants", seed};
  MeasureOptions opts;
  opts.solve.tol_gap = 1e-9;
  opts.solve.tol_feas = 1e-9;
  for (int d : dims) {
    for (int t = 0; t < instances; ++t) {
      const std::uint64_t s = mix(seed, (d * 31ULL) + t);
      ++r.instances;
      // zero-diagonal observable, so the computational basis is the preferred one
      const DisplacedObservable disp =
          displace_observable(random_observable(d, s));
      const SchurHornResult sh = zero_diagonal_basis(disp);
      const ComplexMatrix m = hermitize(sh.basis.unitary * disp.m_prime *
                                        sh.basis.unitary.adjoint());

      // faithfulness: diagonal states measure zero
      const DensityMatrix diag_state = random_diagonal_state(d, s + 1);
      const double v_diag = c_mio(m, diag_state, opts).value;
      r.worst = std::max(r.worst, std::abs(v_diag));
      if (std::abs(v_diag) > 1e-6)
        record_failure(r, s, "faithfulness: diagonal state measured " +
                                 std::to_string(v_diag));

      // identity-channel witness bound: c_mio >= Tr(M' rho)
      const DensityMatrix rho = random_state(d, s + 2);
      const double v = c_mio(m, rho, opts).value;
      const double witness = (m * rho.mat()).trace().real();
      if (v < witness - 1e-7)
        record_failure(r, s, "witness bound: c_mio " + std::to_string(v) +
                                 " < Tr(M rho) " + std::to_string(witness));

      // positive scaling
      for (double alpha : {0.5, 2.0}) {
        const double vs = c_mio(ComplexMatrix(alpha * m), rho, opts).value;
        const double rel = std::abs(vs - alpha * v) / (1.0 + std::abs(alpha * v));
        r.worst = std::max(r.worst, rel);
        if (rel > 1e-6)
          record_failure(r, s, "scaling by " + std::to_string(alpha) +
                                   " off by " + std::to_string(rel));
      }

      // incoherent (diagonal) unitary invariance
      std::mt19937_64 rng(s + 3);
      std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
      ComplexMatrix du = ComplexMatrix::Zero(d, d);
      for (int j = 0; j < d; ++j) du(j, j) = std::polar(1.0, angle(rng));
      const DensityMatrix rotated(hermitize(du * rho.mat() * du.adjoint()));
      const double v_rot = c_mio(m, rotated, opts).value;
      r.worst = std::max(r.worst, std::abs(v_rot - v));
      if (std::abs(v_rot - v) > 1e-6)
        record_failure(r, s, "diagonal-unitary invariance off by " +
                                 std::to_string(std::abs(v_rot - v)));
    }
  }
  r.passed = r.failures.empty();
  return r;
}

SuiteResult run_hierarchy_suite(std::uint64_t seed, int per_dim,
                                const std::vector<int>& dims, double slack) {
  SuiteResult r{"hierarchy", seed};
  MeasureOptions opts;
  opts.solve.tol_gap = 1e-8;
  opts.solve.tol_feas = 1e-9;
  IoSearchOptions io_opts;
  for (int d : dims) {
    for (int t = 0; t < per_dim; ++t) {
      const std::uint64_t s = mix(seed, (d * 100000ULL) + t);
      const ComplexMatrix m = random_observable(d, s);
      const DensityMatrix rho = random_state(d, s + 1);
      io_opts.seed = s + 2;
      ++r.instances;
      const HierarchyReport rep = hierarchy_report(m, rho, opts, io_opts, slack);
      for (const auto& [pair, excess] : rep.violations) {
        r.worst = std::max(r.worst, excess);
        record_failure(r, s, pair + " violated by " + std::to_string(excess));
      }
    }
  }
  r.passed = r.failures.empty();
  return r;
}

}  // namespace qcm
