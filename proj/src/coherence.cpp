#include "qcm/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace qcm {

namespace {

// Real coordinates of a d x d Hermitian matrix.
struct HermCoord {
  int p, q;
  enum Kind { diag, re, im } kind;
};

std::vector<HermCoord> herm_coords(int d) {
  std::vector<HermCoord> out;
  out.reserve(d * d);
  for (int p = 0; p < d; ++p) out.push_back({p, p, HermCoord::diag});
  for (int p = 0; p < d; ++p)
    for (int q = p + 1; q < d; ++q) {
      out.push_back({p, q, HermCoord::re});
      out.push_back({p, q, HermCoord::im});
    }
  return out;
}

Complex coord_value(const HermCoord& c) {
  return c.kind == HermCoord::im ? Complex(0.0, 1.0) : Complex(1.0, 0.0);
}

void coord_accumulate(const HermCoord& c, double y, ComplexMatrix& out) {
  switch (c.kind) {
    case HermCoord::diag:
      out(c.p, c.p) += y;
      break;
    case HermCoord::re:
      out(c.p, c.q) += y;
      out(c.q, c.p) += y;
      break;
    case HermCoord::im:
      out(c.p, c.q) += Complex(0.0, y);
      out(c.q, c.p) += Complex(0.0, -y);
      break;
  }
}

// Tr(rho H_k) for a coordinate basis element.
double coord_trace(const HermCoord& c, const ComplexMatrix& rho) {
  switch (c.kind) {
    case HermCoord::diag:
      return rho(c.p, c.p).real();
    case HermCoord::re:
      return 2.0 * rho(c.p, c.q).real();
    case HermCoord::im:
      // H_im = i E_pq - i E_qp, so Tr(rho H_im) = +2 Im rho_pq
      return 2.0 * rho(c.p, c.q).imag();
  }
  return 0.0;
}

ComplexMatrix objective_m_rho_t(const ComplexMatrix& m, const DensityMatrix& rho) {
  return tensor_product(m, rho.mat().transpose());
}

void check_mio_inputs(const ComplexMatrix& m, const DensityMatrix& rho,
                      const char* where) {
  if (m.rows() != m.cols() || m.rows() != rho.dim())
    throw ValidationError(std::string(where) +
                          ": observable and state dimensions must match");
  const double herm = hermiticity_residual(m);
  if (herm > default_tolerances().hermiticity)
    throw ValidationError(std::string(where) + ": observable hermiticity residual " +
                          std::to_string(herm));
}

}  // namespace

std::string to_string(Formulation f) {
  return f == Formulation::faithful ? "faithful" : "reduced";
}

SdpProblem build_mio_primal_faithful(const ComplexMatrix& m,
                                     const DensityMatrix& rho) {
  check_mio_inputs(m, rho, "build_mio_primal_faithful");
  const int d = static_cast<int>(m.rows());
  const int dim = 2 * d * d;
  auto idx = [d](int a, int b, int c) { return (a * d + b) * 2 + c; };

  SdpProblem p;
  p.block_dims = {dim};
  ComplexMatrix obj = ComplexMatrix::Zero(dim, dim);
  const ComplexMatrix core = objective_m_rho_t(m, rho);
  for (int ab = 0; ab < d * d; ++ab)
    for (int apbp = 0; apbp < d * d; ++apbp)
      obj(2 * ab, 2 * apbp) = core(ab, apbp);
  p.objective = {obj};

  // trace preservation of the channel block: Tr_A X_1 = 1_B
  for (int b = 0; b < d; ++b) {
    LinearConstraint diag;
    for (int a = 0; a < d; ++a)
      diag.entries.push_back({0, idx(a, b, 0), idx(a, b, 0), Complex(1.0, 0.0)});
    diag.rhs = 1.0;
    p.constraints.push_back(std::move(diag));
  }
  for (int b = 0; b < d; ++b)
    for (int bp = b + 1; bp < d; ++bp) {
      LinearConstraint cre, cim;
      for (int a = 0; a < d; ++a) {
        cre.entries.push_back({0, idx(a, b, 0), idx(a, bp, 0), Complex(0.5, 0.0)});
        cim.entries.push_back({0, idx(a, b, 0), idx(a, bp, 0), Complex(0.0, 0.5)});
      }
      p.constraints.push_back(std::move(cre));
      p.constraints.push_back(std::move(cim));
    }
  // every basis-state image is diagonal...
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < d; ++a)
      for (int ap = a + 1; ap < d; ++ap) {
        p.constraints.push_back(
            {{{0, idx(a, i, 0), idx(ap, i, 0), Complex(0.5, 0.0)}}, 0.0});
        p.constraints.push_back(
            {{{0, idx(a, i, 0), idx(ap, i, 0), Complex(0.0, 0.5)}}, 0.0});
      }
  // ...with the diagonal weights carried by the flag block
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      p.constraints.push_back({{{0, idx(j, i, 0), idx(j, i, 0), Complex(1.0, 0.0)},
                                {0, idx(j, i, 1), idx(j, i, 1), Complex(-1.0, 0.0)}},
                               0.0});
    }
  return p;
}

SdpProblem build_mio_primal_reduced(const ComplexMatrix& m,
                                    const DensityMatrix& rho) {
  check_mio_inputs(m, rho, "build_mio_primal_reduced");
  const int d = static_cast<int>(m.rows());
  auto idx = [d](int a, int b) { return a * d + b; };

  SdpProblem p;
  p.block_dims = {d * d};
  p.objective = {objective_m_rho_t(m, rho)};

  for (int b = 0; b < d; ++b) {
    LinearConstraint diag;
    for (int a = 0; a < d; ++a)
      diag.entries.push_back({0, idx(a, b), idx(a, b), Complex(1.0, 0.0)});
    diag.rhs = 1.0;
    p.constraints.push_back(std::move(diag));
  }
  for (int b = 0; b < d; ++b)
    for (int bp = b + 1; bp < d; ++bp) {
      LinearConstraint cre, cim;
      for (int a = 0; a < d; ++a) {
        cre.entries.push_back({0, idx(a, b), idx(a, bp), Complex(0.5, 0.0)});
        cim.entries.push_back({0, idx(a, b), idx(a, bp), Complex(0.0, 0.5)});
      }
      p.constraints.push_back(std::move(cre));
      p.constraints.push_back(std::move(cim));
    }
  // positivity of the Choi block already makes the basis-state images PSD, so
  // only their off-diagonals need pinning
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < d; ++a)
      for (int ap = a + 1; ap < d; ++ap) {
        p.constraints.push_back(
            {{{0, idx(a, i), idx(ap, i), Complex(0.5, 0.0)}}, 0.0});
        p.constraints.push_back(
            {{{0, idx(a, i), idx(ap, i), Complex(0.0, 0.5)}}, 0.0});
      }
  return p;
}

SdpProblem build_mio_dual(const ComplexMatrix& m, const DensityMatrix& rho) {
  check_mio_inputs(m, rho, "build_mio_dual");
  const int d = static_cast<int>(m.rows());
  const auto coords = herm_coords(d);

  SdpProblem p;
  p.block_dims.assign(1, d * d);
  p.block_dims.insert(p.block_dims.end(), d * d, 1);  // diag(Y_A^i) slacks
  p.objective = zero_blocks(p.block_dims);
  p.objective[0] = objective_m_rho_t(m, rho);

  // Y_B coordinates: 1_A x H_k, objective coefficient Tr(H_k)
  for (const HermCoord& c : coords) {
    LinearConstraint lc;
    for (int a = 0; a < d; ++a)
      lc.entries.push_back({0, a * d + c.p, a * d + c.q, coord_value(c)});
    lc.rhs = (c.kind == HermCoord::diag) ? 1.0 : 0.0;
    p.constraints.push_back(std::move(lc));
  }
  // Y_A^i coordinates: H_k x |i><i|; diagonal coords pick up a sign slack
  for (int i = 0; i < d; ++i)
    for (const HermCoord& c : coords) {
      LinearConstraint lc;
      lc.entries.push_back({0, c.p * d + i, c.q * d + i, coord_value(c)});
      if (c.kind == HermCoord::diag)
        lc.entries.push_back({1 + i * d + c.p, 0, 0, Complex(-1.0, 0.0)});
      lc.rhs = 0.0;
      p.constraints.push_back(std::move(lc));
    }
  return p;
}

MioDualVars decode_mio_dual(int d, const Eigen::VectorXd& dual_y) {
  const auto coords = herm_coords(d);
  MioDualVars out;
  out.y_b = ComplexMatrix::Zero(d, d);
  out.y_a.assign(d, ComplexMatrix::Zero(d, d));
  int k = 0;
  for (const HermCoord& c : coords) coord_accumulate(c, dual_y(k++), out.y_b);
  for (int i = 0; i < d; ++i)
    for (const HermCoord& c : coords) coord_accumulate(c, dual_y(k++), out.y_a[i]);
  return out;
}

MioMeasureResult c_mio(const ComplexMatrix& m, const DensityMatrix& rho,
                       const MeasureOptions& opts) {
  check_mio_inputs(m, rho, "c_mio");
  const int d = static_cast<int>(m.rows());
  const double displacement = m.trace().real() / d;

  MioMeasureResult out;
  out.formulation = opts.formulation;
  if (!is_nontrivial(m)) {
    // M proportional to identity: Tr(M Phi(rho)) = Tr(M)/d for every channel
    out.raw_optimum = displacement;
    out.value = 0.0;
    KrausSet identity{{ComplexMatrix::Identity(d, d)}};
    out.channel = kraus_to_choi(identity);
    out.status = SolveStatus::optimal;
    return out;
  }

  const SdpProblem problem = (opts.formulation == Formulation::faithful)
                                 ? build_mio_primal_faithful(m, rho)
                                 : build_mio_primal_reduced(m, rho);
  const SdpSolution sol = solve_sdp(problem, opts.solve);

  out.raw_optimum = sol.primal_value;
  out.value = sol.primal_value - displacement;
  out.gap = sol.gap;
  out.lower_bound = sol.primal_value - displacement;
  out.upper_bound = sol.dual_value - displacement;
  out.status = sol.status;
  out.iterations = sol.iterations;

  ComplexMatrix choi(d * d, d * d);
  if (opts.formulation == Formulation::faithful) {
    for (int ab = 0; ab < d * d; ++ab)
      for (int apbp = 0; apbp < d * d; ++apbp)
        choi(ab, apbp) = sol.x[0](2 * ab, 2 * apbp);
  } else {
    choi = sol.x[0];
  }
  Tolerances audit = default_tolerances();
  audit.choi_psd = 1e-6;
  audit.choi_tp = 1e-6;
  out.channel = make_choi_channel(hermitize(choi), d, audit);
  return out;
}

RobustnessResult robustness(const DensityMatrix& rho, const SolveOptions& opts) {
  const int d = static_cast<int>(rho.dim());
  const auto coords = herm_coords(d);

  SdpProblem p;
  p.block_dims.assign(1, d);
  p.block_dims.insert(p.block_dims.end(), d, 1);  // diag(W) sign slacks
  p.objective = zero_blocks(p.block_dims);
  p.objective[0] = -ComplexMatrix::Identity(d, d);

  for (const HermCoord& c : coords) {
    LinearConstraint lc;
    lc.entries.push_back({0, c.p, c.q, coord_value(c)});
    if (c.kind == HermCoord::diag)
      lc.entries.push_back({1 + c.p, 0, 0, Complex(-1.0, 0.0)});
    lc.rhs = -coord_trace(c, rho.mat());
    p.constraints.push_back(std::move(lc));
  }

  const SdpSolution sol = solve_sdp(p, opts);
  RobustnessResult out;
  out.value = -sol.dual_value;
  out.gap = sol.gap;
  out.status = sol.status;
  out.iterations = sol.iterations;
  out.witness = ComplexMatrix::Zero(d, d);
  int k = 0;
  for (const HermCoord& c : coords) coord_accumulate(c, sol.dual_y(k++), out.witness);
  return out;
}

double l1_norm(const ComplexMatrix& rho) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i)
    for (Eigen::Index j = 0; j < rho.cols(); ++j)
      if (i != j) acc += std::abs(rho(i, j));
  return acc;
}

double normalization_nm(const ComplexMatrix& m) {
  return displace_observable(m).normalization_nm;
}

double io_lower_bound(const ComplexMatrix& m, const DensityMatrix& rho,
                      const IoSearchOptions& opts) {
  check_mio_inputs(m, rho, "io_lower_bound");
  const int d = static_cast<int>(m.rows());
  const ComplexMatrix& r = rho.mat();
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

  std::vector<std::vector<int>> perms;
  if (d <= 6) {
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      perms.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    perms.push_back(perm);  // identity always included
    for (int s = 0; s < opts.max_permutations; ++s) {
      std::shuffle(perm.begin(), perm.end(), rng);
      perms.push_back(perm);
    }
  }

  double best = -std::numeric_limits<double>::infinity();
  ComplexMatrix b(d, d);
  for (const auto& perm : perms) {
    // f(phi) = sum_{jk} u_j conj(u_k) B_jk with B_jk = rho_jk M_{perm(k) perm(j)}
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) b(j, k) = r(j, k) * m(perm[k], perm[j]);

    for (int restart = 0; restart <= opts.restarts; ++restart) {
      ComplexVector u(d);
      for (int j = 0; j < d; ++j)
        u(j) = restart == 0 ? Complex(1.0, 0.0) : std::polar(1.0, angle(rng));
      ComplexVector w = u.conjugate();
      double f = w.dot(b * w).real();
      for (int sweep = 0; sweep < 300; ++sweep) {
        const double f_prev = f;
        for (int j = 0; j < d; ++j) {
          Complex zj(0.0, 0.0);
          for (int k = 0; k < d; ++k)
            if (k != j) zj += b(j, k) * std::conj(u(k));
          if (std::abs(zj) > 1e-15) u(j) = std::conj(zj) / std::abs(zj);
        }
        w = u.conjugate();
        f = w.dot(b * w).real();
        if (f - f_prev < 1e-13 * (1.0 + std::abs(f))) break;
      }
      best = std::max(best, f);
    }
  }
  return best - m.trace().real() / d;
}

HierarchyReport hierarchy_report(const ComplexMatrix& m, const DensityMatrix& rho,
                                 const MeasureOptions& opts,
                                 const IoSearchOptions& io_opts, double slack) {
  if (!is_nontrivial(m))
    throw ValidationError("hierarchy_report: observable is trivial (N_M = 0)");
  // The chain compares coherence relative to the observable's preferred basis,
  // where the displaced observable has a vanishing diagonal; express both M
  // and rho in that basis first (a no-op when diag(M') is already zero).
  const DisplacedObservable disp = displace_observable(m);
  const ComplexMatrix u = zero_diagonal_basis(disp).basis.unitary;
  const ComplexMatrix m_rot = hermitize(u * m * u.adjoint());
  const DensityMatrix rho_rot(hermitize(u * rho.mat() * u.adjoint()));
  HierarchyReport rep;
  rep.c_io_lower = io_lower_bound(m_rot, rho_rot, io_opts);
  rep.c_mio = c_mio(m_rot, rho_rot, opts).value;
  const double nm = normalization_nm(m);
  rep.nm_cr = nm * robustness(rho_rot, opts.solve).value;
  rep.nm_cl1 = nm * l1_norm(rho_rot.mat());

  auto check = [&](const char* pair, double lhs, double rhs) {
    if (lhs > rhs + slack) rep.violations.push_back({pair, lhs - rhs});
  };
  check("c_io_lower <= c_mio", rep.c_io_lower, rep.c_mio);
  check("c_mio <= N_M*C_R", rep.c_mio, rep.nm_cr);
  check("N_M*C_R <= N_M*C_l1", rep.nm_cr, rep.nm_cl1);
  return rep;
}

MonotonicityAudit strong_monotonicity_audit(const ComplexMatrix& m,
                                            const DensityMatrix& rho,
                                            const KrausSet& instrument,
                                            const MeasureOptions& opts,
                                            double slack) {
  instrument.validate();
  MonotonicityAudit audit;
  audit.lhs = c_mio(m, rho, opts).value;
  for (const auto& k : instrument.operators) {
    const ComplexMatrix post = k * rho.mat() * k.adjoint();
    const double prob = post.trace().real();
    if (prob < 1e-12) continue;
    const DensityMatrix branch(hermitize(post / prob));
    audit.rhs += prob * c_mio(m, branch, opts).value;
    ++audit.branches_used;
  }
  audit.violation = std::max(0.0, audit.rhs - audit.lhs);
  audit.ok = audit.rhs <= audit.lhs + slack;
  return audit;
}

}  // namespace qcm
