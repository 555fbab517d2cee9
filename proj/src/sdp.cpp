#include "qcm/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "qcm/schur.hpp"

namespace qcm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double block_inner(const std::vector<ComplexMatrix>& a,
                   const std::vector<ComplexMatrix>& b) {
  double acc = 0.0;
  for (size_t k = 0; k < a.size(); ++k)
    acc += a[k].cwiseProduct(b[k].conjugate()).sum().real();
  return acc;
}

double block_frob(const std::vector<ComplexMatrix>& a) {
  double acc = 0.0;
  for (const auto& m : a) acc += m.squaredNorm();
  return std::sqrt(acc);
}

void block_hermitize(std::vector<ComplexMatrix>& a) {
  for (auto& m : a) m = 0.5 * (m + m.adjoint());
}

double block_min_eig(const std::vector<ComplexMatrix>& a) {
  double lo = kInf;
  for (const auto& m : a) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return lo;
}

// largest alpha with X + alpha*dX >= 0, via lambda_min(L^-1 dX L^-H)
double step_to_boundary(const std::vector<ComplexMatrix>& x,
                        const std::vector<ComplexMatrix>& dx) {
  double alpha = kInf;
  for (size_t k = 0; k < x.size(); ++k) {
    Eigen::LLT<ComplexMatrix> llt(x[k]);
    if (llt.info() != Eigen::Success) return 0.0;
    ComplexMatrix t = llt.matrixL().solve(dx[k]);
    ComplexMatrix s =
        llt.matrixL().solve(t.adjoint()).adjoint();  // L^-1 dX L^-H
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (s + s.adjoint()),
                                                    Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < 0.0) alpha = std::min(alpha, -1.0 / lo);
  }
  return alpha;
}

struct RankReduction {
  std::vector<int> kept;
  std::vector<int> removed;
};

// Gram-based rank audit: pivoted Cholesky on G_ij = <A_i, A_j>, removing rows
// below the threshold and verifying their right-hand sides stay consistent.
RankReduction reduce_constraints(const std::vector<LinearConstraint>& cons,
                                 double threshold) {
  const int m = static_cast<int>(cons.size());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  std::map<std::tuple<int, int, int>, std::vector<std::pair<int, Complex>>> slots;
  for (int i = 0; i < m; ++i)
    for (const SparseEntry& e : cons[i].entries)
      slots[{e.block, e.row, e.col}].push_back({i, e.value});
  for (const auto& [key, list] : slots) {
    const bool diag = std::get<1>(key) == std::get<2>(key);
    for (const auto& [i, vi] : list)
      for (const auto& [j, vj] : list) {
        gram(i, j) += diag ? vi.real() * vj.real()
                           : 2.0 * (vi * std::conj(vj)).real();
      }
  }

  const double scale = std::max(1.0, gram.diagonal().maxCoeff());
  Eigen::MatrixXd work = gram;
  std::vector<char> picked(m, 0);
  RankReduction out;
  for (int step = 0; step < m; ++step) {
    int piv = -1;
    double best = threshold * scale;
    for (int i = 0; i < m; ++i)
      if (!picked[i] && work(i, i) > best) {
        best = work(i, i);
        piv = i;
      }
    if (piv < 0) break;
    picked[piv] = 1;
    out.kept.push_back(piv);
    const double d = work(piv, piv);
    for (int i = 0; i < m; ++i) {
      if (picked[i]) continue;
      const double f = work(i, piv) / d;
      for (int j = 0; j < m; ++j)
        if (!picked[j]) work(i, j) -= f * work(piv, j);
      work(i, piv) = 0.0;
    }
  }
  std::sort(out.kept.begin(), out.kept.end());
  for (int i = 0; i < m; ++i)
    if (!picked[i]) out.removed.push_back(i);

  if (!out.removed.empty()) {
    // dependent rows must carry consistent right-hand sides
    const int r = static_cast<int>(out.kept.size());
    Eigen::MatrixXd gk(r, r);
    Eigen::VectorXd bk(r);
    for (int i = 0; i < r; ++i) {
      bk(i) = cons[out.kept[i]].rhs;
      for (int j = 0; j < r; ++j) gk(i, j) = gram(out.kept[i], out.kept[j]);
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gk);
    for (int rem : out.removed) {
      Eigen::VectorXd g(r);
      for (int i = 0; i < r; ++i) g(i) = gram(out.kept[i], rem);
      const Eigen::VectorXd coeff = ldlt.solve(g);
      const double mismatch = std::abs(cons[rem].rhs - coeff.dot(bk));
      if (mismatch > 1e-8 * (1.0 + std::abs(cons[rem].rhs))) {
        std::ostringstream err;
        err << "SdpProblem: constraint " << rem
            << " is linearly dependent with inconsistent rhs (mismatch "
            << mismatch << ")";
        throw ValidationError(err.str());
      }
    }
  }
  return out;
}

}  // namespace

void SdpProblem::validate() const {
  if (block_dims.empty()) throw ValidationError("SdpProblem: no blocks");
  if (objective.size() != block_dims.size())
    throw ValidationError("SdpProblem: objective block count mismatch");
  for (size_t k = 0; k < block_dims.size(); ++k) {
    if (block_dims[k] <= 0) throw ValidationError("SdpProblem: nonpositive block dim");
    if (objective[k].rows() != block_dims[k] || objective[k].cols() != block_dims[k])
      throw ValidationError("SdpProblem: objective block dim mismatch");
    ensure_finite(objective[k], "SdpProblem objective");
  }
  if (constraints.empty()) throw ValidationError("SdpProblem: no constraints");
  for (size_t i = 0; i < constraints.size(); ++i) {
    if (!std::isfinite(constraints[i].rhs))
      throw ValidationError("SdpProblem: non-finite rhs");
    for (const SparseEntry& e : constraints[i].entries) {
      if (e.block < 0 || e.block >= static_cast<int>(block_dims.size()))
        throw ValidationError("SdpProblem: entry block out of range");
      if (e.row < 0 || e.col < e.row || e.col >= block_dims[e.block])
        throw ValidationError("SdpProblem: entry indices must satisfy 0 <= row <= col < dim");
      if (e.row == e.col && std::abs(e.value.imag()) > 0.0)
        throw ValidationError("SdpProblem: diagonal entries must be real");
      if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag()))
        throw ValidationError("SdpProblem: non-finite constraint entry");
    }
  }
}

int SdpProblem::total_dim() const {
  int n = 0;
  for (int d : block_dims) n += d;
  return n;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible_detected: return "infeasible-detected";
    case SolveStatus::max_iter: return "max-iter";
    case SolveStatus::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

double sparse_inner(const LinearConstraint& c, const std::vector<ComplexMatrix>& x) {
  double acc = 0.0;
  for (const SparseEntry& e : c.entries) {
    const ComplexMatrix& xb = x[e.block];
    if (e.row == e.col)
      acc += e.value.real() * xb(e.row, e.col).real();
    else
      acc += 2.0 * (e.value * xb(e.col, e.row)).real();
  }
  return acc;
}

void sparse_accumulate(const LinearConstraint& c, double factor,
                       std::vector<ComplexMatrix>& out) {
  for (const SparseEntry& e : c.entries) {
    if (e.row == e.col) {
      out[e.block](e.row, e.col) += factor * e.value.real();
    } else {
      out[e.block](e.row, e.col) += factor * e.value;
      out[e.block](e.col, e.row) += factor * std::conj(e.value);
    }
  }
}

std::vector<ComplexMatrix> zero_blocks(const std::vector<int>& dims) {
  std::vector<ComplexMatrix> out;
  out.reserve(dims.size());
  for (int d : dims) out.push_back(ComplexMatrix::Zero(d, d));
  return out;
}

ComplexMatrix full_matrix(const std::vector<int>& dims,
                          const std::vector<ComplexMatrix>& blocks) {
  int n = 0;
  for (int d : dims) n += d;
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  int off = 0;
  for (size_t k = 0; k < dims.size(); ++k) {
    out.block(off, off, dims[k], dims[k]) = blocks[k];
    off += dims[k];
  }
  return out;
}

SdpSolution solve_sdp(const SdpProblem& problem, const SolveOptions& opts) {
  problem.validate();
  const Tolerances& tol = default_tolerances();
  const RankReduction reduction =
      reduce_constraints(problem.constraints, tol.constraint_rank);

  std::vector<LinearConstraint> cons;
  cons.reserve(reduction.kept.size());
  for (int i : reduction.kept) cons.push_back(problem.constraints[i]);
  const int m = static_cast<int>(cons.size());
  if (m == 0) throw ValidationError("SdpProblem: all constraints degenerate");
  const int n = problem.total_dim();
  const size_t nb = problem.block_dims.size();

  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) b(i) = cons[i].rhs;

  std::vector<ComplexMatrix> c_blocks(problem.objective);
  for (auto& cb : c_blocks) cb = 0.5 * (cb + cb.adjoint());
  const double norm_b = b.size() ? b.cwiseAbs().maxCoeff() : 0.0;
  const double norm_c = block_frob(c_blocks);

  // identity-scaled infeasible start
  const double xi_p = std::max(10.0, 2.0 * norm_b);
  const double xi_d = std::max(10.0, 2.0 * norm_c);
  std::vector<ComplexMatrix> x, z;
  for (size_t k = 0; k < nb; ++k) {
    x.push_back(xi_p * ComplexMatrix::Identity(problem.block_dims[k],
                                               problem.block_dims[k]));
    z.push_back(xi_d * ComplexMatrix::Identity(problem.block_dims[k],
                                               problem.block_dims[k]));
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  SdpSolution sol;
  sol.removed_constraints = reduction.removed;
  sol.status = SolveStatus::max_iter;

  if (opts.trace)
    *opts.trace << "iter,primal,dual,gap,alpha_p,alpha_d,mu,sigma\n";

  int stalls = 0;
  Eigen::VectorXd rp(m);
  Eigen::LLT<Eigen::MatrixXd> gram_llt;  // lazily built for feasibility restoration
  bool gram_ready = false;
  std::vector<ComplexMatrix> rd, w, zinv, wrdw, rc, dx, dz, dx_aff, dz_aff, scratch;

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    // residuals
    for (int i = 0; i < m; ++i) rp(i) = b(i) - sparse_inner(cons[i], x);

    // On degenerate problems the step truncation leaves a small primal
    // residual floor; once the iterate is nearly feasible, shift X along the
    // constraint normals (Gram system) to restore exact feasibility. The
    // shift is O(residual) and cannot disturb the gap materially.
    const double rp_rel = rp.norm() / (1.0 + b.norm());
    if (rp_rel > opts.tol_feas && rp_rel <= 1e-7) {
      if (!gram_ready) {
        std::vector<ComplexMatrix> eye = zero_blocks(problem.block_dims);
        for (ComplexMatrix& e : eye) e.setIdentity();
        gram_llt.compute(assemble_schur_serial(cons, eye));
        gram_ready = true;
      }
      if (gram_llt.info() == Eigen::Success) {
        const Eigen::VectorXd shift = gram_llt.solve(rp);
        for (int i = 0; i < m; ++i) sparse_accumulate(cons[i], shift(i), x);
        block_hermitize(x);
        for (int i = 0; i < m; ++i) rp(i) = b(i) - sparse_inner(cons[i], x);
      }
    }

    rd = zero_blocks(problem.block_dims);
    for (int i = 0; i < m; ++i) sparse_accumulate(cons[i], y(i), rd);
    for (size_t k = 0; k < nb; ++k) rd[k] -= c_blocks[k] + z[k];

    const double primal_obj = block_inner(c_blocks, x);
    const double dual_obj = b.dot(y);
    const double primal_feas = rp.norm() / (1.0 + b.norm());
    const double dual_feas = block_frob(rd) / (1.0 + norm_c);
    const double gap = dual_obj - primal_obj;
    const double rel_gap = std::abs(gap) / (1.0 + std::abs(primal_obj));
    const double mu = block_inner(x, z) / n;

    sol.primal_value = primal_obj;
    sol.dual_value = dual_obj;
    sol.gap = gap;
    sol.residuals.primal_feas = primal_feas;
    sol.residuals.dual_feas = dual_feas;

    if (primal_feas <= opts.tol_feas && dual_feas <= opts.tol_feas &&
        rel_gap <= opts.tol_gap) {
      sol.status = SolveStatus::optimal;
      break;
    }
    if (!std::isfinite(mu) || mu > 1e12 || y.cwiseAbs().maxCoeff() > 1e12) {
      sol.status = SolveStatus::infeasible_detected;
      break;
    }

    // Nesterov-Todd scaling point: W Z W = X
    w.assign(nb, ComplexMatrix());
    zinv.assign(nb, ComplexMatrix());
    bool scaling_ok = true;
    for (size_t k = 0; k < nb; ++k) {
      // Near a degenerate optimum the blocks become numerically singular;
      // floor the eigenvalues so the scaling stays usable instead of aborting.
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> ex(x[k]);
      if (ex.info() != Eigen::Success) {
        scaling_ok = false;
        break;
      }
      const double x_floor =
          std::max(1e-14 * ex.eigenvalues().cwiseAbs().maxCoeff(), 1e-100);
      const Eigen::VectorXd xev = ex.eigenvalues().cwiseMax(x_floor);
      const ComplexMatrix xh = ex.eigenvectors() * xev.cwiseSqrt().asDiagonal() *
                               ex.eigenvectors().adjoint();
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> eg(xh * z[k] * xh);
      if (eg.info() != Eigen::Success) {
        scaling_ok = false;
        break;
      }
      const double g_floor =
          std::max(1e-14 * eg.eigenvalues().cwiseAbs().maxCoeff(), 1e-100);
      const Eigen::VectorXd gev = eg.eigenvalues().cwiseMax(g_floor);
      const ComplexMatrix gih = eg.eigenvectors() *
                                gev.cwiseSqrt().cwiseInverse().asDiagonal() *
                                eg.eigenvectors().adjoint();
      w[k] = xh * gih * xh;
      w[k] = 0.5 * (w[k] + w[k].adjoint());
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> ez(z[k]);
      if (ez.info() != Eigen::Success) {
        scaling_ok = false;
        break;
      }
      const double z_floor =
          std::max(1e-14 * ez.eigenvalues().cwiseAbs().maxCoeff(), 1e-100);
      const Eigen::VectorXd zev = ez.eigenvalues().cwiseMax(z_floor);
      zinv[k] = ez.eigenvectors() * zev.cwiseInverse().asDiagonal() *
                ez.eigenvectors().adjoint();
      zinv[k] = 0.5 * (zinv[k] + zinv[k].adjoint());
    }
    if (!scaling_ok) {
      sol.status = SolveStatus::numerical_failure;
      break;
    }

    Eigen::MatrixXd schur = opts.parallel ? assemble_schur_parallel(cons, w)
                                          : assemble_schur_serial(cons, w);
    Eigen::LLT<Eigen::MatrixXd> llt;
    double reg = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      llt.compute(schur + reg * Eigen::MatrixXd::Identity(m, m));
      if (llt.info() == Eigen::Success) break;
      reg = (reg == 0.0) ? 1e-13 * std::max(1.0, schur.trace() / m) : reg * 100.0;
    }
    if (llt.info() != Eigen::Success) {
      sol.status = SolveStatus::numerical_failure;
      break;
    }

    wrdw.assign(nb, ComplexMatrix());
    for (size_t k = 0; k < nb; ++k) wrdw[k] = w[k] * rd[k] * w[k];

    auto solve_direction = [&](const std::vector<ComplexMatrix>& rc_in,
                               Eigen::VectorXd& dy_out,
                               std::vector<ComplexMatrix>& dz_out,
                               std::vector<ComplexMatrix>& dx_out) {
      // with rd = sum_i y_i A_i - C - Z the Newton equations read
      //   dZ = sum_i dy_i A_i + rd,   dX + W dZ W = rc,   Tr(A_i dX) = rp_i
      // so S dy = Tr(A_i (rc - W rd W)) - rp_i.
      std::vector<ComplexMatrix> rhs_mat(nb);
      for (size_t k = 0; k < nb; ++k) rhs_mat[k] = rc_in[k] - wrdw[k];
      Eigen::VectorXd h(m);
      for (int i = 0; i < m; ++i)
        h(i) = sparse_inner(cons[i], rhs_mat) - rp(i);
      dy_out = llt.solve(h);
      dz_out = zero_blocks(problem.block_dims);
      for (int i = 0; i < m; ++i) sparse_accumulate(cons[i], dy_out(i), dz_out);
      for (size_t k = 0; k < nb; ++k) dz_out[k] += rd[k];
      dx_out.assign(nb, ComplexMatrix());
      for (size_t k = 0; k < nb; ++k) {
        dx_out[k] = rc_in[k] - w[k] * dz_out[k] * w[k];
        dx_out[k] = 0.5 * (dx_out[k] + dx_out[k].adjoint());
      }
    };

    // predictor (affine scaling)
    rc.assign(nb, ComplexMatrix());
    for (size_t k = 0; k < nb; ++k) rc[k] = -x[k];
    Eigen::VectorXd dy_aff;
    solve_direction(rc, dy_aff, dz_aff, dx_aff);
    const double ap_aff = std::min(1.0, step_to_boundary(x, dx_aff));
    const double ad_aff = std::min(1.0, step_to_boundary(z, dz_aff));
    double mu_aff = 0.0;
    for (size_t k = 0; k < nb; ++k)
      mu_aff += ((x[k] + ap_aff * dx_aff[k])
                     .cwiseProduct((z[k] + ad_aff * dz_aff[k]).conjugate()))
                    .sum()
                    .real();
    mu_aff = std::max(0.0, mu_aff / n);
    const double sigma =
        std::clamp(std::pow(mu_aff / std::max(mu, 1e-300), 3.0), 1e-8, 1.0);

    // corrector with the Mehrotra second-order term, formed in the scaled
    // space: with W = R R^H and lambda = R^H Z R (= R^-1 X R^-H) the scaled
    // system is lambda o (Dx + Dz) = sigma*mu*I - lambda^2 - H(Dx_aff Dz_aff),
    // a Lyapunov solve in lambda's eigenbasis; then rc = R (Dx+Dz) R^H.
    bool corrector_ok = true;
    for (size_t k = 0; k < nb; ++k) {
      Eigen::LLT<ComplexMatrix> lw(w[k]);
      if (lw.info() != Eigen::Success) {
        corrector_ok = false;
        break;
      }
      const ComplexMatrix r_fac = lw.matrixL();
      ComplexMatrix lambda = r_fac.adjoint() * z[k] * r_fac;
      lambda = 0.5 * (lambda + lambda.adjoint());
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> el(lambda);
      if (el.info() != Eigen::Success || el.eigenvalues().minCoeff() <= 0.0) {
        corrector_ok = false;
        break;
      }
      const ComplexMatrix dx_s = r_fac.triangularView<Eigen::Lower>().solve(
          ComplexMatrix(r_fac.triangularView<Eigen::Lower>()
                            .solve(dx_aff[k].adjoint())
                            .adjoint()));
      const ComplexMatrix dz_s = r_fac.adjoint() * dz_aff[k] * r_fac;
      const ComplexMatrix cross = dx_s * dz_s;
      ComplexMatrix g = sigma * mu *
                            ComplexMatrix::Identity(lambda.rows(), lambda.rows()) -
                        0.5 * (cross + cross.adjoint());
      ComplexMatrix gh = el.eigenvectors().adjoint() * g * el.eigenvectors();
      const Eigen::VectorXd& lam = el.eigenvalues();
      for (Eigen::Index i = 0; i < lam.size(); ++i) {
        for (Eigen::Index j = 0; j < lam.size(); ++j)
          gh(i, j) = 2.0 * gh(i, j) / (lam(i) + lam(j));
        gh(i, i) -= lam(i);  // the -lambda^2 term, already diagonal here
      }
      const ComplexMatrix u_dir =
          el.eigenvectors() * gh * el.eigenvectors().adjoint();
      rc[k] = r_fac * u_dir * r_fac.adjoint();
      rc[k] = 0.5 * (rc[k] + rc[k].adjoint());
    }
    if (!corrector_ok) {
      // fall back to the first-order centered direction
      for (size_t k = 0; k < nb; ++k)
        rc[k] = sigma * mu * zinv[k] - x[k];
    }
    Eigen::VectorXd dy;
    solve_direction(rc, dy, dz, dx);
    const double tau = 0.98;
    const double ap = std::min(1.0, tau * step_to_boundary(x, dx));
    const double ad = std::min(1.0, tau * step_to_boundary(z, dz));

    if (opts.trace)
      *opts.trace << iter << ',' << primal_obj << ',' << dual_obj << ',' << gap
                  << ',' << ap << ',' << ad << ',' << mu << ',' << sigma << '\n';

    for (size_t k = 0; k < nb; ++k) {
      x[k] += ap * dx[k];
      z[k] += ad * dz[k];
    }
    block_hermitize(x);
    block_hermitize(z);
    y += ad * dy;

    if (ap < 1e-8 && ad < 1e-8) {
      if (++stalls >= 3) {
        sol.status = SolveStatus::numerical_failure;
        break;
      }
    } else {
      stalls = 0;
    }
  }

  sol.iterations = iter;
  sol.x = x;
  sol.z = z;
  sol.residuals.psd_min_eig = block_min_eig(x);
  // report dual variables in the original indexing; dropped rows carry zero
  sol.dual_y = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(problem.constraints.size()));
  for (int i = 0; i < m; ++i) sol.dual_y(reduction.kept[i]) = y(i);
  return sol;
}

CertificateReport check_certificates(const SdpProblem& problem,
                                     const SdpSolution& solution) {
  CertificateReport rep;
  double pf = 0.0;
  for (const auto& c : problem.constraints)
    pf = std::max(pf, std::abs(sparse_inner(c, solution.x) - c.rhs));
  rep.primal_feas = pf;

  std::vector<ComplexMatrix> slack = zero_blocks(problem.block_dims);
  for (size_t i = 0; i < problem.constraints.size(); ++i)
    sparse_accumulate(problem.constraints[i], solution.dual_y(i), slack);
  for (size_t k = 0; k < slack.size(); ++k) slack[k] -= problem.objective[k];
  block_hermitize(slack);
  rep.dual_feas = std::max(0.0, -block_min_eig(slack));
  rep.psd_min_eig = block_min_eig(solution.x);

  rep.primal_value = block_inner(problem.objective, solution.x);
  rep.dual_value = 0.0;
  for (size_t i = 0; i < problem.constraints.size(); ++i)
    rep.dual_value += solution.dual_y(i) * problem.constraints[i].rhs;
  rep.gap = rep.dual_value - rep.primal_value;
  return rep;
}

}  // namespace qcm
