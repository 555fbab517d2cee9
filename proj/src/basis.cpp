#include "qcm/basis.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace qcm {

DisplacedObservable displace_observable(const ComplexMatrix& m,
                                        const Tolerances& tol) {
  const EigDecomposition eig = hermitian_eig(m, tol);  // also validates input
  const Eigen::Index d = m.rows();
  DisplacedObservable out;
  out.displacement = m.trace().real() / static_cast<double>(d);
  out.m_prime = hermitize(m) -
                out.displacement * ComplexMatrix::Identity(d, d);
  out.normalization_nm = std::abs(eig.eigenvalues(0) - out.displacement);
  return out;
}

SchurHornResult zero_diagonal_basis(const DisplacedObservable& mp,
                                    const Tolerances& tol) {
  const ComplexMatrix& m = mp.m_prime;
  const Eigen::Index d = m.rows();
  const double scale = 1.0 + max_abs(m);
  const double trace_res = std::abs(m.trace());
  if (trace_res > tol.hermiticity * static_cast<double>(d) * scale) {
    std::ostringstream err;
    err << "zero_diagonal_basis: trace residual " << trace_res
        << " exceeds tolerance; displace the observable first";
    throw ValidationError(err.str());
  }

  ComplexMatrix a = hermitize(m);
  ComplexMatrix u = ComplexMatrix::Identity(d, d);
  std::vector<char> active(d, 1);
  int rotations = 0;

  for (Eigen::Index iter = 0; iter + 1 < d; ++iter) {
    // pick the extreme diagonal entries among active indices
    Eigen::Index p = -1, q = -1;
    double hi = -1.0, lo = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!active[j]) continue;
      const double v = a(j, j).real();
      if (v > hi) { hi = v; p = j; }
      if (v < lo) { lo = v; q = j; }
    }
    const double zero_cut = tol.negligible * scale;
    if (p < 0 || hi <= zero_cut || lo >= -zero_cut) break;  // diagonal flat

    const double ap = a(p, p).real();
    const double aq = a(q, q).real();
    const Complex b = a(p, q);
    const double babs = std::abs(b);
    const double beta = babs > 0.0 ? std::arg(b) : 0.0;

    // a phase on index q makes the coupling real, then a real rotation zeroes
    // the (p,p) entry: ap cos^2 + aq sin^2 + |b| sin(2 theta) = 0
    const double half_sum = 0.5 * (ap + aq);
    const double half_diff = 0.5 * (ap - aq);
    const double r = std::hypot(half_diff, babs);
    const double delta = std::atan2(babs, half_diff);
    // new (p,p) entry is half_sum + r cos(2 theta - delta); pick the root
    const double theta =
        0.5 * (delta + std::acos(std::clamp(-half_sum / r, -1.0, 1.0)));

    const double c = std::cos(theta), s = std::sin(theta);
    const Complex phase = std::polar(1.0, beta);

    // conjugate A by the plane unitary G = [[c, s e^{i beta}], [-s, c e^{i beta}]]
    // restricted to span{p, q}; row updates apply G, column updates G^dag
    ComplexVector row_p = c * a.row(p).transpose() + s * phase * a.row(q).transpose();
    ComplexVector row_q = -s * a.row(p).transpose() + c * phase * a.row(q).transpose();
    a.row(p) = row_p.transpose();
    a.row(q) = row_q.transpose();
    ComplexVector col_p = c * a.col(p) + s * std::conj(phase) * a.col(q);
    ComplexVector col_q = -s * a.col(p) + c * std::conj(phase) * a.col(q);
    a.col(p) = col_p;
    a.col(q) = col_q;

    ComplexVector urow_p = c * u.row(p).transpose() + s * phase * u.row(q).transpose();
    ComplexVector urow_q = -s * u.row(p).transpose() + c * phase * u.row(q).transpose();
    u.row(p) = urow_p.transpose();
    u.row(q) = urow_q.transpose();

    a(p, p) = Complex(0.0, 0.0);  // zeroed exactly by the angle choice
    active[p] = 0;
    ++rotations;
  }

  SchurHornResult out;
  out.basis.unitary = u;
  out.rotations = rotations;
  double res = 0.0;
  const ComplexMatrix check = u * m * u.adjoint();
  for (Eigen::Index j = 0; j < d; ++j)
    res = std::max(res, std::abs(check(j, j)));
  out.diagonal_residual = res;
  return out;
}

BasisChange fourier_mub_basis(const EigDecomposition& eig) {
  const Eigen::Index d = eig.eigenvectors.rows();
  ComplexMatrix fourier(d, d);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k)
      fourier(j, k) = std::polar(
          inv_sqrt, 2.0 * std::numbers::pi * static_cast<double>(j * k) /
                        static_cast<double>(d));
  return BasisChange{eig.eigenvectors * fourier};
}

bool is_nontrivial(const ComplexMatrix& m, const Tolerances& tol) {
  const Eigen::Index d = m.rows();
  const Complex mean = m.trace() / static_cast<double>(d);
  return max_abs(m - mean * ComplexMatrix::Identity(d, d)) > tol.negligible;
}

}  // namespace qcm
