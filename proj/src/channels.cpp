#include "qcm/channels.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

namespace qcm {

double KrausSet::completeness_residual() const {
  if (operators.empty()) return 1.0;
  const Eigen::Index d = dim();
  ComplexMatrix acc = ComplexMatrix::Zero(d, d);
  for (const auto& k : operators) acc += k.adjoint() * k;
  return max_abs(acc - ComplexMatrix::Identity(d, d));
}

void KrausSet::validate(const Tolerances& tol) const {
  if (operators.empty()) throw ValidationError("KrausSet: empty operator list");
  const Eigen::Index d = dim();
  for (const auto& k : operators) {
    if (k.rows() != d || k.cols() != d)
      throw ValidationError("KrausSet: operators must be square with equal dims");
    ensure_finite(k, "KrausSet");
  }
  const double res = completeness_residual();
  if (res > tol.kraus_completeness) {
    std::ostringstream err;
    err << "KrausSet: completeness residual " << res << " > "
        << tol.kraus_completeness;
    throw ValidationError(err.str());
  }
}

ChoiChannel kraus_to_choi(const KrausSet& kraus, const Tolerances& tol) {
  kraus.validate(tol);
  const Eigen::Index d = kraus.dim();
  ComplexMatrix choi = ComplexMatrix::Zero(d * d, d * d);
  ComplexVector v(d * d);
  for (const auto& k : kraus.operators) {
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index l = 0; l < d; ++l) v(j * d + l) = k(j, l);
    choi.noalias() += v * v.adjoint();
  }
  return make_choi_channel(std::move(choi), d, tol);
}

ChoiChannel make_choi_channel(ComplexMatrix choi, Eigen::Index input_dim,
                              const Tolerances& tol) {
  if (choi.rows() != choi.cols() || choi.rows() != input_dim * input_dim)
    throw ValidationError("ChoiChannel: Choi matrix must be d^2 x d^2");
  ensure_finite(choi, "ChoiChannel");
  ChoiChannel ch;
  ch.choi = std::move(choi);
  ch.input_dim = input_dim;
  const CptpDiagnostics diag = validate_cptp(ch.choi, input_dim, tol);
  ch.is_cptp = diag.is_cptp;
  ch.is_mio = ch.is_cptp && is_mio_choi(ch.choi, input_dim, tol.mio);
  return ch;
}

ComplexMatrix apply_choi_raw(const ComplexMatrix& choi, const ComplexMatrix& rho) {
  const Eigen::Index d = rho.rows();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index ap = 0; ap < d; ++ap) {
      Complex acc(0.0, 0.0);
      for (Eigen::Index b = 0; b < d; ++b)
        for (Eigen::Index bp = 0; bp < d; ++bp)
          acc += choi(a * d + b, ap * d + bp) * rho(b, bp);
      out(a, ap) = acc;
    }
  return out;
}

DensityMatrix apply_choi(const ChoiChannel& channel, const DensityMatrix& rho,
                         const Tolerances& tol) {
  if (rho.dim() != channel.input_dim)
    throw ValidationError("apply_choi: state dimension does not match channel");
  return DensityMatrix(hermitize(apply_choi_raw(channel.choi, rho.mat())), tol);
}

ComplexMatrix apply_kraus(const KrausSet& kraus, const ComplexMatrix& rho) {
  const Eigen::Index d = rho.rows();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (const auto& k : kraus.operators) out.noalias() += k * rho * k.adjoint();
  return out;
}

CptpDiagnostics validate_cptp(const ComplexMatrix& choi, Eigen::Index input_dim,
                              const Tolerances& tol) {
  CptpDiagnostics diag;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(choi),
                                                  Eigen::EigenvaluesOnly);
  diag.psd_min_eig = es.eigenvalues().minCoeff();
  const int d = static_cast<int>(input_dim);
  const ComplexMatrix marginal = partial_trace(choi, {d, d}, {1});
  diag.tp_residual = max_abs(marginal - ComplexMatrix::Identity(d, d));
  diag.is_cptp =
      diag.psd_min_eig >= -tol.choi_psd && diag.tp_residual <= tol.choi_tp;
  return diag;
}

ComplexMatrix choi_basis_image(const ComplexMatrix& choi, Eigen::Index input_dim,
                               Eigen::Index i) {
  const Eigen::Index d = input_dim;
  ComplexMatrix out(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index ap = 0; ap < d; ++ap)
      out(a, ap) = choi(a * d + i, ap * d + i);
  return out;
}

bool is_mio_choi(const ComplexMatrix& choi, Eigen::Index input_dim, double tol) {
  for (Eigen::Index i = 0; i < input_dim; ++i) {
    ComplexMatrix img = choi_basis_image(choi, input_dim, i);
    img.diagonal().setZero();
    if (max_abs(img) > tol) return false;
  }
  return true;
}

KrausSet random_io_instrument(int d, int k, std::uint64_t seed) {
  if (d < 1 || k < 1)
    throw ValidationError("random_io_instrument: need d >= 1 and k >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // one permutation per branch keeps the branch columns orthogonal, which is
  // what makes the completeness relation exact
  std::vector<std::vector<int>> perm(k, std::vector<int>(d));
  for (int i = 0; i < k; ++i) {
    std::iota(perm[i].begin(), perm[i].end(), 0);
    std::shuffle(perm[i].begin(), perm[i].end(), rng);
  }
  // complex amplitudes per (branch, column), normalized per column
  std::vector<std::vector<Complex>> amp(k, std::vector<Complex>(d));
  for (int j = 0; j < d; ++j) {
    double norm2 = 0.0;
    for (int i = 0; i < k; ++i) {
      amp[i][j] = Complex(gauss(rng), gauss(rng));
      norm2 += std::norm(amp[i][j]);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (int i = 0; i < k; ++i) amp[i][j] *= inv;
  }
  KrausSet out;
  out.operators.reserve(k);
  for (int i = 0; i < k; ++i) {
    ComplexMatrix op = ComplexMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j) op(perm[i][j], j) = amp[i][j];
    out.operators.push_back(std::move(op));
  }
  return out;
}

}  // namespace qcm
