#include "qcm/linalg.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace qcm {

double max_abs(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        return false;
  return true;
}

void ensure_finite(const ComplexMatrix& m, const std::string& context) {
  if (!all_finite(m))
    throw ValidationError(context + ": non-finite entry (NaN/Inf) rejected");
}

double hermiticity_residual(const ComplexMatrix& m) {
  return max_abs(m - m.adjoint());
}

ComplexMatrix hermitize(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

DensityMatrix::DensityMatrix(ComplexMatrix m, const Tolerances& tol)
    : mat_(std::move(m)) {
  std::ostringstream err;
  if (mat_.rows() != mat_.cols()) {
    err << "DensityMatrix: non-square " << mat_.rows() << "x" << mat_.cols();
    throw ValidationError(err.str());
  }
  ensure_finite(mat_, "DensityMatrix");
  const double herm = hermiticity_residual(mat_);
  if (herm > tol.hermiticity) {
    err << "DensityMatrix: hermiticity residual " << herm << " > "
        << tol.hermiticity;
    throw ValidationError(err.str());
  }
  const double tr = std::abs(mat_.trace() - Complex(1.0, 0.0));
  if (tr > tol.unit_trace) {
    err << "DensityMatrix: trace residual " << tr << " > " << tol.unit_trace;
    throw ValidationError(err.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(mat_),
                                                  Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol.psd) {
    err << "DensityMatrix: minimum eigenvalue " << min_eig << " < " << -tol.psd;
    throw ValidationError(err.str());
  }
}

EigDecomposition hermitian_eig(const ComplexMatrix& m, const Tolerances& tol) {
  std::ostringstream err;
  if (m.rows() != m.cols()) {
    err << "hermitian_eig: non-square " << m.rows() << "x" << m.cols();
    throw ValidationError(err.str());
  }
  ensure_finite(m, "hermitian_eig");
  const double herm = hermiticity_residual(m);
  if (herm > tol.hermiticity) {
    err << "hermitian_eig: hermiticity residual " << herm << " > "
        << tol.hermiticity;
    throw ValidationError(err.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(m));
  if (es.info() != Eigen::Success)
    throw ValidationError("hermitian_eig: eigensolver did not converge");
  return EigDecomposition{es.eigenvalues(), es.eigenvectors()};
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace {
// Decompose flat index into subsystem digits, slowest first.
void decompose(Eigen::Index idx, const std::vector<int>& dims,
               std::vector<int>& digits) {
  for (int s = static_cast<int>(dims.size()) - 1; s >= 0; --s) {
    digits[s] = static_cast<int>(idx % dims[s]);
    idx /= dims[s];
  }
}
}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& dims,
                            const std::vector<int>& keep) {
  Eigen::Index total = 1;
  for (int d : dims) {
    if (d <= 0) throw ValidationError("partial_trace: nonpositive subsystem dim");
    total *= d;
  }
  if (m.rows() != m.cols() || m.rows() != total) {
    std::ostringstream err;
    err << "partial_trace: matrix dim " << m.rows()
        << " inconsistent with product of subsystem dims " << total;
    throw ValidationError(err.str());
  }
  std::vector<char> kept(dims.size(), 0);
  for (int k : keep) {
    if (k < 0 || k >= static_cast<int>(dims.size()))
      throw ValidationError("partial_trace: keep index out of range");
    kept[k] = 1;
  }
  std::vector<int> keep_dims, trace_dims;
  for (size_t s = 0; s < dims.size(); ++s)
    (kept[s] ? keep_dims : trace_dims).push_back(dims[s]);
  const Eigen::Index dk =
      std::accumulate(keep_dims.begin(), keep_dims.end(), Eigen::Index(1),
                      std::multiplies<>());
  const Eigen::Index dt =
      std::accumulate(trace_dims.begin(), trace_dims.end(), Eigen::Index(1),
                      std::multiplies<>());

  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  std::vector<int> krow(keep_dims.size()), kcol(keep_dims.size()),
      tdig(trace_dims.size()), full(dims.size());
  for (Eigen::Index r = 0; r < dk; ++r) {
    decompose(r, keep_dims, krow);
    for (Eigen::Index c = 0; c < dk; ++c) {
      decompose(c, keep_dims, kcol);
      Complex acc(0.0, 0.0);
      for (Eigen::Index t = 0; t < dt; ++t) {
        decompose(t, trace_dims, tdig);
        // interleave kept/traced digits back into full multi-indices
        Eigen::Index row = 0, col = 0;
        size_t ki = 0, ti = 0;
        for (size_t s = 0; s < dims.size(); ++s) {
          int rd, cd;
          if (kept[s]) {
            rd = krow[ki];
            cd = kcol[ki];
            ++ki;
          } else {
            rd = cd = tdig[ti];
            ++ti;
          }
          row = row * dims[s] + rd;
          col = col * dims[s] + cd;
        }
        acc += m(row, col);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

}  // namespace qcm
