#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcm/tolerances.hpp"

namespace qcm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Raised whenever an input fails a documented invariant. The message always
// names the measured residual.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

double max_abs(const ComplexMatrix& m);
bool all_finite(const ComplexMatrix& m);
void ensure_finite(const ComplexMatrix& m, const std::string& context);

// ||M - M^dag||_max
double hermiticity_residual(const ComplexMatrix& m);

// (M + M^dag)/2
ComplexMatrix hermitize(const ComplexMatrix& m);

// Validated quantum state: Hermitian, unit trace, PSD within tolerance.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m,
                         const Tolerances& tol = default_tolerances());
  const ComplexMatrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  ComplexMatrix mat_;
};

struct EigDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending
  ComplexMatrix eigenvectors;    // columns, orthonormal
};

// Full eigendecomposition of a Hermitian matrix. Throws ValidationError on
// non-square or non-Hermitian input.
EigDecomposition hermitian_eig(const ComplexMatrix& m,
                               const Tolerances& tol = default_tolerances());

// Kronecker product, subsystem A (left factor) slowest: (a,b) -> a*dim(B)+b.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

// Partial trace over the subsystems NOT listed in `keep`. `dims` are the
// subsystem dimensions, slowest first; `keep` holds sorted subsystem indices.
ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& dims,
                            const std::vector<int>& keep);

}  // namespace qcm
