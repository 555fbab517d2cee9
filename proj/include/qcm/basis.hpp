#pragma once

#include "qcm/linalg.hpp"

namespace qcm {

// M' = M - (Tr M / d) 1 together with the displacement and the normalization
// N_M = |lambda_min(M) - Tr M / d|.
struct DisplacedObservable {
  ComplexMatrix m_prime;
  double displacement = 0.0;      // Tr(M)/d
  double normalization_nm = 0.0;  // N_M
};

struct BasisChange {
  ComplexMatrix unitary;
};

struct SchurHornResult {
  BasisChange basis;     // U with diag(U M' U^dag) = 0
  int rotations = 0;     // plane rotations composed, <= d-1
  double diagonal_residual = 0.0;
};

DisplacedObservable displace_observable(
    const ComplexMatrix& m, const Tolerances& tol = default_tolerances());

// Constructive Schur-Horn: zeroes the diagonal of a traceless Hermitian matrix
// with at most d-1 plane rotations.
SchurHornResult zero_diagonal_basis(
    const DisplacedObservable& mp,
    const Tolerances& tol = default_tolerances());

// Basis mutually unbiased w.r.t. the eigenbasis: columns beta_i = V F(:,i)
// with F the discrete Fourier matrix. diag(U^dag M U) is flat for any M with
// that eigenbasis.
BasisChange fourier_mub_basis(const EigDecomposition& eig);

// True iff M is not (numerically) proportional to the identity.
bool is_nontrivial(const ComplexMatrix& m,
                   const Tolerances& tol = default_tolerances());

}  // namespace qcm
