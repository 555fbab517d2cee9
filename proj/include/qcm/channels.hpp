#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qcm/linalg.hpp"

namespace qcm {

// Kraus representation of a channel on a d-dimensional system.
struct KrausSet {
  std::vector<ComplexMatrix> operators;

  Eigen::Index dim() const {
    return operators.empty() ? 0 : operators.front().rows();
  }
  // ||sum K_i^dag K_i - 1||_max
  double completeness_residual() const;
  void validate(const Tolerances& tol = default_tolerances()) const;
};

// Choi form J(Phi) = sum_{ij} Phi(|i><j|) (x) |i><j|, output register A slowest.
// Tr_A(J) = 1_B for trace preservation.
struct ChoiChannel {
  ComplexMatrix choi;   // d^2 x d^2
  Eigen::Index input_dim = 0;
  bool is_cptp = false;
  bool is_mio = false;
  std::optional<bool> is_io;  // known only for explicitly incoherent Kraus sets
};

struct CptpDiagnostics {
  double psd_min_eig = 0.0;   // min eigenvalue of the Choi matrix
  double tp_residual = 0.0;   // ||Tr_A(J) - 1_B||_max
  bool is_cptp = false;
};

ChoiChannel kraus_to_choi(const KrausSet& kraus,
                          const Tolerances& tol = default_tolerances());

// Wraps a raw Choi matrix, running the CPTP/MIO audits.
ChoiChannel make_choi_channel(ComplexMatrix choi, Eigen::Index input_dim,
                              const Tolerances& tol = default_tolerances());

DensityMatrix apply_choi(const ChoiChannel& channel, const DensityMatrix& rho,
                         const Tolerances& tol = default_tolerances());
// Raw action without output validation; useful for audits.
ComplexMatrix apply_choi_raw(const ComplexMatrix& choi, const ComplexMatrix& rho);
ComplexMatrix apply_kraus(const KrausSet& kraus, const ComplexMatrix& rho);

CptpDiagnostics validate_cptp(const ComplexMatrix& choi, Eigen::Index input_dim,
                              const Tolerances& tol = default_tolerances());

// Phi(|i><i|) as a dense matrix, read off the Choi form.
ComplexMatrix choi_basis_image(const ComplexMatrix& choi, Eigen::Index input_dim,
                               Eigen::Index i);

// True iff every computational basis state maps to a diagonal state within tol
// (sufficient for the full MIO condition by convexity).
bool is_mio_choi(const ComplexMatrix& choi, Eigen::Index input_dim, double tol);

// Random incoherent instrument: k Kraus branches, each a masked permutation
// K_i = sum_j a_{ij} |pi_i(j)><j| with per-column branch amplitudes of unit
// norm, so completeness holds exactly. Deterministic under seed.
KrausSet random_io_instrument(int d, int k, std::uint64_t seed);

}  // namespace qcm
