#pragma once

namespace qcm {

// Every numerical threshold used by validation and construction lives here,
// so tests have a single knob to turn.
struct Tolerances {
  double hermiticity = 1e-10;       // ||M - M^dag||_max admitted as Hermitian
  double unit_trace = 1e-10;        // |Tr(rho) - 1|
  double psd = 1e-10;               // admitted negative eigenvalue magnitude
  double eig_reconstruction = 1e-9; // relative, see hermitian_eig
  double gram = 1e-10;              // ||V^dag V - 1||_max
  double unitarity = 1e-10;
  double partial_trace = 1e-12;
  double kraus_completeness = 1e-10;
  double choi_psd = 1e-9;
  double choi_tp = 1e-9;
  double mio = 1e-6;                // off-diagonal leakage of Phi(|i><i|)
  double zero_diagonal = 1e-10;
  double negligible = 1e-12;        // treat-as-zero threshold
  double constraint_rank = 1e-10;   // rank-revealing threshold for SDP rows
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace qcm
