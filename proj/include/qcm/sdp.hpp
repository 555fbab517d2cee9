#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qcm/linalg.hpp"

namespace qcm {

// One Hermitian-implied sparse entry of a constraint matrix. For row < col the
// entry stands for value*E_{rc} + conj(value)*E_{cr}; diagonal entries are real.
struct SparseEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  Complex value{0.0, 0.0};
};

// Tr(A_i X) = rhs with A_i given by Hermitian-implied sparse entries.
struct LinearConstraint {
  std::vector<SparseEntry> entries;
  double rhs = 0.0;
};

// max Tr(C X)  s.t.  Tr(A_i X) = b_i,  X >= 0 block-diagonal.
struct SdpProblem {
  std::vector<int> block_dims;
  std::vector<ComplexMatrix> objective;  // Hermitian, one per block
  std::vector<LinearConstraint> constraints;

  void validate() const;  // throws ValidationError on malformed data
  int total_dim() const;
};

enum class SolveStatus { optimal, infeasible_detected, max_iter, numerical_failure };

std::string to_string(SolveStatus s);

struct SolveOptions {
  double tol_gap = 1e-7;
  double tol_feas = 1e-8;
  int max_iter = 200;
  bool parallel = true;          // OpenMP Schur assembly (serial otherwise)
  std::ostream* trace = nullptr; // per-iteration CSV when set
};

struct SdpSolution {
  std::vector<ComplexMatrix> x;  // primal blocks
  std::vector<ComplexMatrix> z;  // dual slack blocks
  Eigen::VectorXd dual_y;        // indexed like the original constraint list
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;              // dual_value - primal_value
  struct Residuals {
    double primal_feas = 0.0;
    double dual_feas = 0.0;
    double psd_min_eig = 0.0;
  } residuals;
  SolveStatus status = SolveStatus::numerical_failure;
  int iterations = 0;
  std::vector<int> removed_constraints;  // dropped as linearly dependent
};

SdpSolution solve_sdp(const SdpProblem& problem, const SolveOptions& opts = {});

// From-scratch recomputation of all certificates, independent of the solver's
// internal bookkeeping.
struct CertificateReport {
  double primal_feas = 0.0;   // max_i |Tr(A_i x) - b_i|
  double dual_feas = 0.0;     // max(0, -lambda_min(sum y_i A_i - C))
  double psd_min_eig = 0.0;   // lambda_min of x
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
};

CertificateReport check_certificates(const SdpProblem& problem,
                                     const SdpSolution& solution);

// Helpers shared by builders and the solver.
double sparse_inner(const LinearConstraint& c, const std::vector<ComplexMatrix>& x);
void sparse_accumulate(const LinearConstraint& c, double factor,
                       std::vector<ComplexMatrix>& out);
std::vector<ComplexMatrix> zero_blocks(const std::vector<int>& dims);
// Assemble the full matrix (off-block entries exactly zero).
ComplexMatrix full_matrix(const std::vector<int>& dims,
                          const std::vector<ComplexMatrix>& blocks);

}  // namespace qcm
