#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qcm/basis.hpp"
#include "qcm/channels.hpp"
#include "qcm/sdp.hpp"

namespace qcm {

enum class Formulation { faithful, reduced };

std::string to_string(Formulation f);

struct MeasureOptions {
  Formulation formulation = Formulation::reduced;
  SolveOptions solve;
};

// Result of maximizing Tr(M Phi(rho)) over MIO channels via SDP; value is the
// displaced measure raw_optimum - Tr(M)/d.
struct MioMeasureResult {
  double value = 0.0;
  double raw_optimum = 0.0;
  double gap = 0.0;
  double lower_bound = 0.0;  // displaced certified bounds (equal when optimal)
  double upper_bound = 0.0;
  ChoiChannel channel;       // the optimizer block, audited
  Formulation formulation = Formulation::reduced;
  SolveStatus status = SolveStatus::numerical_failure;
  int iterations = 0;
};

// Primal SDP on the flagged space H_A x H_B x H_C (dim 2 d^2): the channel
// block is tied to an auxiliary diagonal block so that every basis state maps
// to a diagonal state.
SdpProblem build_mio_primal_faithful(const ComplexMatrix& m,
                                     const DensityMatrix& rho);

// Same optimum on the d^2-dim Choi block alone: trace-preservation plus
// vanishing off-diagonals of every basis-state image.
SdpProblem build_mio_primal_reduced(const ComplexMatrix& m,
                                    const DensityMatrix& rho);

// The conjugate program: min Tr(Y_B) s.t. 1 x Y_B + sum_i Y_A^i x |i><i| >=
// M x rho^T with diag(Y_A^i) <= 0, cast so that the solver's dual variables
// parametrize (Y_B, Y_A^i). The optimum is read from dual_value.
SdpProblem build_mio_dual(const ComplexMatrix& m, const DensityMatrix& rho);

struct MioDualVars {
  ComplexMatrix y_b;
  std::vector<ComplexMatrix> y_a;
};
MioDualVars decode_mio_dual(int d, const Eigen::VectorXd& dual_y);

MioMeasureResult c_mio(const ComplexMatrix& m, const DensityMatrix& rho,
                       const MeasureOptions& opts = {});

struct RobustnessResult {
  double value = 0.0;
  ComplexMatrix witness;  // optimal W with Tr(rho W) = value
  double gap = 0.0;
  SolveStatus status = SolveStatus::numerical_failure;
  int iterations = 0;
};

// Robustness of coherence in witness form: max Tr(rho W) with W >= -1 and
// diag(W) <= 0.
RobustnessResult robustness(const DensityMatrix& rho,
                            const SolveOptions& opts = {});

double l1_norm(const ComplexMatrix& rho);
double normalization_nm(const ComplexMatrix& m);

struct IoSearchOptions {
  int restarts = 3;             // random phase restarts beyond the zero start
  std::uint64_t seed = 2024;
  int max_permutations = 2000;  // sampled when d! is too large to enumerate
};

// Explicit-feasible-point lower bound on the IO measure: best incoherent
// unitary (permutation x diagonal phases), phases by coordinate ascent.
double io_lower_bound(const ComplexMatrix& m, const DensityMatrix& rho,
                      const IoSearchOptions& opts = {});

struct HierarchyReport {
  double c_io_lower = 0.0;
  double c_mio = 0.0;
  double nm_cr = 0.0;
  double nm_cl1 = 0.0;
  std::vector<std::pair<std::string, double>> violations;  // (pair, magnitude)
  bool ok() const { return violations.empty(); }
};

HierarchyReport hierarchy_report(const ComplexMatrix& m, const DensityMatrix& rho,
                                 const MeasureOptions& opts = {},
                                 const IoSearchOptions& io_opts = {},
                                 double slack = 1e-6);

struct MonotonicityAudit {
  double lhs = 0.0;            // C(rho)
  double rhs = 0.0;            // sum p_i C(rho_i)
  double violation = 0.0;      // max(0, rhs - lhs)
  int branches_used = 0;
  bool ok = false;
};

MonotonicityAudit strong_monotonicity_audit(const ComplexMatrix& m,
                                            const DensityMatrix& rho,
                                            const KrausSet& instrument,
                                            const MeasureOptions& opts = {},
                                            double slack = 1e-6);

}  // namespace qcm
