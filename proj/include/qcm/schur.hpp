#pragma once

#include <vector>

#include "qcm/sdp.hpp"

namespace qcm {

// T = W A W for a sparse Hermitian-implied constraint A and block-diagonal W.
void scale_constraint(const std::vector<ComplexMatrix>& w,
                      const LinearConstraint& c,
                      std::vector<ComplexMatrix>& out);

// Schur complement S_ij = Tr(A_i W A_j W). Symmetric positive definite for
// linearly independent constraints. The two variants compute identical
// results; the serial one is the reference used in tests.
Eigen::MatrixXd assemble_schur_serial(const std::vector<LinearConstraint>& cons,
                                      const std::vector<ComplexMatrix>& w);
Eigen::MatrixXd assemble_schur_parallel(const std::vector<LinearConstraint>& cons,
                                        const std::vector<ComplexMatrix>& w);

}  // namespace qcm
