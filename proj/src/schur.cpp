#include "qcm/schur.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qcm {

void scale_constraint(const std::vector<ComplexMatrix>& w,
                      const LinearConstraint& c,
                      std::vector<ComplexMatrix>& out) {
  if (out.size() != w.size()) {
    out.resize(w.size());
    for (size_t b = 0; b < w.size(); ++b)
      out[b] = ComplexMatrix::Zero(w[b].rows(), w[b].cols());
  } else {
    for (auto& m : out) m.setZero();
  }
  // W A W = sum over entries of rank-2 outer products of columns of W
  for (const SparseEntry& e : c.entries) {
    const ComplexMatrix& wb = w[e.block];
    ComplexMatrix& t = out[e.block];
    if (e.row == e.col) {
      t.noalias() += e.value.real() * (wb.col(e.row) * wb.col(e.row).adjoint());
    } else {
      t.noalias() += e.value * (wb.col(e.row) * wb.col(e.col).adjoint());
      t.noalias() += std::conj(e.value) * (wb.col(e.col) * wb.col(e.row).adjoint());
    }
  }
}

namespace {

inline void schur_column(const std::vector<LinearConstraint>& cons,
                         const std::vector<ComplexMatrix>& w, int j,
                         std::vector<ComplexMatrix>& scratch,
                         Eigen::MatrixXd& s) {
  scale_constraint(w, cons[j], scratch);
  for (int i = 0; i <= j; ++i) {
    const double v = sparse_inner(cons[i], scratch);
    s(i, j) = v;
    s(j, i) = v;
  }
}

}  // namespace

Eigen::MatrixXd assemble_schur_serial(const std::vector<LinearConstraint>& cons,
                                      const std::vector<ComplexMatrix>& w) {
  const int m = static_cast<int>(cons.size());
  Eigen::MatrixXd s(m, m);
  std::vector<ComplexMatrix> scratch;
  for (int j = 0; j < m; ++j) schur_column(cons, w, j, scratch, s);
  return s;
}

Eigen::MatrixXd assemble_schur_parallel(const std::vector<LinearConstraint>& cons,
                                        const std::vector<ComplexMatrix>& w) {
  const int m = static_cast<int>(cons.size());
  Eigen::MatrixXd s(m, m);
#ifdef _OPENMP
#pragma omp parallel
  {
    std::vector<ComplexMatrix> scratch;
#pragma omp for schedule(dynamic, 8)
    for (int j = 0; j < m; ++j) schur_column(cons, w, j, scratch, s);
  }
#else
  std::vector<ComplexMatrix> scratch;
  for (int j = 0; j < m; ++j) schur_column(cons, w, j, scratch, s);
#endif
  return s;
}

}  // namespace qcm
