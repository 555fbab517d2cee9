#include <doctest.h>

#include <cmath>

#include "qcm/basis.hpp"
#include "qcm/coherence.hpp"
#include "qcm/models.hpp"

using namespace qcm;

TEST_CASE("spin_x structure") {
  const ComplexMatrix s1 = spin_x(1);
  CHECK(s1(0, 1) == Complex(0.5, 0.0));
  CHECK(s1(1, 0) == Complex(0.5, 0.0));
  CHECK(s1(0, 0) == Complex(0.0, 0.0));

  for (int n : {1, 2, 3, 4, 6}) {
    const ComplexMatrix s = spin_x(n);
    CAPTURE(n);
    CHECK(s.rows() == (1 << n));
    CHECK(hermiticity_residual(s) == 0.0);
    CHECK(std::abs(s.trace()) == 0.0);
    CHECK(s.diagonal().cwiseAbs().maxCoeff() == 0.0);
    // extreme eigenvalues +-n/2 in spin-1/2 units, so N_M = n/2
    const EigDecomposition eig = hermitian_eig(s);
    CHECK(eig.eigenvalues(0) == doctest::Approx(-0.5 * n));
    CHECK(eig.eigenvalues(eig.eigenvalues.size() - 1) == doctest::Approx(0.5 * n));
    CHECK(normalization_nm(s) == doctest::Approx(0.5 * n));
  }
  CHECK_THROWS_AS(spin_x(0), ValidationError);
  CHECK_THROWS_AS(spin_x(13), ValidationError);
}

TEST_CASE("superradiant_op structure") {
  // two atoms: S = D+^1 D-^2 + D+^2 D-^1 swaps |ge> and |eg>
  const ComplexMatrix s2 = superradiant_op(2);
  ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
  expect(1, 2) = expect(2, 1) = 1.0;  // |01> <-> |10> with |e> = |1>
  CHECK(max_abs(s2 - expect) == 0.0);

  for (int n : {2, 3, 4, 5}) {
    const ComplexMatrix s = superradiant_op(n);
    CAPTURE(n);
    CHECK(hermiticity_residual(s) == 0.0);
    CHECK(std::abs(s.trace()) == 0.0);
    CHECK(s.diagonal().cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(superradiant_op(1), ValidationError);
}

TEST_CASE("w_mixture") {
  const DensityMatrix at0 = w_mixture(0.0);
  CHECK(max_abs(at0.mat() - ComplexMatrix(ComplexMatrix::Identity(8, 8) / 8.0)) <
        1e-15);

  for (double p : {0.25, 0.5, 1.0}) {
    const DensityMatrix rho = w_mixture(p);
    CAPTURE(p);
    CHECK(std::abs(rho.mat().trace().real() - 1.0) < 1e-14);
    // off-diagonal support sits exactly on the |w><w| pattern {1,2,4}
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        if (i == j) continue;
        const bool in_w = (i == 1 || i == 2 || i == 4) && (j == 1 || j == 2 || j == 4);
        if (in_w)
          CHECK(std::abs(rho.mat()(i, j) + p / 21.0) < 1e-14);
        else
          CHECK(std::abs(rho.mat()(i, j)) == 0.0);
      }
    CHECK(l1_norm(rho.mat()) == doctest::Approx(2.0 * p / 7.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(w_mixture(-0.1), ValidationError);
  CHECK_THROWS_AS(w_mixture(1.1), ValidationError);
}

TEST_CASE("product_theta_state") {
  const DensityMatrix ground = product_theta_state(0.0, 2, 1);
  CHECK(ground.dim() == 8);
  CHECK(std::abs(ground.mat()(0, 0).real() - 1.0) < 1e-14);

  const double theta = 0.7;
  const DensityMatrix rho = product_theta_state(theta, 3, 2);
  CHECK(rho.dim() == 32);
  // purity
  CHECK(std::abs((rho.mat() * rho.mat()).trace().real() - 1.0) < 1e-12);
  // padding qubits pinned to |0>: any index with a trailing bit set has no weight
  for (int i = 0; i < 32; ++i)
    if (i % 4 != 0) CHECK(std::abs(rho.mat()(i, i)) == 0.0);
  // amplitude of |000>|00> is cos^3
  CHECK(rho.mat()(0, 0).real() == doctest::Approx(std::pow(std::cos(theta), 6.0)));

  // l1 multiplicativity across the product structure
  const DensityMatrix one = product_theta_state(theta, 1, 0);
  const double l1_one = l1_norm(one.mat());
  const DensityMatrix three = product_theta_state(theta, 3, 0);
  CHECK(l1_norm(three.mat()) ==
        doctest::Approx(std::pow(1.0 + l1_one, 3.0) - 1.0).epsilon(1e-10));
}

TEST_CASE("l1 multiplicativity on random product pairs") {
  for (int t = 0; t < 5; ++t) {
    const DensityMatrix a = random_state(2, 400 + t);
    const DensityMatrix b = random_state(3, 500 + t);
    const ComplexMatrix prod = tensor_product(a.mat(), b.mat());
    const double expect =
        (1.0 + l1_norm(a.mat())) * (1.0 + l1_norm(b.mat())) - 1.0;
    CHECK(std::abs(l1_norm(prod) - expect) <= 1e-10);
  }
}

TEST_CASE("max_coherent_state") {
  for (int d : {2, 3, 5}) {
    const DensityMatrix rho = max_coherent_state(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        CHECK(std::abs(rho.mat()(i, j) - 1.0 / d) < 1e-15);
    CHECK(l1_norm(rho.mat()) == doctest::Approx(d - 1.0));
  }
}

TEST_CASE("random generators: validity and determinism") {
  const DensityMatrix s1 = random_state(4, 7);
  const DensityMatrix s2 = random_state(4, 7);
  CHECK(max_abs(s1.mat() - s2.mat()) == 0.0);
  CHECK(max_abs(s1.mat() - random_state(4, 8).mat()) > 0.0);

  const ComplexMatrix m = random_observable(4, 7, true);
  CHECK(std::abs(m.trace()) < 1e-14);
  CHECK(hermiticity_residual(m) < 1e-15);

  const DensityMatrix diag = random_diagonal_state(5, 3);
  for (int i = 0; i < 5; ++i) {
    CHECK(diag.mat()(i, i).real() > 0.0);
    for (int j = 0; j < 5; ++j)
      if (i != j) CHECK(std::abs(diag.mat()(i, j)) == 0.0);
  }

  const DensityMatrix pure = random_pure_state(4, 11);
  CHECK(std::abs((pure.mat() * pure.mat()).trace().real() - 1.0) < 1e-12);
}
