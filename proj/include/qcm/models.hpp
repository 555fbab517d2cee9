#pragma once

#include <cstdint>

#include "qcm/linalg.hpp"

namespace qcm {

// Collective spin-x observable sum_i sigma_x^(i)/2 on N qubits (spin-1/2
// units, so N_M = N/2). Site 1 is the slowest tensor index.
ComplexMatrix spin_x(int n_sites);

// Superradiant observable sum_{i != j} D_+^(i) D_-^(j) on N two-level atoms.
ComplexMatrix superradiant_op(int n_sites);

// rho(p) = (1 + p/7) 1/8 - (p/7)|w><w| with |w> = (|001>+|010>+|100>)/sqrt(3).
DensityMatrix w_mixture(double p);

// (cos(theta)|0> + sin(theta)|1>)^{x n_active} (x) |0>^{x n_padding}
DensityMatrix product_theta_state(double theta, int n_active, int n_padding);

// |+_d><+_d| with |+_d> = sum_i |i>/sqrt(d)
DensityMatrix max_coherent_state(int d);

// Hilbert-Schmidt random state: normalize G G^dag, G complex Gaussian.
DensityMatrix random_state(int d, std::uint64_t seed);

// GUE sample; displaced traceless when requested.
ComplexMatrix random_observable(int d, std::uint64_t seed, bool traceless = false);

// Random diagonal (incoherent) state.
DensityMatrix random_diagonal_state(int d, std::uint64_t seed);

// Haar-random pure state.
DensityMatrix random_pure_state(int d, std::uint64_t seed);

}  // namespace qcm
