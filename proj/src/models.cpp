#include "qcm/models.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace qcm {

namespace {

constexpr int kMaxSites = 12;  // 4096-dim operators; beyond that refuse

void check_sites(int n, int minimum) {
  if (n < minimum) {
    std::ostringstream err;
    err << "spin model: need at least " << minimum << " sites, got " << n;
    throw ValidationError(err.str());
  }
  if (n > kMaxSites) {
    std::ostringstream err;
    err << "spin model: " << n << " sites exceeds the memory budget ("
        << kMaxSites << " max)";
    throw ValidationError(err.str());
  }
}

// embed a single-site operator at `site` (slowest index = site 0)
ComplexMatrix embed_site(const ComplexMatrix& op, int site, int n) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int s = 0; s < n; ++s)
    out = tensor_product(out, s == site
                                  ? op
                                  : ComplexMatrix(ComplexMatrix::Identity(2, 2)));
  return out;
}

ComplexMatrix gaussian_matrix(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  return g;
}

}  // namespace

ComplexMatrix spin_x(int n_sites) {
  check_sites(n_sites, 1);
  ComplexMatrix sx(2, 2);
  sx << 0.0, 0.5, 0.5, 0.0;
  const Eigen::Index dim = Eigen::Index(1) << n_sites;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (int s = 0; s < n_sites; ++s) out += embed_site(sx, s, n_sites);
  return out;
}

ComplexMatrix superradiant_op(int n_sites) {
  check_sites(n_sites, 2);
  // ground state |g> = |0>, excited |e> = |1>
  ComplexMatrix raise(2, 2), lower(2, 2);
  raise << 0.0, 0.0, 1.0, 0.0;  // |e><g|
  lower << 0.0, 1.0, 0.0, 0.0;  // |g><e|
  const Eigen::Index dim = Eigen::Index(1) << n_sites;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i < n_sites; ++i)
    for (int j = 0; j < n_sites; ++j) {
      if (i == j) continue;
      out += embed_site(raise, i, n_sites) * embed_site(lower, j, n_sites);
    }
  return hermitize(out);
}

DensityMatrix w_mixture(double p) {
  if (p < 0.0 || p > 1.0) {
    std::ostringstream err;
    err << "w_mixture: p = " << p << " outside [0, 1], positivity not guaranteed";
    throw ValidationError(err.str());
  }
  ComplexVector w = ComplexVector::Zero(8);
  const double amp = 1.0 / std::sqrt(3.0);
  w(1) = amp;  // |001>
  w(2) = amp;  // |010>
  w(4) = amp;  // |100>
  ComplexMatrix rho = (1.0 + p / 7.0) / 8.0 * ComplexMatrix::Identity(8, 8) -
                      (p / 7.0) * (w * w.adjoint());
  return DensityMatrix(hermitize(rho));
}

DensityMatrix product_theta_state(double theta, int n_active, int n_padding) {
  check_sites(n_active + n_padding, 1);
  if (n_active < 1) throw ValidationError("product_theta_state: n_active >= 1");
  ComplexVector qubit(2);
  qubit << std::cos(theta), std::sin(theta);
  ComplexVector psi = ComplexVector::Ones(1);
  for (int s = 0; s < n_active; ++s) {
    ComplexVector next(psi.size() * 2);
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      next(2 * i) = psi(i) * qubit(0);
      next(2 * i + 1) = psi(i) * qubit(1);
    }
    psi = next;
  }
  for (int s = 0; s < n_padding; ++s) {
    ComplexVector next = ComplexVector::Zero(psi.size() * 2);
    for (Eigen::Index i = 0; i < psi.size(); ++i) next(2 * i) = psi(i);
    psi = next;
  }
  return DensityMatrix(psi * psi.adjoint());
}

DensityMatrix max_coherent_state(int d) {
  if (d < 2) throw ValidationError("max_coherent_state: d >= 2 required");
  ComplexVector plus = ComplexVector::Constant(d, 1.0 / std::sqrt(double(d)));
  return DensityMatrix(plus * plus.adjoint());
}

DensityMatrix random_state(int d, std::uint64_t seed) {
  if (d < 2) throw ValidationError("random_state: d >= 2 required");
  std::mt19937_64 rng(seed);
  const ComplexMatrix g = gaussian_matrix(d, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(hermitize(rho));
}

ComplexMatrix random_observable(int d, std::uint64_t seed, bool traceless) {
  if (d < 2) throw ValidationError("random_observable: d >= 2 required");
  std::mt19937_64 rng(seed);
  ComplexMatrix m = gaussian_matrix(d, rng);
  m = ComplexMatrix(0.5 * (m + m.adjoint()));
  if (traceless)
    m -= (m.trace() / double(d)) * ComplexMatrix::Identity(d, d);
  return m;
}

DensityMatrix random_diagonal_state(int d, std::uint64_t seed) {
  if (d < 2) throw ValidationError("random_diagonal_state: d >= 2 required");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.05, 1.0);
  Eigen::VectorXd p(d);
  for (int i = 0; i < d; ++i) p(i) = uni(rng);
  p /= p.sum();
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  rho.diagonal() = p.cast<Complex>();
  return DensityMatrix(rho);
}

DensityMatrix random_pure_state(int d, std::uint64_t seed) {
  if (d < 2) throw ValidationError("random_pure_state: d >= 2 required");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexVector psi(d);
  for (int i = 0; i < d; ++i) psi(i) = Complex(gauss(rng), gauss(rng));
  psi /= psi.norm();
  return DensityMatrix(psi * psi.adjoint());
}

}  // namespace qcm
