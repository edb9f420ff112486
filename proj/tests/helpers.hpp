// helpers.hpp — shared fixtures for the unit suite: the headline parameter
// set, seeded random-matrix generators, and small independent oracles.

#pragma once

#include <qotto/cycle.hpp>
#include <qotto/spin_models.hpp>

#include <random>

namespace qotto::testing {

// Headline engine operating point used throughout the suite:
// h1 = 10, h2 = 0.2, T_H = 100, T_C = 0.001, tau1 = tau2 = 0.1, tau_bath = 0.2.
inline CycleParams reference_params() {
  CycleParams p;
  p.h1 = 10.0;
  p.h2 = 0.2;
  p.T_H = 100.0;
  p.T_C = 0.001;
  p.tau1 = 0.1;
  p.tau2 = 0.1;
  p.tau_bath = 0.2;
  p.tau_k = 0.0;
  p.dt_max = 1e-3;
  return p;
}

inline Matrix random_matrix(Eigen::Index n, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = Complex(nd(rng), nd(rng));
  return m;
}

inline HermitianOperator random_hermitian(Eigen::Index n, std::mt19937& rng) {
  const Matrix m = random_matrix(n, rng);
  return HermitianOperator((m + m.adjoint()) / 2.0);
}

inline Matrix random_unitary(Eigen::Index n, std::mt19937& rng) {
  return propagator(random_hermitian(n, rng), 1.0);
}

inline DensityOperator random_density(Eigen::Index n, std::mt19937& rng) {
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  RealVector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = ud(rng) + 1e-6;
  w /= w.sum();
  const Matrix u = random_unitary(n, rng);
  return DensityOperator(u * w.cast<Complex>().asDiagonal() * u.adjoint());
}

// Sorted eigenvalues of a density operator (for spectrum-preservation checks).
inline RealVector density_spectrum(const DensityOperator& rho) {
  return eigh(HermitianOperator(rho.matrix())).eigenvalues;
}

// All spins along +x: the uniform superposition over the z basis.
inline Vector all_plus_x_state(int L) {
  const Eigen::Index dim = Eigen::Index(1) << L;
  return Vector::Constant(dim, Complex(1.0 / std::sqrt(double(dim)), 0.0));
}

}  // namespace qotto::testing
