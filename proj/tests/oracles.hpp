#pragma once

// Independent brute-force oracles for the test suite.  Everything here is
// deliberately written against the obvious definitions (index summation,
// general eigensolvers, explicit recursions) rather than through the
// library's own code paths, so agreement is meaningful.

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Complex random_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  return Complex{gauss(rng), gauss(rng)};
}

inline Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = random_gaussian(rng);
  }
  return m;
}

inline Matrix random_hermitian(int n, std::mt19937_64& rng) {
  const Matrix a = random_matrix(n, n, rng);
  return 0.5 * (a + a.adjoint());
}

// Haar-like random unitary from the QR decomposition of a Gaussian matrix.
inline Matrix random_unitary(int n, std::mt19937_64& rng) {
  const Matrix a = random_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(n, n);
}

inline Vector random_state(int n, std::mt19937_64& rng) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = random_gaussian(rng);
  return v / v.norm();
}

inline Eigen::VectorXd random_distribution(int n, std::mt19937_64& rng) {
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p[i] = -std::log(1.0 - uniform01(rng));
  return p / p.sum();
}

// Partial trace over the coin by explicit index summation:
// out(n, n') = sum_c rho(c d + n, c d + n').
inline Matrix partial_trace_coin_brute(const Matrix& rho, int d) {
  Matrix out = Matrix::Zero(d, d);
  for (int c = 0; c < 2; ++c) {
    for (int n = 0; n < d; ++n) {
      for (int m = 0; m < d; ++m) out(n, m) += rho(c * d + n, c * d + m);
    }
  }
  return out;
}

// Partial transpose over the coin by explicit index permutation:
// out(i d + n, j d + n') = rho(j d + n, i d + n').
inline Matrix partial_transpose_coin_brute(const Matrix& rho, int d) {
  Matrix out(2 * d, 2 * d);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int n = 0; n < d; ++n) {
        for (int m = 0; m < d; ++m) {
          out(i * d + n, j * d + m) = rho(j * d + n, i * d + m);
        }
      }
    }
  }
  return out;
}

// Negativity via the general (non-self-adjoint) eigensolver on the
// brute-force partial transpose.
inline double negativity_brute(const Matrix& rho, int d) {
  const Matrix pt = partial_transpose_coin_brute(rho, d);
  Eigen::ComplexEigenSolver<Matrix> solver(pt);
  double neg = 0.0;
  for (int i = 0; i < pt.rows(); ++i) {
    const double lambda = solver.eigenvalues()[i].real();
    if (lambda < 0.0) neg -= lambda;
  }
  return neg;
}

// One step of the classical unbiased random walk on a d-cycle.
inline Eigen::VectorXd classical_step(const Eigen::VectorXd& p) {
  const int d = static_cast<int>(p.size());
  Eigen::VectorXd out(d);
  for (int m = 0; m < d; ++m) {
    out[m] = 0.5 * (p[(m + d - 1) % d] + p[(m + 1) % d]);
  }
  return out;
}

// Spectral norm through singular values.
inline double spectral_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()[0];
}

}  // namespace oracles
