#pragma once

// Dense complex linear algebra kernel: Hermitian eigendecomposition, unitary
// exponentials, Kronecker products, coin-space partial trace / partial
// transpose, and DFT matrices.  Eigen supplies the storage and solvers; this
// header fixes the conventions and tolerances used by the rest of the
// library.
//
// Tensor-ordering convention (used everywhere): coin (x) walker, with the
// coin index outermost.  A joint vector stores amplitudes as psi[c*d + n]
// for coin c in {0,1} and Fock index n in [0, d).

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "pswalk/errors.hpp"

namespace pswalk {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Numerical tolerances.  Double precision at the library's worst case
// (290x290 for d = 145) leaves comfortable headroom for these.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;

// Largest elementwise deviation from Hermitian symmetry.
inline double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

// Largest elementwise deviation of U†U from the identity.
inline double unitarity_defect(const ComplexMatrix& u) {
  ComplexMatrix g = u.adjoint() * u;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

inline bool is_unitary(const ComplexMatrix& u, double tol = kUnitaryTol) {
  return u.rows() == u.cols() && unitarity_defect(u) <= tol;
}

// Eigendecomposition of a Hermitian matrix: M = V diag(lambda) V†.
struct Spectrum {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // orthonormal columns
};

inline Spectrum hermitian_eig(const ComplexMatrix& m) {
  if (!is_hermitian(m)) {
    throw NotHermitian("hermitian_eig: input is not Hermitian within 1e-12");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("hermitian_eig: eigensolver did not converge");
  }
  return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

// exp(i * scale * m) for Hermitian m, computed through the spectrum.  The
// result is unitary to within kUnitaryTol.
inline ComplexMatrix unitary_exp(const ComplexMatrix& m, double scale) {
  const Spectrum s = hermitian_eig(m);
  const Eigen::Index n = m.rows();
  ComplexVector phases(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    phases[k] = std::polar(1.0, scale * s.eigenvalues[k]);
  }
  return s.eigenvectors * phases.asDiagonal() * s.eigenvectors.adjoint();
}

// Kronecker product with a's indices outermost (coin (x) walker ordering).
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

// Trace over the coin factor of a 2d x 2d joint density matrix, leaving the
// d x d walker state.
inline ComplexMatrix partial_trace_coin(const ComplexMatrix& rho, int d) {
  if (rho.rows() != 2 * d || rho.cols() != 2 * d) {
    throw DimensionMismatch("partial_trace_coin: expected a 2d x 2d matrix");
  }
  return rho.block(0, 0, d, d) + rho.block(d, d, d, d);
}

// Partial transpose over the coin factor.  In the 2x2 block picture
// [[A, B], [C, D]] the coin transpose swaps the off-diagonal blocks:
// [[A, C], [B, D]].  Applying it twice returns the input exactly.
inline ComplexMatrix partial_transpose_coin(const ComplexMatrix& rho, int d) {
  if (rho.rows() != 2 * d || rho.cols() != 2 * d) {
    throw DimensionMismatch(
        "partial_transpose_coin: expected a 2d x 2d matrix");
  }
  ComplexMatrix out(2 * d, 2 * d);
  out.block(0, 0, d, d) = rho.block(0, 0, d, d);
  out.block(0, d, d, d) = rho.block(d, 0, d, d);
  out.block(d, 0, d, d) = rho.block(0, d, d, d);
  out.block(d, d, d, d) = rho.block(d, d, d, d);
  return out;
}

// DFT matrix F[m][n] = exp(i 2 pi m n / d) / sqrt(d).  Its columns are the
// phase states: |phi_m> = F.col(m) in the Fock basis, and
// exp(i (2pi/d) n_hat) maps |phi_m> to |phi_{m+1}| cyclically.
inline ComplexMatrix dft_matrix(int d) {
  ComplexMatrix f(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      // Reduce m*n modulo d before forming the angle so large indices do not
      // lose precision in the phase.
      const long long mn = static_cast<long long>(m) * n % d;
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(mn) /
                           static_cast<double>(d);
      f(n, m) = std::polar(norm, angle);
    }
  }
  return f;
}

}  // namespace pswalk
