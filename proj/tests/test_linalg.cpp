#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <pswalk/errors.hpp>
#include <pswalk/linalg.hpp>

#include "oracles.hpp"

namespace {

using pswalk::Complex;
using pswalk::ComplexMatrix;
using pswalk::ComplexVector;

constexpr Complex kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace

TEST_CASE("hermitian_eig diagonalizes the Pauli x matrix", "[linalg]") {
  const auto spec = pswalk::hermitian_eig(pauli_x());
  REQUIRE(spec.eigenvalues.size() == 2);
  CHECK(spec.eigenvalues[0] == Catch::Approx(-1.0).margin(1e-12));
  CHECK(spec.eigenvalues[1] == Catch::Approx(1.0).margin(1e-12));
  // Columns are unit eigenvectors.
  for (int k = 0; k < 2; ++k) {
    const ComplexVector v = spec.eigenvectors.col(k);
    const ComplexVector resid = pauli_x() * v - spec.eigenvalues[k] * v;
    CHECK(resid.norm() <= 1e-12);
    CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("hermitian_eig on the identity returns all ones", "[linalg]") {
  const ComplexMatrix id = ComplexMatrix::Identity(6, 6);
  const auto spec = pswalk::hermitian_eig(id);
  for (int k = 0; k < 6; ++k) {
    CHECK(spec.eigenvalues[k] == Catch::Approx(1.0).margin(1e-13));
  }
}

TEST_CASE("hermitian_eig reconstructs random Hermitian matrices", "[linalg]") {
  std::mt19937_64 rng(1001);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix h = oracles::random_hermitian(6, rng);
    const auto spec = pswalk::hermitian_eig(h);
    ComplexMatrix recon = ComplexMatrix::Zero(6, 6);
    for (int k = 0; k < 6; ++k) {
      recon += spec.eigenvalues[k] * spec.eigenvectors.col(k) *
               spec.eigenvectors.col(k).adjoint();
    }
    CHECK((recon - h).cwiseAbs().maxCoeff() <= 1e-10);
    // Eigenvalues come out sorted ascending.
    for (int k = 1; k < 6; ++k) {
      CHECK(spec.eigenvalues[k] >= spec.eigenvalues[k - 1]);
    }
  }
}

TEST_CASE("hermitian_eig rejects non-Hermitian input", "[linalg]") {
  std::mt19937_64 rng(1002);
  ComplexMatrix m = oracles::random_matrix(4, 4, rng);
  m(0, 1) += Complex{0.5, 0.5};  // make sure it is far from Hermitian
  REQUIRE_THROWS_AS(pswalk::hermitian_eig(m), pswalk::NotHermitian);
}

TEST_CASE("unitary_exp at zero scale is the identity", "[linalg]") {
  std::mt19937_64 rng(1003);
  const ComplexMatrix h = oracles::random_hermitian(5, rng);
  const ComplexMatrix u = pswalk::unitary_exp(h, 0.0);
  CHECK((u - ComplexMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("unitary_exp of (pi/2) sigma_x equals i sigma_x", "[linalg]") {
  // exp(i (pi/2) sigma_x) = cos(pi/2) I + i sin(pi/2) sigma_x = i sigma_x.
  const ComplexMatrix u = pswalk::unitary_exp(pauli_x(), kPi / 2.0);
  const ComplexMatrix expected = kI * pauli_x();
  CHECK((u - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("unitary_exp of a diagonal generator is the diagonal phase matrix",
          "[linalg]") {
  const int d = 7;
  const double theta = 0.3;
  ComplexMatrix number = ComplexMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) number(n, n) = static_cast<double>(n);
  const ComplexMatrix u = pswalk::unitary_exp(number, theta);
  for (int n = 0; n < d; ++n) {
    const Complex expected = std::exp(kI * (theta * n));
    CHECK(std::abs(u(n, n) - expected) <= 1e-12);
  }
  CHECK(pswalk::unitarity_defect(u) <= 1e-12);
}

TEST_CASE("unitary_exp produces unitary matrices for random generators",
          "[linalg]") {
  std::mt19937_64 rng(1004);
  const ComplexMatrix h = oracles::random_hermitian(40, rng);
  const ComplexMatrix u = pswalk::unitary_exp(h, 1.7);
  CHECK(pswalk::is_unitary(u));
  CHECK(pswalk::unitarity_defect(u) <= 1e-10);
  // Group property: exp(iHa) exp(iHb) = exp(iH(a+b)).
  const ComplexMatrix ua = pswalk::unitary_exp(h, 0.4);
  const ComplexMatrix ub = pswalk::unitary_exp(h, 1.3);
  CHECK((ua * ub - u).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("kron of identities is the identity", "[linalg]") {
  const ComplexMatrix out =
      pswalk::kron(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3));
  CHECK((out - ComplexMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kron places the first factor outermost", "[linalg]") {
  // sigma_z (x) diag(0..2) has +n in the top block and -n in the bottom.
  ComplexMatrix number = ComplexMatrix::Zero(3, 3);
  for (int n = 0; n < 3; ++n) number(n, n) = static_cast<double>(n);
  const ComplexMatrix out = pswalk::kron(pauli_z(), number);
  REQUIRE(out.rows() == 6);
  for (int n = 0; n < 3; ++n) {
    CHECK(out(n, n) == Complex{static_cast<double>(n), 0.0});
    CHECK(out(3 + n, 3 + n) == Complex{static_cast<double>(-n), 0.0});
  }
}

TEST_CASE("kron satisfies the mixed-product identity", "[linalg]") {
  std::mt19937_64 rng(1005);
  const ComplexMatrix a = oracles::random_matrix(2, 2, rng);
  const ComplexMatrix b = oracles::random_matrix(3, 3, rng);
  const ComplexMatrix c = oracles::random_matrix(2, 2, rng);
  const ComplexMatrix d = oracles::random_matrix(3, 3, rng);
  const ComplexMatrix lhs = pswalk::kron(a, b) * pswalk::kron(c, d);
  const ComplexMatrix rhs = pswalk::kron(a * c, b * d);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("kron is associative", "[linalg]") {
  std::mt19937_64 rng(1006);
  const ComplexMatrix a = oracles::random_matrix(2, 2, rng);
  const ComplexMatrix b = oracles::random_matrix(2, 2, rng);
  const ComplexMatrix c = oracles::random_matrix(3, 3, rng);
  const ComplexMatrix lhs = pswalk::kron(pswalk::kron(a, b), c);
  const ComplexMatrix rhs = pswalk::kron(a, pswalk::kron(b, c));
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("partial_trace_coin recovers the walker factor of a product state",
          "[linalg]") {
  std::mt19937_64 rng(1007);
  const int d = 5;
  const ComplexVector coin = oracles::random_state(2, rng);
  const ComplexVector walker = oracles::random_state(d, rng);
  ComplexVector joint(2 * d);
  joint.head(d) = coin[0] * walker;
  joint.tail(d) = coin[1] * walker;
  const ComplexMatrix rho = joint * joint.adjoint();
  const ComplexMatrix reduced = pswalk::partial_trace_coin(rho, d);
  const ComplexMatrix expected = walker * walker.adjoint();
  CHECK((reduced - expected).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(std::abs(reduced.trace().real() - 1.0) <= 1e-12);
}

TEST_CASE("partial_trace_coin of the maximally mixed state is maximally mixed",
          "[linalg]") {
  const int d = 6;
  const ComplexMatrix rho = ComplexMatrix::Identity(2 * d, 2 * d) / (2.0 * d);
  const ComplexMatrix reduced = pswalk::partial_trace_coin(rho, d);
  const ComplexMatrix expected = ComplexMatrix::Identity(d, d) / d;
  CHECK((reduced - expected).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("partial_trace_coin matches index summation on random densities",
          "[linalg]") {
  std::mt19937_64 rng(1008);
  const int d = 4;
  // Random mixed state: normalized sum of projectors.
  ComplexMatrix rho = ComplexMatrix::Zero(2 * d, 2 * d);
  for (int k = 0; k < 3; ++k) {
    const ComplexVector v = oracles::random_state(2 * d, rng);
    rho += v * v.adjoint();
  }
  rho /= rho.trace().real();
  const ComplexMatrix mine = pswalk::partial_trace_coin(rho, d);
  const ComplexMatrix brute = oracles::partial_trace_coin_brute(rho, d);
  CHECK((mine - brute).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("partial_trace_coin rejects mismatched dimensions", "[linalg]") {
  const ComplexMatrix rho = ComplexMatrix::Identity(6, 6) / 6.0;
  REQUIRE_THROWS_AS(pswalk::partial_trace_coin(rho, 4),
                    pswalk::DimensionMismatch);
}

TEST_CASE("partial_transpose_coin keeps product states positive", "[linalg]") {
  std::mt19937_64 rng(1009);
  const int d = 5;
  const ComplexVector coin = oracles::random_state(2, rng);
  const ComplexVector walker = oracles::random_state(d, rng);
  ComplexVector joint(2 * d);
  joint.head(d) = coin[0] * walker;
  joint.tail(d) = coin[1] * walker;
  const ComplexMatrix rho = joint * joint.adjoint();
  const ComplexMatrix pt = pswalk::partial_transpose_coin(rho, d);
  const auto spec = pswalk::hermitian_eig(pt);
  CHECK(spec.eigenvalues.minCoeff() >= -1e-12);
}

TEST_CASE("partial_transpose_coin of a Bell state has eigenvalue -1/2",
          "[linalg]") {
  const int d = 2;
  ComplexVector bell = ComplexVector::Zero(4);
  bell[0] = 1.0 / std::sqrt(2.0);  // |0>|0>
  bell[3] = 1.0 / std::sqrt(2.0);  // |1>|1>
  const ComplexMatrix rho = bell * bell.adjoint();
  const ComplexMatrix pt = pswalk::partial_transpose_coin(rho, d);
  const auto spec = pswalk::hermitian_eig(pt);
  CHECK(spec.eigenvalues.minCoeff() == Catch::Approx(-0.5).margin(1e-12));
}

TEST_CASE("partial_transpose_coin keeps separable mixtures positive",
          "[linalg]") {
  std::mt19937_64 rng(1010);
  const int d = 3;
  ComplexMatrix rho = ComplexMatrix::Zero(2 * d, 2 * d);
  for (int k = 0; k < 6; ++k) {
    const ComplexVector coin = oracles::random_state(2, rng);
    const ComplexVector walker = oracles::random_state(d, rng);
    ComplexVector joint(2 * d);
    joint.head(d) = coin[0] * walker;
    joint.tail(d) = coin[1] * walker;
    rho += oracles::uniform01(rng) * (joint * joint.adjoint());
  }
  rho /= rho.trace().real();
  const ComplexMatrix pt = pswalk::partial_transpose_coin(rho, d);
  const auto spec = pswalk::hermitian_eig(pt);
  CHECK(spec.eigenvalues.minCoeff() >= -1e-10);
}

TEST_CASE("partial_transpose_coin is an exact involution", "[linalg]") {
  std::mt19937_64 rng(1011);
  const int d = 4;
  const ComplexVector v = oracles::random_state(2 * d, rng);
  const ComplexMatrix rho = v * v.adjoint();
  const ComplexMatrix twice =
      pswalk::partial_transpose_coin(pswalk::partial_transpose_coin(rho, d), d);
  // The operation permutes entries, so applying it twice is bit-exact.
  CHECK((twice - rho).cwiseAbs().maxCoeff() == 0.0);
  // It also matches brute-force index permutation and preserves the trace.
  const ComplexMatrix mine = pswalk::partial_transpose_coin(rho, d);
  const ComplexMatrix brute = oracles::partial_transpose_coin_brute(rho, d);
  CHECK((mine - brute).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(mine.trace().real() - 1.0) <= 1e-14);
}

TEST_CASE("dft_matrix at d = 2 is the real Hadamard kernel", "[linalg]") {
  const ComplexMatrix f = pswalk::dft_matrix(2);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(f(0, 0) - Complex{s, 0.0}) <= 1e-15);
  CHECK(std::abs(f(0, 1) - Complex{s, 0.0}) <= 1e-15);
  CHECK(std::abs(f(1, 0) - Complex{s, 0.0}) <= 1e-15);
  CHECK(std::abs(f(1, 1) - Complex{-s, 0.0}) <= 1e-15);
}

TEST_CASE("dft_matrix is unitary and symmetric", "[linalg]") {
  const ComplexMatrix f = pswalk::dft_matrix(31);
  CHECK(pswalk::unitarity_defect(f) <= 1e-10);
  CHECK((f - f.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("number-state phases advance the transform columns cyclically",
          "[linalg]") {
  // exp(i (2 pi / d) n) F[:, m] = F[:, m + 1 mod d]: the uniform-magnitude
  // basis vectors are permuted one slot by a single quantum of rotation.
  const int d = 5;
  const ComplexMatrix f = pswalk::dft_matrix(d);
  for (int m = 0; m < d; ++m) {
    ComplexVector rotated(d);
    for (int n = 0; n < d; ++n) {
      rotated[n] = std::exp(kI * (2.0 * kPi * n / d)) * f(n, m);
    }
    const ComplexVector expected = f.col((m + 1) % d);
    CHECK((rotated - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("dft_matrix entry matches the closed form", "[linalg]") {
  // F[m][n] = exp(i 2 pi m n / d) / sqrt(d); at d = 5, m = 2, n = 3 the
  // angle reduces to 2 pi / 5.
  const ComplexMatrix f = pswalk::dft_matrix(5);
  const Complex expected{0.13819660112501064, 0.42532540417601994};
  CHECK(std::abs(f(2, 3) - expected) <= 1e-15);
  const Complex direct = std::exp(kI * (2.0 * kPi / 5.0)) / std::sqrt(5.0);
  CHECK(std::abs(f(2, 3) - direct) <= 1e-15);
}

TEST_CASE("hermiticity and unitarity defects flag broken matrices",
          "[linalg]") {
  ComplexMatrix h = pauli_z();
  CHECK(pswalk::is_hermitian(h));
  h(0, 1) = Complex{0.0, 1e-6};
  CHECK_FALSE(pswalk::is_hermitian(h));
  CHECK(pswalk::hermiticity_defect(h) == Catch::Approx(1e-6).margin(1e-18));

  ComplexMatrix u = kI * pauli_x();
  CHECK(pswalk::is_unitary(u));
  u(0, 1) *= 1.0 + 1e-6;
  CHECK_FALSE(pswalk::is_unitary(u));
}
