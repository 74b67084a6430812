#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace qmeas {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Tolerances for dense double-precision algebra at the dimensions this
// library targets (system d <= 8, composite dims <= 64, Choi-protocol
// composites up to 256).
namespace tol {
inline constexpr double herm = 1e-10;        // max |(M - M^H)_ij|
inline constexpr double trace = 1e-10;       // |Tr M - 1|
inline constexpr double unitary = 1e-10;     // max |(U^H U - I)_ij|
inline constexpr double psd = 1e-10;         // eigenvalue floor: lambda >= -psd
inline constexpr double eig = 1e-9;          // eigendecomposition residual
inline constexpr double reconstruct = 1e-6;  // PSD clip window for tomographic assembly
}  // namespace tol

// Rejected input: bad dimensions or a violated structural invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Probability mass leaking off a finite grid (battery not contained).
class ContainmentError : public std::runtime_error {
 public:
  explicit ContainmentError(const std::string& msg) : std::runtime_error(msg) {}
};

double hermiticity_residual(const Matrix& m);
double unitarity_residual(const Matrix& m);

// Trace-one positive-semidefinite Hermitian matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m);

  Index dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }

 private:
  Matrix mat_;
};

class UnitaryOperator {
 public:
  explicit UnitaryOperator(Matrix m);

  Index dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }
  UnitaryOperator adjoint() const;

 private:
  Matrix mat_;
};

class HermitianObservable {
 public:
  explicit HermitianObservable(Matrix m);

  Index dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }

 private:
  Matrix mat_;
};

enum class Subsystem { First, Second };

// Kronecker product; composite basis index = i_first * dim_second + i_second.
Matrix tensor_product(const Matrix& a, const Matrix& b);

// Reduced matrix on the kept tensor factor. m must be square with
// rows == dims.first * dims.second. Preserves the trace.
Matrix partial_trace(const Matrix& m, std::pair<Index, Index> dims, Subsystem keep);

// (1/2) * Schatten-1 norm of (a - b); lies in [0, 1].
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// Tr[rho * obs]. The imaginary residue is checked against tol::herm and
// discarded; a residue above tolerance signals a non-Hermitian input.
double expectation(const HermitianObservable& obs, const DensityMatrix& rho);

// G * G^H normalized to unit trace for a seeded complex Gaussian G
// (Hilbert-Schmidt-style ensemble). Deterministic for a fixed seed.
DensityMatrix random_density_matrix(Index dim, std::uint64_t seed);

// QR of a seeded complex Gaussian matrix, phases fixed so R has a
// positive diagonal. Deterministic for a fixed seed.
UnitaryOperator random_unitary(Index dim, std::uint64_t seed);

struct Eigensystem {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns; V diag(lambda) V^H reconstructs the input
};

// Degenerate-subspace eigenvector choice is unconstrained; downstream code
// must not depend on the basis picked inside a degenerate block.
Eigensystem eigendecompose(const HermitianObservable& h);

// exp(-i * theta * H), computed in the eigenbasis of H.
UnitaryOperator exp_i_hermitian(const HermitianObservable& h, double theta);

}  // namespace qmeas
