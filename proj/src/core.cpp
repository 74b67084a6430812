#include "qmeas/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <random>
#include <sstream>

namespace qmeas {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    std::ostringstream msg;
    msg << what << ": matrix must be square and non-empty, got " << m.rows()
        << "x" << m.cols();
    throw ValidationError(msg.str());
  }
}

Matrix seeded_gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

}  // namespace

double hermiticity_residual(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_residual(const Matrix& m) {
  const Matrix gram = m.adjoint() * m;
  return (gram - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(Matrix m) : mat_(std::move(m)) {
  require_square(mat_, "DensityMatrix");
  const double herm = hermiticity_residual(mat_);
  if (herm > tol::herm) {
    throw ValidationError("DensityMatrix: Hermiticity residual " +
                          std::to_string(herm) + " exceeds tolerance");
  }
  const double trace_err = std::abs(mat_.trace() - Complex(1.0, 0.0));
  if (trace_err > tol::trace) {
    throw ValidationError("DensityMatrix: trace deviates from 1 by " +
                          std::to_string(trace_err));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw ValidationError("DensityMatrix: eigenvalue computation failed");
  }
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol::psd) {
    throw ValidationError("DensityMatrix: negative eigenvalue " +
                          std::to_string(min_eig));
  }
}

UnitaryOperator::UnitaryOperator(Matrix m) : mat_(std::move(m)) {
  require_square(mat_, "UnitaryOperator");
  const double res = unitarity_residual(mat_);
  if (res > tol::unitary) {
    throw ValidationError("UnitaryOperator: unitarity residual " +
                          std::to_string(res) + " exceeds tolerance");
  }
}

UnitaryOperator UnitaryOperator::adjoint() const {
  return UnitaryOperator(mat_.adjoint());
}

HermitianObservable::HermitianObservable(Matrix m) : mat_(std::move(m)) {
  require_square(mat_, "HermitianObservable");
  const double herm = hermiticity_residual(mat_);
  if (herm > tol::herm) {
    throw ValidationError("HermitianObservable: Hermiticity residual " +
                          std::to_string(herm) + " exceeds tolerance");
  }
}

Matrix tensor_product(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b);
}

Matrix partial_trace(const Matrix& m, std::pair<Index, Index> dims, Subsystem keep) {
  const Index d1 = dims.first;
  const Index d2 = dims.second;
  if (d1 < 1 || d2 < 1) {
    throw ValidationError("partial_trace: factor dimensions must be positive");
  }
  if (m.rows() != m.cols() || m.rows() != d1 * d2) {
    throw ValidationError("partial_trace: matrix dimension does not factor as requested");
  }
  if (keep == Subsystem::First) {
    Matrix out = Matrix::Zero(d1, d1);
    for (Index i = 0; i < d1; ++i) {
      for (Index j = 0; j < d1; ++j) {
        Complex sum(0.0, 0.0);
        for (Index k = 0; k < d2; ++k) {
          sum += m(i * d2 + k, j * d2 + k);
        }
        out(i, j) = sum;
      }
    }
    return out;
  }
  Matrix out = Matrix::Zero(d2, d2);
  for (Index k = 0; k < d2; ++k) {
    for (Index l = 0; l < d2; ++l) {
      Complex sum(0.0, 0.0);
      for (Index i = 0; i < d1; ++i) {
        sum += m(i * d2 + k, i * d2 + l);
      }
      out(k, l) = sum;
    }
  }
  return out;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    throw ValidationError("trace_distance: dimension mismatch");
  }
  // Schatten-1 norm via singular values; the eigenvalue route is kept as an
  // independent oracle in the tests.
  Eigen::BDCSVD<Matrix> svd(a.matrix() - b.matrix());
  return 0.5 * svd.singularValues().sum();
}

double expectation(const HermitianObservable& obs, const DensityMatrix& rho) {
  if (obs.dim() != rho.dim()) {
    throw ValidationError("expectation: dimension mismatch");
  }
  // Tr[rho Q] = sum_ij Q_ji rho_ij
  const Complex t = obs.matrix().transpose().cwiseProduct(rho.matrix()).sum();
  if (std::abs(t.imag()) > tol::herm) {
    throw ValidationError("expectation: imaginary residue " +
                          std::to_string(t.imag()) + " exceeds tolerance");
  }
  return t.real();
}

DensityMatrix random_density_matrix(Index dim, std::uint64_t seed) {
  if (dim < 1) {
    throw ValidationError("random_density_matrix: dim must be >= 1");
  }
  const Matrix g = seeded_gaussian(dim, dim, seed);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(std::move(rho));
}

UnitaryOperator random_unitary(Index dim, std::uint64_t seed) {
  if (dim < 1) {
    throw ValidationError("random_unitary: dim must be >= 1");
  }
  const Matrix g = seeded_gaussian(dim, dim, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    if (mag > 0.0) {
      q.col(j) *= rjj / mag;
    }
  }
  return UnitaryOperator(std::move(q));
}

Eigensystem eigendecompose(const HermitianObservable& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  if (es.info() != Eigen::Success) {
    throw ValidationError("eigendecompose: solver failed to converge");
  }
  return Eigensystem{es.eigenvalues(), es.eigenvectors()};
}

UnitaryOperator exp_i_hermitian(const HermitianObservable& h, double theta) {
  const Eigensystem es = eigendecompose(h);
  Vector phases(h.dim());
  for (Index i = 0; i < h.dim(); ++i) {
    phases(i) = std::exp(Complex(0.0, -theta * es.eigenvalues(i)));
  }
  Matrix u = es.eigenvectors * phases.asDiagonal() * es.eigenvectors.adjoint();
  return UnitaryOperator(std::move(u));
}

}  // namespace qmeas
