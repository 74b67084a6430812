#include "qmeas/measurement.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace qmeas {

namespace {

int system_dim_checked(Index dim, const char* what) {
  const int d = static_cast<int>(dim);
  if (d < 2) {
    throw ValidationError(std::string(what) + ": system dimension must be >= 2");
  }
  return d;
}

void check_delta_bound(const ChargeLabel& label, double delta) {
  const double bound = 2.0 * charge_spectral_radius(label) + 1e-9;
  if (std::abs(delta) > bound) {
    std::ostringstream msg;
    msg << "charge delta for " << label.str() << " out of range: " << delta;
    throw ValidationError(msg.str());
  }
}

}  // namespace

UnitaryOperator build_measurement_unitary(int d) {
  if (d < 2) {
    throw ValidationError("build_measurement_unitary: d must be >= 2");
  }
  const Index dim = static_cast<Index>(d) * d;
  Matrix u = Matrix::Zero(dim, dim);
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      u(static_cast<Index>(m) * d + (m + n) % d, static_cast<Index>(m) * d + n) =
          Complex(1.0, 0.0);
    }
  }
  return UnitaryOperator(std::move(u));
}

DensityMatrix joint_initial_state(const DensityMatrix& rho_S) {
  const int d = system_dim_checked(rho_S.dim(), "joint_initial_state");
  Matrix apparatus = Matrix::Zero(d, d);
  apparatus(0, 0) = Complex(1.0, 0.0);
  return DensityMatrix(tensor_product(rho_S.matrix(), apparatus));
}

DensityMatrix ideal_measure(const DensityMatrix& rho_S) {
  const int d = system_dim_checked(rho_S.dim(), "ideal_measure");
  const UnitaryOperator u = build_measurement_unitary(d);
  const DensityMatrix joint = joint_initial_state(rho_S);
  return DensityMatrix(u.matrix() * joint.matrix() * u.matrix().adjoint());
}

ChargeDeltaRecord charge_delta(const DensityMatrix& rho_S, const ChargeLabel& label) {
  const int d = system_dim_checked(rho_S.dim(), "charge_delta");
  const HermitianObservable q(charge_matrix(d, label));
  const double before = expectation(q, joint_initial_state(rho_S));
  const double after = expectation(q, ideal_measure(rho_S));
  const double delta = after - before;
  check_delta_bound(label, delta);
  return ChargeDeltaRecord{label, delta};
}

ChargeDeltaRecord charge_delta_closed_form(const DensityMatrix& rho_S,
                                           const ChargeLabel& label) {
  const int d = system_dim_checked(rho_S.dim(), "charge_delta_closed_form");
  if (!label_valid_for(label, d)) {
    throw ValidationError("charge_delta_closed_form: label " + label.str() +
                          " invalid for d=" + std::to_string(d));
  }
  const Matrix& p = rho_S.matrix();
  double delta = 0.0;
  switch (label.alpha) {
    case ChargeAxis::X:
      delta = (p(label.m, label.n) + p(label.n, label.m)).real();
      break;
    case ChargeAxis::Y:
      delta = (Complex(0.0, 1.0) * (p(label.m, label.n) - p(label.n, label.m))).real();
      break;
    case ChargeAxis::Z: {
      const int m = label.m;
      const double c = std::sqrt(2.0 / (static_cast<double>(m) * (m + 1)));
      double sum = 0.0;
      for (int k = 1; k < m; ++k) {
        sum += p(k, k).real();
      }
      delta = c * (sum - m * p(m, m).real());
      break;
    }
  }
  check_delta_bound(label, delta);
  return ChargeDeltaRecord{label, delta};
}

DensityMatrix reconstruct_state(const std::vector<ChargeDeltaRecord>& deltas) {
  const std::size_t count = deltas.size();
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count + 1))));
  if (d < 2 || static_cast<std::size_t>(d) * d - 1 != count) {
    throw ValidationError("reconstruct_state: delta count " + std::to_string(count) +
                          " is not d^2-1 for any d >= 2");
  }

  const auto find_delta = [&](const ChargeLabel& label) {
    for (const ChargeDeltaRecord& rec : deltas) {
      if (rec.label == label) return rec.delta;
    }
    throw ValidationError("reconstruct_state: missing delta for label " + label.str());
  };

  Matrix rho = Matrix::Zero(d, d);

  // Diagonal, ascending in m: each z-delta determines p_mm from the earlier
  // diagonal entries; p_00 follows from normalization.
  double diag_sum = 0.0;
  double partial = 0.0;  // sum_{k=1}^{m-1} p_kk
  for (int m = 1; m <= d - 1; ++m) {
    const double c = std::sqrt(2.0 / (static_cast<double>(m) * (m + 1)));
    const double dz = find_delta({ChargeAxis::Z, m, m});
    const double p_mm = (partial - dz / c) / m;
    rho(m, m) = Complex(p_mm, 0.0);
    partial += p_mm;
    diag_sum += p_mm;
  }
  rho(0, 0) = Complex(1.0 - diag_sum, 0.0);

  for (int m = 0; m < d - 1; ++m) {
    for (int n = m + 1; n <= d - 1; ++n) {
      const double dx = find_delta({ChargeAxis::X, m, n});
      const double dy = find_delta({ChargeAxis::Y, m, n});
      const Complex p_mn = 0.5 * Complex(dx, -dy);
      rho(m, n) = p_mn;
      rho(n, m) = std::conj(p_mn);
    }
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  if (es.info() != Eigen::Success) {
    throw ValidationError("reconstruct_state: eigenvalue computation failed");
  }
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol::reconstruct) {
    std::ostringstream msg;
    msg << "reconstruct_state: assembled matrix is not PSD, eigenvalue " << min_eig;
    throw ValidationError(msg.str());
  }
  if (min_eig < 0.0) {
    RealVector clipped = es.eigenvalues().cwiseMax(0.0);
    clipped /= clipped.sum();
    rho = es.eigenvectors() * clipped.asDiagonal().toDenseMatrix().cast<Complex>() *
          es.eigenvectors().adjoint();
  } else {
    rho /= rho.trace().real();
  }
  return DensityMatrix(std::move(rho));
}

DensityMatrix recover(const DensityMatrix& sigma_SA) {
  const int dim = static_cast<int>(sigma_SA.dim());
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));
  if (d < 2 || d * d != dim) {
    throw ValidationError("recover: state dimension " + std::to_string(dim) +
                          " is not d^2 for any d >= 2");
  }
  const UnitaryOperator u = build_measurement_unitary(d);
  return DensityMatrix(u.matrix().adjoint() * sigma_SA.matrix() * u.matrix());
}

}  // namespace qmeas
