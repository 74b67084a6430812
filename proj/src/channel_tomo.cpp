#include "qmeas/channel_tomo.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace qmeas {

namespace {

constexpr int kMaxChannelDim = 4;  // state protocol runs at d^2, composite d^4

}  // namespace

QuantumChannel::QuantumChannel(int d, std::vector<Matrix> kraus_ops)
    : d_(d), kraus_(std::move(kraus_ops)) {
  if (d_ < 2) {
    throw ValidationError("QuantumChannel: dimension must be >= 2");
  }
  if (kraus_.empty()) {
    throw ValidationError("QuantumChannel: need at least one Kraus operator");
  }
  Matrix completeness = Matrix::Zero(d_, d_);
  for (const Matrix& k : kraus_) {
    if (k.rows() != d_ || k.cols() != d_) {
      throw ValidationError("QuantumChannel: Kraus operator has wrong shape");
    }
    completeness += k.adjoint() * k;
  }
  const double residual =
      (completeness - Matrix::Identity(d_, d_)).cwiseAbs().maxCoeff();
  if (residual > 1e-10) {
    throw ValidationError("QuantumChannel: Kraus completeness residual " +
                          std::to_string(residual) + " exceeds tolerance");
  }
}

Vector maximally_entangled_state(int d) {
  if (d < 2) {
    throw ValidationError("maximally_entangled_state: d must be >= 2");
  }
  Vector psi = Vector::Zero(static_cast<Index>(d) * d);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int k = 0; k < d; ++k) {
    psi(static_cast<Index>(k) * d + k) = Complex(amp, 0.0);
  }
  return psi;
}

DensityMatrix apply_channel_to_subsystem(const QuantumChannel& channel,
                                         const DensityMatrix& rho_BS) {
  const int d = channel.dim();
  if (rho_BS.dim() != static_cast<Index>(d) * d) {
    throw ValidationError("apply_channel_to_subsystem: state is not on a d x d space");
  }
  const Matrix eye = Matrix::Identity(d, d);
  Matrix out = Matrix::Zero(rho_BS.dim(), rho_BS.dim());
  for (const Matrix& k : channel.kraus()) {
    const Matrix lifted = tensor_product(eye, k);
    out.noalias() += lifted * rho_BS.matrix() * lifted.adjoint();
  }
  return DensityMatrix(std::move(out));
}

double choi_marginal_deviation(int d, const DensityMatrix& state) {
  const Matrix marginal = partial_trace(state.matrix(), {d, d}, Subsystem::First);
  return (marginal - Matrix::Identity(d, d) / static_cast<double>(d))
      .cwiseAbs()
      .maxCoeff();
}

ChoiMatrix exact_choi(const QuantumChannel& channel) {
  const int d = channel.dim();
  const Vector psi = maximally_entangled_state(d);
  const DensityMatrix entangled(psi * psi.adjoint());
  DensityMatrix state = apply_channel_to_subsystem(channel, entangled);
  const double deviation = choi_marginal_deviation(d, state);
  if (deviation > 1e-8) {
    throw ValidationError("exact_choi: reference marginal deviates by " +
                          std::to_string(deviation));
  }
  return ChoiMatrix{d, std::move(state), deviation, std::nullopt};
}

ChoiMatrix tomograph_channel(const QuantumChannel& channel, const ProtocolConfig& config) {
  const int d = channel.dim();
  if (d > kMaxChannelDim) {
    throw ValidationError("tomograph_channel: supported envelope is d <= " +
                          std::to_string(kMaxChannelDim));
  }
  if (config.d != d * d) {
    throw ValidationError("tomograph_channel: config must target dimension d^2 = " +
                          std::to_string(d * d));
  }
  const Vector psi = maximally_entangled_state(d);
  const DensityMatrix entangled(psi * psi.adjoint());
  const DensityMatrix rho_BS = apply_channel_to_subsystem(channel, entangled);

  const ProtocolResult result = run_protocol(rho_BS, config);
  const double deviation = choi_marginal_deviation(d, result.reconstructed);
  ChoiMatrix choi{d, result.reconstructed, deviation, std::nullopt};
  if (config.mode == ProtocolMode::Battery && deviation > 1e-3) {
    std::ostringstream msg;
    msg << "reference marginal deviates from I/d by " << deviation;
    choi.warning = msg.str();
  } else if (config.mode == ProtocolMode::Ideal && deviation > 1e-8) {
    throw ValidationError("tomograph_channel: ideal-mode marginal deviation " +
                          std::to_string(deviation));
  }
  return choi;
}

double choi_distance(const ChoiMatrix& a, const ChoiMatrix& b) {
  if (a.d != b.d) {
    throw ValidationError("choi_distance: dimension mismatch");
  }
  return trace_distance(a.state, b.state);
}

std::vector<Matrix> kraus_from_choi(const ChoiMatrix& choi) {
  const int d = choi.d;
  Eigen::SelfAdjointEigenSolver<Matrix> es(choi.state.matrix() * static_cast<double>(d));
  if (es.info() != Eigen::Success) {
    throw ValidationError("kraus_from_choi: eigendecomposition failed");
  }
  std::vector<Matrix> kraus;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double weight = es.eigenvalues()(i);
    if (weight < 1e-12) continue;
    const Vector v = es.eigenvectors().col(i);
    Matrix k(d, d);
    for (int ref = 0; ref < d; ++ref) {
      for (int out = 0; out < d; ++out) {
        k(out, ref) = v(static_cast<Index>(ref) * d + out);
      }
    }
    kraus.push_back(std::sqrt(weight) * k);
  }
  return kraus;
}

QuantumChannel random_channel(int d, int kraus_rank, std::uint64_t seed) {
  if (d < 2 || kraus_rank < 1) {
    throw ValidationError("random_channel: need d >= 2 and kraus_rank >= 1");
  }
  // Leading d columns of a Haar-style unitary on the dilated space form an
  // isometry; its d x d blocks are the Kraus operators.
  const Index dilated = static_cast<Index>(d) * kraus_rank;
  const UnitaryOperator big = random_unitary(dilated, seed);
  const Matrix isometry = big.matrix().leftCols(d);
  std::vector<Matrix> kraus;
  kraus.reserve(static_cast<std::size_t>(kraus_rank));
  for (int i = 0; i < kraus_rank; ++i) {
    kraus.push_back(isometry.block(static_cast<Index>(i) * d, 0, d, d));
  }
  return QuantumChannel(d, std::move(kraus));
}

}  // namespace qmeas
