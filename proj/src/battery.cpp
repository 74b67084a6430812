#include "qmeas/battery.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace qmeas {

namespace {

constexpr double kWeightCutoff = 1e-18;   // per-point quadrature weight floor
constexpr double kWeightBudget = 1e-8;    // allowed total quadrature deficit
constexpr double kBoundaryMass = 1e-12;   // containment budget at +-p_max

// H eigenbasis with the interaction transformed into it. All momentum slices
// share this frame: V(p) acts as diag(f) u_tilde diag(conj f) with
// f_i = exp(-i p lambda_i / gamma).
struct EigenFrame {
  RealVector lambda;
  Matrix basis;    // W, columns are eigenvectors
  Matrix u_tilde;  // W^H U W
};

EigenFrame make_frame(const UnitaryOperator& u, const HermitianObservable& h) {
  if (u.dim() != h.dim()) {
    throw ValidationError("battery: unitary and charge dimensions differ");
  }
  const Eigensystem es = eigendecompose(h);
  EigenFrame frame;
  frame.lambda = es.eigenvalues;
  frame.basis = es.eigenvectors;
  frame.u_tilde = es.eigenvectors.adjoint() * u.matrix() * es.eigenvectors;
  return frame;
}

Vector slice_phases(const RealVector& lambda, double p, double gamma) {
  Vector f(lambda.size());
  for (Index i = 0; i < lambda.size(); ++i) {
    f(i) = std::exp(Complex(0.0, -p * lambda(i) / gamma));
  }
  return f;
}

void require_positive_gamma(double gamma) {
  if (!(gamma > 0.0)) {
    throw ValidationError("battery: gamma must be positive");
  }
}

// Position amplitudes of one momentum-space series via the centered discrete
// transform with kernel exp(-i p x):
//   Phi(x_j) = (dp / sqrt(2 pi)) e^{i p_max x_j} FFT_j[(-1)^k g_k],
// on the dual grid x_j = (j - L/2) dx, dx = pi / p_max. The leading phase
// drops out of |Phi|^2 and is not applied.
std::vector<Complex> position_transform(const MomentumGrid& grid,
                                        const std::vector<Complex>& series) {
  const int length = grid.length;
  std::vector<Complex> folded(series);
  for (int k = 1; k < length; k += 2) {
    folded[k] = -folded[k];
  }
  std::vector<Complex> out;
  Eigen::FFT<double> fft;
  fft.fwd(out, folded);
  const double scale = grid.dp() / std::sqrt(2.0 * std::numbers::pi);
  for (Complex& v : out) {
    v *= scale;
  }
  return out;
}

PositionDistribution finalize_distribution(const MomentumGrid& grid, RealVector norms) {
  const double dx = std::numbers::pi / grid.p_max;
  norms *= dx;
  const double total = norms.sum();
  if (std::abs(total - 1.0) > kWeightBudget) {
    std::ostringstream msg;
    msg << "position distribution mass " << total << " deviates from 1 beyond "
        << kWeightBudget;
    throw ContainmentError(msg.str());
  }
  PositionDistribution dist;
  dist.x0 = -(grid.length / 2) * dx;
  dist.dx = dx;
  dist.prob = std::move(norms);
  return dist;
}

}  // namespace

MomentumGrid::MomentumGrid(double p_max_, int length_) : p_max(p_max_), length(length_) {
  if (!(p_max > 0.0)) {
    throw ValidationError("MomentumGrid: p_max must be positive");
  }
  if (length < 2 || (length & (length - 1)) != 0) {
    throw ValidationError("MomentumGrid: length must be a power of two >= 2");
  }
}

MomentumGrid default_grid(double s) {
  if (!(s > 0.0)) {
    throw ValidationError("default_grid: s must be positive");
  }
  return MomentumGrid(std::max(8.0 * s, 4.0), 4096);
}

BatteryWavefunction gaussian_battery(const MomentumGrid& grid, double s, double gamma) {
  require_positive_gamma(gamma);
  if (!(s > 0.0)) {
    throw ValidationError("gaussian_battery: s must be positive");
  }
  if (!(s < grid.p_max / 6.0)) {
    std::ostringstream msg;
    msg << "gaussian_battery: width s=" << s << " not contained by p_max=" << grid.p_max;
    throw ContainmentError(msg.str());
  }
  Vector psi(grid.length);
  for (int k = 0; k < grid.length; ++k) {
    const double p = grid.point(k);
    psi(k) = Complex(std::exp(-p * p / (4.0 * s * s)), 0.0);
  }
  psi /= std::sqrt(psi.squaredNorm() * grid.dp());
  const double edge_mass =
      std::max(std::norm(psi(0)), std::norm(psi(grid.length - 1))) * grid.dp();
  if (edge_mass > kBoundaryMass) {
    std::ostringstream msg;
    msg << "gaussian_battery: boundary mass " << edge_mass << " exceeds " << kBoundaryMass;
    throw ContainmentError(msg.str());
  }
  return BatteryWavefunction{grid, std::move(psi), gamma, s};
}

UnitaryOperator conjugated_unitary(const UnitaryOperator& u, const HermitianObservable& h,
                                   double gamma, double p) {
  if (u.dim() != h.dim()) {
    throw ValidationError("conjugated_unitary: dimension mismatch");
  }
  if (gamma == 0.0) {
    throw ValidationError("conjugated_unitary: gamma must be nonzero");
  }
  if (p == 0.0) {
    return u;
  }
  const UnitaryOperator left = exp_i_hermitian(h, p / gamma);
  return UnitaryOperator(left.matrix() * u.matrix() * left.matrix().adjoint());
}

DensityMatrix reduced_channel(const DensityMatrix& rho_SA, const UnitaryOperator& u,
                              const HermitianObservable& h,
                              const BatteryWavefunction& battery) {
  if (rho_SA.dim() != u.dim() || rho_SA.dim() != h.dim()) {
    throw ValidationError("reduced_channel: dimension mismatch");
  }
  require_positive_gamma(battery.gamma);
  const EigenFrame frame = make_frame(u, h);
  const Matrix rho_t = frame.basis.adjoint() * rho_SA.matrix() * frame.basis;
  const Index n = rho_SA.dim();
  const double dp = battery.grid.dp();

  Matrix acc = Matrix::Zero(n, n);
  double total_weight = 0.0;
  for (int k = 0; k < battery.grid.length; ++k) {
    const double w = std::norm(battery.amplitudes(k)) * dp;
    total_weight += w;
    if (w < kWeightCutoff) continue;
    const Vector f = slice_phases(frame.lambda, battery.grid.point(k), battery.gamma);
    const Matrix slice = frame.u_tilde.cwiseProduct(f * f.adjoint());
    acc.noalias() += w * (slice * rho_t * slice.adjoint());
  }
  if (std::abs(total_weight - 1.0) > kWeightBudget) {
    std::ostringstream msg;
    msg << "reduced_channel: quadrature weight deficit " << std::abs(total_weight - 1.0)
        << " exceeds " << kWeightBudget;
    throw ContainmentError(msg.str());
  }
  acc /= acc.trace().real();
  return DensityMatrix(frame.basis * acc * frame.basis.adjoint());
}

double channel_epsilon(const DensityMatrix& sigma_SA, const DensityMatrix& rho_S) {
  if (sigma_SA.dim() != rho_S.dim() * rho_S.dim()) {
    throw ValidationError("channel_epsilon: sigma is not a joint state for rho_S");
  }
  return trace_distance(sigma_SA, ideal_measure(rho_S));
}

double work_cost(const DensityMatrix& rho_SA_initial, const DensityMatrix& sigma_SA,
                 const HermitianObservable& h) {
  if (rho_SA_initial.dim() != sigma_SA.dim() || rho_SA_initial.dim() != h.dim()) {
    throw ValidationError("work_cost: dimension mismatch");
  }
  return expectation(h, rho_SA_initial) - expectation(h, sigma_SA);
}

double PositionDistribution::mean() const {
  double m = 0.0;
  for (Index j = 0; j < prob.size(); ++j) {
    m += x_at(j) * prob(j);
  }
  return m / prob.sum();
}

PositionDistribution battery_position_distribution(const Vector& phi_SA,
                                                   const BatteryWavefunction& battery,
                                                   const UnitaryOperator& u,
                                                   const HermitianObservable& h) {
  if (phi_SA.size() != u.dim() || phi_SA.size() != h.dim()) {
    throw ValidationError("battery_position_distribution: dimension mismatch");
  }
  if (std::abs(phi_SA.norm() - 1.0) > tol::trace) {
    throw ValidationError("battery_position_distribution: input state not normalized");
  }
  require_positive_gamma(battery.gamma);
  const EigenFrame frame = make_frame(u, h);
  const Vector phi_t = frame.basis.adjoint() * phi_SA;
  const Index n = phi_SA.size();
  const int length = battery.grid.length;

  // Joint amplitudes psi(p_k) V(p_k)|phi>, componentwise in the H eigenbasis;
  // the norm of the transformed vector is basis-independent.
  Matrix joint(length, n);
  for (int k = 0; k < length; ++k) {
    const Vector f = slice_phases(frame.lambda, battery.grid.point(k), battery.gamma);
    const Vector rotated =
        f.asDiagonal() * (frame.u_tilde * (f.conjugate().asDiagonal() * phi_t));
    joint.row(k) = battery.amplitudes(k) * rotated.transpose();
  }

  RealVector norms = RealVector::Zero(length);
  std::vector<Complex> series(length);
  for (Index i = 0; i < n; ++i) {
    for (int k = 0; k < length; ++k) {
      series[k] = joint(k, i);
    }
    const std::vector<Complex> transformed = position_transform(battery.grid, series);
    for (int j = 0; j < length; ++j) {
      norms(j) += std::norm(transformed[j]);
    }
  }
  return finalize_distribution(battery.grid, std::move(norms));
}

PositionDistribution initial_position_distribution(const BatteryWavefunction& battery) {
  const int length = battery.grid.length;
  std::vector<Complex> series(length);
  for (int k = 0; k < length; ++k) {
    series[k] = battery.amplitudes(k);
  }
  const std::vector<Complex> transformed = position_transform(battery.grid, series);
  RealVector norms(length);
  for (int j = 0; j < length; ++j) {
    norms(j) = std::norm(transformed[j]);
  }
  return finalize_distribution(battery.grid, std::move(norms));
}

PositionDistribution mixed_position_distribution(const DensityMatrix& rho_SA,
                                                 const BatteryWavefunction& battery,
                                                 const UnitaryOperator& u,
                                                 const HermitianObservable& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_SA.matrix());
  if (es.info() != Eigen::Success) {
    throw ValidationError("mixed_position_distribution: eigendecomposition failed");
  }
  PositionDistribution mixed;
  bool first = true;
  for (Index i = 0; i < rho_SA.dim(); ++i) {
    const double weight = es.eigenvalues()(i);
    if (weight < 1e-14) continue;
    Vector branch = es.eigenvectors().col(i);
    branch /= branch.norm();
    const PositionDistribution dist =
        battery_position_distribution(branch, battery, u, h);
    if (first) {
      mixed = dist;
      mixed.prob *= weight;
      first = false;
    } else {
      mixed.prob += weight * dist.prob;
    }
  }
  if (first) {
    throw ValidationError("mixed_position_distribution: state has no spectral weight");
  }
  return mixed;
}

WorkEstimate sample_work_estimate(const PositionDistribution& dist, std::int64_t n,
                                  std::uint64_t seed, double gamma, double initial_mean) {
  if (n < 1) {
    throw ValidationError("sample_work_estimate: need at least one sample");
  }
  std::vector<double> cdf(static_cast<std::size_t>(dist.prob.size()));
  double running = 0.0;
  for (Index j = 0; j < dist.prob.size(); ++j) {
    running += dist.prob(j);
    cdf[static_cast<std::size_t>(j)] = running;
  }
  const double total = cdf.back();

  std::mt19937_64 rng(seed);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t i = 1; i <= n; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u * total);
    const Index j = std::min<Index>(static_cast<Index>(it - cdf.begin()),
                                    dist.prob.size() - 1);
    const double x = dist.x_at(j);
    const double delta = x - mean;
    mean += delta / static_cast<double>(i);
    m2 += delta * (x - mean);
  }
  const double variance = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  WorkEstimate est;
  est.estimate = gamma * (mean - initial_mean);
  est.standard_error = gamma * std::sqrt(variance / static_cast<double>(n));
  return est;
}

ProtocolResult run_protocol(const DensityMatrix& rho_S, const ProtocolConfig& config) {
  const int d = static_cast<int>(rho_S.dim());
  if (config.d != d) {
    throw ValidationError("run_protocol: config dimension " + std::to_string(config.d) +
                          " does not match state dimension " + std::to_string(d));
  }
  if (!(config.s > 0.0)) {
    throw ValidationError("run_protocol: config.s must be positive");
  }
  const UnitaryOperator u = build_measurement_unitary(d);
  const DensityMatrix rho_i = joint_initial_state(rho_S);
  const DensityMatrix rho_f = ideal_measure(rho_S);

  std::optional<BatteryWavefunction> battery;
  if (config.mode == ProtocolMode::Battery) {
    battery = gaussian_battery(config.grid, config.s, config.gamma);
  }

  WorkLedger ledger;
  ledger.d = d;
  ledger.mode = config.mode;
  ledger.s = config.s;
  ledger.gamma = config.gamma;

  std::optional<DensityMatrix> recovered;
  std::vector<ChargeDeltaRecord> deltas;
  for (const ChargeLabel& label : canonical_labels(d)) {
    const HermitianObservable q(charge_matrix(d, label));
    const DensityMatrix sigma = config.mode == ProtocolMode::Battery
                                    ? reduced_channel(rho_i, u, q, *battery)
                                    : rho_f;
    const double work = work_cost(rho_i, sigma, q);
    const double eps = trace_distance(sigma, rho_f);
    ledger.entries.push_back({label, work, eps, std::nullopt, std::nullopt});
    deltas.push_back({label, -work});
    recovered = recover(sigma);
  }
  return ProtocolResult{std::move(ledger), reconstruct_state(deltas),
                        std::move(*recovered)};
}

std::vector<SweepRow> epsilon_sweep(const DensityMatrix& rho_S,
                                    const std::vector<double>& s_values,
                                    const ProtocolConfig& config) {
  std::vector<SweepRow> rows;
  rows.reserve(s_values.size());
  for (const double s : s_values) {
    ProtocolConfig point = config;
    point.s = s;
    point.grid = default_grid(s);
    const ProtocolResult result = run_protocol(rho_S, point);
    double max_eps = 0.0;
    for (const WorkLedgerEntry& entry : result.ledger.entries) {
      max_eps = std::max(max_eps, entry.epsilon);
    }
    rows.push_back({s, max_eps, trace_distance(result.reconstructed, rho_S)});
  }
  return rows;
}

}  // namespace qmeas
