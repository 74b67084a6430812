#pragma once

#include "qmeas/charges.hpp"
#include "qmeas/core.hpp"
#include "qmeas/measurement.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace qmeas {

// Uniform momentum grid p_k = -p_max + k * dp, k = 0..length-1, with
// dp = 2 p_max / length. length must be a power of two (for the transform
// to the position representation).
struct MomentumGrid {
  MomentumGrid(double p_max, int length);

  double p_max = 0.0;
  int length = 0;

  double dp() const { return 2.0 * p_max / length; }
  double point(int k) const { return -p_max + k * dp(); }
};

// Default rule: p_max = max(8 s, 4), length 4096. Contains the Gaussian to
// well below the 1e-12 boundary-mass budget and resolves the phase
// oscillations of every charge spectrum at these scales.
MomentumGrid default_grid(double s);

// Normalized momentum-space amplitudes of the battery. gamma is the scale of
// the battery charge operator (gamma * position); s records the momentum
// standard deviation the state was built with.
struct BatteryWavefunction {
  MomentumGrid grid;
  Vector amplitudes;  // psi(p_k); sum |psi|^2 dp = 1
  double gamma = 1.0;
  double s = 0.0;
};

// psi(p) proportional to exp(-p^2 / (4 s^2)), normalized on the grid.
// Rejects batteries that are not contained (s too large for the grid, or
// boundary mass above 1e-12).
BatteryWavefunction gaussian_battery(const MomentumGrid& grid, double s, double gamma);

// V(p) = exp(-i p H / gamma) * U * exp(+i p H / gamma), the momentum-sliced
// global interaction. Computed basis-free, so degenerate charge spectra need
// no eigenvector convention; V(0) returns U exactly.
UnitaryOperator conjugated_unitary(const UnitaryOperator& u, const HermitianObservable& h,
                                   double gamma, double p);

// Quadrature  sum_k mu(p_k) V(p_k) rho V(p_k)^H dp, renormalized to unit
// trace. Rejects when the quadrature weight deficit exceeds 1e-8.
DensityMatrix reduced_channel(const DensityMatrix& rho_SA, const UnitaryOperator& u,
                              const HermitianObservable& h,
                              const BatteryWavefunction& battery);

// Trace distance between a realized joint state and the ideal measurement
// output for rho_S.
double channel_epsilon(const DensityMatrix& sigma_SA, const DensityMatrix& rho_S);

// Battery-side work: -(Tr[sigma H] - Tr[rho_i H]). Exact by strict total
// conservation.
double work_cost(const DensityMatrix& rho_SA_initial, const DensityMatrix& sigma_SA,
                 const HermitianObservable& h);

// Discrete distribution over the dual position grid x_j = x0 + j * dx,
// dx = pi / p_max. prob(j) already carries the dx weight and sums to 1.
struct PositionDistribution {
  double x0 = 0.0;
  double dx = 0.0;
  RealVector prob;

  double x_at(Index j) const { return x0 + j * dx; }
  double mean() const;
};

// Position distribution of the battery after the conserving interaction on a
// pure joint input |phi>. Mixed inputs go through mixed_position_distribution.
PositionDistribution battery_position_distribution(const Vector& phi_SA,
                                                   const BatteryWavefunction& battery,
                                                   const UnitaryOperator& u,
                                                   const HermitianObservable& h);

// |position transform of psi|^2: the battery before any interaction.
PositionDistribution initial_position_distribution(const BatteryWavefunction& battery);

// Eigendecomposes rho_SA and mixes the pure-branch distributions by weight.
PositionDistribution mixed_position_distribution(const DensityMatrix& rho_SA,
                                                 const BatteryWavefunction& battery,
                                                 const UnitaryOperator& u,
                                                 const HermitianObservable& h);

struct WorkEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

// Draws n i.i.d. positions from the distribution and returns
// gamma * (sample mean - initial_mean) with its standard error.
// Deterministic for a fixed seed.
WorkEstimate sample_work_estimate(const PositionDistribution& dist, std::int64_t n,
                                  std::uint64_t seed, double gamma, double initial_mean);

enum class ProtocolMode { Ideal, Battery };

struct ProtocolConfig {
  int d = 2;
  ProtocolMode mode = ProtocolMode::Ideal;
  double s = 1e-3;
  double gamma = 1.0;
  MomentumGrid grid = default_grid(1e-3);
  std::uint64_t seed = 0;
};

struct WorkLedgerEntry {
  ChargeLabel label;
  double work = 0.0;
  double epsilon = 0.0;
  std::optional<std::int64_t> n_samples;
  std::optional<double> standard_error;
};

// Per-charge work record of one full protocol run. In battery mode with
// exact accounting, work = -(charge delta realized on SA) identically.
struct WorkLedger {
  int d = 0;
  ProtocolMode mode = ProtocolMode::Ideal;
  double s = 0.0;
  double gamma = 1.0;
  std::vector<WorkLedgerEntry> entries;
};

struct ProtocolResult {
  WorkLedger ledger;
  DensityMatrix reconstructed;
  DensityMatrix recovered_SA;  // of the last charge round
};

// One protocol round per charge in canonical order: drive the interaction
// (ideal or battery-mediated), record work and epsilon, undo the
// interaction; then reconstruct the state from the negated works.
ProtocolResult run_protocol(const DensityMatrix& rho_S, const ProtocolConfig& config);

struct SweepRow {
  double s = 0.0;
  double max_epsilon = 0.0;
  double reconstruction_error = 0.0;
};

// Runs the protocol at each s (grid rebuilt by the default rule per value)
// and tabulates max epsilon over charges plus the reconstruction error.
std::vector<SweepRow> epsilon_sweep(const DensityMatrix& rho_S,
                                    const std::vector<double>& s_values,
                                    const ProtocolConfig& config);

}  // namespace qmeas
