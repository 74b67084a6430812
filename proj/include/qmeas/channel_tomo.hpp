#pragma once

#include "qmeas/battery.hpp"
#include "qmeas/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qmeas {

// Trace-preserving quantum operation in Kraus form, d_in = d_out = d.
class QuantumChannel {
 public:
  QuantumChannel(int d, std::vector<Matrix> kraus_ops);

  int dim() const { return d_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }

 private:
  int d_;
  std::vector<Matrix> kraus_;
};

// Normalized Choi state (trace-1 convention) on the d^2 reference-output
// space. marginal_deviation is the max entry deviation of the reference
// marginal from I/d; warning is set by battery-mode tomography when that
// deviation exceeds 1e-3.
struct ChoiMatrix {
  int d = 0;
  DensityMatrix state;
  double marginal_deviation = 0.0;
  std::optional<std::string> warning;
};

// (1/sqrt d) sum_k |kk>, composite index k_ref * d + k_out.
Vector maximally_entangled_state(int d);

// sum_i (I (x) K_i) rho (I (x) K_i)^H on the reference-output space.
DensityMatrix apply_channel_to_subsystem(const QuantumChannel& channel,
                                         const DensityMatrix& rho_BS);

// max entry deviation of the reference marginal from I/d.
double choi_marginal_deviation(int d, const DensityMatrix& state);

// Choi state computed directly from the Kraus representation.
ChoiMatrix exact_choi(const QuantumChannel& channel);

// Prepares the Choi state of the channel and reconstructs it as an unknown
// d^2-dimensional state with the full measurement protocol. config must be
// set up for dimension d^2; supported envelope d <= 4.
ChoiMatrix tomograph_channel(const QuantumChannel& channel, const ProtocolConfig& config);

// Trace distance between normalized Choi states.
double choi_distance(const ChoiMatrix& a, const ChoiMatrix& b);

// Kraus operators from the rescaled Choi eigendecomposition. The
// decomposition is not unique; channels are compared in Choi form.
std::vector<Matrix> kraus_from_choi(const ChoiMatrix& choi);

// Seeded Haar-style isometry reshaped into kraus_rank Kraus operators.
QuantumChannel random_channel(int d, int kraus_rank, std::uint64_t seed);

}  // namespace qmeas
