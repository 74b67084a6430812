#pragma once

#include "qmeas/charges.hpp"
#include "qmeas/core.hpp"

#include <vector>

namespace qmeas {

// Change of one charge expectation value across the measurement interaction.
struct ChargeDeltaRecord {
  ChargeLabel label;
  double delta = 0.0;
};

// The copying interaction sum_m |m><m|_S (x) V_A^{0->m} with
// V_A^{0->m} = sum_n |(m+n) mod d><n|_A. Equals CNOT (control on S) for d=2.
UnitaryOperator build_measurement_unitary(int d);

// rho_S (x) |0><0|_A, the joint state before the interaction. The apparatus
// always starts in |0>_A; the closed-form charge deltas assume it.
DensityMatrix joint_initial_state(const DensityMatrix& rho_S);

// U (rho_S (x) |0><0|_A) U^H. The result is supported entirely on the
// span{|mm>} subspace, with (m, n) block equal to rho_S(m, n).
DensityMatrix ideal_measure(const DensityMatrix& rho_S);

// Delta computed from two expectation values, against the post- and
// pre-interaction joint states.
ChargeDeltaRecord charge_delta(const DensityMatrix& rho_S, const ChargeLabel& label);

// Same delta from the closed-form expressions in the state's entries:
//   z: sqrt(2/(m(m+1))) * (sum_{k=1}^{m-1} p_kk - m p_mm)
//   x: p_mn + p_nm          y: i p_mn - i p_nm
ChargeDeltaRecord charge_delta_closed_form(const DensityMatrix& rho_S,
                                           const ChargeLabel& label);

// Inverts a full set of d^2-1 deltas back into the density matrix: diagonal
// entries recursively from the z-deltas, p_00 from normalization, and
// off-diagonals p_mn = (dx - i dy)/2. Assembled matrices with eigenvalues in
// [-tol::reconstruct, 0) are clipped to zero and renormalized; worse PSD
// violations are rejected with the offending eigenvalue.
DensityMatrix reconstruct_state(const std::vector<ChargeDeltaRecord>& deltas);

// U^H sigma U: undoes the measurement interaction on the joint state.
DensityMatrix recover(const DensityMatrix& sigma_SA);

}  // namespace qmeas
