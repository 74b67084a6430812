#pragma once

#include "qmeas/core.hpp"

#include <vector>

namespace qmeas {

// Commutator profile of a unitary against a set of charge observables.
// isolated holds iff every Frobenius norm ||[U, Q]|| is within tol; deltas
// stays empty unless a state was supplied for a leak profile.
struct IsolationReport {
  std::vector<double> commutator_norms;
  bool isolated = false;
  double tol = 0.0;
  std::vector<double> deltas;
};

IsolationReport check_isolation(const UnitaryOperator& u,
                                const std::vector<HermitianObservable>& charges,
                                double tol = 1e-10);

// Charge flow for rho -> U rho U^H, one delta per observable.
std::vector<double> leak_profile(const UnitaryOperator& u, const DensityMatrix& rho,
                                 const std::vector<HermitianObservable>& charges);

}  // namespace qmeas
