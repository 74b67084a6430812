#include "qmeas/isolation.hpp"

namespace qmeas {

IsolationReport check_isolation(const UnitaryOperator& u,
                                const std::vector<HermitianObservable>& charges,
                                double tol) {
  IsolationReport report;
  report.tol = tol;
  report.commutator_norms.reserve(charges.size());
  for (const HermitianObservable& q : charges) {
    if (q.dim() != u.dim()) {
      throw ValidationError("check_isolation: charge dimension mismatch");
    }
    report.commutator_norms.push_back(
        (u.matrix() * q.matrix() - q.matrix() * u.matrix()).norm());
  }
  report.isolated = true;
  for (const double norm : report.commutator_norms) {
    if (norm > tol) {
      report.isolated = false;
      break;
    }
  }
  return report;
}

std::vector<double> leak_profile(const UnitaryOperator& u, const DensityMatrix& rho,
                                 const std::vector<HermitianObservable>& charges) {
  if (rho.dim() != u.dim()) {
    throw ValidationError("leak_profile: state dimension mismatch");
  }
  const DensityMatrix evolved(u.matrix() * rho.matrix() * u.matrix().adjoint());
  std::vector<double> deltas;
  deltas.reserve(charges.size());
  for (const HermitianObservable& q : charges) {
    if (q.dim() != u.dim()) {
      throw ValidationError("leak_profile: charge dimension mismatch");
    }
    deltas.push_back(expectation(q, evolved) - expectation(q, rho));
  }
  return deltas;
}

}  // namespace qmeas
