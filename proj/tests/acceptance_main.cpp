// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Every tolerance is pinned in code next to its check.

#include "qmeas/battery.hpp"
#include "qmeas/channel_tomo.hpp"
#include "qmeas/charges.hpp"
#include "qmeas/core.hpp"
#include "qmeas/isolation.hpp"
#include "qmeas/measurement.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace qmeas;

struct Outcome {
  bool pass = false;
  std::string detail;
};

HermitianObservable charge(int d, const ChargeLabel& label) {
  return HermitianObservable(charge_matrix(d, label));
}

Vector basis_vector(Index dim, Index k) {
  Vector e = Vector::Zero(dim);
  e(k) = Complex(1, 0);
  return e;
}

// 1. Qubit closed forms: dz = -r11, dx = r01 + r10, dy = i r01 - i r10,
//    against the two-expectation route, 100 seeded states, 1e-12.
Outcome criterion_qubit_closed_forms() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const DensityMatrix rho = random_density_matrix(2, 10000 + seed);
    const Matrix& r = rho.matrix();
    const double dz = -r(1, 1).real();
    const double dx = (r(0, 1) + r(1, 0)).real();
    const double dy = (Complex(0, 1) * (r(0, 1) - r(1, 0))).real();
    worst = std::max(worst,
                     std::abs(charge_delta(rho, {ChargeAxis::Z, 1, 1}).delta - dz));
    worst = std::max(worst,
                     std::abs(charge_delta(rho, {ChargeAxis::X, 0, 1}).delta - dx));
    worst = std::max(worst,
                     std::abs(charge_delta(rho, {ChargeAxis::Y, 0, 1}).delta - dy));
  }
  std::ostringstream detail;
  detail << "max |delta - closed form| = " << worst;
  return {worst < 1e-12, detail.str()};
}

// 2. Ideal-mode tomography round trip, d in {2,3,4}, 100 seeded states each,
//    1e-10 trace distance.
Outcome criterion_ideal_round_trip() {
  double worst = 0.0;
  for (int d = 2; d <= 4; ++d) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const DensityMatrix rho = random_density_matrix(d, 20000 + 100 * d + seed);
      ProtocolConfig config;
      config.d = d;
      config.mode = ProtocolMode::Ideal;
      const ProtocolResult result = run_protocol(rho, config);
      worst = std::max(worst, trace_distance(result.reconstructed, rho));
    }
  }
  std::ostringstream detail;
  detail << "max round-trip distance = " << worst;
  return {worst < 1e-10, detail.str()};
}

const std::vector<double> kSweepWidths{0.3, 0.1, 0.03, 0.01, 0.003, 0.001};

// 3. Strictly decreasing max-epsilon over the geometric width grid for
//    d in {2,3}; final max-epsilon and reconstruction error below 1e-3.
Outcome criterion_epsilon_convergence() {
  bool pass = true;
  std::ostringstream detail;
  for (int d = 2; d <= 3; ++d) {
    const DensityMatrix rho = random_density_matrix(d, 30000 + d);
    ProtocolConfig config;
    config.d = d;
    config.mode = ProtocolMode::Battery;
    const std::vector<SweepRow> rows = epsilon_sweep(rho, kSweepWidths, config);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      pass = pass && rows[i].max_epsilon < rows[i - 1].max_epsilon;
    }
    pass = pass && rows.back().max_epsilon < 1e-3;
    pass = pass && rows.back().reconstruction_error < 1e-3;
    detail << "d=" << d << ": eps " << rows.front().max_epsilon << " -> "
           << rows.back().max_epsilon << ", rec err "
           << rows.back().reconstruction_error << (d == 2 ? "; " : "");
  }
  return {pass, detail.str()};
}

// 4. Recovery bound: per battery round, the trace distance of the recovered
//    joint state to rho_S (x) |0><0| equals that round's epsilon to 1e-12.
Outcome criterion_recovery_bound() {
  double worst = 0.0;
  for (int d = 2; d <= 3; ++d) {
    const DensityMatrix rho = random_density_matrix(d, 30000 + d);
    const DensityMatrix rho_i = joint_initial_state(rho);
    const UnitaryOperator u = build_measurement_unitary(d);
    for (const double s : kSweepWidths) {
      const BatteryWavefunction battery = gaussian_battery(default_grid(s), s, 1.0);
      for (const ChargeLabel& label : canonical_labels(d)) {
        const DensityMatrix sigma = reduced_channel(rho_i, u, charge(d, label), battery);
        const double eps = channel_epsilon(sigma, rho);
        const double recovered = trace_distance(recover(sigma), rho_i);
        worst = std::max(worst, std::abs(recovered - eps));
      }
    }
  }
  std::ostringstream detail;
  detail << "max |recovered distance - epsilon| = " << worst;
  return {worst < 1e-12, detail.str()};
}

// 5. First law: exact accounting identity, and the position-distribution
//    pipeline reproduces -Delta E_SA via gamma * Delta<x> within 1e-6 on
//    d=2 pure branches with the default grid.
Outcome criterion_first_law() {
  const double s = 0.05;
  const BatteryWavefunction battery = gaussian_battery(default_grid(s), s, 1.0);
  const UnitaryOperator u = build_measurement_unitary(2);
  const double initial_mean = initial_position_distribution(battery).mean();

  Vector plus = Vector::Zero(4);
  plus(0) = plus(2) = Complex(1 / std::sqrt(2.0), 0);
  Vector phase = Vector::Zero(4);
  phase(0) = Complex(1 / std::sqrt(2.0), 0);
  phase(2) = Complex(0, 1 / std::sqrt(2.0));
  const std::vector<Vector> branches{basis_vector(4, 0), basis_vector(4, 2), plus, phase};

  double worst_pipeline = 0.0;
  double worst_identity = 0.0;
  for (const ChargeLabel& label : canonical_labels(2)) {
    const HermitianObservable q = charge(2, label);
    for (const Vector& phi : branches) {
      const DensityMatrix rho_i(phi * phi.adjoint());
      const DensityMatrix sigma = reduced_channel(rho_i, u, q, battery);
      const double delta_e_sa = expectation(q, sigma) - expectation(q, rho_i);
      // Exact accounting: the battery work is defined as the negated delta.
      worst_identity =
          std::max(worst_identity, std::abs(work_cost(rho_i, sigma, q) + delta_e_sa));
      // Independent route through the battery position distribution.
      const PositionDistribution dist = battery_position_distribution(phi, battery, u, q);
      const double battery_gain = battery.gamma * (dist.mean() - initial_mean);
      worst_pipeline = std::max(worst_pipeline, std::abs(delta_e_sa + battery_gain));
    }
  }
  std::ostringstream detail;
  detail << "max |dE_SA + gamma dx| = " << worst_pipeline
         << ", accounting residual = " << worst_identity;
  return {worst_pipeline < 1e-6 && worst_identity < 1e-12, detail.str()};
}

// 6. i.i.d. estimator: log-log stderr slope -0.5 +- 0.1 over N in
//    {1e3,1e4,1e5,1e6} (10 seeds), and every N=1e6 estimate within
//    4 stderr of the exact work.
Outcome criterion_iid_estimator() {
  const double s = 0.05;
  const BatteryWavefunction battery = gaussian_battery(default_grid(s), s, 1.0);
  const UnitaryOperator u = build_measurement_unitary(2);
  const HermitianObservable q = charge(2, {ChargeAxis::Z, 1, 1});
  const Vector phi = basis_vector(4, 2);
  const DensityMatrix rho_i(phi * phi.adjoint());
  const double exact = work_cost(rho_i, reduced_channel(rho_i, u, q, battery), q);

  const double initial_mean = initial_position_distribution(battery).mean();
  const PositionDistribution dist = battery_position_distribution(phi, battery, u, q);

  const std::vector<std::int64_t> counts{1000, 10000, 100000, 1000000};
  std::vector<double> mean_log_se(counts.size(), 0.0);
  bool four_sigma = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const WorkEstimate est =
          sample_work_estimate(dist, counts[i], 40000 + seed, 1.0, initial_mean);
      mean_log_se[i] += std::log10(est.standard_error) / 10.0;
      if (counts[i] == 1000000) {
        four_sigma =
            four_sigma && std::abs(est.estimate - exact) <= 4.0 * est.standard_error;
      }
    }
  }

  double x_bar = 0.0, y_bar = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    x_bar += std::log10(static_cast<double>(counts[i])) / counts.size();
    y_bar += mean_log_se[i] / counts.size();
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double x = std::log10(static_cast<double>(counts[i]));
    num += (x - x_bar) * (mean_log_se[i] - y_bar);
    den += (x - x_bar) * (x - x_bar);
  }
  const double slope = num / den;
  std::ostringstream detail;
  detail << "slope = " << slope << ", all 1e6 estimates within 4 stderr = "
         << (four_sigma ? "yes" : "no");
  return {std::abs(slope + 0.5) <= 0.1 && four_sigma, detail.str()};
}

// 7. Isolation checker: the copying interaction is leaky against the d=2
//    charge set; exp(-i Q t) is isolated; the two-level worked examples
//    reproduce their deltas.
Outcome criterion_isolation() {
  bool pass = true;
  std::ostringstream detail;

  std::vector<HermitianObservable> set2;
  for (const auto& [label, obs] : build_charge_set(2).charges) set2.push_back(obs);
  const IsolationReport leaky = check_isolation(build_measurement_unitary(2), set2);
  pass = pass && !leaky.isolated;

  bool all_isolated = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Matrix g = random_density_matrix(4, 50000 + seed).matrix();
    const HermitianObservable q(g + g.adjoint());
    const double t = 0.2 + 0.37 * static_cast<double>(seed);
    all_isolated =
        all_isolated && check_isolation(exp_i_hermitian(q, t), {q}).isolated;
  }
  pass = pass && all_isolated;

  const double gap = 0.9;
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = Complex(0.4, 0);
  h(1, 1) = Complex(0.4 + gap, 0);
  Matrix flip = Matrix::Zero(2, 2);
  flip(0, 1) = flip(1, 0) = Complex(1, 0);
  Matrix ground = Matrix::Zero(2, 2);
  ground(0, 0) = Complex(1, 0);
  const double energy_delta = leak_profile(UnitaryOperator(flip), DensityMatrix(ground),
                                           {HermitianObservable(h)})[0];
  pass = pass && std::abs(energy_delta - gap) < 1e-12;

  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = Complex(1, 0);
  z(1, 1) = Complex(-1, 0);
  Matrix hp = Matrix::Zero(2, 2);
  hp(0, 1) = hp(1, 0) = Complex(1, 0);
  Matrix plus(2, 2);
  plus << Complex(0.5, 0), Complex(0.5, 0), Complex(0.5, 0), Complex(0.5, 0);
  const std::vector<double> deltas =
      leak_profile(UnitaryOperator(z), DensityMatrix(plus),
                   {HermitianObservable(h), HermitianObservable(hp)});
  pass = pass && std::abs(deltas[0]) < 1e-12 && std::abs(deltas[1] + 2.0) < 1e-12;

  detail << "copying interaction leaky = " << (!leaky.isolated ? "yes" : "no")
         << ", generated unitaries isolated = " << (all_isolated ? "yes" : "no")
         << ", energy delta = " << energy_delta << ", phase deltas = (" << deltas[0]
         << ", " << deltas[1] << ")";
  return {pass, detail.str()};
}

// 8. Channel tomography: ideal Choi round trip below 1e-10 for 50 random
//    d=2 and 10 random d=3 channels; battery mode at s=0.001 below 5e-3.
Outcome criterion_channel_tomography() {
  double worst_ideal = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const QuantumChannel channel = random_channel(2, 2 + static_cast<int>(seed % 3),
                                                  60000 + seed);
    ProtocolConfig config;
    config.d = 4;
    config.mode = ProtocolMode::Ideal;
    worst_ideal = std::max(
        worst_ideal, choi_distance(tomograph_channel(channel, config),
                                   exact_choi(channel)));
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const QuantumChannel channel = random_channel(3, 2, 61000 + seed);
    ProtocolConfig config;
    config.d = 9;
    config.mode = ProtocolMode::Ideal;
    worst_ideal = std::max(
        worst_ideal, choi_distance(tomograph_channel(channel, config),
                                   exact_choi(channel)));
  }

  const QuantumChannel probe = random_channel(2, 2, 62000);
  ProtocolConfig battery_config;
  battery_config.d = 4;
  battery_config.mode = ProtocolMode::Battery;
  battery_config.s = 0.001;
  battery_config.grid = default_grid(0.001);
  const double battery_distance =
      choi_distance(tomograph_channel(probe, battery_config), exact_choi(probe));

  std::ostringstream detail;
  detail << "max ideal Choi distance = " << worst_ideal
         << ", battery Choi distance = " << battery_distance;
  return {worst_ideal < 1e-10 && battery_distance < 5e-3, detail.str()};
}

// 9. Structural invariants: charge-set structure, copying-unitary structure,
//    momentum-slice unitarity, battery-phase translation invariance,
//    reduced-channel trace preservation.
Outcome criterion_structural_invariants() {
  bool pass = true;
  std::ostringstream detail;

  double charge_residual = 0.0;
  for (int d = 2; d <= 6; ++d) {
    const ChargeSet set = build_charge_set(d);
    pass = pass && set.charges.size() == static_cast<std::size_t>(d) * d - 1;
    for (std::size_t a = 0; a < set.charges.size(); ++a) {
      charge_residual =
          std::max(charge_residual, std::abs(set.charges[a].second.matrix().trace()));
      charge_residual = std::max(charge_residual,
                                 hermiticity_residual(set.charges[a].second.matrix()));
      for (std::size_t b = a; b < set.charges.size(); ++b) {
        const Complex inner =
            (set.charges[a].second.matrix() * set.charges[b].second.matrix()).trace();
        charge_residual =
            std::max(charge_residual, std::abs(inner - Complex(a == b ? 2.0 : 0.0, 0)));
      }
    }
    for (int k = 0; k < d; ++k) {
      for (int l = 0; l < d; ++l) {
        if (k == l) continue;
        const Vector e = basis_vector(static_cast<Index>(d) * d,
                                      static_cast<Index>(k) * d + l);
        for (const auto& [label, obs] : set.charges) {
          charge_residual =
              std::max(charge_residual, (obs.matrix() * e).cwiseAbs().maxCoeff());
        }
      }
    }
  }
  pass = pass && charge_residual < 1e-10;

  const Matrix u2 = build_measurement_unitary(2).matrix();
  Matrix cnot = Matrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = Complex(1, 0);
  double unitary_residual = (u2 - cnot).cwiseAbs().maxCoeff();
  unitary_residual =
      std::max(unitary_residual, ((u2 * u2) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff());
  for (int d = 2; d <= 6; ++d) {
    unitary_residual = std::max(
        unitary_residual, unitarity_residual(build_measurement_unitary(d).matrix()));
  }
  pass = pass && unitary_residual < 1e-12;

  const UnitaryOperator u = build_measurement_unitary(2);
  double slice_residual = 0.0;
  for (const ChargeLabel& label : canonical_labels(2)) {
    const HermitianObservable q = charge(2, label);
    slice_residual = std::max(
        slice_residual,
        (conjugated_unitary(u, q, 1.0, 0.0).matrix() - u.matrix()).cwiseAbs().maxCoeff());
    for (const double p : {-2.7, -0.4, 0.9, 3.3}) {
      slice_residual = std::max(
          slice_residual, unitarity_residual(conjugated_unitary(u, q, 1.0, p).matrix()));
    }
  }
  pass = pass && slice_residual < 1e-10;

  const DensityMatrix rho = random_density_matrix(2, 70000);
  const DensityMatrix rho_i = joint_initial_state(rho);
  const BatteryWavefunction battery = gaussian_battery(default_grid(0.05), 0.05, 1.0);
  BatteryWavefunction shifted = battery;
  for (int k = 0; k < battery.grid.length; ++k) {
    shifted.amplitudes(k) *= std::exp(Complex(0.0, -1.37 * battery.grid.point(k)));
  }
  double battery_residual = 0.0;
  for (const ChargeLabel& label : canonical_labels(2)) {
    const HermitianObservable q = charge(2, label);
    const DensityMatrix a = reduced_channel(rho_i, u, q, battery);
    const DensityMatrix b = reduced_channel(rho_i, u, q, shifted);
    battery_residual =
        std::max(battery_residual, (a.matrix() - b.matrix()).cwiseAbs().maxCoeff());
    battery_residual =
        std::max(battery_residual, std::abs(a.matrix().trace().real() - 1.0));
  }
  pass = pass && battery_residual < 1e-10;

  detail << "charge residual = " << charge_residual << ", interaction residual = "
         << unitary_residual << ", slice residual = " << slice_residual
         << ", battery residual = " << battery_residual;
  return {pass, detail.str()};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* title;
    std::function<Outcome()> check;
  };
  const std::vector<Entry> entries{
      {1, "qubit closed-form charge deltas (1e-12)", criterion_qubit_closed_forms},
      {2, "ideal tomography round trip d=2..4 (1e-10)", criterion_ideal_round_trip},
      {3, "epsilon convergence on the width sweep (< 1e-3)",
       criterion_epsilon_convergence},
      {4, "recovery bound matches epsilon (1e-12)", criterion_recovery_bound},
      {5, "first law via the position pipeline (1e-6)", criterion_first_law},
      {6, "i.i.d. work estimator scaling (slope -0.5 +- 0.1)", criterion_iid_estimator},
      {7, "isolation verdicts and worked leak profiles", criterion_isolation},
      {8, "channel tomography round trips (1e-10 ideal, 5e-3 battery)",
       criterion_channel_tomography},
      {9, "structural invariants suite", criterion_structural_invariants},
  };

  int failures = 0;
  for (const Entry& entry : entries) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entry.check();
    } catch (const std::exception& err) {
      outcome = {false, std::string("exception: ") + err.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d [%s] %s (%s) [%.2fs]\n", entry.id,
                outcome.pass ? "PASS" : "FAIL", entry.title, outcome.detail.c_str(),
                seconds);
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures;
}
