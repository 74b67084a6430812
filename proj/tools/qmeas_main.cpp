#include "qmeas/json_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace qmeas;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitContainment = 3;

struct CommonOpts {
  int d = 2;
  std::string mode = "ideal";
  double s = 1e-3;
  double gamma = 1.0;
  int grid_l = 4096;
  double p_max = 0.0;  // 0 means the default rule max(8 s, 4)
  std::uint64_t seed = 0;
  double tol = 1e-10;
  std::int64_t n = 100000;
  std::string config_path;
  std::string out_path;

  std::map<std::string, CLI::Option*> options;
};

void add_common_flags(CLI::App* cmd, CommonOpts& opts) {
  opts.options["d"] = cmd->add_option("--d", opts.d, "System dimension");
  opts.options["mode"] =
      cmd->add_option("--mode", opts.mode, "Protocol mode: ideal or battery")
          ->check(CLI::IsMember({"ideal", "battery"}));
  opts.options["s"] = cmd->add_option("--s", opts.s, "Battery momentum width");
  opts.options["gamma"] = cmd->add_option("--gamma", opts.gamma, "Battery charge scale");
  opts.options["grid-l"] =
      cmd->add_option("--grid-l", opts.grid_l, "Momentum grid length (power of two)");
  opts.options["p-max"] =
      cmd->add_option("--p-max", opts.p_max, "Momentum cutoff (0 = auto)");
  opts.options["seed"] = cmd->add_option("--seed", opts.seed, "RNG seed");
  opts.options["tol"] = cmd->add_option("--tol", opts.tol, "Tolerance");
  opts.options["n"] = cmd->add_option("--n", opts.n, "Sample count");
  cmd->add_option("--config", opts.config_path,
                  "JSON config file; explicit flags win over its values");
  cmd->add_option("--out", opts.out_path, "Output file path")->required();
}

// Config-file overlay: known keys fill in options the user did not pass;
// unknown keys are rejected.
void apply_config_file(CommonOpts& opts) {
  if (opts.config_path.empty()) return;
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(read_text_file(opts.config_path));
  } catch (const nlohmann::json::exception& err) {
    throw ValidationError(std::string("config file: ") + err.what());
  }
  if (!parsed.is_object()) {
    throw ValidationError("config file: expected a JSON object");
  }
  for (const auto& [key, value] : parsed.items()) {
    const auto it = opts.options.find(key);
    if (it == opts.options.end()) {
      throw ValidationError("config file: unknown key '" + key + "'");
    }
    if (it->second->count() > 0) continue;  // flags win
    try {
      if (key == "d") {
        opts.d = value.get<int>();
      } else if (key == "mode") {
        opts.mode = value.get<std::string>();
        if (opts.mode != "ideal" && opts.mode != "battery") {
          throw ValidationError("config file: mode must be 'ideal' or 'battery'");
        }
      } else if (key == "s") {
        opts.s = value.get<double>();
      } else if (key == "gamma") {
        opts.gamma = value.get<double>();
      } else if (key == "grid-l") {
        opts.grid_l = value.get<int>();
      } else if (key == "p-max") {
        opts.p_max = value.get<double>();
      } else if (key == "seed") {
        opts.seed = value.get<std::uint64_t>();
      } else if (key == "tol") {
        opts.tol = value.get<double>();
      } else if (key == "n") {
        opts.n = value.get<std::int64_t>();
      }
    } catch (const nlohmann::json::exception& err) {
      throw ValidationError("config file: bad value for '" + key + "': " + err.what());
    }
  }
}

ProtocolConfig make_protocol_config(const CommonOpts& opts, int d) {
  ProtocolConfig config;
  config.d = d;
  config.mode = opts.mode == "battery" ? ProtocolMode::Battery : ProtocolMode::Ideal;
  config.s = opts.s;
  config.gamma = opts.gamma;
  const double p_max = opts.p_max > 0.0 ? opts.p_max : std::max(8.0 * opts.s, 4.0);
  config.grid = MomentumGrid(p_max, opts.grid_l);
  config.seed = opts.seed;
  return config;
}

int state_dimension(const CommonOpts& opts, const DensityMatrix& rho, const char* what) {
  const int d = static_cast<int>(rho.dim());
  if (opts.options.at("d")->count() > 0 && opts.d != d) {
    throw ValidationError(std::string(what) + ": --d=" + std::to_string(opts.d) +
                          " does not match the state dimension " + std::to_string(d));
  }
  return d;
}

int cmd_charges(const CommonOpts& opts) {
  write_text_file(opts.out_path, charge_set_to_json(build_charge_set(opts.d)));
  std::cout << "wrote " << opts.out_path << "\n";
  return kExitOk;
}

int cmd_measure(const CommonOpts& opts, const std::string& state_path) {
  const DensityMatrix rho = density_from_json_text(read_text_file(state_path));
  const int d = state_dimension(opts, rho, "measure");
  const ProtocolConfig config = make_protocol_config(opts, d);
  const ProtocolResult result = run_protocol(rho, config);
  const double recovery_error =
      trace_distance(result.recovered_SA, joint_initial_state(rho));

  std::ostringstream out;
  out << "{\"ledger\": " << ledger_to_json(result.ledger) << ", \"reconstructed\": "
      << matrix_to_json(result.reconstructed.matrix())
      << ", \"recovery_error\": " << format_double(recovery_error) << "}";
  write_text_file(opts.out_path, out.str());
  std::cout << "wrote " << opts.out_path << "\n";
  return kExitOk;
}

int cmd_sweep(const CommonOpts& opts, const std::string& state_path,
              const std::vector<double>& s_values) {
  if (s_values.empty()) {
    throw ValidationError("sweep: need at least one --s-values entry");
  }
  const DensityMatrix rho = density_from_json_text(read_text_file(state_path));
  const int d = state_dimension(opts, rho, "sweep");
  const ProtocolConfig config = make_protocol_config(opts, d);
  write_text_file(opts.out_path, sweep_to_csv(epsilon_sweep(rho, s_values, config)));
  std::cout << "wrote " << opts.out_path << "\n";
  return kExitOk;
}

int cmd_isolation(const CommonOpts& opts, const std::string& unitary_path,
                  const std::string& charges_path, const std::string& state_path) {
  const UnitaryOperator u(matrix_from_json_text(read_text_file(unitary_path)));

  std::vector<HermitianObservable> charges;
  std::vector<std::string> names;
  if (!charges_path.empty()) {
    const ChargeSet set = charge_set_from_json_text(read_text_file(charges_path));
    for (const auto& [label, obs] : set.charges) {
      charges.push_back(obs);
      names.push_back(label.str());
    }
  } else {
    for (const auto& [label, obs] : build_charge_set(opts.d).charges) {
      charges.push_back(obs);
      names.push_back(label.str());
    }
  }

  IsolationReport report = check_isolation(u, charges, opts.tol);
  if (!state_path.empty()) {
    const DensityMatrix rho = density_from_json_text(read_text_file(state_path));
    report.deltas = leak_profile(u, rho, charges);
  }
  write_text_file(opts.out_path, isolation_report_to_json(report, names));
  std::cout << "wrote " << opts.out_path << "\n";
  return kExitOk;
}

int cmd_channel(const CommonOpts& opts, const std::string& channel_path,
                const std::string& reference_path) {
  const QuantumChannel channel = channel_from_json_text(read_text_file(channel_path));
  const ProtocolConfig config = make_protocol_config(opts, channel.dim() * channel.dim());
  const ChoiMatrix choi = tomograph_channel(channel, config);

  std::string body = choi_to_json(choi);
  if (!reference_path.empty()) {
    const QuantumChannel reference =
        channel_from_json_text(read_text_file(reference_path));
    const double distance = choi_distance(choi, exact_choi(reference));
    body.pop_back();  // reopen the object to append the distance report
    body += ", \"choi_distance_to_reference\": " + format_double(distance) + "}";
  }
  write_text_file(opts.out_path, body);
  std::cout << "wrote " << opts.out_path << "\n";
  return kExitOk;
}

int cmd_sample(const CommonOpts& opts, const std::string& state_path,
               const std::string& label_text) {
  const ChargeLabel label = ChargeLabel::parse(label_text);
  const DensityMatrix rho = density_from_json_text(read_text_file(state_path));
  const int d = state_dimension(opts, rho, "sample");
  if (!label_valid_for(label, d)) {
    throw ValidationError("sample: label " + label.str() + " invalid for d=" +
                          std::to_string(d));
  }
  const ProtocolConfig config = make_protocol_config(opts, d);
  const BatteryWavefunction battery =
      gaussian_battery(config.grid, config.s, config.gamma);
  const UnitaryOperator u = build_measurement_unitary(d);
  const HermitianObservable q(charge_matrix(d, label));
  const DensityMatrix rho_i = joint_initial_state(rho);

  const double initial_mean = initial_position_distribution(battery).mean();
  const PositionDistribution dist = mixed_position_distribution(rho_i, battery, u, q);
  const WorkEstimate estimate =
      sample_work_estimate(dist, opts.n, opts.seed, config.gamma, initial_mean);
  const double exact = work_cost(rho_i, reduced_channel(rho_i, u, q, battery), q);

  std::ostringstream out;
  out << "{\"label\": \"" << label.str() << "\", \"n_samples\": " << opts.n
      << ", \"seed\": " << opts.seed << ", \"estimate\": "
      << format_double(estimate.estimate) << ", \"stderr\": "
      << format_double(estimate.standard_error) << ", \"exact\": "
      << format_double(exact) << "}";
  write_text_file(opts.out_path, out.str());
  std::cout << "wrote " << opts.out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Charge-conserving measurement protocol simulator"};
  app.require_subcommand(1);

  CommonOpts charges_opts, measure_opts, sweep_opts, isolation_opts, channel_opts,
      sample_opts;
  std::string state_path, unitary_path, charges_path, isolation_state_path,
      channel_path, reference_path, label_text;
  std::vector<double> s_values;

  CLI::App* charges_cmd = app.add_subcommand("charges", "Write the labelled charge set");
  add_common_flags(charges_cmd, charges_opts);

  CLI::App* measure_cmd =
      app.add_subcommand("measure", "Run the full protocol on a state file");
  measure_cmd->add_option("--state", state_path, "Density matrix JSON")->required();
  add_common_flags(measure_cmd, measure_opts);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Tabulate epsilon against the battery width");
  sweep_cmd->add_option("--state", state_path, "Density matrix JSON")->required();
  sweep_cmd->add_option("--s-values", s_values, "Comma-separated widths")
      ->required()
      ->delimiter(',');
  sweep_opts.mode = "battery";
  add_common_flags(sweep_cmd, sweep_opts);

  CLI::App* isolation_cmd =
      app.add_subcommand("isolation", "Commutator check of a unitary against charges");
  isolation_cmd->add_option("--unitary", unitary_path, "Unitary matrix JSON")->required();
  isolation_cmd->add_option("--charges", charges_path, "Charge set JSON");
  isolation_cmd->add_option("--state", isolation_state_path,
                            "Optional state for a leak profile");
  add_common_flags(isolation_cmd, isolation_opts);

  CLI::App* channel_cmd =
      app.add_subcommand("channel", "Reconstruct a channel through its Choi state");
  channel_cmd->add_option("--channel", channel_path, "Channel JSON")->required();
  channel_cmd->add_option("--reference", reference_path,
                          "Reference channel for a distance report");
  add_common_flags(channel_cmd, channel_opts);

  CLI::App* sample_cmd =
      app.add_subcommand("sample", "Sampled work estimate for one charge");
  sample_cmd->add_option("--state", state_path, "Density matrix JSON")->required();
  sample_cmd->add_option("--label", label_text, "Charge label, e.g. z:1:1")->required();
  sample_opts.mode = "battery";
  add_common_flags(sample_cmd, sample_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (charges_cmd->parsed()) {
      apply_config_file(charges_opts);
      if (charges_opts.d < 2) {
        throw ValidationError("charges: --d must be >= 2");
      }
      return cmd_charges(charges_opts);
    }
    if (measure_cmd->parsed()) {
      apply_config_file(measure_opts);
      return cmd_measure(measure_opts, state_path);
    }
    if (sweep_cmd->parsed()) {
      apply_config_file(sweep_opts);
      return cmd_sweep(sweep_opts, state_path, s_values);
    }
    if (isolation_cmd->parsed()) {
      apply_config_file(isolation_opts);
      if (charges_path.empty() && isolation_opts.options.at("d")->count() == 0) {
        throw ValidationError("isolation: pass either --charges or --d");
      }
      return cmd_isolation(isolation_opts, unitary_path, charges_path,
                           isolation_state_path);
    }
    if (channel_cmd->parsed()) {
      apply_config_file(channel_opts);
      return cmd_channel(channel_opts, channel_path, reference_path);
    }
    if (sample_cmd->parsed()) {
      apply_config_file(sample_opts);
      if (sample_opts.mode != "battery") {
        throw ValidationError("sample: only battery mode has a position distribution");
      }
      return cmd_sample(sample_opts, state_path, label_text);
    }
  } catch (const ContainmentError& err) {
    std::cerr << "containment error: " << err.what() << "\n";
    return kExitContainment;
  } catch (const ValidationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
