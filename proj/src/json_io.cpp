#include "qmeas/json_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qmeas {

namespace {

using nlohmann::json;

json parse_text(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& err) {
    throw ValidationError(std::string(what) + ": " + err.what());
  }
}

void require_keys(const json& obj, std::initializer_list<const char*> keys,
                  const char* what) {
  if (!obj.is_object()) {
    throw ValidationError(std::string(what) + ": expected a JSON object");
  }
  for (const char* key : keys) {
    if (!obj.contains(key)) {
      throw ValidationError(std::string(what) + ": missing key '" + key + "'");
    }
  }
}

double number_field(const json& obj, const char* key, const char* what) {
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw ValidationError(std::string(what) + ": key '" + key + "' must be a number");
  }
  return v.get<double>();
}

Matrix matrix_from_json(const json& obj, const char* what) {
  require_keys(obj, {"rows", "cols", "data"}, what);
  if (!obj.at("rows").is_number_integer() || !obj.at("cols").is_number_integer()) {
    throw ValidationError(std::string(what) + ": rows/cols must be integers");
  }
  const Index rows = obj.at("rows").get<Index>();
  const Index cols = obj.at("cols").get<Index>();
  if (rows < 1 || cols < 1) {
    throw ValidationError(std::string(what) + ": rows/cols must be positive");
  }
  const json& data = obj.at("data");
  if (!data.is_array() || static_cast<Index>(data.size()) != rows * cols) {
    throw ValidationError(std::string(what) + ": data must hold rows*cols entries");
  }
  Matrix m(rows, cols);
  Index flat = 0;
  for (const json& entry : data) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
        !entry[1].is_number()) {
      throw ValidationError(std::string(what) + ": entries must be [re, im] pairs");
    }
    m(flat / cols, flat % cols) = Complex(entry[0].get<double>(), entry[1].get<double>());
    ++flat;
  }
  return m;
}

void append_matrix(std::ostream& out, const Matrix& m) {
  out << "{\"rows\": " << m.rows() << ", \"cols\": " << m.cols() << ", \"data\": [";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (i != 0 || j != 0) out << ", ";
      out << '[' << format_double(m(i, j).real()) << ", " << format_double(m(i, j).imag())
          << ']';
    }
  }
  out << "]}";
}

void append_ledger(std::ostream& out, const WorkLedger& ledger) {
  out << "{\"d\": " << ledger.d << ", \"mode\": \""
      << (ledger.mode == ProtocolMode::Battery ? "battery" : "ideal") << "\", \"s\": "
      << format_double(ledger.s) << ", \"gamma\": " << format_double(ledger.gamma)
      << ", \"entries\": [";
  bool first = true;
  for (const WorkLedgerEntry& entry : ledger.entries) {
    if (!first) out << ", ";
    first = false;
    out << "{\"label\": \"" << entry.label.str() << "\", \"work\": "
        << format_double(entry.work) << ", \"epsilon\": " << format_double(entry.epsilon)
        << ", \"n_samples\": ";
    if (entry.n_samples) {
      out << *entry.n_samples;
    } else {
      out << "null";
    }
    out << ", \"stderr\": ";
    if (entry.standard_error) {
      out << format_double(*entry.standard_error);
    } else {
      out << "null";
    }
    out << '}';
  }
  out << "]}";
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string matrix_to_json(const Matrix& m) {
  std::ostringstream out;
  append_matrix(out, m);
  return out.str();
}

Matrix matrix_from_json_text(const std::string& text) {
  return matrix_from_json(parse_text(text, "matrix"), "matrix");
}

std::string charge_set_to_json(const ChargeSet& set) {
  std::ostringstream out;
  out << "{\"d\": " << set.d << ", \"charges\": [";
  bool first = true;
  for (const auto& [label, obs] : set.charges) {
    if (!first) out << ", ";
    first = false;
    out << "{\"label\": \"" << label.str() << "\", \"matrix\": ";
    append_matrix(out, obs.matrix());
    out << '}';
  }
  out << "]}";
  return out.str();
}

ChargeSet charge_set_from_json_text(const std::string& text) {
  const json parsed = parse_text(text, "charge set");
  require_keys(parsed, {"d", "charges"}, "charge set");
  if (!parsed.at("d").is_number_integer()) {
    throw ValidationError("charge set: d must be an integer");
  }
  ChargeSet set;
  set.d = parsed.at("d").get<int>();
  if (!parsed.at("charges").is_array()) {
    throw ValidationError("charge set: charges must be an array");
  }
  for (const json& entry : parsed.at("charges")) {
    require_keys(entry, {"label", "matrix"}, "charge set");
    const ChargeLabel label = ChargeLabel::parse(entry.at("label").get<std::string>());
    if (!label_valid_for(label, set.d)) {
      throw ValidationError("charge set: label " + label.str() + " invalid for d=" +
                            std::to_string(set.d));
    }
    set.charges.emplace_back(
        label, HermitianObservable(matrix_from_json(entry.at("matrix"), "charge set")));
  }
  return set;
}

std::string deltas_to_json(const std::vector<ChargeDeltaRecord>& deltas) {
  std::ostringstream out;
  out << '[';
  bool first = true;
  for (const ChargeDeltaRecord& rec : deltas) {
    if (!first) out << ", ";
    first = false;
    out << "{\"label\": \"" << rec.label.str() << "\", \"delta\": "
        << format_double(rec.delta) << '}';
  }
  out << ']';
  return out.str();
}

std::vector<ChargeDeltaRecord> deltas_from_json_text(const std::string& text) {
  const json parsed = parse_text(text, "deltas");
  if (!parsed.is_array()) {
    throw ValidationError("deltas: expected a JSON array");
  }
  std::vector<ChargeDeltaRecord> deltas;
  for (const json& entry : parsed) {
    require_keys(entry, {"label", "delta"}, "deltas");
    if (!entry.at("label").is_string()) {
      throw ValidationError("deltas: label must be a string");
    }
    deltas.push_back({ChargeLabel::parse(entry.at("label").get<std::string>()),
                      number_field(entry, "delta", "deltas")});
  }
  return deltas;
}

std::string ledger_to_json(const WorkLedger& ledger) {
  std::ostringstream out;
  append_ledger(out, ledger);
  return out.str();
}

WorkLedger ledger_from_json_text(const std::string& text) {
  const json parsed = parse_text(text, "ledger");
  require_keys(parsed, {"d", "mode", "s", "gamma", "entries"}, "ledger");
  WorkLedger ledger;
  ledger.d = parsed.at("d").get<int>();
  const std::string mode = parsed.at("mode").get<std::string>();
  if (mode == "battery") {
    ledger.mode = ProtocolMode::Battery;
  } else if (mode == "ideal") {
    ledger.mode = ProtocolMode::Ideal;
  } else {
    throw ValidationError("ledger: mode must be 'ideal' or 'battery'");
  }
  ledger.s = number_field(parsed, "s", "ledger");
  ledger.gamma = number_field(parsed, "gamma", "ledger");
  for (const json& entry : parsed.at("entries")) {
    require_keys(entry, {"label", "work", "epsilon", "n_samples", "stderr"}, "ledger");
    WorkLedgerEntry rec;
    rec.label = ChargeLabel::parse(entry.at("label").get<std::string>());
    rec.work = number_field(entry, "work", "ledger");
    rec.epsilon = number_field(entry, "epsilon", "ledger");
    if (!entry.at("n_samples").is_null()) {
      rec.n_samples = entry.at("n_samples").get<std::int64_t>();
    }
    if (!entry.at("stderr").is_null()) {
      rec.standard_error = number_field(entry, "stderr", "ledger");
    }
    ledger.entries.push_back(std::move(rec));
  }
  return ledger;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "s,max_epsilon,reconstruction_error\n";
  for (const SweepRow& row : rows) {
    out << format_double(row.s) << ',' << format_double(row.max_epsilon) << ','
        << format_double(row.reconstruction_error) << '\n';
  }
  return out.str();
}

std::string isolation_report_to_json(const IsolationReport& report,
                                     const std::vector<std::string>& charge_names) {
  std::ostringstream out;
  out << "{\"charges\": [";
  for (std::size_t i = 0; i < charge_names.size(); ++i) {
    if (i != 0) out << ", ";
    out << '"' << charge_names[i] << '"';
  }
  out << "], \"commutator_norms\": [";
  for (std::size_t i = 0; i < report.commutator_norms.size(); ++i) {
    if (i != 0) out << ", ";
    out << format_double(report.commutator_norms[i]);
  }
  out << "], \"verdict\": \"" << (report.isolated ? "isolated" : "leaky")
      << "\", \"tol\": " << format_double(report.tol);
  if (!report.deltas.empty()) {
    out << ", \"deltas\": [";
    for (std::size_t i = 0; i < report.deltas.size(); ++i) {
      if (i != 0) out << ", ";
      out << format_double(report.deltas[i]);
    }
    out << ']';
  }
  out << '}';
  return out.str();
}

std::string channel_to_json(const QuantumChannel& channel) {
  std::ostringstream out;
  out << "{\"d\": " << channel.dim() << ", \"kraus\": [";
  bool first = true;
  for (const Matrix& k : channel.kraus()) {
    if (!first) out << ", ";
    first = false;
    append_matrix(out, k);
  }
  out << "]}";
  return out.str();
}

QuantumChannel channel_from_json_text(const std::string& text) {
  const json parsed = parse_text(text, "channel");
  require_keys(parsed, {"d", "kraus"}, "channel");
  if (!parsed.at("d").is_number_integer()) {
    throw ValidationError("channel: d must be an integer");
  }
  const int d = parsed.at("d").get<int>();
  if (!parsed.at("kraus").is_array() || parsed.at("kraus").empty()) {
    throw ValidationError("channel: kraus must be a non-empty array");
  }
  std::vector<Matrix> kraus;
  for (const json& entry : parsed.at("kraus")) {
    kraus.push_back(matrix_from_json(entry, "channel kraus"));
  }
  return QuantumChannel(d, std::move(kraus));
}

std::string choi_to_json(const ChoiMatrix& choi) {
  std::ostringstream out;
  out << "{\"d\": " << choi.d << ", \"rows\": " << choi.state.dim() << ", \"cols\": "
      << choi.state.dim() << ", \"data\": [";
  const Matrix& m = choi.state.matrix();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (i != 0 || j != 0) out << ", ";
      out << '[' << format_double(m(i, j).real()) << ", " << format_double(m(i, j).imag())
          << ']';
    }
  }
  out << "], \"marginal_deviation\": " << format_double(choi.marginal_deviation);
  if (choi.warning) {
    out << ", \"warning\": \"" << *choi.warning << '"';
  }
  out << '}';
  return out.str();
}

ChoiMatrix choi_from_json_text(const std::string& text) {
  const json parsed = parse_text(text, "choi");
  require_keys(parsed, {"d", "rows", "cols", "data"}, "choi");
  const int d = parsed.at("d").get<int>();
  json matrix_obj = {{"rows", parsed.at("rows")},
                     {"cols", parsed.at("cols")},
                     {"data", parsed.at("data")}};
  Matrix m = matrix_from_json(matrix_obj, "choi");
  if (m.rows() != static_cast<Index>(d) * d) {
    throw ValidationError("choi: matrix dimension must be d^2");
  }
  DensityMatrix state(std::move(m));
  const double deviation = choi_marginal_deviation(d, state);
  ChoiMatrix choi{d, std::move(state), deviation, std::nullopt};
  if (parsed.contains("warning") && parsed.at("warning").is_string()) {
    choi.warning = parsed.at("warning").get<std::string>();
  }
  return choi;
}

DensityMatrix density_from_json_text(const std::string& text) {
  return DensityMatrix(matrix_from_json_text(text));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write file: " + path);
  }
  out << content;
}

}  // namespace qmeas
