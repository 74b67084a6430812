#pragma once

#include "qmeas/battery.hpp"
#include "qmeas/channel_tomo.hpp"
#include "qmeas/charges.hpp"
#include "qmeas/core.hpp"
#include "qmeas/isolation.hpp"
#include "qmeas/measurement.hpp"

#include <string>
#include <vector>

namespace qmeas {

// All floating-point output is serialized with 17 significant digits so
// files round-trip exactly and are byte-identical across runs.
std::string format_double(double value);

// Complex matrix encoding used repo-wide:
//   {"rows": R, "cols": C, "data": [[re, im], ...]}  (row-major)
std::string matrix_to_json(const Matrix& m);
Matrix matrix_from_json_text(const std::string& text);

std::string charge_set_to_json(const ChargeSet& set);
ChargeSet charge_set_from_json_text(const std::string& text);

// {"label": "z:1:1", "delta": -0.4}; files hold arrays in canonical order.
std::string deltas_to_json(const std::vector<ChargeDeltaRecord>& deltas);
std::vector<ChargeDeltaRecord> deltas_from_json_text(const std::string& text);

std::string ledger_to_json(const WorkLedger& ledger);
WorkLedger ledger_from_json_text(const std::string& text);

// Header: s,max_epsilon,reconstruction_error
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

std::string isolation_report_to_json(const IsolationReport& report,
                                     const std::vector<std::string>& charge_names);

// {"d": d, "kraus": [<matrix>, ...]}
std::string channel_to_json(const QuantumChannel& channel);
QuantumChannel channel_from_json_text(const std::string& text);

// Matrix encoding plus {"d": d} (and the warning field when set).
std::string choi_to_json(const ChoiMatrix& choi);
ChoiMatrix choi_from_json_text(const std::string& text);

DensityMatrix density_from_json_text(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace qmeas
