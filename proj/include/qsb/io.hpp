// Run records and their serialization: per-step CSV/JSON rows plus a JSON
// summary. Output is deterministic: ordered maps everywhere, %.17g doubles,
// no timestamps.
#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qsb/config.hpp"
#include "qsb/dynamics.hpp"
#include "qsb/hilbert.hpp"

namespace qsb {

struct StepRow {
  int t = 0;
  double norm = 0.0;
  bool engaged = false;
  std::optional<int> consumed_value;
  std::vector<double> mode_weight;  // occupation / N; sums to 1 per row
  std::vector<std::pair<std::string, double>> word_dist;  // ascending by word
};

StepRow make_step_row(int t, const SparseState& s, const StepReport* rep);

struct RunResult {
  std::vector<StepRow> rows;
  nlohmann::json summary;
};

// The simulate pipeline: initial state from the config, `steps` evolution
// steps, per-step rows, and the summary block (exit/residence data when the
// start is a classical basis ket, consumed-qubit count, coherence metrics of
// the reduced spatial state, pair-decomposition rank for two fermions).
RunResult run_scenario(const ScenarioConfig& cfg);

std::string format_double(double v);  // %.17g, '.' decimal separator

void write_rows_csv(std::ostream& out, const std::vector<StepRow>& rows, const StateMeta& meta);
void write_rows_json(std::ostream& out, const std::vector<StepRow>& rows, const StateMeta& meta);
void write_run(const RunResult& run, const ScenarioConfig& cfg);  // honors cfg.out_* paths

}  // namespace qsb
