#include "qsb/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>

#include "qsb/analysis.hpp"

namespace qsb {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

StepRow make_step_row(int t, const SparseState& s, const StepReport* rep) {
  StepRow row;
  row.t = t;
  row.norm = s.norm();
  if (rep) {
    row.engaged = rep->engaged();
    row.consumed_value = rep->qubit_consumed_value;
  }

  int n_particles = 1;
  if (!s.amp.empty()) n_particles = std::max(1, s.amp.begin()->first.cfg.n());
  row.mode_weight.assign(2 * s.meta.M, 0.0);
  std::map<AncillaWord, double> words;
  for (const auto& [key, amp] : s.amp) {
    const double w = std::norm(amp);
    for (int m : key.cfg.modes) row.mode_weight[m] += w / n_particles;
    words[key.word] += w;
  }
  for (const auto& [w, p] : words) row.word_dist.emplace_back(w.str(), p);
  return row;
}

namespace {

// CSV-safe column name for a mode: p_x<position><R|L>.
std::string mode_column(int mode) {
  auto [x, c] = site_of(mode);
  return "p_x" + std::to_string(x) + (c == Coin::right ? "R" : "L");
}

std::string words_cell(const StepRow& row) {
  std::string cell;
  for (size_t i = 0; i < row.word_dist.size(); ++i) {
    if (i) cell += ';';
    cell += row.word_dist[i].first + ":" + format_double(row.word_dist[i].second);
  }
  return cell;
}

}  // namespace

void write_rows_csv(std::ostream& out, const std::vector<StepRow>& rows, const StateMeta& meta) {
  out << "t,norm,engaged,consumed";
  for (int m = 0; m < 2 * meta.M; ++m) out << ',' << mode_column(m);
  out << ",words\n";
  for (const StepRow& row : rows) {
    out << row.t << ',' << format_double(row.norm) << ',' << (row.engaged ? 1 : 0) << ',';
    if (row.consumed_value) out << *row.consumed_value;
    for (double w : row.mode_weight) out << ',' << format_double(w);
    out << ',' << words_cell(row) << '\n';
  }
}

void write_rows_json(std::ostream& out, const std::vector<StepRow>& rows, const StateMeta& meta) {
  nlohmann::json arr = nlohmann::json::array();
  for (const StepRow& row : rows) {
    nlohmann::json r;
    r["t"] = row.t;
    r["norm"] = row.norm;
    r["engaged"] = row.engaged;
    if (row.consumed_value) r["consumed"] = *row.consumed_value;
    nlohmann::json modes;
    for (int m = 0; m < 2 * meta.M; ++m) modes[mode_column(m)] = row.mode_weight[m];
    r["modes"] = modes;
    nlohmann::json words;
    for (const auto& [w, p] : row.word_dist) words[w] = p;
    r["words"] = words;
    arr.push_back(r);
  }
  out << arr.dump(2) << "\n";
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const BarrierSpec spec = cfg.barrier();
  SparseState s = cfg.initial_state();
  validate_barrier(s.meta, spec);

  // Classical residence data is well defined only for a basis-ket start with
  // a fresh register.
  std::optional<ResidenceResult> residence;
  if (s.amp.size() == 1 && s.amp.begin()->first.cfg.n() == 1 &&
      s.amp.begin()->first.word.bits == 0) {
    const int horizon = (cfg.k + 2) * (2 * cfg.x0 - 1) + 4 * cfg.M + 16;
    residence = measure_first_residence(s.amp.begin()->first.cfg.modes[0], s.meta, spec,
                                        std::max(horizon, cfg.steps + 1));
  }

  RunResult run;
  run.rows.push_back(make_step_row(0, s, nullptr));
  int consumed = 0;
  double engaged_weight_total = 0.0;
  std::vector<int> engaged_steps;
  for (int t = 1; t <= cfg.steps; ++t) {
    auto [next, rep] = step_multi(s, spec);
    s = std::move(next);
    run.rows.push_back(make_step_row(t, s, &rep));
    engaged_weight_total += rep.engaged_weight;
    if (rep.engaged_weight > 1.0 - 1e-9) {
      ++consumed;
      engaged_steps.push_back(t);
    }
  }

  nlohmann::json& sum = run.summary;
  sum["config"] = config_to_json(cfg);
  sum["rng"] = {{"name", "mt19937_64+splitmix64"},
                {"seed", cfg.seed},
                {"substreams", "derive_seed(seed, trial)"}};
  sum["final_norm"] = s.norm();
  sum["qubits_consumed"] = consumed;
  sum["engaged_steps"] = engaged_steps;
  sum["engaged_weight_total"] = engaged_weight_total;

  if (residence) {
    nlohmann::json r;
    r["entered"] = residence->entered;
    r["exited"] = residence->exited;
    r["t_enter"] = residence->t_enter;
    r["t_last_inside"] = residence->t_last_inside;
    r["exit_time"] = residence->exited ? residence->t_last_inside + 1 : -1;
    r["residence"] = residence->residence;
    sum["residence"] = r;
  } else {
    sum["residence"] = nullptr;
  }

  const DensityMatrix dm = partial_trace_ancilla(s);
  const CoherenceMetrics cm = coherence_metrics(dm.mat, cfg.eps_eig_tol);
  sum["coherence"] = {{"rank", cm.rank}, {"purity", cm.purity}, {"l1_offdiag", cm.l1_offdiag}};

  sum["slater"] = nullptr;
  if (!s.amp.empty() && s.amp.begin()->first.cfg.n() == 2) {
    try {
      const Eigen::MatrixXcd A = antisymmetric_amplitudes(s);
      const SlaterDecomposition sd = slater_rank(A, cfg.tol_slater);
      sum["slater"] = {{"rank", sd.rank}, {"lambdas", sd.lambdas}, {"tol", sd.tol}};
    } catch (const std::invalid_argument&) {
      // mixed reduced state: no pair decomposition to report
    }
  }

  nlohmann::json final_words;
  for (const auto& [w, p] : run.rows.back().word_dist) final_words[w] = p;
  sum["final_words"] = final_words;
  return run;
}

void write_run(const RunResult& run, const ScenarioConfig& cfg) {
  const StateMeta meta = cfg.meta();
  if (!cfg.out_csv.empty()) {
    std::ofstream out(cfg.out_csv);
    if (!out) throw std::runtime_error("cannot write \"" + cfg.out_csv + "\"");
    if (cfg.format == "json")
      write_rows_json(out, run.rows, meta);
    else
      write_rows_csv(out, run.rows, meta);
  }
  if (!cfg.out_summary.empty()) {
    std::ofstream out(cfg.out_summary);
    if (!out) throw std::runtime_error("cannot write \"" + cfg.out_summary + "\"");
    out << run.summary.dump(2) << "\n";
  }
}

}  // namespace qsb
