// Command-line front end: scenario simulation plus the closed-form and
// comparison tools. Exit codes: 0 success, 2 invalid configuration or usage,
// 3 runtime failure.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qsb/analysis.hpp"
#include "qsb/channels.hpp"
#include "qsb/config.hpp"
#include "qsb/io.hpp"

namespace {

struct ScenarioFlags {
  std::string config_path;
  int M = 6, x0 = 3, k = 4, steps = 25, trials = 1, threads = 1;
  std::uint64_t seed = 1;
  std::vector<std::string> particles;
  int random_n = 0;
  std::string ancilla_word;
  double alpha = 1.0, beta = 0.0;
  std::string out_csv, out_summary, format = "csv";
  bool fire_on_swap = true;
};

qsb::ParticleSpec parse_particle(const std::string& text) {
  const auto sep = text.find_first_of(":,");
  if (sep == std::string::npos)
    throw std::invalid_argument("particle must look like \"x:left\" or \"x:right\"");
  qsb::ParticleSpec p;
  try {
    p.x = std::stoi(text.substr(0, sep));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad particle position in \"" + text + "\"");
  }
  const std::string coin = text.substr(sep + 1);
  if (coin == "left" || coin == "L" || coin == "l")
    p.coin = qsb::Coin::left;
  else if (coin == "right" || coin == "R" || coin == "r")
    p.coin = qsb::Coin::right;
  else
    throw std::invalid_argument("bad coin \"" + coin + "\" in particle spec");
  return p;
}

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON scenario file");
  cmd->add_option("--M", f.M, "chain length");
  cmd->add_option("--x0", f.x0, "barrier position");
  cmd->add_option("--k", f.k, "register size");
  cmd->add_option("--steps", f.steps, "evolution steps");
  cmd->add_option("--seed", f.seed, "master RNG seed");
  cmd->add_option("--trials", f.trials, "trial count (sampling tools)");
  cmd->add_option("--threads", f.threads, "worker threads");
  cmd->add_option("--particle", f.particles, "particle \"x:left|right\" (repeatable)");
  cmd->add_option("--random", f.random_n, "place N particles uniformly at random");
  cmd->add_option("--ancilla", f.ancilla_word, "register word, front bit first");
  cmd->add_option("--alpha", f.alpha, "register descriptor amplitude on |0..0>");
  cmd->add_option("--beta", f.beta, "register descriptor amplitude on |1..1>");
  cmd->add_option("--out", f.out_csv, "per-step record file");
  cmd->add_option("--summary", f.out_summary, "summary JSON file");
  cmd->add_option("--format", f.format, "step record format: csv|json");
  cmd->add_flag("--fire-on-swap,!--no-fire-on-swap", f.fire_on_swap,
                "cycle the register on barrier swap-throughs (default on)");
}

qsb::ScenarioConfig resolve_scenario(const CLI::App* cmd, const ScenarioFlags& f) {
  qsb::ScenarioConfig cfg;
  if (cmd->count("--config")) cfg = qsb::load_config(f.config_path);
  if (cmd->count("--M")) cfg.M = f.M;
  if (cmd->count("--x0")) cfg.x0 = f.x0;
  if (cmd->count("--k")) cfg.k = f.k;
  if (cmd->count("--steps")) cfg.steps = f.steps;
  if (cmd->count("--seed")) cfg.seed = f.seed;
  if (cmd->count("--trials")) cfg.trials = f.trials;
  if (cmd->count("--threads")) cfg.threads = f.threads;
  if (cmd->count("--particle")) {
    cfg.particles.clear();
    for (const std::string& s : f.particles) cfg.particles.push_back(parse_particle(s));
    cfg.random_n = 0;
  }
  if (cmd->count("--random")) {
    cfg.random_n = f.random_n;
    cfg.particles.clear();
  }
  if (cmd->count("--ancilla")) {
    cfg.ancilla = qsb::AncillaInit{};
    cfg.ancilla.word = f.ancilla_word;
  }
  if (cmd->count("--alpha") || cmd->count("--beta")) {
    cfg.ancilla.is_word = false;
    cfg.ancilla.alpha_re = f.alpha;
    cfg.ancilla.alpha_im = 0.0;
    cfg.ancilla.beta_re = f.beta;
    cfg.ancilla.beta_im = 0.0;
  }
  if (cmd->count("--out")) cfg.out_csv = f.out_csv;
  if (cmd->count("--summary")) cfg.out_summary = f.out_summary;
  if (cmd->count("--format")) cfg.format = f.format;
  if (cmd->count("--fire-on-swap") || cmd->count("--no-fire-on-swap"))
    cfg.fire_on_swap = f.fire_on_swap;
  cfg.validate();
  return cfg;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void run_simulate(const CLI::App* cmd, const ScenarioFlags& f, bool print_summary) {
  const qsb::ScenarioConfig cfg = resolve_scenario(cmd, f);
  const qsb::RunResult run = qsb::run_scenario(cfg);
  qsb::write_run(run, cfg);
  if (cfg.out_csv.empty()) {
    if (cfg.format == "json")
      qsb::write_rows_json(std::cout, run.rows, cfg.meta());
    else
      qsb::write_rows_csv(std::cout, run.rows, cfg.meta());
  }
  if (print_summary && cfg.out_summary.empty())
    std::cout << run.summary.dump(2) << "\n";
}

void run_trap_time(int k, int x0, bool check) {
  nlohmann::json out;
  out["k"] = k;
  out["x0"] = x0;
  const long long tt = qsb::trapping_time(k, x0);
  out["trapping_time"] = tt;
  if (check) {
    const int M = 2 * x0 + 2;
    const qsb::StateMeta meta{M, x0, k};
    qsb::BarrierSpec spec;
    spec.x0 = x0;
    const int horizon = static_cast<int>(tt) + 3 * (2 * x0 - 1) + 4 * M + 16;
    const qsb::ResidenceResult res = qsb::measure_first_residence(
        qsb::mode_of(x0 + 1, qsb::Coin::left, M), meta, spec, horizon);
    out["check"] = {{"M", M},
                    {"entered", res.entered},
                    {"exited", res.exited},
                    {"residence", res.residence},
                    {"matches", res.exited && res.residence == tt}};
  }
  std::cout << out.dump(2) << "\n";
}

void run_efficiency(int M, int x0, int N0, int Nbar0, int Nk, double budget, bool have_nk,
                    bool have_budget) {
  const qsb::EfficiencyModel model = qsb::EfficiencyModel::from_geometry(M, x0, N0, Nbar0);
  nlohmann::json out;
  out["model"] = {{"N0", model.N0}, {"Nbar0", model.Nbar0}, {"N", model.N},
                  {"V_R", model.V_R}, {"V_bar", model.V_bar}, {"r", model.r}};
  if (have_nk) {
    const qsb::EfficiencyExact ex = qsb::efficiency_exact(model, Nk);
    const qsb::EfficiencyApprox ap = qsb::efficiency_approx(model, Nk);
    out["exact"] = {{"N_k", Nk},
                    {"k", ex.k},
                    {"qubits_needed", static_cast<long long>(std::ceil(ex.k - 1e-12))}};
    out["approx"] = {{"k_general", ap.k_general}, {"k_eq", ap.k_eq}, {"k_tiny", ap.k_tiny},
                     {"eq_regime", ap.eq_regime}, {"tiny_regime", ap.tiny_regime}};
  }
  if (have_budget)
    out["invert"] = {{"budget", budget}, {"N_k_max", qsb::invert_efficiency(model, budget)}};
  std::cout << out.dump(2) << "\n";
}

// Usage experiment sweep: one CSV row per register size, simulated mean
// trapped count next to the closed-form prediction for the same budget.
void run_efficiency_sim(int M, int x0, int N0, int Nbar0, int kmax, int trials,
                        std::uint64_t seed, int threads, const std::string& placement,
                        const std::string& out_path) {
  const qsb::EfficiencyModel model = qsb::EfficiencyModel::from_geometry(M, x0, N0, Nbar0);
  if (kmax <= 0) {
    if (Nbar0 < 2)
      throw std::invalid_argument("efficiency: --kmax required when Nbar0 < 2");
    const qsb::EfficiencyExact half = qsb::efficiency_exact(model, Nbar0 / 2);
    kmax = static_cast<int>(std::ceil(half.k - 1e-12));
  }
  qsb::MonteCarloConfig mc;
  mc.M = M;
  mc.x0 = x0;
  mc.N = model.N;
  mc.trials = trials;
  mc.seed = seed;
  mc.threads = threads;
  if (placement == "inside")
    mc.placement = qsb::Placement::inside;
  else if (placement == "everywhere")
    mc.placement = qsb::Placement::everywhere;
  else
    mc.placement = qsb::Placement::outside;

  std::ostringstream csv;
  csv << "k,trials,mean_trapped,stddev_trapped,predicted_Nk,mean_entries,"
         "mean_reflections,mean_steps,not_exhausted\n";
  for (int k = 1; k <= kmax; ++k) {
    mc.k = k;
    const qsb::MonteCarloResult r = qsb::monte_carlo_qubit_usage(mc);
    const double pred = qsb::invert_efficiency(model, static_cast<double>(k));
    csv << k << ',' << r.trials << ',' << num(r.mean_trapped) << ',' << num(r.stddev_trapped)
        << ',' << num(pred) << ',' << num(r.mean_entries) << ',' << num(r.mean_reflections)
        << ',' << num(r.mean_steps) << ',' << r.not_exhausted << '\n';
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("efficiency: cannot open \"" + out_path + "\" for writing");
    f << csv.str();
    if (!f.good()) throw std::runtime_error("efficiency: write to \"" + out_path + "\" failed");
  }
}

void run_coherence(const CLI::App* cmd, const ScenarioFlags& f, bool predict) {
  const qsb::ScenarioConfig cfg = resolve_scenario(cmd, f);
  const qsb::RunResult run = qsb::run_scenario(cfg);
  nlohmann::json out;
  out["coherence"] = run.summary["coherence"];
  out["final_norm"] = run.summary["final_norm"];
  out["qubits_consumed"] = run.summary["qubits_consumed"];
  if (predict) {
    try {
      const qsb::SparseState initial = cfg.initial_state();
      const Eigen::MatrixXcd predicted = qsb::predict_trapped_mixture(initial, cfg.barrier());
      qsb::SparseState s = initial;
      for (int t = 0; t < cfg.steps; ++t) s = qsb::step_multi(s, cfg.barrier()).first;
      out["predicted_vs_simulated_td"] =
          qsb::trace_distance(predicted, qsb::reduced_single_particle(s));
      const qsb::CoherenceMetrics pm = qsb::coherence_metrics(predicted, cfg.eps_eig_tol);
      out["predicted_rank"] = pm.rank;
    } catch (const std::invalid_argument& e) {
      out["predict_error"] = e.what();
    }
  }
  std::cout << out.dump(2) << "\n";
}

nlohmann::json slater_block(const qsb::SparseState& s, double tol) {
  try {
    const Eigen::MatrixXcd A = qsb::antisymmetric_amplitudes(s);
    const qsb::SlaterDecomposition sd = qsb::slater_rank(A, tol);
    return {{"rank", sd.rank}, {"lambdas", sd.lambdas}, {"sigmas", sd.sigmas}, {"tol", sd.tol}};
  } catch (const std::invalid_argument& e) {
    return {{"error", e.what()}};
  }
}

void run_slater(const CLI::App* cmd, const ScenarioFlags& f) {
  const qsb::ScenarioConfig cfg = resolve_scenario(cmd, f);
  qsb::SparseState s = cfg.initial_state();
  if (!s.amp.empty() && s.amp.begin()->first.cfg.n() != 2)
    throw std::invalid_argument("slater: scenario must place exactly two particles");
  nlohmann::json out;
  out["initial"] = slater_block(s, cfg.tol_slater);
  for (int t = 0; t < cfg.steps; ++t) s = qsb::step_multi(s, cfg.barrier()).first;
  out["final"] = slater_block(s, cfg.tol_slater);
  out["steps"] = cfg.steps;
  std::cout << out.dump(2) << "\n";
}

void run_beamsplit(double alpha, double beta, const std::string& side, int collective, int M,
                   int x0, bool have_M, bool have_x0) {
  qsb::BeamsplitResult res;
  if (collective > 0) {
    const int N = collective;
    const int use_x0 = have_x0 ? x0 : N + 1;
    const int use_M = have_M ? M : use_x0 + N + 1;
    qsb::BarrierSpec spec;
    spec.x0 = use_x0;
    res = qsb::beamsplit_collective(N, alpha, beta, qsb::StateMeta{use_M, use_x0, N}, spec);
  } else {
    const int use_x0 = have_x0 ? x0 : 3;
    const int use_M = have_M ? M : use_x0 + 3;
    qsb::BarrierSpec spec;
    spec.x0 = use_x0;
    const qsb::Side s = side == "left" ? qsb::Side::left : qsb::Side::right;
    res = qsb::beamsplit_scatter(s, alpha, beta, qsb::StateMeta{use_M, use_x0, 1}, spec);
  }
  std::cout << "p_confined " << num(res.p_confined) << "\n";
  std::cout << "p_escaped " << num(res.p_escaped) << "\n";
  std::cout << "disentangled " << (res.disentangled ? 1 : 0) << "\n";
  std::cout << "steps " << res.steps << "\n";
}

void run_kraus_compare(const std::string& variant, int M, int x0, int x,
                       const std::string& coin, int steps, int k) {
  const qsb::Coin c = coin == "right" || coin == "R" ? qsb::Coin::right : qsb::Coin::left;
  const int reg = k > 0 ? k : steps;  // a register per step can never run out
  const qsb::StateMeta meta{M, x0, reg};
  qsb::BarrierSpec spec;
  spec.x0 = x0;
  const qsb::SparseState initial =
      qsb::SparseState::single_particle(meta, x, c, qsb::AncillaWord::zeros(reg));

  std::vector<Eigen::MatrixXcd> traj_u;
  if (variant == "fresh")
    traj_u = qsb::fresh_qubit_reduced_trajectory(initial, spec, steps);
  else if (variant == "main")
    traj_u = qsb::unitary_reduced_trajectory(initial, spec, steps);
  else
    throw std::invalid_argument("kraus-compare: variant must be \"fresh\" or \"main\"");

  const std::vector<Eigen::MatrixXcd> traj_c =
      qsb::kraus_trajectory_single(qsb::reduced_single_particle(initial), x0, M, steps);

  nlohmann::json out;
  out["variant"] = variant;
  out["M"] = M;
  out["x0"] = x0;
  out["k"] = reg;
  out["start"] = {{"x", x}, {"coin", coin}};
  double max_td = 0.0;
  nlohmann::json per = nlohmann::json::array();
  for (int t = 0; t <= steps; ++t) {
    const double td = qsb::trace_distance(traj_u[t], traj_c[t]);
    per.push_back(td);
    max_td = std::max(max_td, td);
  }
  out["per_step_trace_distance"] = per;
  out["max_trace_distance"] = max_td;
  std::cout << out.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unitary semipermeable-barrier walk simulator"};
  app.require_subcommand(1);

  ScenarioFlags sim_f;
  bool sim_print_summary = false;
  CLI::App* sim = app.add_subcommand("simulate", "evolve a scenario and record each step");
  add_scenario_flags(sim, sim_f);
  sim->add_flag("--print-summary", sim_print_summary, "print the summary JSON to stdout");

  int tt_k = 1, tt_x0 = 2;
  bool tt_check = false;
  CLI::App* tt = app.add_subcommand("trap-time", "closed-form residence time (k+1)(2*x0-1)");
  tt->add_option("--k", tt_k, "register size")->required();
  tt->add_option("--x0", tt_x0, "barrier position")->required();
  tt->add_flag("--check", tt_check, "verify against a classical trajectory");

  int ef_M = 40, ef_x0 = 20, ef_N0 = 0, ef_Nbar0 = 20, ef_Nk = 0;
  double ef_budget = 0.0;
  CLI::App* ef = app.add_subcommand("efficiency", "qubit-budget law and its approximations");
  ef->add_option("--M", ef_M, "chain length")->required();
  ef->add_option("--x0", ef_x0, "barrier position")->required();
  ef->add_option("--N0", ef_N0, "particles initially inside")->required();
  ef->add_option("--Nbar0", ef_Nbar0, "particles initially outside")->required();
  CLI::Option* ef_nk_opt = ef->add_option("--Nk", ef_Nk, "target trapped count");
  CLI::Option* ef_budget_opt = ef->add_option("--budget", ef_budget, "invert: max N_k for k budget");
  int ef_trials = 0, ef_kmax = 0, ef_threads = 1;
  std::uint64_t ef_seed = 1;
  std::string ef_placement = "outside", ef_out;
  CLI::Option* ef_trials_opt = ef->add_option(
      "--trials", ef_trials, "simulate usage: trials per register size; emits a CSV sweep");
  ef->add_option("--kmax", ef_kmax,
                 "largest register size in the sweep (default: budget for N_k = Nbar0/2)");
  ef->add_option("--seed", ef_seed, "simulation seed");
  ef->add_option("--threads", ef_threads, "simulation worker threads");
  ef->add_option("--placement", ef_placement, "initial placement: outside|inside|everywhere")
      ->check(CLI::IsMember({"outside", "inside", "everywhere"}));
  ef->add_option("--out", ef_out, "write the sweep CSV to this path");

  ScenarioFlags coh_f;
  bool coh_predict = false;
  CLI::App* coh = app.add_subcommand("coherence", "coherence metrics of the reduced final state");
  add_scenario_flags(coh, coh_f);
  coh->add_flag("--predict", coh_predict, "compare against the predicted trapped mixture");

  ScenarioFlags sl_f;
  CLI::App* sl = app.add_subcommand("slater", "pair-decomposition rank of a two-fermion scenario");
  add_scenario_flags(sl, sl_f);

  double bs_alpha = 0.0, bs_beta = 0.0;
  std::string bs_side = "right";
  int bs_collective = 0, bs_M = 0, bs_x0 = 0;
  CLI::App* bs = app.add_subcommand("beamsplit", "programmable barrier beam splitter");
  bs->add_option("--alpha", bs_alpha, "amplitude on |0..0>")->required();
  bs->add_option("--beta", bs_beta, "amplitude on |1..1>")->required();
  bs->add_option("--side", bs_side, "incident side: left|right")
      ->check(CLI::IsMember({"left", "right"}));
  bs->add_option("--collective", bs_collective, "GHZ splitting of N staggered walkers");
  CLI::Option* bs_M_opt = bs->add_option("--M", bs_M, "chain length");
  CLI::Option* bs_x0_opt = bs->add_option("--x0", bs_x0, "barrier position");

  std::string kc_variant = "fresh", kc_coin = "left";
  int kc_M = 6, kc_x0 = 3, kc_x = 5, kc_steps = 6;
  CLI::App* kc = app.add_subcommand("kraus-compare",
                                    "reduced unitary dynamics vs the operator-sum channel");
  kc->add_option("--variant", kc_variant, "fresh|main")
      ->check(CLI::IsMember({"fresh", "main"}));
  kc->add_option("--M", kc_M, "chain length");
  kc->add_option("--x0", kc_x0, "barrier position");
  kc->add_option("--x", kc_x, "start position");
  kc->add_option("--coin", kc_coin, "start coin: left|right")
      ->check(CLI::IsMember({"left", "right"}));
  kc->add_option("--steps", kc_steps, "steps to compare");
  int kc_k = 0;
  kc->add_option("--k", kc_k, "register size (default: one qubit per step)");

  sim->callback([&] { run_simulate(sim, sim_f, sim_print_summary); });
  tt->callback([&] { run_trap_time(tt_k, tt_x0, tt_check); });
  ef->callback([&] {
    if (ef_trials_opt->count() > 0)
      run_efficiency_sim(ef_M, ef_x0, ef_N0, ef_Nbar0, ef_kmax, ef_trials, ef_seed, ef_threads,
                         ef_placement, ef_out);
    else
      run_efficiency(ef_M, ef_x0, ef_N0, ef_Nbar0, ef_Nk, ef_budget,
                     ef_nk_opt->count() > 0, ef_budget_opt->count() > 0);
  });
  coh->callback([&] { run_coherence(coh, coh_f, coh_predict); });
  sl->callback([&] { run_slater(sl, sl_f); });
  bs->callback([&] {
    run_beamsplit(bs_alpha, bs_beta, bs_side, bs_collective, bs_M, bs_x0,
                  bs_M_opt->count() > 0, bs_x0_opt->count() > 0);
  });
  kc->callback([&] {
    run_kraus_compare(kc_variant, kc_M, kc_x0, kc_x, kc_coin, kc_steps, kc_k);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
