// Acceptance gate: ten numbered criteria, one PASS/FAIL line each, tolerances
// pinned inline next to the checks. Exit status is 0 only if every selected
// criterion passed; a criterion that cannot hold is still checked exactly as
// stated and reported as a failure, never weakened.
//
// Usage: qsb_acceptance [n]   -- run criterion n alone; all ten without args.
#include <unsupported/Eigen/KroneckerProduct>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qsb/analysis.hpp"
#include "qsb/channels.hpp"
#include "qsb/dynamics.hpp"
#include "qsb/hilbert.hpp"
#include "test_util.hpp"

using namespace qsb;

namespace {

std::string fnum(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void emit(int n, bool ok, const std::string& detail) {
  std::printf("C%d %s: %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
}

void note(const std::string& s) { std::printf("  note: %s\n", s.c_str()); }

BarrierSpec spec_at(int x0) {
  BarrierSpec spec;
  spec.x0 = x0;
  return spec;
}

Eigen::VectorXcd antisym_pair_vec(int i, int j, int d) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d * d);
  const double isq = 1.0 / std::sqrt(2.0);
  v(i * d + j) = isq;
  v(j * d + i) = -isq;
  return v;
}

// ---------------------------------------------------------------------------
// C1: residence time of every outside basis start equals (k+1)(2 x0 - 1)
// exactly, across M in 6..10, x0 in {2,3,4}, k in 1..4, in under a minute.
bool c1() {
  const auto start = std::chrono::steady_clock::now();
  long checked = 0, wrong = 0;
  std::string first_bad;
  for (int M = 6; M <= 10; ++M)
    for (int x0 : {2, 3, 4})
      for (int k = 1; k <= 4; ++k) {
        const StateMeta meta{M, x0, k};
        const BarrierSpec spec = spec_at(x0);
        const long long want = trapping_time(k, x0);
        const int horizon = (k + 2) * (2 * x0 - 1) + 4 * M + 32;
        for (int m = 0; m < 2 * M; ++m) {
          if (position_of(m) <= x0) continue;  // outside starts only
          const ResidenceResult res = measure_first_residence(m, meta, spec, horizon);
          ++checked;
          if (!res.entered || !res.exited || res.residence != want) {
            ++wrong;
            if (first_bad.empty()) {
              std::ostringstream ss;
              ss << "M=" << M << " x0=" << x0 << " k=" << k << " start " << mode_label(m)
                 << ": residence " << res.residence << " != " << want;
              first_bad = ss.str();
            }
          }
        }
      }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = wrong == 0 && secs < 60.0;
  std::ostringstream ss;
  if (wrong == 0)
    ss << "residence == (k+1)(2x0-1) exactly for all " << checked
       << " outside basis starts across 60 geometries (" << fnum(secs) << " s)";
  else
    ss << wrong << "/" << checked << " starts off, first: " << first_bad;
  emit(1, ok, ss.str());
  return ok;
}

// ---------------------------------------------------------------------------
// C2: after (j-1)(2 x0 - 1) in-region steps the register word reads
// 0^(k-j) 0 1^(j-1) bit-exactly, and all-ones after k(2 x0 - 1), for k <= 6.
bool c2() {
  long words_checked = 0, wrong = 0;
  std::string first_bad;
  for (int k = 1; k <= 6; ++k)
    for (auto [M, x0] : {std::pair{7, 2}, {7, 3}, {9, 2}, {9, 3}, {8, 4}}) {
      const int T = 2 * x0 - 1;
      const StateMeta meta{M, x0, k};
      const BarrierSpec spec = spec_at(x0);
      const int horizon = 2 * M + (k + 1) * T + 4;
      for (int m0 = 0; m0 < 2 * M; ++m0) {
        if (position_of(m0) <= x0) continue;
        std::vector<int> modes{m0};
        AncillaWord word = AncillaWord::zeros(k);
        std::vector<std::string> word_at(horizon + 1);
        int t_enter = -1;
        for (int t = 1; t <= horizon; ++t) {
          const ClassicalStepInfo info = classical_step(modes, word, meta, spec);
          if (info.fired && t_enter < 0) t_enter = t;
          word_at[t] = word.str();
        }
        auto check = [&](int t, const std::string& want) {
          ++words_checked;
          if (word_at[t] != want) {
            ++wrong;
            if (first_bad.empty()) {
              std::ostringstream ss;
              ss << "M=" << M << " x0=" << x0 << " k=" << k << " start " << mode_label(m0)
                 << " t=" << t << ": word " << word_at[t] << " != " << want;
              first_bad = ss.str();
            }
          }
        };
        for (int j = 1; j <= k; ++j)
          check(t_enter + (j - 1) * T, std::string(k - j + 1, '0') + std::string(j - 1, '1'));
        check(t_enter + k * T, std::string(k, '1'));
      }
    }
  const bool ok = wrong == 0;
  std::ostringstream ss;
  if (ok)
    ss << "register word 0^(k-j) 0 1^(j-1) at every fire epoch, all-ones at k(2x0-1): "
       << words_checked << " words bit-exact, k <= 6";
  else
    ss << wrong << "/" << words_checked << " words off, first: " << first_bad;
  emit(2, ok, ss.str());
  return ok;
}

// ---------------------------------------------------------------------------
// C3: the dense step matrix is unitary to 1e-12 for M <= 5, k <= 3, N <= 2,
// and 1000 random forward/backward round trips return with fidelity
// >= 1 - 1e-12.
bool c3() {
  double worst_unitary = 0.0;
  for (int M = 3; M <= 5; ++M)
    for (int x0 = 2; x0 <= M - 1; ++x0)
      for (int k = 1; k <= 3; ++k)
        for (int N = 1; N <= 2; ++N) {
          const StateMeta meta{M, x0, k};
          const BarrierSpec spec = spec_at(x0);
          const Eigen::MatrixXcd D = dense_step_matrix(meta, spec, N);
          const Eigen::MatrixXcd Dinv = dense_inverse_step_matrix(meta, spec, N);
          const int d = static_cast<int>(D.rows());
          const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(d, d);
          worst_unitary = std::max(worst_unitary, (D.adjoint() * D - I).cwiseAbs().maxCoeff());
          worst_unitary = std::max(worst_unitary, (Dinv - D.adjoint()).cwiseAbs().maxCoeff());
        }

  std::mt19937_64 rng(20260816ULL);
  const std::vector<std::tuple<int, int, int>> geoms = {{4, 2, 2}, {5, 3, 3}, {5, 2, 1}, {4, 3, 2}};
  double worst_fidelity = 1.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto [M, x0, k] = geoms[trial % geoms.size()];
    const StateMeta meta{M, x0, k};
    const BarrierSpec spec = spec_at(x0);
    const int N = 1 + trial % 2;
    const SparseState s0 = qsb_test::random_state(meta, N, 4, rng);
    SparseState s = s0;
    const int steps = 4 + trial % 7;
    for (int t = 0; t < steps; ++t) s = step_multi(s, spec).first;
    for (int t = 0; t < steps; ++t) s = inverse_step(s, spec);
    worst_fidelity = std::min(worst_fidelity, std::norm(inner_product(s0, s)));
  }

  const bool ok = worst_unitary < 1e-12 && worst_fidelity >= 1.0 - 1e-12;
  std::ostringstream ss;
  ss << "dense step unitary to " << fnum(worst_unitary)
     << " (tol 1e-12) across 36 (M,x0,k,N) cells; 1000 random round trips, worst fidelity 1-"
     << fnum(1.0 - worst_fidelity) << " (tol 1e-12)";
  emit(3, ok, ss.str());
  return ok;
}

// ---------------------------------------------------------------------------
// C4: the reduced channel funnels both reference starts onto the same point
// state after 4 steps (trace distance < 1e-12) while the unitary model keeps
// them exactly orthogonal.
bool c4() {
  const int M = 6, x0 = 2;
  const StateMeta meta{M, x0, 2};
  const BarrierSpec spec = spec_at(x0);
  const SparseState a = SparseState::single_particle(meta, 3, Coin::left, AncillaWord::zeros(2));
  const SparseState b = SparseState::single_particle(meta, 6, Coin::left, AncillaWord::zeros(2));

  const auto ta = kraus_trajectory_single(reduced_single_particle(a), x0, M, 4);
  const auto tb = kraus_trajectory_single(reduced_single_particle(b), x0, M, 4);
  Eigen::MatrixXcd target = Eigen::MatrixXcd::Zero(2 * M, 2 * M);
  const int point = mode_of(x0, Coin::left, M);
  target(point, point) = 1.0;
  const double d1 = trace_distance(ta[4], target);
  const double d2 = trace_distance(tb[4], target);
  const double d12 = trace_distance(ta[4], tb[4]);

  SparseState ua = a, ub = b;
  for (int t = 0; t < 4; ++t) {
    ua = step_single(ua, spec).first;
    ub = step_single(ub, spec).first;
  }
  const double overlap = std::abs(inner_product(ua, ub));

  const bool ok = d1 < 1e-12 && d2 < 1e-12 && d12 < 1e-12 && overlap < 1e-12;
  std::ostringstream ss;
  ss << "channel funnels both starts onto " << mode_label(point) << " (TD " << fnum(d1) << ", "
     << fnum(d2) << ", mutual " << fnum(d12)
     << ", tol 1e-12) while the unitary overlap stays " << fnum(overlap) << " (tol 1e-12)";
  emit(4, ok, ss.str());
  return ok;
}

// ---------------------------------------------------------------------------
// C5: the reduced state of the fresh-qubit dilation must match the
// operator-sum channel within 1e-10 at every step for 50 random spatial
// states (M = 8, 30 steps). The projective channel erases the fold coherence
// the dilation keeps, so this is expected to fail on superpositions; the
// check runs exactly as stated and the failure is reported honestly.
bool c5() {
  const int M = 8, x0 = 3, steps = 30;
  const StateMeta meta{M, x0, steps};
  const BarrierSpec spec = spec_at(x0);
  std::mt19937_64 rng(555ULL);

  long comparisons = 0, violations = 0;
  double max_td = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const SparseState s0 = qsb_test::random_spatial_state(meta, AncillaWord::zeros(steps), rng);
    const auto fresh = fresh_qubit_reduced_trajectory(s0, spec, steps);
    const auto chan = kraus_trajectory_single(reduced_single_particle(s0), x0, M, steps);
    for (int t = 0; t <= steps; ++t) {
      const double td = trace_distance(fresh[t], chan[t]);
      ++comparisons;
      max_td = std::max(max_td, td);
      if (td > 1e-10) ++violations;
    }
  }

  // Classical starts do agree; the discrepancy is purely in coherences.
  double basis_max = 0.0;
  for (int m = 0; m < 2 * M; ++m) {
    const SparseState s0 = SparseState::basis_ket(meta, FermionConfig({m}), AncillaWord::zeros(steps));
    const auto fresh = fresh_qubit_reduced_trajectory(s0, spec, steps);
    const auto chan = kraus_trajectory_single(reduced_single_particle(s0), x0, M, steps);
    for (int t = 0; t <= steps; ++t)
      basis_max = std::max(basis_max, trace_distance(fresh[t], chan[t]));
  }

  const bool ok = violations == 0;
  std::ostringstream ss;
  if (ok)
    ss << "fresh-qubit dilation matches the channel to " << fnum(max_td)
       << " on 50 random states (tol 1e-10)";
  else
    ss << violations << "/" << comparisons
       << " stepwise comparisons exceed 1e-10 on random superpositions (max trace distance "
       << fnum(max_td) << ")";
  emit(5, ok, ss.str());
  note("all " + std::to_string(2 * M) + " basis-ket starts agree, max trace distance " +
       fnum(basis_max));
  note("the dilation's exact reduced pair is {1 - |x0,R><x0,R|, |x0,L><x0,R|}, which keeps the "
       "fold coherent; the projective pair dephases |x0,R> against every other mode, e.g. "
       "trace distance 0.5 after one step from (|x0-1,R>+|x0+2,R>)/sqrt(2)");
  return ok;
}

// ---------------------------------------------------------------------------
// C6: two-fermion operator-sum evolution compresses the reference pair onto
// antisym(|1,R>,|1,L>) at t = 6 with fidelity > 1 - 1e-10, stays supported on
// the antisymmetric subspace, and the set satisfies sum K^+K = 1 to 1e-12.
// The last clause cannot hold: all three operators annihilate the
// barrier-meeting pair, so the identity fails exactly there. Checked as
// stated, reported honestly.
bool c6() {
  const int M = 7, x0 = 2;
  const int d = 2 * M;
  const StateMeta meta{M, x0, 1};

  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(d * d, d * d);  // particle exchange
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) P(j * d + i, i * d + j) = 1.0;

  const SparseState pair0 = SparseState::basis_ket(
      meta, FermionConfig({mode_of(3, Coin::left, M), mode_of(7, Coin::left, M)}),
      AncillaWord::zeros(1));
  Eigen::MatrixXcd rho = reduced_two_fermion_first_quantized(pair0);
  double worst_antisym = 0.0, worst_trace = 0.0;
  for (int t = 1; t <= 6; ++t) {
    rho = channel_step_two_fermion(rho, x0, M);
    worst_antisym = std::max(worst_antisym, (P * rho + rho).cwiseAbs().maxCoeff());
    worst_trace = std::max(worst_trace, std::abs(rho.trace().real() - 1.0));
  }
  const double fid = fidelity_with_pure(
      rho, antisym_pair_vec(mode_of(1, Coin::right, M), mode_of(1, Coin::left, M), d));
  const bool traj_ok = fid > 1.0 - 1e-10 && worst_antisym < 1e-12 && worst_trace < 1e-12;

  const KrausSet set = kraus_two_fermion(x0, M);
  const Eigen::MatrixXcd defect = completeness_defect(set);
  const double defect_max = defect.cwiseAbs().maxCoeff();
  const bool complete_ok = defect_max < 1e-12;

  // Pin down exactly where completeness fails: only on the meeting pair.
  const int mr = mode_of(x0, Coin::right, M), ml = mode_of(x0, Coin::left, M);
  const Eigen::VectorXcd omega = antisym_pair_vec(mr, ml, d);
  const double on_meeting = (defect * omega + omega).norm();
  double off_meeting = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      if (i == mr && j == ml) continue;
      off_meeting = std::max(off_meeting, (defect * antisym_pair_vec(i, j, d)).norm());
    }

  const bool ok = traj_ok && complete_ok;
  std::ostringstream ss;
  ss << "t=6 compression fidelity 1-" << fnum(1.0 - fid)
     << " (tol 1e-10), antisymmetry preserved to " << fnum(worst_antisym)
     << ", trace to " << fnum(worst_trace) << "; sum K^+K = 1 "
     << (complete_ok ? "holds" : "FAILS") << " (max |defect| " << fnum(defect_max)
     << ", tol 1e-12)";
  emit(6, ok, ss.str());
  note("the defect acts as -1 on the barrier-meeting pair (|defect*w + w| = " + fnum(on_meeting) +
       ") and vanishes on every other antisymmetric basis state (max " + fnum(off_meeting) +
       "): completeness holds exactly on the meeting-free subspace");
  return ok;
}

// ---------------------------------------------------------------------------
// C7: the predicted trapped mixture matches simulation at t = K*T within
// 1e-10 for 100 random states, and the two extreme constructions give purity
// 1 (single block) and 1/K (uniform over blocks). The second extreme's
// claimed value is wrong -- the uniform same-offset construction collapses
// every block onto the same site, so prediction AND simulation both give
// purity 1. Checked as claimed, reported honestly.
bool c7() {
  std::mt19937_64 rng(13131313ULL);
  long rand_bad = 0;
  double rand_max_td = 0.0;
  for (auto [M, x0, trials] : {std::tuple{4, 2, 34}, {6, 3, 33}, {8, 3, 33}}) {
    const int T = 2 * x0 - 1;
    const int K = (2 * M + T - 1) / T;
    const StateMeta meta{M, x0, K + 2};
    const BarrierSpec spec = spec_at(x0);
    for (int trial = 0; trial < trials; ++trial) {
      const SparseState s0 = qsb_test::random_spatial_state(meta, AncillaWord::zeros(K + 2), rng);
      const Eigen::MatrixXcd predicted = predict_trapped_mixture(s0, spec);
      SparseState s = s0;
      for (int t = 0; t < K * T; ++t) s = step_single(s, spec).first;
      const double td = trace_distance(predicted, reduced_single_particle(s));
      rand_max_td = std::max(rand_max_td, td);
      if (td > 1e-10) ++rand_bad;
    }
  }

  // Extremes on M = 8, x0 = 3: T = 5, K = 4.
  const int M = 8, x0 = 3, T = 5, K = 4;
  const StateMeta meta{M, x0, K + 2};
  const BarrierSpec spec = spec_at(x0);
  auto purity_after = [&](const SparseState& s0) {
    SparseState s = s0;
    for (int t = 0; t < K * T; ++t) s = step_single(s, spec).first;
    const Eigen::MatrixXcd rho = reduced_single_particle(s);
    return (rho * rho).trace().real();
  };

  // Extreme 1: all amplitude inside one period block -> pure.
  SparseState single_block(meta);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 1; t <= T; ++t)
    single_block.add(FermionConfig({sector_mode(t + T, x0, M)}), AncillaWord::zeros(K + 2),
                     cplx(g(rng), g(rng)));
  single_block = normalize(single_block);
  const double purity_one = purity_after(single_block);
  const bool extreme1_ok = std::abs(purity_one - 1.0) < 1e-10;

  // Extreme 2 as claimed: uniform over blocks at the same offset -> 1/K.
  const int t0 = 1;
  SparseState uniform(meta);
  for (int n = 0; n < K; ++n)
    uniform.add(FermionConfig({sector_mode(t0 + n * T, x0, M)}), AncillaWord::zeros(K + 2),
                cplx(1.0 / std::sqrt(double(K)), 0.0));
  const double purity_uniform = purity_after(uniform);
  const double pred_purity_uniform = [&] {
    const Eigen::MatrixXcd r = predict_trapped_mixture(uniform, spec);
    return (r * r).trace().real();
  }();
  const bool extreme2_ok = std::abs(purity_uniform - 1.0 / K) < 1e-10;

  // The construction that actually reaches 1/K: distinct offsets per block.
  const std::vector<int> offsets = {2, 3, 4, 1};  // block n keeps label offsets[n]
  SparseState staggered(meta);
  for (int n = 0; n < K; ++n)
    staggered.add(FermionConfig({sector_mode(offsets[n] + n * T, x0, M)}),
                  AncillaWord::zeros(K + 2), cplx(1.0 / std::sqrt(double(K)), 0.0));
  const double purity_staggered = purity_after(staggered);

  const bool ok = rand_bad == 0 && extreme1_ok && extreme2_ok;
  std::ostringstream ss;
  ss << "100 random states: prediction vs simulation max TD " << fnum(rand_max_td)
     << (rand_bad ? " with violations" : " (tol 1e-10)") << "; single-block purity "
     << fnum(purity_one) << " (want 1); uniform-block purity " << fnum(purity_uniform)
     << " vs claimed 1/K = " << fnum(1.0 / K) << (extreme2_ok ? "" : " -- claim FAILS");
  emit(7, ok, ss.str());
  note("prediction and simulation agree on the uniform construction (both give purity " +
       fnum(pred_purity_uniform) +
       "): every block holds the same offset, so all blocks collapse onto one site");
  note("staggering the offsets across blocks reaches the claimed value exactly: purity " +
       fnum(purity_staggered) + " = 1/K");
  return ok;
}

// ---------------------------------------------------------------------------
// C8: paired-label two-fermion states drop from Slater rank K(T-1)/2 to
// (T-1)/2 after K*T steps, rank read at tolerance 1e-8, for the three
// configurations (T,K) = (3,2), (5,2), (5,3).
bool c8() {
  struct Cfg {
    int T, K, M, x0;
  };
  const std::vector<Cfg> cfgs = {{3, 2, 3, 2}, {5, 2, 5, 3}, {5, 3, 7, 3}};
  bool ok = true;
  std::ostringstream ss;
  for (size_t ci = 0; ci < cfgs.size(); ++ci) {
    const auto [T, K, M, x0] = cfgs[ci];
    const int k = 2 * K + 2;
    const StateMeta meta{M, x0, k};
    const BarrierSpec spec = spec_at(x0);

    const int pairs = K * (T - 1) / 2;
    SparseState s(meta);
    const double amp = 1.0 / std::sqrt(double(pairs));
    for (int n = 0; n < K; ++n)
      for (int t = 1; t <= (T - 1) / 2; ++t) {
        const int m1 = sector_mode(2 * t - 1 + n * T, x0, M);
        const int m2 = sector_mode(2 * t + n * T, x0, M);
        const auto canon = config_from_modes({m1, m2});
        s.add(canon->first, AncillaWord::zeros(k), amp * double(canon->second));
      }

    const int rank0 = slater_rank(antisymmetric_amplitudes(s)).rank;
    for (int t = 0; t < K * T; ++t) s = step_multi(s, spec).first;
    const int rank1 = slater_rank(antisymmetric_amplitudes(s)).rank;

    const bool this_ok = rank0 == pairs && rank1 == (T - 1) / 2;
    ok = ok && this_ok;
    if (ci) ss << "; ";
    ss << "(T=" << T << ",K=" << K << "): rank " << rank0 << "->" << rank1 << " (want " << pairs
       << "->" << (T - 1) / 2 << (this_ok ? ")" : ") MISMATCH");
  }
  emit(8, ok, "pair-decomposition rank compression at tol 1e-8: " + ss.str());
  return ok;
}

// ---------------------------------------------------------------------------
// C9: the sampled mean trapped count (1000 trials, N = 20, k = 14) lands
// within 15% of the budget-law inversion, and each closed form tracks the
// exact sum within 5% in its stated regime.
bool c9() {
  MonteCarloConfig cfg;  // defaults: M=40 x0=20 k=14 N=20 outside, no swap fires
  cfg.trials = 1000;
  cfg.seed = 7;
  cfg.threads = 4;
  const MonteCarloResult mc = monte_carlo_qubit_usage(cfg);
  const EfficiencyModel model = EfficiencyModel::from_geometry(cfg.M, cfg.x0, 0, cfg.N);
  const int predicted = invert_efficiency(model, cfg.k);
  const double rel = std::abs(mc.mean_trapped - predicted) / double(predicted);
  const bool mc_ok = rel < 0.15;

  double worst_general = 0.0, worst_eq = 0.0, worst_tiny = 0.0;
  const EfficiencyModel gen = EfficiencyModel::from_geometry(40, 20, 0, 100);
  for (int nk : {10, 50, 90}) {
    const double exact = efficiency_exact(gen, nk).k;
    worst_general = std::max(worst_general,
                             std::abs(efficiency_approx(gen, nk).k_general - exact) / exact);
  }
  const EfficiencyModel eq = EfficiencyModel::from_geometry(99, 50, 0, 100);
  for (int nk : {10, 30, 50, 70, 90}) {
    const double exact = efficiency_exact(eq, nk).k;
    worst_eq = std::max(worst_eq, std::abs(efficiency_approx(eq, nk).k_eq - exact) / exact);
  }
  for (int N0 : {0, 10}) {
    const EfficiencyModel tiny = EfficiencyModel::from_geometry(40, 20, N0, 1000 - N0);
    for (int nk : {10, 20, 50}) {
      const double exact = efficiency_exact(tiny, nk).k;
      worst_tiny = std::max(worst_tiny, std::abs(efficiency_approx(tiny, nk).k_tiny - exact) / exact);
    }
  }
  const bool forms_ok = worst_general < 0.05 && worst_eq < 0.05 && worst_tiny < 0.05;

  const bool ok = mc_ok && forms_ok;
  std::ostringstream ss;
  ss << "sampled mean trapped " << fnum(mc.mean_trapped) << " vs inverted budget " << predicted
     << " (rel dev " << fnum(rel) << ", tol 0.15, " << mc.not_exhausted
     << " unexhausted trials); closed forms within " << fnum(worst_general) << "/" << fnum(worst_eq)
     << "/" << fnum(worst_tiny) << " rel (general/equal-volume/dilute, tol 0.05)";
  emit(9, ok, ss.str());

  // The budget law balances mean arrival rates from the two sides, which
  // presumes entries and reflections interleave. At this geometry they cannot:
  // every outside walker reaches the barrier within one outside period
  // (2(M-x0)+1 = 41 steps) while the first reflection trails the first entry
  // by a full region period (2x0-1 = 39 steps), so a 14-qubit budget is gone
  // before any reflection fires.
  note("at exhaustion: mean entries " + fnum(mc.mean_entries) + ", mean reflections " +
       fnum(mc.mean_reflections) + ", mean steps " + fnum(mc.mean_steps) +
       "; entries alone consume the register before the first return trip ends");

  // Where arrivals are sparse the same dynamics does track the law: three
  // walkers on a long chain space their entries ~V_bar/N apart, far beyond
  // the region period, and the budget is spent on reflections as the law
  // assumes.
  MonteCarloConfig dil;
  dil.M = 200;
  dil.x0 = 5;
  dil.N = 3;
  dil.k = 24;  // budget for two trapped walkers under the same inversion
  dil.trials = 1000;
  dil.seed = 7;
  dil.threads = 4;
  const MonteCarloResult dmc = monte_carlo_qubit_usage(dil);
  const EfficiencyModel dmodel = EfficiencyModel::from_geometry(dil.M, dil.x0, 0, dil.N);
  const int dpred = invert_efficiency(dmodel, dil.k);
  const double drel = std::abs(dmc.mean_trapped - dpred) / double(dpred);
  note("sparse-arrival check (N=3, M=200, x0=5, k=24): mean trapped " + fnum(dmc.mean_trapped) +
       " vs inverted budget " + fnum(dpred) + " (rel dev " + fnum(drel) +
       "), mean reflections " + fnum(dmc.mean_reflections));

  // The dilute form's guards are load-bearing: right at the batch-size guard
  // the quadratic truncation already slips past 5%.
  const EfficiencyModel edge = EfficiencyModel::from_geometry(40, 20, 0, 1000);
  const double exact_edge = efficiency_exact(edge, 100).k;
  const double rel_edge = std::abs(efficiency_approx(edge, 100).k_tiny - exact_edge) / exact_edge;
  note("dilute form at the guard boundary N_k = 0.1 N misses by " + fnum(rel_edge) +
       " rel; the guard flags deliberately exclude it");
  return ok;
}

// ---------------------------------------------------------------------------
// C10: beam-splitter weights |alpha|^2 / |beta|^2 exact to 1e-12, register
// disentangled, for single-walker scattering from both sides and collective
// splitting of N <= 3 walkers.
bool c10() {
  const cplx alpha(0.48, 0.36), beta(-0.64, 0.48);  // |alpha|^2 = 0.36
  const double pa = std::norm(alpha), pb = std::norm(beta);
  bool ok = true;
  double worst = 0.0;

  const StateMeta meta{6, 3, 1};
  const BarrierSpec spec = spec_at(3);
  for (Side side : {Side::right, Side::left}) {
    const BeamsplitResult r = beamsplit_scatter(side, alpha, beta, meta, spec);
    worst = std::max({worst, std::abs(r.p_confined - pa), std::abs(r.p_escaped - pb)});
    ok = ok && r.disentangled && std::abs(r.p_confined - pa) < 1e-12 &&
         std::abs(r.p_escaped - pb) < 1e-12;
  }

  for (int N : {1, 2, 3}) {
    const int x0 = N + 1, M = x0 + N + 1;
    const StateMeta gm{M, x0, N};
    const BeamsplitResult r = beamsplit_collective(N, alpha, beta, gm, spec_at(x0));
    worst = std::max({worst, std::abs(r.p_confined - pa), std::abs(r.p_escaped - pb)});
    ok = ok && r.disentangled && r.steps == N + 1 && std::abs(r.p_confined - pa) < 1e-12 &&
         std::abs(r.p_escaped - pb) < 1e-12;
    for (const auto& [key, a] : r.final_state.amp)
      ok = ok && key.word.str() == std::string(N, '1');
  }

  std::ostringstream ss;
  ss << "scatter (both sides) and collective splitting (N = 1..3) hit |alpha|^2 / |beta|^2 "
        "within "
     << fnum(worst) << " (tol 1e-12), register disentangled in every case";
  emit(10, ok, ss.str());
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  using CriterionFn = bool (*)();
  const CriterionFn criteria[10] = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
  bool all_ok = true;
  for (int i = 1; i <= 10; ++i) {
    if (only != 0 && only != i) continue;
    bool ok = false;
    try {
      ok = criteria[i - 1]();
    } catch (const std::exception& e) {
      emit(i, false, std::string("unexpected exception: ") + e.what());
    }
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
