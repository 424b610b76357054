#include "qsb/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

namespace qsb {

long long trapping_time(int k, int x0) {
  if (k < 0) throw std::invalid_argument("trapping_time: negative register size");
  if (x0 < 2) throw std::invalid_argument("trapping_time: barrier needs x0 >= 2");
  return static_cast<long long>(k + 1) * (2LL * x0 - 1LL);
}

int sector_label(int mode, int x0, int M) {
  const int x = position_of(mode);
  const Coin c = coin_of(mode);
  const int T = 2 * x0 - 1;
  if (c == Coin::right && x < x0) return x0 - x;
  if (c == Coin::left && x <= x0) return x0 - 1 + x;
  if (c == Coin::left) return T + (x - x0);
  return T + (M - x0) + 1 + (M - x);
}

int sector_mode(int label, int x0, int M) {
  if (label < 1 || label > 2 * M) throw std::invalid_argument("sector_mode: label out of range");
  for (int m = 0; m < 2 * M; ++m)
    if (sector_label(m, x0, M) == label) return m;
  throw std::logic_error("sector_mode: label map is not a bijection");
}

SectorDecomposition sector_decompose(const SparseState& s, const BarrierSpec& spec) {
  validate_barrier(s.meta, spec);
  if (s.amp.empty()) throw std::invalid_argument("sector_decompose: empty state");

  SectorDecomposition dec;
  dec.T_period = 2 * spec.x0 - 1;
  dec.K_sectors = (2 * s.meta.M + dec.T_period - 1) / dec.T_period;
  dec.word = s.amp.begin()->first.word;
  dec.components.assign(dec.K_sectors, Eigen::VectorXcd::Zero(dec.T_period));

  for (const auto& [key, amp] : s.amp) {
    if (key.cfg.n() != 1)
      throw std::invalid_argument("sector_decompose: single-particle states only");
    if (!(key.word == dec.word))
      throw std::invalid_argument("sector_decompose: register word must be definite");
    const int l = sector_label(key.cfg.modes[0], spec.x0, s.meta.M);
    const int n = (l - 1) / dec.T_period;
    const int t = l - n * dec.T_period;
    dec.components[n](t - 1) = amp;
  }
  return dec;
}

SparseState state_from_sectors(const SectorDecomposition& dec, const StateMeta& meta,
                               const BarrierSpec& spec) {
  validate_barrier(meta, spec);
  SparseState s(meta);
  for (int n = 0; n < static_cast<int>(dec.components.size()); ++n) {
    for (int t = 1; t <= dec.T_period; ++t) {
      const cplx a = dec.components[n](t - 1);
      if (a == cplx(0.0, 0.0)) continue;
      const int label = t + n * dec.T_period;
      if (label > 2 * meta.M)
        throw std::invalid_argument("state_from_sectors: component outside the mode range");
      s.add(FermionConfig{{sector_mode(label, spec.x0, meta.M)}}, dec.word, a);
    }
  }
  return s;
}

Eigen::MatrixXcd predict_trapped_mixture(const SparseState& initial, const BarrierSpec& spec) {
  const SectorDecomposition dec = sector_decompose(initial, spec);
  if (dec.word.bits != 0)
    throw std::invalid_argument("predict_trapped_mixture: register must start all zeros");
  if (initial.meta.k <= dec.K_sectors)
    throw std::invalid_argument("predict_trapped_mixture: register too small, needs k > K");

  const int d = 2 * initial.meta.M;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  for (int n = 0; n < dec.K_sectors; ++n) {
    Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(d);
    for (int t = 1; t <= dec.T_period; ++t)
      phi(sector_mode(t, spec.x0, initial.meta.M)) = dec.components[n](t - 1);
    rho += phi * phi.adjoint();
  }
  return rho;
}

CoherenceMetrics coherence_metrics(const Eigen::MatrixXcd& rho, double eps) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("coherence_metrics: square input");
  CoherenceMetrics cm;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()));
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > eps) ++cm.rank;
  cm.purity = (rho * rho).trace().real();
  for (int i = 0; i < rho.rows(); ++i)
    for (int j = 0; j < rho.cols(); ++j)
      if (i != j) cm.l1_offdiag += std::abs(rho(i, j));
  return cm;
}

// --- Slater ------------------------------------------------------------------

SlaterDecomposition slater_rank(const Eigen::MatrixXcd& A, double tol_abs) {
  const int d = static_cast<int>(A.rows());
  if (A.cols() != d) throw std::invalid_argument("slater_rank: square input required");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A + A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("slater_rank: input is not antisymmetric");

  Eigen::MatrixXcd R = 0.5 * (A - A.transpose());
  const double nrm = R.norm();
  if (nrm == 0.0) throw std::invalid_argument("slater_rank: zero input");
  R /= nrm;

  SlaterDecomposition out;
  Eigen::MatrixXcd cols(d, d);
  int found = 0;
  double sigma_max = 0.0;

  // Peel off invariant planes: the top eigenpair (sigma^2, e) of R R^dag gives
  // f = R conj(e) / sigma with R conj(f) = -sigma e, so sigma (f e^T - e f^T)
  // is an exact rank-2 skew summand of R.
  while (found + 1 < d) {
    R = 0.5 * (R - R.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R * R.adjoint());
    const double lam = es.eigenvalues()(d - 1);
    const double sigma = std::sqrt(std::max(lam, 0.0));
    if (found == 0) sigma_max = sigma;
    if (sigma <= 1e-14 * std::max(sigma_max, 1e-300)) break;

    Eigen::VectorXcd e = es.eigenvectors().col(d - 1);
    for (int j = 0; j < found; ++j) e -= cols.col(j) * (cols.col(j).adjoint() * e);
    if (e.norm() < 1e-8) break;  // numerically exhausted
    e.normalize();
    Eigen::VectorXcd f = R * e.conjugate() / sigma;
    f -= e * (e.adjoint() * f);
    for (int j = 0; j < found; ++j) f -= cols.col(j) * (cols.col(j).adjoint() * f);
    if (f.norm() < 1e-8) break;
    f.normalize();

    cols.col(found) = f;
    cols.col(found + 1) = e;
    out.sigmas.push_back(sigma);
    R -= sigma * (f * e.transpose() - e * f.transpose());
    found += 2;
  }

  out.tol = tol_abs >= 0.0 ? tol_abs : 1e-8 * sigma_max;
  for (double s : out.sigmas) {
    out.lambdas.push_back(2.0 * s * s);
    if (s > out.tol) ++out.rank;
  }

  // Complete the pair basis with an orthonormal kernel (twice-projected
  // Gram-Schmidt over coordinate vectors).
  out.pair_basis = Eigen::MatrixXcd::Zero(d, d);
  out.pair_basis.leftCols(found) = cols.leftCols(found);
  int got = found;
  for (int j = 0; j < d && got < d; ++j) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Unit(d, j);
    for (int pass = 0; pass < 2; ++pass)
      for (int c = 0; c < got; ++c)
        v -= out.pair_basis.col(c) * (out.pair_basis.col(c).adjoint() * v);
    if (v.norm() > 1e-6) out.pair_basis.col(got++) = v.normalized();
  }
  if (got != d) throw std::logic_error("slater_rank: failed to complete pair basis");
  return out;
}

int skew_rank_gauss(Eigen::MatrixXcd A, double tol) {
  const int d = static_cast<int>(A.rows());
  A = 0.5 * (A - A.transpose());
  std::vector<char> alive(d, 1);
  int pairs = 0;
  for (;;) {
    double best = 0.0;
    int bi = -1, bj = -1;
    for (int i = 0; i < d; ++i) {
      if (!alive[i]) continue;
      for (int j = 0; j < d; ++j) {
        if (!alive[j] || j == i) continue;
        const double v = std::abs(A(i, j));
        if (v > best) { best = v; bi = i; bj = j; }
      }
    }
    if (best <= tol) break;
    // Congruence elimination with pivot pair (bi, bj): row and column updates
    // mirror each other, so skewness is preserved.
    for (int k = 0; k < d; ++k) {
      if (!alive[k] || k == bi || k == bj) continue;
      const cplx f = A(k, bj) / A(bi, bj);
      A.row(k) -= f * A.row(bi);
      A.col(k) -= f * A.col(bi);
    }
    for (int k = 0; k < d; ++k) {
      if (!alive[k] || k == bi || k == bj) continue;
      const cplx f = A(k, bi) / A(bj, bi);
      A.row(k) -= f * A.row(bj);
      A.col(k) -= f * A.col(bj);
    }
    alive[bi] = alive[bj] = 0;
    ++pairs;
  }
  return 2 * pairs;
}

Eigen::MatrixXcd antisymmetric_amplitudes(const DensityMatrix& dm, int two_m) {
  if (dm.basis.empty()) throw std::invalid_argument("antisymmetric_amplitudes: empty state");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (dm.mat + dm.mat.adjoint()));
  const int top = static_cast<int>(es.eigenvalues().size()) - 1;
  if (es.eigenvalues()(top) < 1.0 - 1e-8)
    throw std::invalid_argument("antisymmetric_amplitudes: reduced state is not pure");
  const Eigen::VectorXcd v = es.eigenvectors().col(top);

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(two_m, two_m);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int b = 0; b < static_cast<int>(dm.basis.size()); ++b) {
    const FermionConfig& cfg = dm.basis[b];
    if (cfg.n() != 2)
      throw std::invalid_argument("antisymmetric_amplitudes: two-particle states only");
    const int i = cfg.modes[0], j = cfg.modes[1];
    A(i, j) += v(b) * inv_sqrt2;
    A(j, i) -= v(b) * inv_sqrt2;
  }
  return A;
}

Eigen::MatrixXcd antisymmetric_amplitudes(const SparseState& s) {
  return antisymmetric_amplitudes(partial_trace_ancilla(s), 2 * s.meta.M);
}

// --- efficiency --------------------------------------------------------------

EfficiencyModel EfficiencyModel::from_geometry(int M, int x0, int N0, int Nbar0) {
  if (M < 3 || x0 < 2 || x0 > M - 1)
    throw std::invalid_argument("EfficiencyModel: invalid geometry");
  if (N0 < 0 || Nbar0 < 0 || N0 + Nbar0 < 1)
    throw std::invalid_argument("EfficiencyModel: invalid particle counts");
  EfficiencyModel m;
  m.N0 = N0;
  m.Nbar0 = Nbar0;
  m.N = N0 + Nbar0;
  m.V_R = 2.0 * x0 - 1.0;
  m.V_bar = 2.0 * (M - x0) + 1.0;
  m.r = m.V_bar / m.V_R;
  m.R = m.r / m.N;
  return m;
}

EfficiencyExact efficiency_exact(const EfficiencyModel& model, int N_k) {
  if (N_k < 0 || N_k > model.Nbar0)
    throw std::invalid_argument("efficiency_exact: N_k must lie in [0, Nbar0]");
  EfficiencyExact out;
  for (int n = 0; n < N_k; ++n) {
    out.K_n.push_back(model.K_of(n));
    out.k += out.K_n.back();
  }
  return out;
}

double harmonic_log_gamma(int m) {
  if (m < 0) throw std::invalid_argument("harmonic_log_gamma: negative argument");
  if (m == 0) return 0.0;
  return std::log(static_cast<double>(m)) + euler_gamma;
}

EfficiencyApprox efficiency_approx(const EfficiencyModel& model, int N_k, double guard_inside,
                                   double guard_frac) {
  if (N_k < 0 || N_k > model.Nbar0)
    throw std::invalid_argument("efficiency_approx: N_k must lie in [0, Nbar0]");
  EfficiencyApprox out;
  const double dH = harmonic_log_gamma(model.Nbar0) - harmonic_log_gamma(model.Nbar0 - N_k);
  out.k_general = (1.0 - model.r) * N_k + model.r * model.N * dH;
  out.k_eq = model.N * dH;
  out.k_tiny = (1.0 + model.R * model.N0) * N_k + model.R * N_k * (N_k - 1) / 2.0;
  out.eq_regime = std::abs(model.r - 1.0) < 1e-12;
  out.tiny_regime =
      model.N0 < guard_inside * model.Nbar0 && N_k < guard_frac * model.N;
  return out;
}

int invert_efficiency(const EfficiencyModel& model, double k_budget) {
  if (k_budget < 0) return 0;
  int lo = 0, hi = model.Nbar0;
  if (efficiency_exact(model, hi).k <= k_budget) return hi;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (efficiency_exact(model, mid).k <= k_budget)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

// --- Monte-Carlo -------------------------------------------------------------

namespace {

struct TrialOutcome {
  int trapped = 0;
  int entries = 0;
  int reflections = 0;
  int steps = 0;
  bool exhausted = false;
};

TrialOutcome run_usage_trial(const MonteCarloConfig& cfg, std::uint64_t trial_seed) {
  std::mt19937_64 rng(trial_seed);
  const StateMeta meta{cfg.M, cfg.x0, cfg.k};
  BarrierSpec spec;
  spec.x0 = cfg.x0;
  spec.fire_on_swap = cfg.fire_on_swap;

  std::vector<int> cand;
  for (int m = 0; m < 2 * cfg.M; ++m) {
    const int x = position_of(m);
    const bool in = x <= cfg.x0;
    if (cfg.placement == Placement::everywhere || (cfg.placement == Placement::inside && in) ||
        (cfg.placement == Placement::outside && !in))
      cand.push_back(m);
  }
  if (static_cast<int>(cand.size()) < cfg.N)
    throw std::invalid_argument("monte_carlo_qubit_usage: not enough modes for placement");
  for (int i = 0; i < cfg.N; ++i) {
    std::uniform_int_distribution<int> pick(i, static_cast<int>(cand.size()) - 1);
    std::swap(cand[i], cand[pick(rng)]);
  }
  std::vector<int> modes(cand.begin(), cand.begin() + cfg.N);
  std::sort(modes.begin(), modes.end());
  AncillaWord word = AncillaWord::zeros(cfg.k);

  const int horizon =
      cfg.max_steps > 0 ? cfg.max_steps : cfg.k * (2 * cfg.M + 2) + 4 * cfg.M + 16;
  TrialOutcome out;
  int fires = 0;
  for (int t = 1; t <= horizon; ++t) {
    const ClassicalStepInfo info = classical_step(modes, word, meta, spec);
    if (info.fired) {
      ++fires;
      if (info.kind == ClassicalStepInfo::Kind::entry) ++out.entries;
      if (info.kind == ClassicalStepInfo::Kind::reflection) ++out.reflections;
    }
    if (fires == cfg.k) {
      out.steps = t;
      out.exhausted = true;
      break;
    }
  }
  if (!out.exhausted) out.steps = horizon;
  for (int m : modes)
    if (position_of(m) <= cfg.x0) ++out.trapped;
  return out;
}

}  // namespace

MonteCarloResult monte_carlo_qubit_usage(const MonteCarloConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("monte_carlo_qubit_usage: trials >= 1");
  if (cfg.N < 1) throw std::invalid_argument("monte_carlo_qubit_usage: N >= 1");
  if (cfg.k < 1) throw std::invalid_argument("monte_carlo_qubit_usage: k >= 1");
  BarrierSpec spec;
  spec.x0 = cfg.x0;
  validate_barrier(StateMeta{cfg.M, cfg.x0, cfg.k}, spec);

  std::vector<TrialOutcome> outcomes(cfg.trials);
  const int nthreads = std::max(1, cfg.threads);
  const int chunk = (cfg.trials + nthreads - 1) / nthreads;
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mx;
  for (int w = 0; w < nthreads; ++w) {
    const int begin = w * chunk;
    const int end = std::min(cfg.trials, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        for (int t = begin; t < end; ++t)
          outcomes[t] = run_usage_trial(cfg, derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
      } catch (...) {
        std::lock_guard<std::mutex> lk(error_mx);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  MonteCarloResult res;
  res.trials = cfg.trials;
  res.placement_name = cfg.placement == Placement::outside    ? "outside"
                       : cfg.placement == Placement::inside   ? "inside"
                                                              : "everywhere";
  res.trapped_per_trial.reserve(cfg.trials);
  double sum = 0, sum2 = 0;
  for (const TrialOutcome& o : outcomes) {
    res.trapped_per_trial.push_back(o.trapped);
    sum += o.trapped;
    sum2 += static_cast<double>(o.trapped) * o.trapped;
    res.mean_entries += o.entries;
    res.mean_reflections += o.reflections;
    res.mean_steps += o.steps;
    if (!o.exhausted) ++res.not_exhausted;
  }
  res.mean_trapped = sum / cfg.trials;
  res.mean_entries /= cfg.trials;
  res.mean_reflections /= cfg.trials;
  res.mean_steps /= cfg.trials;
  if (cfg.trials > 1)
    res.stddev_trapped =
        std::sqrt(std::max(0.0, (sum2 - sum * sum / cfg.trials) / (cfg.trials - 1)));
  return res;
}

// --- beam splitter -------------------------------------------------------------

namespace {

void check_amplitudes(cplx alpha, cplx beta) {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-9)
    throw std::invalid_argument("beamsplit: |alpha|^2 + |beta|^2 must be 1");
}

BeamsplitResult finish_beamsplit(SparseState s, int x0, int steps) {
  BeamsplitResult out;
  out.steps = steps;
  for (const auto& [key, amp] : s.amp) {
    bool all_in = true, all_out = true;
    for (int m : key.cfg.modes)
      (position_of(m) <= x0 ? all_out : all_in) = false;
    const double w = std::norm(amp);
    if (all_in) out.p_confined += w;
    if (all_out) out.p_escaped += w;
  }
  const DensityMatrix dm = partial_trace_ancilla(s);
  out.disentangled = (dm.mat * dm.mat).trace().real() > 1.0 - 1e-10;
  out.final_state = std::move(s);
  return out;
}

}  // namespace

BeamsplitResult beamsplit_scatter(Side incident_side, cplx alpha, cplx beta,
                                  const StateMeta& meta, const BarrierSpec& spec) {
  check_amplitudes(alpha, beta);
  validate_barrier(meta, spec);
  if (meta.k != 1)
    throw std::invalid_argument("beamsplit_scatter: needs exactly one register qubit");

  const int mode = incident_side == Side::right ? mode_of(spec.x0 + 1, Coin::left, meta.M)
                                                : mode_of(spec.x0 - 1, Coin::right, meta.M);
  SparseState s(meta);
  s.add(FermionConfig({mode}), AncillaWord::zeros(1), alpha);
  s.add(FermionConfig({mode}), AncillaWord(1, 1), beta);

  for (int t = 0; t < 2; ++t) s = step_multi(s, spec).first;
  return finish_beamsplit(std::move(s), spec.x0, 2);
}

BeamsplitResult beamsplit_collective(int N, cplx alpha, cplx beta, const StateMeta& meta,
                                     const BarrierSpec& spec) {
  check_amplitudes(alpha, beta);
  validate_barrier(meta, spec);
  if (N < 1) throw std::invalid_argument("beamsplit_collective: N >= 1");
  if (meta.k != N)
    throw std::invalid_argument("beamsplit_collective: needs k = N register qubits");
  if (spec.x0 < N + 1)
    throw std::invalid_argument("beamsplit_collective: region too small, needs x0 >= N+1");
  if (meta.M < spec.x0 + N)
    throw std::invalid_argument("beamsplit_collective: chain too short, needs M >= x0+N");

  FermionConfig cfg;
  for (int j = N; j >= 1; --j) cfg.modes.push_back(mode_of(spec.x0 - j, Coin::right, meta.M));

  AncillaWord ones = AncillaWord::zeros(N);
  for (int i = 0; i < N; ++i) ones.set_bit(i, 1);

  SparseState s(meta);
  s.add(cfg, AncillaWord::zeros(N), alpha);
  s.add(cfg, ones, beta);

  for (int t = 0; t < N + 1; ++t) s = step_multi(s, spec).first;
  return finish_beamsplit(std::move(s), spec.x0, N + 1);
}

}  // namespace qsb
