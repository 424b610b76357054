// Quantitative layers on top of the simulators: trapping time, sector
// decomposition and the trapped-mixture prediction, coherence metrics, Slater
// decomposition of two-fermion states, the qubit-budget (efficiency) law with
// its closed-form approximations, Monte-Carlo usage experiments, and the
// programmable beam-splitter scenarios.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "qsb/channels.hpp"
#include "qsb/dynamics.hpp"
#include "qsb/hilbert.hpp"

namespace qsb {

// --- trapping time ---------------------------------------------------------

// (k+1)(2x0-1): k usable reflections plus the final pass, each worth one
// region transit.
long long trapping_time(int k, int x0);

// --- sector decomposition --------------------------------------------------

// Label of a mode = the step at which a walker started there first occupies
// (x0,right) after the shift (its first reflection event). Labels 1..2M are a
// bijective relabeling of the modes; label T is (x0,left), label 1 is
// (x0-1,right), label 2M is (x0,right).
int sector_label(int mode, int x0, int M);
int sector_mode(int label, int x0, int M);

struct SectorDecomposition {
  int T_period = 0;
  int K_sectors = 0;
  AncillaWord word;  // shared register word of the decomposed state
  // components[n](t-1) = amplitude of sector label t + n*T, t in 1..T;
  // zero-padded where the label exceeds 2M.
  std::vector<Eigen::VectorXcd> components;
};

SectorDecomposition sector_decompose(const SparseState& s, const BarrierSpec& spec);
SparseState state_from_sectors(const SectorDecomposition& dec, const StateMeta& meta,
                               const BarrierSpec& spec);

// --- trapped mixture -------------------------------------------------------

// Predicted reduced state of the walker at t = K*T for an all-zeros register
// with k > K: rho = sum_n |phi(n)><phi(n)| with phi(n) = sum_t alpha_{t+nT}|t>,
// laid out on the 2M single-particle mode basis. Throws if the register is in
// a superposition / not all zeros, or k <= K.
Eigen::MatrixXcd predict_trapped_mixture(const SparseState& initial, const BarrierSpec& spec);

// --- coherence metrics -----------------------------------------------------

struct CoherenceMetrics {
  int rank = 0;          // eigenvalues above tolerance
  double purity = 0.0;   // tr rho^2
  double l1_offdiag = 0.0;
};
CoherenceMetrics coherence_metrics(const Eigen::MatrixXcd& rho, double eps = eps_eig);

// --- Slater decomposition --------------------------------------------------

struct SlaterDecomposition {
  std::vector<double> lambdas;  // descending weights, sum 1
  std::vector<double> sigmas;   // one paired singular value per pair, descending
  int rank = 0;                 // pairs with sigma > tol
  double tol = 0.0;
  // Unitary pair basis: columns (2j, 2j+1) carry the j-th pair; trailing
  // columns span the kernel. A = Q S Q^T with S the canonical skew blocks
  // diag([[0,sigma_j],[-sigma_j,0]], 0).
  Eigen::MatrixXcd pair_basis;
};

// A must be antisymmetric; it is normalized to Frobenius norm 1 internally
// (the two-fermion normalization 2 sum_{i<j}|a_ij|^2 = 1). tol_abs < 0 means
// the default 1e-8 * sigma_max.
SlaterDecomposition slater_rank(const Eigen::MatrixXcd& A, double tol_abs = -1.0);

// Independent oracle: rank of a skew-symmetric matrix by congruence Gaussian
// elimination with full pivoting; always even. Slater rank = this / 2.
int skew_rank_gauss(Eigen::MatrixXcd A, double tol);

// Antisymmetric amplitude matrix A (Frobenius norm 1) of a PURE two-fermion
// reduced state; throws if the top eigenvalue of dm is below 1 - 1e-8.
Eigen::MatrixXcd antisymmetric_amplitudes(const DensityMatrix& dm, int two_m);
// Same, directly from a two-fermion state with any register content traced out
// being pure (single shared word).
Eigen::MatrixXcd antisymmetric_amplitudes(const SparseState& s);

// --- qubit-budget law ------------------------------------------------------

struct EfficiencyModel {
  int N0 = 0;      // initially inside
  int Nbar0 = 0;   // initially outside
  int N = 0;       // total
  double V_R = 0;  // 2x0 - 1 effective region states
  double V_bar = 0;
  double r = 0;    // V_bar / V_R
  double R = 0;    // r / N

  static EfficiencyModel from_geometry(int M, int x0, int N0, int Nbar0);

  double rho_in(int n) const { return (N0 + n) / V_R; }
  double rho_out(int n) const { return (Nbar0 - n) / V_bar; }
  // Qubits consumed by the n-th entry: the entry itself plus the mean number
  // of reflections inside before the next entry.
  double K_of(int n) const { return r * (N0 + n) / static_cast<double>(Nbar0 - n) + 1.0; }
};

struct EfficiencyExact {
  double k = 0.0;
  std::vector<double> K_n;  // per-entry costs, K_n[n] = K_of(n)
};
EfficiencyExact efficiency_exact(const EfficiencyModel& model, int N_k);

struct EfficiencyApprox {
  double k_general = 0.0;  // (1-r) N_k + r N [Ht(Nbar0) - Ht(Nbar0 - N_k)]
  double k_eq = 0.0;       // r = 1 form
  double k_tiny = 0.0;     // (1 + R N0) N_k + R N_k (N_k - 1) / 2
  bool eq_regime = false;
  bool tiny_regime = false;
};
EfficiencyApprox efficiency_approx(const EfficiencyModel& model, int N_k,
                                   double guard_inside = 0.1, double guard_frac = 0.1);

// log m + gamma for m >= 1, 0 for m = 0 (the harmonic-sum stand-in).
double harmonic_log_gamma(int m);

// Largest integer N_k with efficiency_exact(model, N_k).k <= k_budget.
int invert_efficiency(const EfficiencyModel& model, double k_budget);

// --- Monte-Carlo usage experiment ------------------------------------------

enum class Placement { outside, inside, everywhere };

struct MonteCarloConfig {
  int M = 40, x0 = 20, k = 14, N = 20;
  int trials = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  Placement placement = Placement::outside;
  // Counting premise of the budget law: fires = entries + reflections, so
  // swap-throughs must not consume register positions here.
  bool fire_on_swap = false;
  int max_steps = 0;  // 0 = automatic horizon
};

struct MonteCarloResult {
  double mean_trapped = 0.0;  // particles inside the region at exhaustion
  double stddev_trapped = 0.0;
  double mean_entries = 0.0;
  double mean_reflections = 0.0;
  double mean_steps = 0.0;
  int trials = 0;
  int not_exhausted = 0;  // trials that hit the horizon before the k-th fire
  std::string rng_name = "mt19937_64+splitmix64";
  std::string placement_name;
  std::vector<int> trapped_per_trial;
};
MonteCarloResult monte_carlo_qubit_usage(const MonteCarloConfig& cfg);

// --- beam splitter ---------------------------------------------------------

enum class Side { left, right };

struct BeamsplitResult {
  SparseState final_state;
  double p_confined = 0.0;  // all particles in the region
  double p_escaped = 0.0;   // all particles outside
  bool disentangled = false;
  int steps = 0;
};

// Single walker, one register qubit alpha|0> + beta|1>, incident on the
// barrier from the given side; scatters in two steps into
// alpha |x0-1,left> + beta |x0+1,right> with the qubit left in a basis state.
BeamsplitResult beamsplit_scatter(Side incident_side, cplx alpha, cplx beta,
                                  const StateMeta& meta, const BarrierSpec& spec);

// N staggered walkers approaching from inside with a GHZ register
// alpha|0^N> + beta|1^N> (k = N): the whole group reflects back in (weight
// |alpha|^2) or passes out (weight |beta|^2), register disentangled.
BeamsplitResult beamsplit_collective(int N, cplx alpha, cplx beta, const StateMeta& meta,
                                     const BarrierSpec& spec);

}  // namespace qsb
