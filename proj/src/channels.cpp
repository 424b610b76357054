#include "qsb/channels.hpp"

#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/KroneckerProduct>

namespace qsb {

namespace {
void check_barrier_args(int x0, int M) {
  if (M < 3 || x0 < 2 || x0 > M - 1)
    throw std::invalid_argument("barrier position must satisfy 2 <= x0 <= M-1");
}
}  // namespace

Eigen::MatrixXcd free_shift_matrix(int M) {
  const int d = 2 * M;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(d, d);
  for (int m = 0; m < d; ++m) u(u_mode(m, M), m) = 1.0;
  return u;
}

KrausSet kraus_single(int x0, int M) {
  check_barrier_args(x0, M);
  const int d = 2 * M;
  const int r = mode_of(x0, Coin::right), l = mode_of(x0, Coin::left);
  Eigen::MatrixXcd k1 = Eigen::MatrixXcd::Identity(d, d);
  k1(r, r) = 0.0;
  k1(l, l) = 0.0;
  k1(l, r) = 1.0;  // incoming from inside folds onto the trapped mode
  Eigen::MatrixXcd k2 = Eigen::MatrixXcd::Zero(d, d);
  k2(l, l) = 1.0;
  KrausSet set;
  set.ops = {k1, k2};
  set.labels = {"K1", "K2"};
  return set;
}

KrausSet dilation_pair_single(int x0, int M) {
  check_barrier_args(x0, M);
  const int d = 2 * M;
  const int r = mode_of(x0, Coin::right), l = mode_of(x0, Coin::left);
  Eigen::MatrixXcd a0 = Eigen::MatrixXcd::Identity(d, d);
  a0(r, r) = 0.0;
  Eigen::MatrixXcd a1 = Eigen::MatrixXcd::Zero(d, d);
  a1(l, r) = 1.0;
  KrausSet set;
  set.ops = {a0, a1};
  set.labels = {"A0", "A1"};
  return set;
}

KrausSet kraus_two_fermion(int x0, int M) {
  KrausSet s = kraus_single(x0, M);
  const auto& k1 = s.ops[0];
  const auto& k2 = s.ops[1];
  KrausSet set;
  set.ops = {Eigen::kroneckerProduct(k1, k1).eval(), Eigen::kroneckerProduct(k2, k2).eval(),
             (Eigen::kroneckerProduct(k1, k2) + Eigen::kroneckerProduct(k2, k1)).eval()};
  set.labels = {"kappa1", "kappa2", "kappa3"};
  return set;
}

Eigen::MatrixXcd completeness_defect(const KrausSet& set) {
  const int d = set.dim();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& k : set.ops) sum += k.adjoint() * k;
  return sum - Eigen::MatrixXcd::Identity(d, d);
}

Eigen::MatrixXcd channel_step(const Eigen::MatrixXcd& rho, const KrausSet& set,
                              const Eigen::MatrixXcd& shift) {
  if (rho.rows() != shift.rows())
    throw std::invalid_argument("channel_step: dimension mismatch");
  const Eigen::MatrixXcd moved = shift * rho * shift.adjoint();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
  for (const auto& k : set.ops) out += k * moved * k.adjoint();
  return 0.5 * (out + out.adjoint().eval());
}

Eigen::MatrixXcd channel_step_single(const Eigen::MatrixXcd& rho, int x0, int M) {
  return channel_step(rho, kraus_single(x0, M), free_shift_matrix(M));
}

Eigen::MatrixXcd channel_step_two_fermion(const Eigen::MatrixXcd& rho, int x0, int M) {
  const Eigen::MatrixXcd u = free_shift_matrix(M);
  return channel_step(rho, kraus_two_fermion(x0, M),
                      Eigen::kroneckerProduct(u, u).eval());
}

std::vector<Eigen::MatrixXcd> kraus_trajectory_single(const Eigen::MatrixXcd& rho0, int x0,
                                                      int M, int steps) {
  const KrausSet set = kraus_single(x0, M);
  const Eigen::MatrixXcd u = free_shift_matrix(M);
  std::vector<Eigen::MatrixXcd> traj{rho0};
  traj.reserve(static_cast<size_t>(steps) + 1);
  for (int t = 0; t < steps; ++t) traj.push_back(channel_step(traj.back(), set, u));
  return traj;
}

SparseState fresh_qubit_step(const SparseState& s, const BarrierSpec& spec) {
  // Shift, scatter, then move the used qubit to the back unconditionally.
  SparseState moved = w_multi(free_step_multi(s), spec);
  SparseState out(s.meta);
  for (const auto& [key, a] : moved.amp) out.add(key.cfg, key.word.cycled(), a);
  return out;
}

std::vector<Eigen::MatrixXcd> fresh_qubit_reduced_trajectory(const SparseState& initial,
                                                             const BarrierSpec& spec, int steps) {
  if (steps > initial.meta.k)
    throw std::invalid_argument("fresh_qubit_reduced_trajectory: register exhausted (need k >= steps)");
  std::vector<Eigen::MatrixXcd> traj{reduced_single_particle(initial)};
  SparseState s = initial;
  for (int t = 0; t < steps; ++t) {
    s = fresh_qubit_step(s, spec);
    traj.push_back(reduced_single_particle(s));
  }
  return traj;
}

std::vector<Eigen::MatrixXcd> unitary_reduced_trajectory(const SparseState& initial,
                                                         const BarrierSpec& spec, int steps) {
  std::vector<Eigen::MatrixXcd> traj{reduced_single_particle(initial)};
  SparseState s = initial;
  for (int t = 0; t < steps; ++t) {
    s = step_multi(s, spec).first;
    traj.push_back(reduced_single_particle(s));
  }
  return traj;
}

double trace_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  Eigen::MatrixXcd diff = rho - sigma;
  diff = 0.5 * (diff + diff.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double fidelity_with_pure(const Eigen::MatrixXcd& rho, const Eigen::VectorXcd& psi) {
  if (rho.rows() != psi.size())
    throw std::invalid_argument("fidelity_with_pure: dimension mismatch");
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

double min_eigenvalue(const Eigen::MatrixXcd& rho) {
  Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace qsb
