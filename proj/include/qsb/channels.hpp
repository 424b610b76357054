// Reduced dynamics of the walker(s) with the barrier register traced out:
// operator-sum (Kraus) evolution for one particle and for two fermions in
// first quantization, the fresh-qubit-per-step unitary dilation, and trace
// distance between density matrices. The channel step applies the shift first
// and the Kraus operators second: rho' = sum_i K_i U rho U^† K_i^†.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qsb/dynamics.hpp"
#include "qsb/hilbert.hpp"

namespace qsb {

struct KrausSet {
  std::vector<Eigen::MatrixXcd> ops;
  std::vector<std::string> labels;
  int dim() const { return ops.empty() ? 0 : static_cast<int>(ops.front().rows()); }
};

// Free shift as a 2M x 2M permutation matrix.
Eigen::MatrixXcd free_shift_matrix(int M);

// Single-particle barrier set {K1, K2}: K1 passes everything except the
// incoming-from-inside mode, which it folds onto (x0,left); K2 projects onto
// (x0,left). Complete: K1^†K1 + K2^†K2 = 1.
KrausSet kraus_single(int x0, int M);

// The exact Kraus pair of the fresh-qubit dilation: A0 = 1 - |x0,R><x0,R|,
// A1 = |x0,L><x0,R|. Also complete. Differs from kraus_single on coherences.
KrausSet dilation_pair_single(int x0, int M);

// Symmetrized two-fermion set {K1⊗K1, K2⊗K2, K1⊗K2 + K2⊗K1} on the (2M)^2
// product space. NOT complete on the barrier-meeting state: all three
// operators annihilate antisym(|x0,R>,|x0,L>), so completeness holds only on
// the meeting-free antisymmetric subspace. See completeness_defect.
KrausSet kraus_two_fermion(int x0, int M);

// sum K^†K - 1 for inspection of exactly where a set fails to be complete.
Eigen::MatrixXcd completeness_defect(const KrausSet& set);

Eigen::MatrixXcd channel_step_single(const Eigen::MatrixXcd& rho, int x0, int M);
Eigen::MatrixXcd channel_step_two_fermion(const Eigen::MatrixXcd& rho, int x0, int M);
Eigen::MatrixXcd channel_step(const Eigen::MatrixXcd& rho, const KrausSet& set,
                              const Eigen::MatrixXcd& shift);

std::vector<Eigen::MatrixXcd> kraus_trajectory_single(const Eigen::MatrixXcd& rho0, int x0,
                                                      int M, int steps);

// One step of the fresh-qubit unitary variant: shift, scatter off the front
// qubit, then cycle the register unconditionally so the next step sees a
// fresh qubit. The caller must supply at least as many qubits as steps.
SparseState fresh_qubit_step(const SparseState& s, const BarrierSpec& spec);

// Reduced trajectory (t = 0..steps) of the fresh-qubit variant from a
// single-particle spatial state; throws if steps > k.
std::vector<Eigen::MatrixXcd> fresh_qubit_reduced_trajectory(const SparseState& initial,
                                                             const BarrierSpec& spec, int steps);

// Reduced trajectory of the main (per-event register) unitary model.
std::vector<Eigen::MatrixXcd> unitary_reduced_trajectory(const SparseState& initial,
                                                         const BarrierSpec& spec, int steps);

double trace_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);
double fidelity_with_pure(const Eigen::MatrixXcd& rho, const Eigen::VectorXcd& psi);
double min_eigenvalue(const Eigen::MatrixXcd& rho);

}  // namespace qsb
