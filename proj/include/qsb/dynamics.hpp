// One evolution step of the barrier walk: conditional shift U, barrier
// scattering W / W_N on the front ancilla qubit, cyclic register shift T, and
// their composition V with exact inverses. The step applies the shift first
// and scatters on the post-shift state; one step = V(U psi).
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsb/hilbert.hpp"

namespace qsb {

enum class BarrierOrientation {
  reflect_right_movers,  // default: right-movers bounce off a fresh qubit; region is x <= x0
  reflect_left_movers,   // mirrored barrier; region is x >= x0
};

struct BarrierSpec {
  int x0 = 2;
  BarrierOrientation orientation = BarrierOrientation::reflect_right_movers;
  // Multi-particle register rule: when two particles swap through the barrier
  // the occupancy projector still sees (x0,left) occupied and fires T. That is
  // the literal reading and the default; fire_on_swap=false suppresses the
  // fire in exactly that case (event counting then sees entries+reflections
  // only, which is what the qubit-budget analysis assumes).
  bool fire_on_swap = true;
};

void validate_barrier(const StateMeta& meta, const BarrierSpec& spec);

struct StepReport {
  double engaged_weight = 0.0;  // squared-amplitude fraction that fired T
  // Bit cycled to the back of the register when the engagement is total and
  // every fired component cycles the same value; null otherwise (superposed
  // engagement is not a classical event).
  std::optional<int> qubit_consumed_value;

  bool engaged() const { return engaged_weight > 1e-12; }
};

// Mode permutation of the free walk: right-movers step right, left-movers step
// left, coins flip at the two walls.
int u_mode(int mode, int M);
int u_inv_mode(int mode, int M);

SparseState free_step_single(const SparseState& s);
SparseState free_step_multi(const SparseState& s);

SparseState barrier_w_single(const SparseState& s, const BarrierSpec& spec);
SparseState w_multi(const SparseState& s, const BarrierSpec& spec);

AncillaWord cycle_ancilla(const AncillaWord& w);

std::pair<SparseState, StepReport> v_single(const SparseState& s, const BarrierSpec& spec);
std::pair<SparseState, StepReport> v_multi(const SparseState& s, const BarrierSpec& spec);

std::pair<SparseState, StepReport> step_single(const SparseState& s, const BarrierSpec& spec);
std::pair<SparseState, StepReport> step_multi(const SparseState& s, const BarrierSpec& spec);

SparseState inverse_step(const SparseState& s, const BarrierSpec& spec);

// Dense materialization of one step on the full (configs x words) basis,
// column j = step(basis ket j). Basis order: all_configs(2M,N) outer, word
// bits 0..2^k-1 inner.
Eigen::MatrixXcd dense_step_matrix(const StateMeta& meta, const BarrierSpec& spec, int N);
Eigen::MatrixXcd dense_inverse_step_matrix(const StateMeta& meta, const BarrierSpec& spec, int N);

// The register read as an event history: the last `events` bits, oldest
// first; 1 = reflect, 0 = pass (entry or swap-through).
std::vector<std::string> decode_event_history(const AncillaWord& w, int events);

// Classical fast path. Basis kets evolve into basis kets, so a basis
// trajectory is a deterministic walk over (sorted mode list, word).
struct ClassicalStepInfo {
  enum class Kind { none, entry, reflection, swap_through, release, exit_pass };
  bool fired = false;
  Kind kind = Kind::none;
};
ClassicalStepInfo classical_step(std::vector<int>& modes, AncillaWord& word,
                                 const StateMeta& meta, const BarrierSpec& spec);

// First contiguous stay of a single walker in the region {x <= x0}: residence
// = t_last_inside - t_first_inside. exited=false if the horizon was hit.
struct ResidenceResult {
  bool entered = false;
  bool exited = false;
  int t_enter = -1;
  int t_last_inside = -1;
  int residence = -1;
};
ResidenceResult measure_first_residence(int start_mode, const StateMeta& meta,
                                        const BarrierSpec& spec, int max_steps);

}  // namespace qsb
