#include "qsb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsb {

void validate_barrier(const StateMeta& meta, const BarrierSpec& spec) {
  if (meta.M < 3) throw std::invalid_argument("chain too short: M >= 3 required");
  // x0 in {1, M} degenerates (region empty or the whole box).
  if (spec.x0 < 2 || spec.x0 > meta.M - 1)
    throw std::invalid_argument("barrier position must satisfy 2 <= x0 <= M-1");
}

int u_mode(int mode, int M) {
  auto [x, c] = site_of(mode);
  if (c == Coin::right) return (x < M) ? mode + 2 : mode_of(M, Coin::left);
  return (x > 1) ? mode - 2 : mode_of(1, Coin::right);
}

int u_inv_mode(int mode, int M) {
  auto [x, c] = site_of(mode);
  if (c == Coin::right) return (x > 1) ? mode - 2 : mode_of(1, Coin::left);
  return (x < M) ? mode + 2 : mode_of(M, Coin::right);
}

AncillaWord cycle_ancilla(const AncillaWord& w) {
  if (w.k < 1) throw std::invalid_argument("cycle_ancilla: empty register");
  return w.cycled();
}

namespace {

struct BarrierModes {
  int engaged;  // mode whose post-barrier occupancy fires T
  int other;
};

BarrierModes barrier_modes(const BarrierSpec& spec) {
  const int r = mode_of(spec.x0, Coin::right);
  const int l = mode_of(spec.x0, Coin::left);
  if (spec.orientation == BarrierOrientation::reflect_right_movers) return {l, r};
  return {r, l};
}

// Replace barrier mode a by its partner b in a canonical config. The two
// barrier modes are adjacent linear indices, so order and sign are unaffected.
FermionConfig swap_barrier_mode(const FermionConfig& cfg, int from, int to) {
  FermionConfig out = cfg;
  for (int& m : out.modes)
    if (m == from) { m = to; break; }
  std::sort(out.modes.begin(), out.modes.end());
  return out;
}

SparseState apply_free(const SparseState& s, bool inverse) {
  SparseState out(s.meta);
  const int M = s.meta.M;
  std::vector<int> image;
  for (const auto& [key, a] : s.amp) {
    image.clear();
    for (int m : key.cfg.modes) image.push_back(inverse ? u_inv_mode(m, M) : u_mode(m, M));
    auto canon = config_from_modes(image);
    // U is injective on modes, so a canonical config can never collide.
    if (!canon) throw std::logic_error("free step produced a doubly occupied mode");
    out.add(canon->first, key.word, a * static_cast<double>(canon->second));
  }
  return out;
}

void require_single_particle(const SparseState& s, const char* who) {
  for (const auto& [key, a] : s.amp)
    if (key.cfg.n() != 1)
      throw std::invalid_argument(std::string(who) + ": state is not in the single-particle sector");
}

void require_register(const SparseState& s, const char* who) {
  if (s.meta.k < 1)
    throw std::invalid_argument(std::string(who) + ": barrier needs at least one ancilla qubit (k >= 1)");
}

// One component through W_N: scatter the single occupant of the barrier cell
// off the front qubit; two occupants swap through untouched.
void scatter_component(FermionConfig& cfg, AncillaWord& word, const BarrierModes& bm,
                       bool& is_swap) {
  const bool occ_e = cfg.contains(bm.engaged);
  const bool occ_o = cfg.contains(bm.other);
  is_swap = occ_e && occ_o;
  if (is_swap || (!occ_e && !occ_o)) return;
  const int q = word.front();
  if (occ_o && q == 0) {           // fresh qubit: reflect into the engaged mode
    cfg = swap_barrier_mode(cfg, bm.other, bm.engaged);
    word.set_bit(0, 1);
  } else if (occ_e && q == 1) {    // reversed barrier: release and erase
    cfg = swap_barrier_mode(cfg, bm.engaged, bm.other);
    word.set_bit(0, 0);
  }
  // (engaged, 0) and (other, 1) are fixed points.
}

std::pair<SparseState, StepReport> apply_v(const SparseState& s, const BarrierSpec& spec) {
  validate_barrier(s.meta, spec);
  require_register(s, "v");
  SparseState out(s.meta);
  StepReport rep;
  const BarrierModes bm = barrier_modes(spec);
  double total = 0.0, engaged = 0.0;
  std::optional<int> value;
  bool value_conflict = false;
  for (const auto& [key, a] : s.amp) {
    const double w2 = std::norm(a);
    total += w2;
    FermionConfig cfg = key.cfg;
    AncillaWord word = key.word;
    bool is_swap = false;
    scatter_component(cfg, word, bm, is_swap);
    const bool fire = cfg.contains(bm.engaged) && (spec.fire_on_swap || !is_swap);
    if (fire) {
      engaged += w2;
      const int cycled = word.front();
      if (!value) value = cycled;
      else if (*value != cycled) value_conflict = true;
      word = word.cycled();
    }
    out.add(cfg, word, a);
  }
  if (total > 0.0) rep.engaged_weight = engaged / total;
  if (value && !value_conflict && engaged > total * (1.0 - 1e-12))
    rep.qubit_consumed_value = *value;
  return {out, rep};
}

}  // namespace

SparseState free_step_single(const SparseState& s) {
  require_single_particle(s, "free_step_single");
  return apply_free(s, false);
}

SparseState free_step_multi(const SparseState& s) { return apply_free(s, false); }

SparseState barrier_w_single(const SparseState& s, const BarrierSpec& spec) {
  require_single_particle(s, "barrier_w_single");
  return w_multi(s, spec);
}

SparseState w_multi(const SparseState& s, const BarrierSpec& spec) {
  validate_barrier(s.meta, spec);
  require_register(s, "w");
  SparseState out(s.meta);
  const BarrierModes bm = barrier_modes(spec);
  for (const auto& [key, a] : s.amp) {
    FermionConfig cfg = key.cfg;
    AncillaWord word = key.word;
    bool is_swap = false;
    scatter_component(cfg, word, bm, is_swap);
    out.add(cfg, word, a);
  }
  return out;
}

std::pair<SparseState, StepReport> v_single(const SparseState& s, const BarrierSpec& spec) {
  require_single_particle(s, "v_single");
  return apply_v(s, spec);
}

std::pair<SparseState, StepReport> v_multi(const SparseState& s, const BarrierSpec& spec) {
  return apply_v(s, spec);
}

std::pair<SparseState, StepReport> step_single(const SparseState& s, const BarrierSpec& spec) {
  require_single_particle(s, "step_single");
  return apply_v(free_step_single(s), spec);
}

std::pair<SparseState, StepReport> step_multi(const SparseState& s, const BarrierSpec& spec) {
  return apply_v(apply_free(s, false), spec);
}

SparseState inverse_step(const SparseState& s, const BarrierSpec& spec) {
  validate_barrier(s.meta, spec);
  require_register(s, "inverse_step");
  // step = C_T ∘ W ∘ U, so the inverse is U^-1 ∘ W ∘ C_T^-1. C_T is diagonal
  // in positions, hence its inverse conditions on the same occupancies.
  const BarrierModes bm = barrier_modes(spec);
  SparseState unc(s.meta);
  for (const auto& [key, a] : s.amp) {
    const bool occ_e = key.cfg.contains(bm.engaged);
    const bool occ_o = key.cfg.contains(bm.other);
    const bool fired = occ_e && (spec.fire_on_swap || !(occ_e && occ_o));
    unc.add(key.cfg, fired ? key.word.cycled_back() : key.word, a);
  }
  return apply_free(w_multi(unc, spec), true);
}

Eigen::MatrixXcd dense_step_matrix(const StateMeta& meta, const BarrierSpec& spec, int N) {
  validate_barrier(meta, spec);
  const auto configs = all_configs(2 * meta.M, N);
  const std::uint64_t words = 1ULL << meta.k;
  const int dim = static_cast<int>(configs.size() * words);
  std::map<BasisKey, int> index;
  int n = 0;
  for (const auto& cfg : configs)
    for (std::uint64_t w = 0; w < words; ++w)
      index[{cfg, AncillaWord(w, meta.k)}] = n++;

  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [key, col] : index) {
    auto [out, rep] = step_multi(SparseState::basis_ket(meta, key.cfg, key.word), spec);
    for (const auto& [okey, a] : out.amp) mat(index.at(okey), col) = a;
  }
  return mat;
}

Eigen::MatrixXcd dense_inverse_step_matrix(const StateMeta& meta, const BarrierSpec& spec, int N) {
  validate_barrier(meta, spec);
  const auto configs = all_configs(2 * meta.M, N);
  const std::uint64_t words = 1ULL << meta.k;
  const int dim = static_cast<int>(configs.size() * words);
  std::map<BasisKey, int> index;
  int n = 0;
  for (const auto& cfg : configs)
    for (std::uint64_t w = 0; w < words; ++w)
      index[{cfg, AncillaWord(w, meta.k)}] = n++;

  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [key, col] : index) {
    SparseState out = inverse_step(SparseState::basis_ket(meta, key.cfg, key.word), spec);
    for (const auto& [okey, a] : out.amp) mat(index.at(okey), col) = a;
  }
  return mat;
}

std::vector<std::string> decode_event_history(const AncillaWord& w, int events) {
  if (events < 0 || events > w.k)
    throw std::invalid_argument("decode_event_history: event count out of range");
  std::vector<std::string> out;
  out.reserve(events);
  for (int i = 0; i < events; ++i)
    out.push_back(w.bit(w.k - events + i) ? "reflect" : "pass");
  return out;
}

ClassicalStepInfo classical_step(std::vector<int>& modes, AncillaWord& word,
                                 const StateMeta& meta, const BarrierSpec& spec) {
  validate_barrier(meta, spec);
  if (meta.k < 1) throw std::invalid_argument("classical_step: k >= 1 required");
  for (int& m : modes) m = u_mode(m, meta.M);
  std::sort(modes.begin(), modes.end());

  const BarrierModes bm = barrier_modes(spec);
  auto occ = [&](int m) { return std::binary_search(modes.begin(), modes.end(), m); };
  const bool occ_e = occ(bm.engaged);
  const bool occ_o = occ(bm.other);

  ClassicalStepInfo info;
  using Kind = ClassicalStepInfo::Kind;
  if (occ_e && occ_o) {
    info.kind = Kind::swap_through;
    if (spec.fire_on_swap) { info.fired = true; word = word.cycled(); }
    return info;
  }
  if (!occ_e && !occ_o) return info;

  const int q = word.front();
  if (occ_e && q == 0) {
    info.kind = Kind::entry;            // arrives on the trapped side, fresh qubit
    info.fired = true;
    word = word.cycled();
  } else if (occ_o && q == 0) {
    info.kind = Kind::reflection;       // bounces into the trapped side, writes a 1
    std::replace(modes.begin(), modes.end(), bm.other, bm.engaged);
    std::sort(modes.begin(), modes.end());
    word.set_bit(0, 1);
    info.fired = true;
    word = word.cycled();
  } else if (occ_e && q == 1) {
    info.kind = Kind::release;          // reversed barrier: pushed back out, erases the 1
    std::replace(modes.begin(), modes.end(), bm.engaged, bm.other);
    std::sort(modes.begin(), modes.end());
    word.set_bit(0, 0);
  } else {
    info.kind = Kind::exit_pass;        // (other side, used qubit): passes untouched
  }
  return info;
}

ResidenceResult measure_first_residence(int start_mode, const StateMeta& meta,
                                        const BarrierSpec& spec, int max_steps) {
  ResidenceResult res;
  const bool left_region = spec.orientation == BarrierOrientation::reflect_right_movers;
  auto inside = [&](int mode) {
    const int x = position_of(mode);
    return left_region ? (x <= spec.x0) : (x >= spec.x0);
  };
  std::vector<int> modes{start_mode};
  AncillaWord word = AncillaWord::zeros(meta.k);
  if (inside(start_mode)) { res.entered = true; res.t_enter = 0; }
  for (int t = 1; t <= max_steps; ++t) {
    classical_step(modes, word, meta, spec);
    const bool in = inside(modes[0]);
    if (!res.entered) {
      if (in) { res.entered = true; res.t_enter = t; }
      continue;
    }
    if (!in) {
      res.exited = true;
      res.t_last_inside = t - 1;
      res.residence = res.t_last_inside - res.t_enter;
      return res;
    }
  }
  return res;
}

}  // namespace qsb
