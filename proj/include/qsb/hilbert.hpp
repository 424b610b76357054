// Basis bookkeeping for N spinless fermions on a chain of M sites with a
// two-state coin, plus a k-qubit ancilla register: sparse states, creation
// operators with sign tracking, inner products, and the ancilla partial trace.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qsb/common.hpp"

namespace qsb {

enum class Coin : int { right = 0, left = 1 };

// Linear mode index 2(x-1) + coin bit; positions are 1-based.
inline int mode_of(int x, Coin c) {
  if (x < 1) throw std::invalid_argument("mode_of: position must be >= 1");
  return 2 * (x - 1) + static_cast<int>(c);
}
inline int mode_of(int x, Coin c, int M) {
  if (x < 1 || x > M) throw std::invalid_argument("mode_of: position out of range");
  return 2 * (x - 1) + static_cast<int>(c);
}
inline std::pair<int, Coin> site_of(int mode) {
  return {mode / 2 + 1, static_cast<Coin>(mode % 2)};
}
inline int position_of(int mode) { return mode / 2 + 1; }
inline Coin coin_of(int mode) { return static_cast<Coin>(mode % 2); }
inline std::string mode_label(int mode) {
  auto [x, c] = site_of(mode);
  return "(" + std::to_string(x) + (c == Coin::right ? ",R)" : ",L)");
}

// Fixed-length ancilla word. Bit b1 (the "front" qubit the barrier acts on)
// lives at bit 0; the printable form reads b1 b2 ... bk left to right.
struct AncillaWord {
  std::uint64_t bits = 0;
  int k = 0;

  AncillaWord() = default;
  AncillaWord(std::uint64_t b, int len) : bits(b), k(len) {
    if (len < 0 || len > 64) throw std::invalid_argument("AncillaWord: k must be in [0,64]");
    if (len < 64) bits &= (len == 0) ? 0 : ((~0ULL) >> (64 - len));
  }
  static AncillaWord zeros(int len) { return AncillaWord(0, len); }
  static AncillaWord from_string(const std::string& s) {
    AncillaWord w(0, static_cast<int>(s.size()));
    for (int i = 0; i < w.k; ++i) {
      if (s[i] == '1') w.bits |= (1ULL << i);
      else if (s[i] != '0') throw std::invalid_argument("AncillaWord: bad bit char");
    }
    return w;
  }

  int bit(int i) const { return static_cast<int>((bits >> i) & 1ULL); }  // i in [0,k)
  void set_bit(int i, int v) {
    if (v) bits |= (1ULL << i); else bits &= ~(1ULL << i);
  }
  int front() const { return bit(0); }

  // (b1,...,bk) -> (b2,...,bk,b1): front qubit moves to the back.
  AncillaWord cycled() const {
    if (k <= 1) return *this;
    AncillaWord w(*this);
    std::uint64_t b1 = bits & 1ULL;
    w.bits = (bits >> 1) | (b1 << (k - 1));
    return w;
  }
  // Inverse cycle: (b1,...,bk) -> (bk,b1,...,b_{k-1}).
  AncillaWord cycled_back() const {
    if (k <= 1) return *this;
    AncillaWord w(*this);
    std::uint64_t bk = (bits >> (k - 1)) & 1ULL;
    w.bits = ((bits << 1) | bk) & ((~0ULL) >> (64 - k));
    return w;
  }

  std::string str() const {
    std::string s(static_cast<size_t>(k), '0');
    for (int i = 0; i < k; ++i) if (bit(i)) s[i] = '1';
    return s;
  }

  friend bool operator==(const AncillaWord& a, const AncillaWord& b) {
    return a.k == b.k && a.bits == b.bits;
  }
  friend bool operator<(const AncillaWord& a, const AncillaWord& b) {
    if (a.k != b.k) return a.k < b.k;
    return a.bits < b.bits;
  }
};

// Occupied-mode list, strictly ascending (canonical form).
struct FermionConfig {
  std::vector<int> modes;

  FermionConfig() = default;
  explicit FermionConfig(std::vector<int> m) : modes(std::move(m)) {}

  int n() const { return static_cast<int>(modes.size()); }
  bool contains(int m) const {
    for (int q : modes) { if (q == m) return true; if (q > m) return false; }
    return false;
  }
  bool canonical() const {
    for (size_t i = 1; i < modes.size(); ++i)
      if (modes[i] <= modes[i - 1]) return false;
    return true;
  }

  friend bool operator==(const FermionConfig& a, const FermionConfig& b) {
    return a.modes == b.modes;
  }
  friend bool operator<(const FermionConfig& a, const FermionConfig& b) {
    return a.modes < b.modes;
  }
};

// a†_mode applied from the left onto the ascending product; null on double
// occupancy, else sign = (-1)^(# occupied modes with smaller index).
std::optional<std::pair<FermionConfig, int>> apply_creation(const FermionConfig& cfg, int mode);

// Canonicalize an arbitrary (possibly unsorted) mode list: returns the sorted
// config and the parity sign of the sorting permutation; null on duplicates.
std::optional<std::pair<FermionConfig, int>> config_from_modes(const std::vector<int>& modes);

struct BasisKey {
  FermionConfig cfg;
  AncillaWord word;

  friend bool operator==(const BasisKey& a, const BasisKey& b) {
    return a.cfg == b.cfg && a.word == b.word;
  }
  friend bool operator<(const BasisKey& a, const BasisKey& b) {
    if (a.cfg.modes != b.cfg.modes) return a.cfg < b.cfg;
    return a.word < b.word;
  }
};

struct StateMeta {
  int M = 0;   // chain length
  int x0 = 0;  // barrier position
  int k = 0;   // ancilla size

  friend bool operator==(const StateMeta& a, const StateMeta& b) {
    return a.M == b.M && a.x0 == b.x0 && a.k == b.k;
  }
};

// Sparse pure state over (FermionConfig, AncillaWord) basis keys. Ordered map
// keeps iteration deterministic so emitted files are byte-stable.
struct SparseState {
  StateMeta meta;
  std::map<BasisKey, cplx> amp;

  SparseState() = default;
  explicit SparseState(StateMeta m) : meta(m) {}

  static SparseState basis_ket(StateMeta m, const FermionConfig& cfg, const AncillaWord& w) {
    SparseState s(m);
    s.amp[{cfg, w}] = cplx(1.0, 0.0);
    return s;
  }
  static SparseState single_particle(StateMeta m, int x, Coin c, const AncillaWord& w) {
    return basis_ket(m, FermionConfig({mode_of(x, c, m.M)}), w);
  }

  void add(const FermionConfig& cfg, const AncillaWord& w, cplx a) {
    if (a == cplx(0.0, 0.0)) return;
    auto& slot = amp[{cfg, w}];
    slot += a;
    if (slot == cplx(0.0, 0.0)) amp.erase({cfg, w});
  }

  double norm_sq() const;
  double norm() const;
};

cplx inner_product(const SparseState& a, const SparseState& b);  // conjugate-linear in a
SparseState normalize(const SparseState& s);                     // throws on zero norm
SparseState prune(const SparseState& s, double eps_prune);       // drop small, renormalize

// Hermitian matrix with explicit basis labels (row i <-> basis[i]).
struct DensityMatrix {
  std::vector<FermionConfig> basis;
  Eigen::MatrixXcd mat;

  double trace() const { return mat.trace().real(); }
};

// Trace out the ancilla register: rho[c,c'] = sum_w psi(c,w) conj(psi(c',w)).
// Basis = configs present in the state, ascending. Construction symmetrizes.
DensityMatrix partial_trace_ancilla(const SparseState& s);

// Same partial trace laid out on the full single-particle mode basis (2M
// labels, requires N=1 everywhere); used for channel comparisons.
Eigen::MatrixXcd reduced_single_particle(const SparseState& s);

// Two-fermion reduced state in first quantization on the (2M)^2 product
// basis: config {i<j} with amplitude a contributes a/sqrt2 at (i,j) and
// -a/sqrt2 at (j,i). Requires N=2 everywhere.
Eigen::MatrixXcd reduced_two_fermion_first_quantized(const SparseState& s);

// All ascending N-subsets of {0,...,two_m-1}, lexicographic.
std::vector<FermionConfig> all_configs(int two_m, int N);

}  // namespace qsb
