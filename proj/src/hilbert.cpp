#include "qsb/hilbert.hpp"

#include <algorithm>
#include <cmath>

namespace qsb {

std::optional<std::pair<FermionConfig, int>> apply_creation(const FermionConfig& cfg, int mode) {
  FermionConfig out;
  out.modes.reserve(cfg.modes.size() + 1);
  int smaller = 0;
  bool placed = false;
  for (int m : cfg.modes) {
    if (m == mode) return std::nullopt;  // a†a† = 0
    if (m < mode) {
      ++smaller;
      out.modes.push_back(m);
    } else {
      if (!placed) { out.modes.push_back(mode); placed = true; }
      out.modes.push_back(m);
    }
  }
  if (!placed) out.modes.push_back(mode);
  return std::make_pair(out, (smaller % 2 == 0) ? +1 : -1);
}

std::optional<std::pair<FermionConfig, int>> config_from_modes(const std::vector<int>& modes) {
  // Build by successive left-multiplications; total sign is the permutation
  // parity relative to ascending order. Note a†_m1 ... a†_mN |0> applied
  // left to right means the LAST listed operator acts on the vacuum first.
  FermionConfig cfg;
  int sign = 1;
  for (auto it = modes.rbegin(); it != modes.rend(); ++it) {
    auto r = apply_creation(cfg, *it);
    if (!r) return std::nullopt;
    cfg = std::move(r->first);
    sign *= r->second;
  }
  return std::make_pair(cfg, sign);
}

double SparseState::norm_sq() const {
  double s = 0.0;
  for (const auto& [key, a] : amp) s += std::norm(a);
  return s;
}
double SparseState::norm() const { return std::sqrt(norm_sq()); }

cplx inner_product(const SparseState& a, const SparseState& b) {
  if (!(a.meta == b.meta))
    throw std::invalid_argument("inner_product: metadata mismatch (M, x0, k)");
  // Walk the smaller map.
  const SparseState& small = (a.amp.size() <= b.amp.size()) ? a : b;
  const SparseState& large = (a.amp.size() <= b.amp.size()) ? b : a;
  cplx s(0.0, 0.0);
  const bool a_is_small = (&small == &a);
  for (const auto& [key, amp_s] : small.amp) {
    auto it = large.amp.find(key);
    if (it == large.amp.end()) continue;
    s += a_is_small ? std::conj(amp_s) * it->second : std::conj(it->second) * amp_s;
  }
  return s;
}

SparseState normalize(const SparseState& s) {
  double n = s.norm();
  if (n <= 0.0) throw std::runtime_error("normalize: zero-norm state");
  SparseState out(s.meta);
  for (const auto& [key, a] : s.amp) out.amp[key] = a / n;
  return out;
}

SparseState prune(const SparseState& s, double eps_prune) {
  if (eps_prune <= 0.0) return s;  // eps_prune = 0 is the identity
  SparseState out(s.meta);
  for (const auto& [key, a] : s.amp)
    if (std::abs(a) >= eps_prune) out.amp[key] = a;
  return normalize(out);
}

DensityMatrix partial_trace_ancilla(const SparseState& s) {
  DensityMatrix dm;
  std::map<FermionConfig, int> index;
  for (const auto& [key, a] : s.amp) index.emplace(key.cfg, 0);
  int n = 0;
  for (auto& [cfg, idx] : index) {
    idx = n++;
    dm.basis.push_back(cfg);
  }
  dm.mat = Eigen::MatrixXcd::Zero(n, n);

  // Group by ancilla word: rho += v_w v_w† for the config-amplitude vector of
  // each word. Keys sort by config first, so collect per-word vectors.
  std::map<AncillaWord, Eigen::VectorXcd> per_word;
  for (const auto& [key, a] : s.amp) {
    auto it = per_word.find(key.word);
    if (it == per_word.end())
      it = per_word.emplace(key.word, Eigen::VectorXcd::Zero(n)).first;
    it->second(index[key.cfg]) = a;
  }
  for (const auto& [w, v] : per_word) dm.mat += v * v.adjoint();
  dm.mat = 0.5 * (dm.mat + dm.mat.adjoint().eval());  // exact Hermiticity
  return dm;
}

Eigen::MatrixXcd reduced_single_particle(const SparseState& s) {
  const int dim = 2 * s.meta.M;
  std::map<AncillaWord, Eigen::VectorXcd> per_word;
  for (const auto& [key, a] : s.amp) {
    if (key.cfg.n() != 1)
      throw std::invalid_argument("reduced_single_particle: state is not single-particle");
    auto it = per_word.find(key.word);
    if (it == per_word.end())
      it = per_word.emplace(key.word, Eigen::VectorXcd::Zero(dim)).first;
    it->second(key.cfg.modes[0]) = a;
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [w, v] : per_word) rho += v * v.adjoint();
  rho = 0.5 * (rho + rho.adjoint().eval());
  return rho;
}

Eigen::MatrixXcd reduced_two_fermion_first_quantized(const SparseState& s) {
  const int d = 2 * s.meta.M;
  const int dim = d * d;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::map<AncillaWord, Eigen::VectorXcd> per_word;
  for (const auto& [key, a] : s.amp) {
    if (key.cfg.n() != 2)
      throw std::invalid_argument("reduced_two_fermion_first_quantized: state is not two-fermion");
    auto it = per_word.find(key.word);
    if (it == per_word.end())
      it = per_word.emplace(key.word, Eigen::VectorXcd::Zero(dim)).first;
    const int i = key.cfg.modes[0], j = key.cfg.modes[1];
    it->second(i * d + j) += a * inv_sqrt2;
    it->second(j * d + i) -= a * inv_sqrt2;
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [w, v] : per_word) rho += v * v.adjoint();
  rho = 0.5 * (rho + rho.adjoint().eval());
  return rho;
}

std::vector<FermionConfig> all_configs(int two_m, int N) {
  std::vector<FermionConfig> out;
  if (N == 0) { out.push_back(FermionConfig{}); return out; }
  if (N > two_m) return out;
  std::vector<int> idx(N);
  for (int i = 0; i < N; ++i) idx[i] = i;
  while (true) {
    out.push_back(FermionConfig(idx));
    int i = N - 1;
    while (i >= 0 && idx[i] == two_m - N + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < N; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

}  // namespace qsb
