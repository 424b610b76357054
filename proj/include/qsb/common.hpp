// Shared numeric conventions for the barrier-walk library.
#pragma once

#include <complex>
#include <cstdint>

namespace qsb {

using cplx = std::complex<double>;

inline constexpr double eps_norm = 1e-10;   // norm / trace drift tolerance
inline constexpr double eps_eig = 1e-10;    // positivity tolerance on eigenvalues
inline constexpr double euler_gamma = 0.5772156649015329;

// splitmix64: stateless stream splitter used to derive independent per-trial
// seeds from (master seed, trial index). Output feeds std::mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace qsb
