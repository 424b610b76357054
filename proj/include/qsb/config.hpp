// Scenario description: everything a reproducible run needs, loadable from
// JSON with command-line overrides layered on top.
#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "qsb/common.hpp"
#include "qsb/dynamics.hpp"
#include "qsb/hilbert.hpp"

namespace qsb {

struct ParticleSpec {
  int x = 1;
  Coin coin = Coin::right;
};

// Register preparation: either a definite bit word ("0010", front slot b1
// printed first) or the two-amplitude descriptor alpha|0..0> + beta|1..1>.
struct AncillaInit {
  bool is_word = true;
  std::string word = "";  // empty means all zeros
  double alpha_re = 1.0, alpha_im = 0.0;
  double beta_re = 0.0, beta_im = 0.0;
  cplx alpha() const { return {alpha_re, alpha_im}; }
  cplx beta() const { return {beta_re, beta_im}; }
};

struct ScenarioConfig {
  int M = 6;
  int x0 = 3;
  int k = 4;
  std::vector<ParticleSpec> particles;  // ignored when random_n > 0
  int random_n = 0;                     // "random:N" placement over all modes
  AncillaInit ancilla;
  int steps = 25;
  std::uint64_t seed = 1;
  int trials = 1;
  int threads = 1;
  bool fire_on_swap = true;
  double eps_norm_tol = eps_norm;
  double eps_eig_tol = eps_eig;
  double tol_slater = -1.0;  // negative: relative default inside slater_rank
  std::string out_csv;
  std::string out_summary;
  std::string format = "csv";  // step-record format: csv | json

  void validate() const;  // throws std::invalid_argument
  BarrierSpec barrier() const;
  StateMeta meta() const { return StateMeta{M, x0, k}; }
  // Builds the initial state; consumes the seed only for random placement.
  SparseState initial_state() const;
};

ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& c);
ScenarioConfig load_config(const std::string& path);
void save_config(const ScenarioConfig& c, const std::string& path);

}  // namespace qsb
