#include "qsb/config.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>

namespace qsb {

namespace {

Coin coin_from_string(const std::string& s) {
  if (s == "right" || s == "R" || s == "r") return Coin::right;
  if (s == "left" || s == "L" || s == "l") return Coin::left;
  throw std::invalid_argument("config: coin must be \"right\" or \"left\", got \"" + s + "\"");
}

std::string coin_to_string(Coin c) { return c == Coin::right ? "right" : "left"; }

cplx parse_amplitude(const nlohmann::json& j, const char* who) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return cplx(j[0].get<double>(), j[1].get<double>());
  throw std::invalid_argument(std::string("config: ") + who +
                              " must be a number or [re, im] pair");
}

nlohmann::json dump_amplitude(cplx a) {
  if (a.imag() == 0.0) return a.real();
  return nlohmann::json::array({a.real(), a.imag()});
}

}  // namespace

void ScenarioConfig::validate() const {
  if (M < 3) throw std::invalid_argument("config: M >= 3 required");
  if (x0 < 2 || x0 > M - 1) throw std::invalid_argument("config: 2 <= x0 <= M-1 required");
  if (k < 1 || k > 64) throw std::invalid_argument("config: 1 <= k <= 64 required");
  if (steps < 0) throw std::invalid_argument("config: steps >= 0 required");
  if (trials < 1) throw std::invalid_argument("config: trials >= 1 required");
  if (threads < 1) throw std::invalid_argument("config: threads >= 1 required");
  if (random_n < 0) throw std::invalid_argument("config: random particle count >= 0");
  if (random_n > 2 * M)
    throw std::invalid_argument("config: cannot place more particles than modes");
  if (random_n == 0 && particles.empty())
    throw std::invalid_argument("config: no particles specified");
  if (random_n > 0 && !particles.empty())
    throw std::invalid_argument("config: explicit particles and random placement conflict");

  std::set<int> seen;
  for (const ParticleSpec& p : particles) {
    if (p.x < 1 || p.x > M) throw std::invalid_argument("config: particle position out of range");
    if (!seen.insert(mode_of(p.x, p.coin, M)).second)
      throw std::invalid_argument("config: particles must occupy distinct modes");
  }

  if (ancilla.is_word) {
    if (!ancilla.word.empty()) {
      if (static_cast<int>(ancilla.word.size()) != k)
        throw std::invalid_argument("config: register word length must equal k");
      for (char ch : ancilla.word)
        if (ch != '0' && ch != '1')
          throw std::invalid_argument("config: register word must be a 0/1 string");
    }
  } else {
    const double p = std::norm(ancilla.alpha()) + std::norm(ancilla.beta());
    if (std::abs(p - 1.0) > 1e-9)
      throw std::invalid_argument("config: |alpha|^2 + |beta|^2 must be 1");
  }

  if (format != "csv" && format != "json")
    throw std::invalid_argument("config: format must be \"csv\" or \"json\"");
  if (eps_norm_tol <= 0 || eps_eig_tol <= 0)
    throw std::invalid_argument("config: tolerances must be positive");
}

BarrierSpec ScenarioConfig::barrier() const {
  BarrierSpec b;
  b.x0 = x0;
  b.fire_on_swap = fire_on_swap;
  return b;
}

SparseState ScenarioConfig::initial_state() const {
  validate();

  std::vector<int> modes;
  if (random_n > 0) {
    std::mt19937_64 rng(derive_seed(seed, 0));
    std::vector<int> cand(2 * M);
    for (int m = 0; m < 2 * M; ++m) cand[m] = m;
    for (int i = 0; i < random_n; ++i) {
      std::uniform_int_distribution<int> pick(i, 2 * M - 1);
      std::swap(cand[i], cand[pick(rng)]);
    }
    modes.assign(cand.begin(), cand.begin() + random_n);
  } else {
    for (const ParticleSpec& p : particles) modes.push_back(mode_of(p.x, p.coin, M));
  }
  std::sort(modes.begin(), modes.end());
  const FermionConfig cfg(std::move(modes));

  SparseState s(meta());
  if (ancilla.is_word) {
    const AncillaWord w = ancilla.word.empty() ? AncillaWord::zeros(k)
                                               : AncillaWord::from_string(ancilla.word);
    s.add(cfg, w, cplx(1.0, 0.0));
  } else {
    s.add(cfg, AncillaWord::zeros(k), ancilla.alpha());
    s.add(cfg, AncillaWord(~0ULL, k), ancilla.beta());
  }
  return s;
}

ScenarioConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  static const std::set<std::string> known = {
      "M",     "x0",      "k",      "particles", "ancilla_init", "steps",  "seed",
      "trials", "threads", "fire_on_swap",       "tolerances",   "outputs", "format"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw std::invalid_argument("config: unknown key \"" + it.key() + "\"");

  ScenarioConfig c;
  c.particles.clear();
  c.M = j.value("M", c.M);
  c.x0 = j.value("x0", c.x0);
  c.k = j.value("k", c.k);
  c.steps = j.value("steps", c.steps);
  c.seed = j.value("seed", c.seed);
  c.trials = j.value("trials", c.trials);
  c.threads = j.value("threads", c.threads);
  c.fire_on_swap = j.value("fire_on_swap", c.fire_on_swap);
  c.format = j.value("format", c.format);

  if (j.contains("particles")) {
    const nlohmann::json& p = j["particles"];
    if (p.is_string()) {
      const std::string s = p.get<std::string>();
      const std::string prefix = "random:";
      if (s.rfind(prefix, 0) != 0)
        throw std::invalid_argument("config: particle string must look like \"random:N\"");
      try {
        c.random_n = std::stoi(s.substr(prefix.size()));
      } catch (const std::exception&) {
        throw std::invalid_argument("config: bad particle count in \"" + s + "\"");
      }
    } else if (p.is_array()) {
      for (const nlohmann::json& e : p) {
        if (!e.is_object() || !e.contains("x") || !e.contains("coin"))
          throw std::invalid_argument("config: each particle needs {\"x\":..., \"coin\":...}");
        ParticleSpec ps;
        ps.x = e["x"].get<int>();
        ps.coin = coin_from_string(e["coin"].get<std::string>());
        c.particles.push_back(ps);
      }
    } else {
      throw std::invalid_argument("config: particles must be an array or \"random:N\"");
    }
  }

  if (j.contains("ancilla_init")) {
    const nlohmann::json& a = j["ancilla_init"];
    if (a.is_string()) {
      c.ancilla.is_word = true;
      c.ancilla.word = a.get<std::string>();
    } else if (a.is_object()) {
      if (!a.contains("alpha") || !a.contains("beta"))
        throw std::invalid_argument("config: ancilla descriptor needs alpha and beta");
      c.ancilla.is_word = false;
      const cplx al = parse_amplitude(a["alpha"], "alpha");
      const cplx be = parse_amplitude(a["beta"], "beta");
      c.ancilla.alpha_re = al.real();
      c.ancilla.alpha_im = al.imag();
      c.ancilla.beta_re = be.real();
      c.ancilla.beta_im = be.imag();
    } else {
      throw std::invalid_argument("config: ancilla_init must be a word or {alpha, beta}");
    }
  }

  if (j.contains("tolerances")) {
    const nlohmann::json& t = j["tolerances"];
    c.eps_norm_tol = t.value("eps_norm", c.eps_norm_tol);
    c.eps_eig_tol = t.value("eps_eig", c.eps_eig_tol);
    c.tol_slater = t.value("tol_slater", c.tol_slater);
  }
  if (j.contains("outputs")) {
    const nlohmann::json& o = j["outputs"];
    c.out_csv = o.value("csv", c.out_csv);
    c.out_summary = o.value("summary", c.out_summary);
  }

  c.validate();
  return c;
}

nlohmann::json config_to_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["M"] = c.M;
  j["x0"] = c.x0;
  j["k"] = c.k;
  if (c.random_n > 0) {
    j["particles"] = "random:" + std::to_string(c.random_n);
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (const ParticleSpec& p : c.particles)
      arr.push_back({{"x", p.x}, {"coin", coin_to_string(p.coin)}});
    j["particles"] = arr;
  }
  if (c.ancilla.is_word) {
    j["ancilla_init"] = c.ancilla.word;
  } else {
    j["ancilla_init"] = {{"alpha", dump_amplitude(c.ancilla.alpha())},
                         {"beta", dump_amplitude(c.ancilla.beta())}};
  }
  j["steps"] = c.steps;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["threads"] = c.threads;
  j["fire_on_swap"] = c.fire_on_swap;
  j["tolerances"] = {{"eps_norm", c.eps_norm_tol},
                     {"eps_eig", c.eps_eig_tol},
                     {"tol_slater", c.tol_slater}};
  j["outputs"] = {{"csv", c.out_csv}, {"summary", c.out_summary}};
  j["format"] = c.format;
  return j;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open \"" + path + "\"");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config: parse error in \"" + path + "\": " + e.what());
  }
  return config_from_json(j);
}

void save_config(const ScenarioConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("config: cannot write \"" + path + "\"");
  out << config_to_json(c).dump(2) << "\n";
}

}  // namespace qsb
