#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pinnevo/evolve.hpp"
#include "pinnevo/space.hpp"

namespace pinnevo::config {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

inline const std::vector<std::string>& modes() {
  static const std::vector<std::string> m = {"space", "train", "evaluate", "search-evo", "search-random"};
  return m;
}

struct RunConfig {
  std::string mode = "space";
  std::string problem = "klein_gordon:I";
  std::uint64_t seed = 1;
  int workers = 0;  // 0: available cores
  std::string out = "out";
  std::string genome;    // genome file for train / evaluate
  std::string snapshot;  // parameter file for evaluate
  std::optional<int> epochs;
  bool exact_field = false;
  bool resume = false;
  double time_limit = -1;  // seconds per individual; 0 off, < 0 adaptive
  double first_generation_limit = 600;
  // evolution
  double R_cm = 0.5, R_c = 1.0, R_l = 0.3, R_n = 0.3, R_s = 0.3, R_a = 0.7, R_e = 0.25;
  int N_c = 3, N_e = 4;
  std::vector<int> pop, gen_epochs;  // schedule rows; empty: per-problem default
  // search space
  space::SpaceConfig space;

  bool operator==(const RunConfig&) const = default;

  std::string family() const { return problem.substr(0, problem.find(':')); }

  int resolved_workers() const {
    if (workers > 0) return workers;
    return std::max(1u, std::thread::hardware_concurrency());
  }

  int resolved_epochs() const {
    if (epochs) return *epochs;
    return family() == "burgers" ? 3000 : 5000;
  }

  evolve::Schedule schedule() const {
    if (pop.empty()) return evolve::Schedule::for_problem(family());
    return {pop, gen_epochs};
  }

  evolve::EvolutionConfig evolution() const {
    evolve::EvolutionConfig c;
    c.schedule = schedule();
    c.R_cm = R_cm;
    c.R_c = R_c;
    c.rates = {R_l, R_n, R_s, R_a};
    c.R_e = R_e;
    c.N_c = N_c;
    c.N_e = N_e;
    c.time_limit = time_limit;
    c.first_generation_limit = first_generation_limit;
    c.seed = seed;
    c.workers = resolved_workers();
    c.random_search = mode == "search-random";
    return c;
  }

  /// Problems with the configuration as messages; empty when usable.
  std::vector<std::string> validate() const {
    std::vector<std::string> v;
    if (std::find(modes().begin(), modes().end(), mode) == modes().end())
      v.push_back("unknown mode '" + mode + "'");
    if (mode != "space") {
      try {
        problems::make_problem(problem);
      } catch (const std::exception& e) {
        v.push_back(e.what());
      }
    }
    if ((mode == "train" || mode == "evaluate") && genome.empty() && !(mode == "evaluate" && exact_field))
      v.push_back(mode + " needs a genome file");
    if (mode == "evaluate" && snapshot.empty() && !exact_field) v.push_back("evaluate needs a snapshot");
    if (epochs && *epochs < 0) v.push_back("epochs must be >= 0");
    if (workers < 0) v.push_back("workers must be >= 0");
    for (double r : {R_cm, R_c, R_l, R_n, R_s, R_a, R_e})
      if (!(r >= 0 && r <= 1)) v.push_back("rates must lie in [0, 1]");
    if (N_c < 1 || N_e < 1) v.push_back("N_c and N_e must be >= 1");
    if (!pop.empty())
      for (auto& s : schedule().validate()) v.push_back("schedule: " + s);
    if (space.n_min < 1 || space.n_max < space.n_min) v.push_back("layer range must satisfy 1 <= n_min <= n_max");
    if (space.n_neu < 0 || space.unary < 0 || space.binary < 0 || space.max_nodes < 0 || space.max_params < 0)
      v.push_back("space sizes must be >= 0");
    return v;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T number(const std::string& key, const std::string& value, int line) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) throw ConfigError("bad value '" + value + "' for " + key, line);
  return out;
}

inline bool boolean(const std::string& key, const std::string& value, int line) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("bad boolean '" + value + "' for " + key, line);
}

}  // namespace detail

/// Applies one `key = value` setting.
inline void set(RunConfig& c, const std::string& key, const std::string& value, int line = 0) {
  using detail::number;
  auto d = [&] { return number<double>(key, value, line); };
  auto i = [&] { return number<int>(key, value, line); };
  if (key == "mode") c.mode = value;
  else if (key == "problem") c.problem = value;
  else if (key == "seed") c.seed = number<std::uint64_t>(key, value, line);
  else if (key == "workers") c.workers = i();
  else if (key == "out") c.out = value;
  else if (key == "genome") c.genome = value;
  else if (key == "snapshot") c.snapshot = value;
  else if (key == "epochs") c.epochs = i();
  else if (key == "exact_field") c.exact_field = detail::boolean(key, value, line);
  else if (key == "resume") c.resume = detail::boolean(key, value, line);
  else if (key == "time_limit") c.time_limit = d();
  else if (key == "first_generation_limit") c.first_generation_limit = d();
  else if (key == "R_cm") c.R_cm = d();
  else if (key == "R_c") c.R_c = d();
  else if (key == "R_l") c.R_l = d();
  else if (key == "R_n") c.R_n = d();
  else if (key == "R_s") c.R_s = d();
  else if (key == "R_a") c.R_a = d();
  else if (key == "R_e") c.R_e = d();
  else if (key == "N_c") c.N_c = i();
  else if (key == "N_e") c.N_e = i();
  else if (key == "n_min") c.space.n_min = i();
  else if (key == "n_max") c.space.n_max = i();
  else if (key == "n_neu") c.space.n_neu = i();
  else if (key == "unary") c.space.unary = i();
  else if (key == "binary") c.space.binary = i();
  else if (key == "max_nodes") c.space.max_nodes = i();
  else if (key == "max_params") c.space.max_params = i();
  else throw ConfigError("unknown key '" + key + "'", line);
}

inline RunConfig parse(const std::string& text, RunConfig c = {}) {
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::map<int, std::pair<int, int>> rows;
  while (std::getline(in, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
    const std::string s = detail::trim(raw);
    if (s.empty()) continue;
    if (s.rfind("gen ", 0) == 0 || s.rfind("gen\t", 0) == 0) {
      std::istringstream row(s);
      std::string g, p, e, extra;
      int gi = 0, S = 0, E = 0;
      if (!(row >> g >> gi >> p >> S >> e >> E) || p != "pop" || e != "epochs" || (row >> extra))
        throw ConfigError("schedule rows read 'gen <i> pop <S> epochs <E>'", line);
      if (gi < 1) throw ConfigError("generation index must be >= 1", line);
      if (rows.count(gi)) throw ConfigError("generation " + std::to_string(gi) + " repeated", line);
      rows[gi] = {S, E};
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = detail::trim(s.substr(0, eq)), value = detail::trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key", line);
    set(c, key, value, line);
  }
  if (!rows.empty()) {
    c.pop.clear();
    c.gen_epochs.clear();
    int expect = 1;
    for (auto& [gi, row] : rows) {
      if (gi != expect++) throw ConfigError("schedule rows must number generations 1..T without gaps");
      c.pop.push_back(row.first);
      c.gen_epochs.push_back(row.second);
    }
  }
  return c;
}

inline RunConfig load(const std::string& path, RunConfig c = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), std::move(c));
}

inline std::string serialize(const RunConfig& c) {
  using detail::fmt;
  std::ostringstream o;
  o << "mode = " << c.mode << "\n";
  o << "problem = " << c.problem << "\n";
  o << "seed = " << c.seed << "\n";
  o << "workers = " << c.workers << "\n";
  o << "out = " << c.out << "\n";
  if (!c.genome.empty()) o << "genome = " << c.genome << "\n";
  if (!c.snapshot.empty()) o << "snapshot = " << c.snapshot << "\n";
  if (c.epochs) o << "epochs = " << *c.epochs << "\n";
  o << "exact_field = " << (c.exact_field ? "true" : "false") << "\n";
  o << "resume = " << (c.resume ? "true" : "false") << "\n";
  o << "time_limit = " << fmt(c.time_limit) << "\n";
  o << "first_generation_limit = " << fmt(c.first_generation_limit) << "\n";
  o << "R_cm = " << fmt(c.R_cm) << "\nR_c = " << fmt(c.R_c) << "\nR_l = " << fmt(c.R_l)
    << "\nR_n = " << fmt(c.R_n) << "\nR_s = " << fmt(c.R_s) << "\nR_a = " << fmt(c.R_a)
    << "\nR_e = " << fmt(c.R_e) << "\n";
  o << "N_c = " << c.N_c << "\nN_e = " << c.N_e << "\n";
  o << "n_min = " << c.space.n_min << "\nn_max = " << c.space.n_max << "\nn_neu = " << c.space.n_neu
    << "\nunary = " << c.space.unary << "\nbinary = " << c.space.binary
    << "\nmax_nodes = " << c.space.max_nodes << "\nmax_params = " << c.space.max_params << "\n";
  for (std::size_t g = 0; g < c.pop.size(); ++g)
    o << "gen " << g + 1 << " pop " << c.pop[g] << " epochs " << c.gen_epochs[g] << "\n";
  return o.str();
}

}  // namespace pinnevo::config
