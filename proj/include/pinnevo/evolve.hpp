#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "pinnevo/autonet.hpp"
#include "pinnevo/detail/random.hpp"
#include "pinnevo/genome.hpp"
#include "pinnevo/optim.hpp"
#include "pinnevo/problems.hpp"

namespace pinnevo::evolve {

using genome::Genome;
using optim::Status;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Schedule {
  std::vector<int> population;
  std::vector<int> epochs;

  int generations() const { return static_cast<int>(population.size()); }

  std::vector<std::string> validate() const {
    std::vector<std::string> v;
    if (population.empty()) v.push_back("empty schedule");
    if (population.size() != epochs.size()) v.push_back("population and epoch rows differ in length");
    for (std::size_t g = 0; g < population.size(); ++g) {
      if (population[g] < 1) v.push_back("generation " + std::to_string(g + 1) + ": population < 1");
      if (g < epochs.size() && epochs[g] < 0)
        v.push_back("generation " + std::to_string(g + 1) + ": negative epochs");
      if (g > 0 && population[g] > population[g - 1])
        v.push_back("generation " + std::to_string(g + 1) + ": population grows");
      if (g > 0 && g < epochs.size() && epochs[g] < epochs[g - 1])
        v.push_back("generation " + std::to_string(g + 1) + ": epochs shrink");
    }
    return v;
  }

  /// Klein-Gordon and Lame searches.
  static Schedule table_kg_lame() {
    return {{1000, 250, 125, 85, 65, 50, 40, 30, 25, 20, 15, 15, 15, 10, 10},
            {100, 200, 400, 600, 800, 1000, 1200, 1600, 2000, 2500, 3000, 3500, 4000, 4500, 5000}};
  }
  /// Burgers search.
  static Schedule table_burgers() {
    return {{1000, 200, 100, 65, 50, 40, 35, 30, 25, 20, 20, 20, 15, 15, 15},
            {100, 200, 400, 600, 800, 1000, 1200, 1400, 1600, 1800, 2000, 2200, 2400, 2700, 3000}};
  }
  static Schedule for_problem(const std::string& family) {
    return family == "burgers" ? table_burgers() : table_kg_lame();
  }
};

struct EvolutionConfig {
  Schedule schedule = Schedule::table_kg_lame();
  double R_cm = 0.5;  // crossover vs mutation
  double R_c = 1.0;   // crossover rate
  genome::MutationRates rates;
  double R_e = 0.25;  // elitist fraction
  int N_c = 3;        // candidates
  int N_e = 4;        // evaluations per candidate
  /// Per-individual wall-time limit in seconds: > 0 fixed, 0 off, < 0 adaptive.
  double time_limit = -1;
  double time_factor = 20;              // adaptive: factor x median epoch time x E_g
  double first_generation_limit = 600;  // adaptive: limit for generation 1
  std::uint64_t seed = 1;
  int workers = 1;
  bool random_search = false;
  std::string archive_path;  // empty: in memory only
  genome::InitPolicy init;
  optim::LbfgsConfig lbfgs;  // epochs and time limit are overridden per evaluation
};

/// Selection probabilities by rank, index 0 = worst.
inline std::vector<double> linear_ranking(int S) {
  if (S < 1) throw std::invalid_argument("population size must be >= 1");
  if (S == 1) return {1.0};
  const double eta_minus = 2.0 / (1 + S), eta_plus = 2.0 * S / (1 + S);
  std::vector<double> p(S);
  for (int i = 1; i <= S; ++i)
    p[i - 1] = (eta_minus + (eta_plus - eta_minus) * (i - 1) / (S - 1)) / S;
  return p;
}

template <class R>
int sample_index(const std::vector<double>& probs, R& rng) {
  const double u = uniform_real(rng);
  double acc = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

struct FitnessReport {
  std::string key;     // evaluation key, unique per run
  std::string id;      // genome identity: generation and slot of creation
  Genome genome;
  int generation = 0;  // when evaluated
  std::string role;    // init, child, elite, candidate
  int epochs = 0;      // configured budget
  int epochs_run = 0;
  double initial_loss = 0;
  double min_loss = std::numeric_limits<double>::infinity();
  double final_loss = 0;
  double fitness = kNegInf;
  Status status = Status::completed;
  double wall_time = 0;
  std::uint64_t seed = 0;
};

struct TrainResult {
  FitnessReport report;
  optim::TrainTrace trace;
  autonet::Vector theta;
};

inline bool failed(Status s) { return s == Status::overflow || s == Status::timeout; }

/// Builds, initializes and trains one genome.
inline TrainResult train(const Genome& g, const problems::PdeProblem& problem,
                         const problems::SampleSet& samples, int epochs, double time_limit,
                         std::uint64_t seed, optim::LbfgsConfig cfg = {}) {
  TrainResult out;
  autonet::Network net(g, problem.input_dim, problem.output_dim);
  Rng rng(seed);
  out.theta = net.init_params(rng);
  cfg.epochs = epochs;
  cfg.time_limit = time_limit;
  optim::Objective obj = [&](const autonet::Vector& theta, autonet::Vector& grad) {
    const auto rep = problems::loss_and_gradient(problem, samples, net, theta, grad);
    return rep.finite ? rep.total : std::numeric_limits<double>::quiet_NaN();
  };
  out.trace = optim::minimize(obj, out.theta, cfg);
  FitnessReport& r = out.report;
  r.genome = g;
  r.epochs = epochs;
  r.epochs_run = out.trace.epochs_run();
  r.status = out.trace.status;
  r.wall_time = out.trace.wall_time;
  r.seed = seed;
  if (!out.trace.losses.empty()) {
    r.initial_loss = out.trace.losses.front();
    r.final_loss = out.trace.losses.back();
    r.min_loss = out.trace.min_loss;
  }
  r.fitness = failed(r.status) || out.trace.losses.empty() ? kNegInf : -r.min_loss;
  return out;
}

inline FitnessReport evaluate(const Genome& g, const problems::PdeProblem& problem,
                              const problems::SampleSet& samples, int epochs, double time_limit,
                              std::uint64_t seed, const optim::LbfgsConfig& cfg = {}) {
  return train(g, problem, samples, epochs, time_limit, seed, cfg).report;
}

// ---------------------------------------------------------------------------
// Archive (line-delimited JSON, rewritten atomically)

inline nlohmann::json to_json(const FitnessReport& r) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"key", r.key},
          {"id", r.id},
          {"generation", r.generation},
          {"role", r.role},
          {"genome", genome::to_text(r.genome, true)},
          {"epochs", r.epochs},
          {"epochs_run", r.epochs_run},
          {"initial_loss", num(r.initial_loss)},
          {"min_loss", num(r.min_loss)},
          {"final_loss", num(r.final_loss)},
          {"fitness", num(r.fitness)},
          {"status", optim::to_string(r.status)},
          {"wall_time", r.wall_time},
          {"seed", std::to_string(r.seed)}};
}

inline FitnessReport from_json(const nlohmann::json& j) {
  auto num = [](const nlohmann::json& v, double fallback) {
    return v.is_null() ? fallback : v.get<double>();
  };
  FitnessReport r;
  r.key = j.at("key").get<std::string>();
  r.id = j.at("id").get<std::string>();
  r.generation = j.at("generation").get<int>();
  r.role = j.at("role").get<std::string>();
  r.genome = genome::from_text(j.at("genome").get<std::string>());
  r.epochs = j.at("epochs").get<int>();
  r.epochs_run = j.at("epochs_run").get<int>();
  r.initial_loss = num(j.at("initial_loss"), std::numeric_limits<double>::quiet_NaN());
  r.min_loss = num(j.at("min_loss"), std::numeric_limits<double>::infinity());
  r.final_loss = num(j.at("final_loss"), std::numeric_limits<double>::quiet_NaN());
  r.fitness = num(j.at("fitness"), kNegInf);
  r.status = optim::status_from_string(j.at("status").get<std::string>());
  r.wall_time = j.at("wall_time").get<double>();
  r.seed = std::stoull(j.at("seed").get<std::string>());
  return r;
}

/// Writes `text` to `path` through a temporary file and a rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

class Archive {
 public:
  explicit Archive(std::string path = {}) : path_(std::move(path)) {}

  /// Loads records from an earlier (possibly interrupted) run.
  void load() {
    if (path_.empty() || !std::filesystem::exists(path_)) return;
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      FitnessReport r = from_json(nlohmann::json::parse(line));
      previous_[r.key] = std::move(r);
    }
  }

  /// A replayable record for this key and genome, if the earlier run made one.
  std::optional<FitnessReport> lookup(const std::string& key, const Genome& g) const {
    std::lock_guard lock(mu_);
    auto it = previous_.find(key);
    if (it == previous_.end() || !(it->second.genome == g)) return std::nullopt;
    return it->second;
  }

  void add(const FitnessReport& r) {
    std::lock_guard lock(mu_);
    records_.push_back(r);
    flush_locked();
  }

  std::vector<FitnessReport> records() const {
    std::lock_guard lock(mu_);
    return records_;
  }

  std::size_t replayed() const { return replayed_; }
  void count_replay() { ++replayed_; }

 private:
  void flush_locked() {
    if (path_.empty()) return;
    // Keep the file ordered by key so it does not depend on completion order.
    std::vector<const FitnessReport*> sorted;
    for (auto& r : records_) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(),
              [](auto* a, auto* b) { return a->key < b->key; });
    std::string text;
    for (auto* r : sorted) text += to_json(*r).dump() + "\n";
    write_atomic(path_, text);
  }

  std::string path_;
  mutable std::mutex mu_;
  std::vector<FitnessReport> records_;
  std::map<std::string, FitnessReport> previous_;
  std::atomic<std::size_t> replayed_{0};
};

// ---------------------------------------------------------------------------
// Worker pool

/// Runs jobs[0..n) on `workers` threads; results land at their job index.
template <class Job>
void run_parallel(std::size_t n, int workers, Job&& job) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Evolution

class AllInvalidGeneration : public std::runtime_error {
 public:
  explicit AllInvalidGeneration(int generation)
      : std::runtime_error("generation " + std::to_string(generation) +
                           ": every individual overflowed or timed out"),
        generation_(generation) {}
  int generation() const { return generation_; }

 private:
  int generation_;
};

struct Candidate {
  std::string id;
  Genome genome;
  std::vector<double> fitness;  // one per evaluation
  double mean_fitness = kNegInf;
};

struct GenerationSummary {
  int generation = 0;
  int population = 0;
  int epochs = 0;
  int elitists = 0;
  double best_child = kNegInf;   // best among newly trained individuals
  double best = kNegInf;         // best after the elitist merge
  double time_limit = 0;
  std::vector<std::string> evaluated;  // genome texts trained this generation
};

struct EvolutionResult {
  Genome winner;
  std::string winner_id;
  double winner_fitness = kNegInf;
  std::vector<Candidate> candidates;
  std::vector<GenerationSummary> generations;
  std::vector<FitnessReport> archive;
  long long nominal_epochs = 0;  // sum of configured budgets
  long long epochs_run = 0;      // epochs actually trained
};

inline int elitist_count(int population, double rate) {
  return static_cast<int>(std::ceil(population * rate - 1e-12));
}

/// Budget from the schedule: sum S_g E_g + sum_{g>=2} ceil(S_g R_e) E_g + N_c N_e E_T.
inline long long budget(const EvolutionConfig& cfg) {
  const auto& s = cfg.schedule;
  long long total = 0;
  for (int g = 0; g < s.generations(); ++g) {
    total += static_cast<long long>(s.population[g]) * s.epochs[g];
    if (g > 0) total += static_cast<long long>(elitist_count(s.population[g], cfg.R_e)) * s.epochs[g];
  }
  return total + static_cast<long long>(cfg.N_c) * cfg.N_e * s.epochs.back();
}

namespace detail {

enum Stream : std::uint64_t { kCreate = 1, kVariation = 2, kTrain = 3 };

struct Member {
  std::string id;  // "g<gen>s<slot>"
  long order = 0;  // creation order, breaks fitness ties
  Genome genome;
  double fitness = kNegInf;
  std::uint64_t train_seed = 0;
};

inline void sort_by_fitness(std::vector<Member>& pop) {
  std::stable_sort(pop.begin(), pop.end(), [](const Member& a, const Member& b) {
    if (a.fitness != b.fitness) return a.fitness > b.fitness;
    return a.order < b.order;
  });
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace detail

using ProgressFn = std::function<void(const std::string&)>;

inline EvolutionResult run_evolution(const EvolutionConfig& cfg, const problems::PdeProblem& problem,
                                     const ProgressFn& progress = {}) {
  using detail::Member;
  if (auto v = cfg.schedule.validate(); !v.empty()) throw std::invalid_argument("schedule: " + v.front());
  const auto samples = problems::sample_uniform(problem);
  Archive archive(cfg.archive_path);
  archive.load();
  EvolutionResult result;
  const int T = cfg.schedule.generations();
  long order = 0;
  double epoch_time = 0;  // median seconds per epoch in generation 1

  auto log = [&](const std::string& s) {
    if (progress) progress(s);
  };

  auto limit_for = [&](int gen, int epochs) {
    if (cfg.time_limit > 0) return cfg.time_limit;
    if (cfg.time_limit == 0) return 0.0;
    if (gen == 1 || epoch_time <= 0) return cfg.first_generation_limit;
    return cfg.time_factor * epoch_time * epochs;
  };

  struct Job {
    std::string key;
    Member* member;
    int epochs;
    std::string role;
    std::uint64_t seed;
  };

  // Trains the jobs (or replays them from the archive) and stores fitness.
  auto run_jobs = [&](std::vector<Job>& jobs, int gen, double limit) {
    std::vector<FitnessReport> reports(jobs.size());
    run_parallel(jobs.size(), cfg.workers, [&](std::size_t i) {
      Job& j = jobs[i];
      if (auto prev = archive.lookup(j.key, j.member->genome)) {
        reports[i] = *prev;
        archive.count_replay();
      } else {
        reports[i] = evaluate(j.member->genome, problem, samples, j.epochs, limit, j.seed, cfg.lbfgs);
        reports[i].key = j.key;
        reports[i].id = j.member->id;
        reports[i].generation = gen;
        reports[i].role = j.role;
      }
      archive.add(reports[i]);
    });
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      jobs[i].member->fitness = reports[i].fitness;
      result.epochs_run += reports[i].epochs_run;
      result.nominal_epochs += reports[i].epochs;
    }
    return reports;
  };

  auto key_of = [](int gen, const std::string& role, int slot) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "g%03d/%s/%04d", gen, role.c_str(), slot);
    return std::string(buf);
  };

  auto new_member = [&](int gen, int slot, Genome g) {
    Member m;
    m.id = "g" + std::to_string(gen) + "s" + std::to_string(slot);
    m.order = order++;
    m.genome = std::move(g);
    m.genome.lineage.clear();
    m.train_seed = derive_seed(cfg.seed, {detail::kTrain, static_cast<std::uint64_t>(gen),
                                          static_cast<std::uint64_t>(slot), 0});
    return m;
  };

  // Generation 1.
  std::vector<Member> population;
  {
    const int S = cfg.schedule.population[0], E = cfg.schedule.epochs[0];
    for (int s = 0; s < S; ++s) {
      Rng rng(derive_seed(cfg.seed, {detail::kCreate, 1, static_cast<std::uint64_t>(s)}));
      population.push_back(new_member(1, s, genome::random_genome(rng, cfg.init)));
    }
    std::vector<Job> jobs;
    for (int s = 0; s < S; ++s)
      jobs.push_back({key_of(1, "init", s), &population[s], E, "init", population[s].train_seed});
    const double limit = limit_for(1, E);
    log("generation 1: training " + std::to_string(S) + " individuals for " + std::to_string(E) + " epochs");
    auto reports = run_jobs(jobs, 1, limit);
    std::vector<double> per_epoch;
    for (auto& r : reports)
      if (r.status != Status::overflow && r.epochs_run > 0) per_epoch.push_back(r.wall_time / r.epochs_run);
    epoch_time = detail::median(per_epoch);
    GenerationSummary sum;
    sum.generation = 1;
    sum.population = S;
    sum.epochs = E;
    sum.time_limit = limit;
    for (auto& m : population) {
      sum.best_child = std::max(sum.best_child, m.fitness);
      sum.evaluated.push_back(genome::to_text(m.genome, true));
    }
    sum.best = sum.best_child;
    detail::sort_by_fitness(population);
    if (!std::isfinite(sum.best)) throw AllInvalidGeneration(1);
    result.generations.push_back(sum);
  }

  std::vector<Member> generation_bests = {population.front()};

  for (int gen = 2; gen <= T; ++gen) {
    const int S = cfg.schedule.population[gen - 1], E = cfg.schedule.epochs[gen - 1];
    const int prev = static_cast<int>(population.size());
    const auto probs = linear_ranking(prev);
    // population is sorted best first; rank index 0 (worst) is its last entry.
    auto pick_parent = [&](Rng& rng) -> const Member& {
      if (cfg.random_search) return population[uniform_int(rng, 0, prev - 1)];
      return population[prev - 1 - sample_index(probs, rng)];
    };
    std::vector<Member> children;
    for (int pair = 0; static_cast<int>(children.size()) < S; ++pair) {
      Rng rng(derive_seed(cfg.seed, {detail::kVariation, static_cast<std::uint64_t>(gen),
                                     static_cast<std::uint64_t>(pair)}));
      const Member& p1 = pick_parent(rng);
      const Member& p2 = pick_parent(rng);
      Genome c1, c2;
      std::string how;
      if (bernoulli(rng, cfg.R_cm)) {
        std::tie(c1, c2) = genome::crossover(p1.genome, p2.genome, cfg.R_c, rng);
        how = "crossover";
      } else {
        c1 = genome::mutate(p1.genome, cfg.rates, rng);
        c2 = genome::mutate(p2.genome, cfg.rates, rng);
        how = "mutation";
      }
      c1.lineage = {p1.id, p2.id, how};
      c2.lineage = {p2.id, p1.id, how};
      for (Genome* c : {&c1, &c2}) {
        if (static_cast<int>(children.size()) == S) break;
        const int slot = static_cast<int>(children.size());
        auto lineage = c->lineage;
        children.push_back(new_member(gen, slot, std::move(*c)));
        children.back().genome.lineage = lineage;
      }
    }
    const int n_elite = std::min(prev, elitist_count(S, cfg.R_e));
    std::vector<Member> elites(population.begin(), population.begin() + n_elite);

    std::vector<Job> jobs;
    for (int e = 0; e < n_elite; ++e)
      jobs.push_back({key_of(gen, "elite", e), &elites[e], E, "elite", elites[e].train_seed});
    for (int s = 0; s < S; ++s)
      jobs.push_back({key_of(gen, "child", s), &children[s], E, "child", children[s].train_seed});
    const double limit = limit_for(gen, E);
    log("generation " + std::to_string(gen) + ": " + std::to_string(S) + " children + " +
        std::to_string(n_elite) + " elitists, " + std::to_string(E) + " epochs");
    run_jobs(jobs, gen, limit);

    GenerationSummary sum;
    sum.generation = gen;
    sum.population = S;
    sum.epochs = E;
    sum.elitists = n_elite;
    sum.time_limit = limit;
    for (auto& c : children) {
      sum.best_child = std::max(sum.best_child, c.fitness);
      sum.evaluated.push_back(genome::to_text(c.genome, true));
    }
    for (auto& e : elites) sum.evaluated.push_back(genome::to_text(e.genome, true));
    std::vector<Member> merged = elites;
    merged.insert(merged.end(), children.begin(), children.end());
    detail::sort_by_fitness(merged);
    merged.resize(std::min<std::size_t>(merged.size(), S));
    sum.best = merged.front().fitness;
    if (!std::isfinite(sum.best)) throw AllInvalidGeneration(gen);
    result.generations.push_back(sum);
    population = std::move(merged);
    // Best individual first trained in this generation, for random search candidates.
    auto best_child = std::max_element(children.begin(), children.end(), [](auto& a, auto& b) {
      return a.fitness < b.fitness || (a.fitness == b.fitness && a.order > b.order);
    });
    generation_bests.push_back(*best_child);
  }

  // Candidates: top N_c of the last population (random search: of the per-generation bests).
  std::vector<Member> pool = population;
  if (cfg.random_search) {
    pool = generation_bests;
    detail::sort_by_fitness(pool);
  }
  const int n_cand = std::min<int>(cfg.N_c, static_cast<int>(pool.size()));
  const int E_T = cfg.schedule.epochs.back();
  std::vector<Member> evals;
  std::vector<Job> jobs;
  evals.reserve(static_cast<std::size_t>(n_cand) * cfg.N_e);
  for (int c = 0; c < n_cand; ++c)
    for (int e = 0; e < cfg.N_e; ++e) {
      Member m = pool[c];
      m.train_seed = derive_seed(cfg.seed, {detail::kTrain, 0, static_cast<std::uint64_t>(c),
                                            static_cast<std::uint64_t>(e + 1)});
      evals.push_back(std::move(m));
    }
  for (std::size_t i = 0; i < evals.size(); ++i)
    jobs.push_back({key_of(T + 1, "candidate", static_cast<int>(i)), &evals[i], E_T, "candidate",
                    evals[i].train_seed});
  log("candidates: " + std::to_string(n_cand) + " x " + std::to_string(cfg.N_e) + " trainings of " +
      std::to_string(E_T) + " epochs");
  run_jobs(jobs, T + 1, limit_for(T + 1, E_T));
  for (int c = 0; c < n_cand; ++c) {
    Candidate cand;
    cand.id = pool[c].id;
    cand.genome = pool[c].genome;
    double sum = 0;
    for (int e = 0; e < cfg.N_e; ++e) {
      const double f = evals[static_cast<std::size_t>(c) * cfg.N_e + e].fitness;
      cand.fitness.push_back(f);
      sum += f;
    }
    cand.mean_fitness = cfg.N_e > 0 ? sum / cfg.N_e : kNegInf;
    if (std::isnan(cand.mean_fitness)) cand.mean_fitness = kNegInf;
    result.candidates.push_back(cand);
  }
  // Highest mean fitness wins; ties go to the better-ranked candidate.
  int best = 0;
  for (int c = 1; c < n_cand; ++c)
    if (result.candidates[c].mean_fitness > result.candidates[best].mean_fitness) best = c;
  if (n_cand > 0) {
    result.winner = result.candidates[best].genome;
    result.winner_id = result.candidates[best].id;
    result.winner_fitness = result.candidates[best].mean_fitness;
  }
  result.archive = archive.records();
  std::sort(result.archive.begin(), result.archive.end(),
            [](const FitnessReport& a, const FitnessReport& b) { return a.key < b.key; });
  return result;
}

inline EvolutionResult run_random_search(EvolutionConfig cfg, const problems::PdeProblem& problem,
                                         const ProgressFn& progress = {}) {
  cfg.random_search = true;
  return run_evolution(cfg, problem, progress);
}

}  // namespace pinnevo::evolve
