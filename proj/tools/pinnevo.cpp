// pinnevo: search-space report, PINN training/evaluation and evolutionary search.

#include <CLI11.hpp>
#include <malloc.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "pinnevo/config.hpp"
#include "pinnevo/evolve.hpp"
#include "pinnevo/space.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pinnevo;

namespace {

enum Exit { kOk = 0, kConfig = 2, kParse = 3, kAllInvalid = 4, kOverflow = 5, kTimeout = 6 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config::ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int cmd_space(const config::RunConfig& c) {
  const auto& sc = c.space;
  using space::sci3;
  const auto structure = space::structure_space(sc);
  const auto activation = space::activation_space(sc);
  std::printf("%-28s %28s %10s\n", "quantity", "exact", "approx");
  auto row = [](const std::string& name, const space::BigInt& v) {
    std::printf("%-28s %28s %10s\n", name.c_str(), v.str().c_str(), sci3(v).c_str());
  };
  row("structure", structure);
  for (int m = 1; m <= sc.max_nodes; ++m)
    if (m % 2 == 1) row("activation m=" + std::to_string(m), space::activation_space_term(sc, m));
  row("activation m<=" + std::to_string(sc.max_nodes), activation);
  for (int m = 1; m <= sc.max_nodes; ++m)
    if (m % 2 == 1) row("model m=" + std::to_string(m), space::model_space_term(sc, m));
  row("model m<=" + std::to_string(sc.max_nodes), structure * activation);
  return kOk;
}

genome::Genome load_genome(const std::string& path) {
  auto g = genome::from_text(read_file(path));
  if (auto v = genome::validate_genome(g); !v.empty())
    throw genome::GenomeParseError(1, 1, "invalid genome: " + v.front());
  return g;
}

json metrics_json(const problems::PdeProblem& p, const problems::LossReport& loss,
                  const std::vector<double>& errors) {
  json m;
  m["problem"] = p.name();
  m["loss"] = {{"total", num(loss.total)},
               {"residual", num(loss.residual)},
               {"boundary", num(loss.boundary)},
               {"initial", num(loss.initial)}};
  const char* names[] = {"u", "v", "w"};
  json e;
  for (std::size_t k = 0; k < errors.size(); ++k) e[names[k]] = num(errors[k]);
  m["relative_l2"] = e;
  return m;
}

int cmd_train(const config::RunConfig& c) {
  const auto problem = problems::make_problem(c.problem);
  const auto g = load_genome(c.genome);
  const int epochs = c.resolved_epochs();
  const auto seed = derive_seed(c.seed, {3, 0, 0, 1});
  const auto samples = problems::sample_uniform(problem);
  std::cerr << "training " << genome::to_text(g, true) << " on " << problem.name() << " for "
            << epochs << " epochs\n";
  const double limit = c.time_limit > 0 ? c.time_limit : 0;
  auto res = evolve::train(g, problem, samples, epochs, limit, seed);
  fs::create_directories(c.out);
  std::string csv = "epoch,loss\n";
  char buf[64];
  for (std::size_t k = 0; k < res.trace.losses.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k, res.trace.losses[k]);
    csv += buf;
  }
  evolve::write_atomic(fs::path(c.out) / "trace.csv", csv);

  autonet::Network net(g, problem.input_dim, problem.output_dim);
  problems::NetworkField field(net, res.theta);
  const auto loss = problems::loss(problem, field, samples);
  const auto errors = problems::relative_l2_error(field, problem, samples);
  json m = metrics_json(problem, loss, errors);
  m["genome"] = genome::to_text(g, true);
  m["status"] = optim::to_string(res.trace.status);
  m["epochs"] = epochs;
  m["epochs_run"] = res.trace.epochs_run();
  m["min_loss"] = num(res.trace.min_loss);
  m["wall_time"] = res.trace.wall_time;
  m["seed"] = std::to_string(seed);
  evolve::write_atomic(fs::path(c.out) / "metrics.json", m.dump(2) + "\n");
  json theta = {{"layout", net.layout().describe()},
                {"values", std::vector<double>(res.theta.data(), res.theta.data() + res.theta.size())}};
  evolve::write_atomic(fs::path(c.out) / "theta.json", theta.dump() + "\n");
  evolve::write_atomic(fs::path(c.out) / "genome.txt", genome::to_text(g));
  std::cout << m.dump(2) << "\n";
  if (res.trace.status == optim::Status::overflow) return kOverflow;
  if (res.trace.status == optim::Status::timeout) return kTimeout;
  return kOk;
}

int cmd_evaluate(const config::RunConfig& c) {
  const auto problem = problems::make_problem(c.problem);
  const auto samples = problems::sample_uniform(problem);
  json m;
  if (c.exact_field) {
    problems::ExactField field(problem);
    m = metrics_json(problem, problems::loss(problem, field, samples),
                     problems::relative_l2_error(field, problem, samples));
    m["field"] = "exact";
  } else {
    const auto g = load_genome(c.genome);
    autonet::Network net(g, problem.input_dim, problem.output_dim);
    json snap;
    try {
      snap = json::parse(read_file(c.snapshot));
    } catch (const json::exception& e) {
      throw genome::GenomeParseError(1, 1, std::string("snapshot: ") + e.what());
    }
    const auto values = snap.at("values").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(values.size()) != net.param_count() ||
        (snap.contains("layout") && snap["layout"].get<std::string>() != net.layout().describe()))
      throw config::ConfigError("snapshot has " + std::to_string(values.size()) +
                                " parameters but the genome needs " + std::to_string(net.param_count()) +
                                " (" + net.layout().describe() + ")");
    autonet::Vector theta = Eigen::Map<const autonet::Vector>(values.data(), values.size());
    problems::NetworkField field(net, theta);
    m = metrics_json(problem, problems::loss(problem, field, samples),
                     problems::relative_l2_error(field, problem, samples));
    m["genome"] = genome::to_text(g, true);
  }
  fs::create_directories(c.out);
  evolve::write_atomic(fs::path(c.out) / "evaluation.json", m.dump(2) + "\n");
  std::cout << m.dump(2) << "\n";
  return kOk;
}

int cmd_search(const config::RunConfig& c) {
  const auto problem = problems::make_problem(c.problem);
  auto ec = c.evolution();
  fs::create_directories(c.out);
  ec.archive_path = (fs::path(c.out) / "archive.jsonl").string();
  if (!c.resume) fs::remove(ec.archive_path);
  evolve::write_atomic(fs::path(c.out) / "config.txt", config::serialize(c));
  auto progress = [](const std::string& s) { std::cerr << s << "\n"; };
  const auto r = evolve::run_evolution(ec, problem, progress);
  evolve::write_atomic(fs::path(c.out) / "winner.txt", genome::to_text(r.winner));
  json s;
  s["problem"] = problem.name();
  s["mode"] = c.mode;
  s["seed"] = std::to_string(c.seed);
  s["winner"] = genome::to_text(r.winner, true);
  s["winner_id"] = r.winner_id;
  s["winner_mean_fitness"] = num(r.winner_fitness);
  s["budget"] = {{"formula_epochs", evolve::budget(ec)},
                 {"configured_epochs", r.nominal_epochs},
                 {"epochs_run", r.epochs_run}};
  json gens = json::array();
  for (auto& g : r.generations)
    gens.push_back({{"generation", g.generation},
                    {"population", g.population},
                    {"epochs", g.epochs},
                    {"elitists", g.elitists},
                    {"best_child_fitness", num(g.best_child)},
                    {"best_fitness", num(g.best)},
                    {"time_limit", g.time_limit}});
  s["generations"] = gens;
  json cands = json::array();
  for (auto& cd : r.candidates)
    cands.push_back({{"id", cd.id},
                     {"genome", genome::to_text(cd.genome, true)},
                     {"fitness", [&] {
                        json a = json::array();
                        for (double f : cd.fitness) a.push_back(num(f));
                        return a;
                      }()},
                     {"mean_fitness", num(cd.mean_fitness)}});
  s["candidates"] = cands;
  evolve::write_atomic(fs::path(c.out) / "summary.json", s.dump(2) + "\n");
  std::cout << genome::to_text(r.winner);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  CLI::App app{"Evolutionary discovery and training of physics-informed neural networks"};
  std::string config_path, mode, problem, out, genome_path, snapshot;
  std::uint64_t seed = 0;
  int workers = -1, epochs = -1;
  double time_limit = std::numeric_limits<double>::quiet_NaN();
  bool exact = false, resume = false;
  int n_min = -1, n_max = -1, n_neu = -1, max_nodes = -1, max_params = -1;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--mode", mode, "space | train | evaluate | search-evo | search-random");
  app.add_option("--problem", problem, "problem and case, e.g. burgers:II");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--workers", workers, "parallel trainings (0: all cores)");
  app.add_option("--out", out, "output directory");
  app.add_option("--genome", genome_path, "genome file");
  app.add_option("--snapshot", snapshot, "theta.json written by train");
  app.add_option("--epochs", epochs, "training epochs");
  app.add_option("--time-limit", time_limit, "seconds per training (0 off, negative adaptive)");
  app.add_flag("--exact-field", exact, "evaluate the closed-form solution instead of a network");
  app.add_flag("--resume", resume, "replay finished evaluations from the archive");
  app.add_option("--n-min", n_min, "fewest layers");
  app.add_option("--n-max", n_max, "most layers");
  app.add_option("--n-neu", n_neu, "number of hidden widths");
  app.add_option("--max-nodes", max_nodes, "largest activation tree");
  app.add_option("--max-params", max_params, "most activation parameters");
  bool seed_given = false;
  app.callback([&] { seed_given = app.count("--seed") > 0; });
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfig;
  }

  config::RunConfig c;
  try {
    if (!config_path.empty()) c = config::load(config_path);
    if (!mode.empty()) c.mode = mode;
    if (!problem.empty()) c.problem = problem;
    if (seed_given) c.seed = seed;
    if (workers >= 0) c.workers = workers;
    if (!out.empty()) c.out = out;
    if (!genome_path.empty()) c.genome = genome_path;
    if (!snapshot.empty()) c.snapshot = snapshot;
    if (epochs >= 0) c.epochs = epochs;
    if (!std::isnan(time_limit)) c.time_limit = time_limit;
    if (exact) c.exact_field = true;
    if (resume) c.resume = true;
    if (n_min >= 0) c.space.n_min = n_min;
    if (n_max >= 0) c.space.n_max = n_max;
    if (n_neu >= 0) c.space.n_neu = n_neu;
    if (max_nodes >= 0) c.space.max_nodes = max_nodes;
    if (max_params >= 0) c.space.max_params = max_params;
    if (auto v = c.validate(); !v.empty()) throw config::ConfigError(v.front());
  } catch (const config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  }

  try {
    if (c.mode == "space") return cmd_space(c);
    if (c.mode == "train") return cmd_train(c);
    if (c.mode == "evaluate") return cmd_evaluate(c);
    return cmd_search(c);
  } catch (const config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const genome::GenomeParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const exprtree::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const evolve::AllInvalidGeneration& e) {
    std::cerr << "search aborted: " << e.what() << "\n";
    return kAllInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
