// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance            criteria 1-6 and 9
//   acceptance 7a 7b 7c 8 the long model-reproduction and evolution runs
//   acceptance all        everything

#include <malloc.h>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>

#include "support/checks.hpp"

using namespace pinnevo;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail, double secs) {
  char line[4096];
  std::snprintf(line, sizeof line, "criterion %-3s %s  (%.1f s)  %s\n", id.c_str(), pass ? "PASS" : "FAIL", secs,
                detail.c_str());
  std::fputs(line, stdout);
  std::fflush(stdout);
  // ctest hides the output of passing tests; keep a copy.
  if (std::FILE* log = std::fopen("acceptance.log", "a")) {
    std::fputs(line, log);
    std::fclose(log);
  }
  if (!pass) ++failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void criterion1() {
  const auto t0 = Clock::now();
  space::SpaceConfig c;
  using space::sci3;
  const std::vector<std::pair<std::string, std::string>> got = {
      {sci3(space::activation_space_term(c, 3)), "2.65e05"}, {sci3(space::activation_space_term(c, 5)), "9.97e08"},
      {sci3(space::activation_space_term(c, 7)), "3.34e12"}, {sci3(space::activation_space(c)), "3.40e12"},
      {sci3(space::model_space_term(c, 3)), "7.51e10"},      {sci3(space::model_space_term(c, 5)), "2.82e14"},
      {sci3(space::model_space_term(c, 7)), "9.47e17"},      {sci3(space::model_space(c)), "9.64e17"}};
  bool ok = space::structure_space(c) == 283328;
  std::string detail = "structure " + space::structure_space(c).str();
  for (auto& [g, w] : got) {
    ok = ok && g == w;
    detail += " " + g;
  }
  const double secs = checks::seconds_since(t0);
  report("1", ok && secs < 1, detail, secs);
}

void criterion2() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (int n = 2; n <= 10; ++n) {
    const auto brute = space::enumerate_shortcut_configs(n);
    ok = ok && brute == space::fib(2 * n - 1);
    detail += (n > 2 ? "," : "") + brute.str();
  }
  const double secs = checks::seconds_since(t0);
  report("2", ok && secs < 10, "n=2..10: " + detail, secs);
}

void criterion3() {
  const auto t0 = Clock::now();
  const auto st = checks::fd_networks(120, 2024);
  const double secs = checks::seconds_since(t0);
  const bool ok = st.networks >= 100 && st.first < 1e-6 && st.nested < 1e-5 && secs < 300;
  report("3", ok,
         std::to_string(st.networks) + " networks (" + std::to_string(st.skipped) + " draws skipped as non-finite or |Y| > 1e6), " +
             "first-order max rel err " + fmt("%.2e", st.first) + ", nested " + fmt("%.2e", st.nested),
         secs);
}

void criterion4() {
  const auto t0 = Clock::now();
  bool ok = true;
  double worst_loss = 0, worst_err = 0;
  for (const auto& name : problems::all_cases()) {
    const auto st = checks::exact_case(name);
    worst_loss = std::max(worst_loss, st.loss);
    for (double e : st.errors) worst_err = std::max(worst_err, e);
    ok = ok && st.loss < 1e-20;
    for (double e : st.errors) ok = ok && e == 0.0;
  }
  const double secs = checks::seconds_since(t0);
  report("4", ok && secs < 60,
         "11 cases, max loss " + fmt("%.2e", worst_loss) + ", max rel L2 " + fmt("%.1e", worst_err), secs);
}

void criterion5() {
  const auto t0 = Clock::now();
  const auto r = checks::rosenbrock_run(200);
  const double dist = (r.x - optim::Vector::Ones(2)).norm();
  const double secs = checks::seconds_since(t0);
  report("5", dist < 1e-8 && r.wolfe_violations == 0 && secs < 1,
         "|x-(1,1)| = " + fmt("%.2e", dist) + " after " + std::to_string(r.trace.epochs_run()) + " iterations, " +
             std::to_string(r.trace.steps.size()) + " steps, " + std::to_string(r.wolfe_violations) +
             " Wolfe violations",
         secs);
}

void criterion6() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (int S : {1, 2, 3, 30, 1000}) {
    const auto p = evolve::linear_ranking(S);
    double sum = 0;
    for (double v : p) sum += v;
    ok = ok && std::abs(sum - 1) <= 1e-12;
    detail += "S=" + std::to_string(S) + " sum-1=" + fmt("%.1e", sum - 1) + " ";
  }
  const auto p3 = evolve::linear_ranking(3);
  ok = ok && p3 == std::vector<double>{1.0 / 6, 1.0 / 3, 1.0 / 2};
  report("6", ok, detail + "S=3 exact " + (p3 == std::vector<double>{1.0 / 6, 1.0 / 3, 1.0 / 2} ? "yes" : "no"),
         checks::seconds_since(t0));
}

void criterion7(const std::string& which) {
  const auto t0 = Clock::now();
  std::string problem;
  genome::Genome g;
  int epochs = 0;
  double bound = 0;
  if (which == "7a") problem = "klein_gordon:I", g = checks::kg_model(), epochs = 5000, bound = 5e-4;
  if (which == "7b") problem = "burgers:I", g = checks::burgers_model(), epochs = 3000, bound = 5e-4;
  if (which == "7c") problem = "lame:I", g = checks::lame_model(), epochs = 5000, bound = 1e-4;
  const auto p = problems::make_problem(problem);
  const auto s = problems::sample_uniform(p);
  std::vector<double> errs;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto ts = Clock::now();
    auto res = evolve::train(g, p, s, epochs, 0, derive_seed(seed, {3, 0, 0, 1}));
    autonet::Network net(g, p.input_dim, p.output_dim);
    problems::NetworkField field(net, res.theta);
    const auto e = problems::relative_l2_error(field, p, s);
    errs.push_back(e[0]);
    detail += "seed " + std::to_string(seed) + ": u " + fmt("%.2e", e[0]);
    if (e.size() > 1) detail += " v " + fmt("%.2e", e[1]);
    detail += " loss " + fmt("%.2e", res.trace.losses.back()) + " " + optim::to_string(res.report.status) + " " +
              fmt("%.0fs", checks::seconds_since(ts)) + "; ";
    std::fprintf(stderr, "%s %s\n", which.c_str(), detail.c_str());
  }
  std::sort(errs.begin(), errs.end());
  const double median = errs[1];
  report(which, median <= bound,
         problem + " median rel L2(u) " + fmt("%.2e", median) + " (bound " + fmt("%.0e", bound) + "); " + detail,
         checks::seconds_since(t0));
}

void criterion8() {
  const auto t0 = Clock::now();
  const auto p = problems::make_problem("klein_gordon:I");
  evolve::EvolutionConfig cfg;
  cfg.schedule = {{24, 12, 6}, {30, 60, 120}};
  cfg.seed = 20240;
  cfg.time_limit = 0;  // wall-clock limits would make the runs timing dependent
  cfg.workers = 1;
  auto progress = [](const std::string& s) { std::fprintf(stderr, "8: %s\n", s.c_str()); };
  const auto a = evolve::run_evolution(cfg, p, progress);
  const auto b = evolve::run_evolution(cfg, p, progress);
  cfg.workers = 3;
  const auto c = evolve::run_evolution(cfg, p, progress);
  bool monotone = true;
  std::string bests;
  for (std::size_t g = 0; g < a.generations.size(); ++g) {
    bests += fmt("%.3e ", a.generations[g].best);
    if (g > 0 && a.generations[g].best < a.generations[g - 1].best) monotone = false;
    if (a.generations[g].best < a.generations[g].best_child) monotone = false;
  }
  const bool identical = genome::to_text(a.winner) == genome::to_text(b.winner);
  bool same_set = a.generations.size() == c.generations.size();
  for (std::size_t g = 0; same_set && g < a.generations.size(); ++g) {
    std::multiset<std::string> x(a.generations[g].evaluated.begin(), a.generations[g].evaluated.end());
    std::multiset<std::string> y(c.generations[g].evaluated.begin(), c.generations[g].evaluated.end());
    same_set = x == y;
  }
  report("8", monotone && identical && same_set,
         std::string("best fitness per generation ") + bests + (monotone ? "(non-decreasing)" : "(DECREASES)") +
             ", rerun winner " + (identical ? "identical" : "DIFFERS") + ", 3-worker genome set " +
             (same_set ? "identical" : "DIFFERS") + ", winner: " + genome::to_text(a.winner, true),
         checks::seconds_since(t0));
}

void criterion9() {
  const auto t0 = Clock::now();
  const auto st = checks::genetic_fuzz(100000, 99);
  const double secs = checks::seconds_since(t0);
  report("9", st.violations == 0 && secs < 60,
         std::to_string(st.applications) + " applications, " + std::to_string(st.violations) + " violations" +
             (st.first_violation.empty() ? "" : ": " + st.first_violation),
         secs);
}

}  // namespace

int main(int argc, char** argv) {
  // Keep large jet buffers in the heap instead of fresh mmaps per evaluation.
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  std::vector<std::string> ids(argv + 1, argv + argc);
  if (ids.empty()) ids = {"1", "2", "3", "4", "5", "6", "9"};
  if (ids.size() == 1 && ids[0] == "all") ids = {"1", "2", "3", "4", "5", "6", "7a", "7b", "7c", "8", "9"};
  for (const auto& id : ids) {
    if (id == "1") criterion1();
    else if (id == "2") criterion2();
    else if (id == "3") criterion3();
    else if (id == "4") criterion4();
    else if (id == "5") criterion5();
    else if (id == "6") criterion6();
    else if (id == "7a" || id == "7b" || id == "7c") criterion7(id);
    else if (id == "8") criterion8();
    else if (id == "9") criterion9();
    else {
      std::fprintf(stderr, "unknown criterion '%s'\n", id.c_str());
      return 2;
    }
  }
  return failures == 0 ? 0 : 1;
}
