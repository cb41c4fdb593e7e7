#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "pinnevo_cli_test";

int run(const std::string& args, std::string* out = nullptr) {
  const auto log = kWork / "stdout.txt";
  const std::string cmd = std::string(PINNEVO_CLI) + " " + args + " > " + log.string() + " 2>" +
                          (kWork / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  if (out) {
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
    write(kWork / "kg.txt", "layer num: 3\nneuron num: 20\nshortcuts: [0-1]\nactivation: tanh(x)\n");
  }
  static std::string dir(const std::string& name) { return (kWork / name).string(); }
};

}  // namespace

TEST_F(Cli, SpaceDefaults) {
  std::string out;
  ASSERT_EQ(run("--mode space", &out), 0);
  EXPECT_NE(out.find("283328"), std::string::npos);
  EXPECT_NE(out.find("9.64e17"), std::string::npos);
  EXPECT_NE(out.find("2.65e05"), std::string::npos);
}

TEST_F(Cli, SpaceRanges) {
  std::string out;
  ASSERT_EQ(run("--mode space --n-min 3 --n-max 3 --n-neu 1", &out), 0);
  EXPECT_NE(out.find("structure                                               5"), std::string::npos);
  ASSERT_EQ(run("--mode space --max-nodes 0", &out), 0);
  EXPECT_NE(out.find("activation m<=0                                         0"), std::string::npos);
  EXPECT_EQ(run("--mode space --n-min 5 --n-max 4"), 2);
}

TEST_F(Cli, TrainZeroEpochs) {
  ASSERT_EQ(run("--mode train --problem klein_gordon:I --genome " + dir("kg.txt") + " --epochs 0 --out " + dir("t0")), 0);
  const auto csv = slurp(kWork / "t0" / "trace.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_EQ(csv.rfind("epoch,loss\n0,", 0), 0u);
}

TEST_F(Cli, TrainThenEvaluateSnapshot) {
  ASSERT_EQ(run("--mode train --problem klein_gordon:I --genome " + dir("kg.txt") + " --epochs 5 --seed 3 --out " + dir("t5")), 0);
  const auto m = nlohmann::json::parse(slurp(kWork / "t5" / "metrics.json"));
  EXPECT_EQ(m["epochs_run"], 5);
  ASSERT_EQ(run("--mode evaluate --problem klein_gordon:I --genome " + dir("t5/genome.txt") + " --snapshot " +
                dir("t5/theta.json") + " --out " + dir("e5")),
            0);
  const auto e = nlohmann::json::parse(slurp(kWork / "e5" / "evaluation.json"));
  EXPECT_NEAR(e["relative_l2"]["u"].get<double>(), m["relative_l2"]["u"].get<double>(), 1e-12);
  // Same network judged against another case's exact solution.
  ASSERT_EQ(run("--mode evaluate --problem klein_gordon:II --genome " + dir("t5/genome.txt") + " --snapshot " +
                dir("t5/theta.json") + " --out " + dir("e5b")),
            0);
  const auto e2 = nlohmann::json::parse(slurp(kWork / "e5b" / "evaluation.json"));
  EXPECT_NE(e2["relative_l2"]["u"].get<double>(), e["relative_l2"]["u"].get<double>());
  // Snapshot of a different shape is refused.
  write(kWork / "other.txt", "layer num: 4\nneuron num: 20\nshortcuts: none\nactivation: tanh(x)\n");
  EXPECT_EQ(run("--mode evaluate --problem klein_gordon:I --genome " + dir("other.txt") + " --snapshot " +
                dir("t5/theta.json") + " --out " + dir("e5c")),
            2);
}

TEST_F(Cli, EvaluateExactField) {
  for (std::string p : {"burgers:I", "lame:II"}) {
    ASSERT_EQ(run("--mode evaluate --exact-field --problem " + p + " --out " + dir("ex")), 0) << p;
    const auto e = nlohmann::json::parse(slurp(kWork / "ex" / "evaluation.json"));
    for (auto& [k, v] : e["relative_l2"].items()) EXPECT_EQ(v.get<double>(), 0.0) << p << " " << k;
  }
}

TEST_F(Cli, ErrorsHaveDistinctCodes) {
  write(kWork / "bad.txt", "layer num: 6\nneuron num: 20\nshortcuts: [0-1]\nactivation: tanh(x\n");
  std::string out;
  EXPECT_EQ(run("--mode train --genome " + dir("bad.txt") + " --epochs 1 --out " + dir("bad")), 3);
  EXPECT_NE(slurp(kWork / "stderr.txt").find("column"), std::string::npos);
  EXPECT_EQ(run("--mode train --out " + dir("bad")), 2);  // no genome
  EXPECT_EQ(run("--mode train --problem heat:I --genome " + dir("kg.txt")), 2);
  write(kWork / "bad.cfg", "mode = space\nfoo = 1\n");
  EXPECT_EQ(run("--config " + dir("bad.cfg")), 2);
  EXPECT_EQ(run("--bogus-flag"), 2);
}

TEST_F(Cli, SearchSmokeIsReproducible) {
  write(kWork / "smoke.cfg",
        "mode = search-evo\nproblem = klein_gordon:I\nseed = 7\ntime_limit = 0\n"
        "gen 1 pop 8 epochs 5\ngen 2 pop 4 epochs 10\n");
  ASSERT_EQ(run("--config " + dir("smoke.cfg") + " --workers 1 --out " + dir("s1")), 0);
  ASSERT_EQ(run("--config " + dir("smoke.cfg") + " --workers 1 --out " + dir("s2")), 0);
  const auto w1 = slurp(kWork / "s1" / "winner.txt");
  EXPECT_EQ(w1, slurp(kWork / "s2" / "winner.txt"));
  EXPECT_NE(w1.find("layer num:"), std::string::npos);
  const auto s = nlohmann::json::parse(slurp(kWork / "s1" / "summary.json"));
  EXPECT_EQ(s["budget"]["formula_epochs"], s["budget"]["configured_epochs"]);
  EXPECT_EQ(s["generations"].size(), 2u);
  // 8 + (4 + 1) + 3 * 4 records
  const auto archive = slurp(kWork / "s1" / "archive.jsonl");
  EXPECT_EQ(std::count(archive.begin(), archive.end(), '\n'), 25);
}
