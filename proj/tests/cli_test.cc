#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ptmatch/io.h"
#include "ptmatch/matcher.h"
#include "ptmatch/pipeline.h"
#include "test_util.h"

namespace ptmatch {
namespace {

using testing::TempDir;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI with stdout and stderr sent to `log`; returns the exit code.
int cli(const std::string& args, const std::string& log = "/dev/null") {
  const std::string cmd = std::string(PTMATCH_CLI_PATH) + " " + args + " >" + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class CliTest : public ::testing::Test {
 protected:
  TempDir dir;
  std::string inst() const { return dir.file("inst"); }

  void generate(const std::string& extra = "") {
    ASSERT_EQ(cli("--seed 21 --out " + inst() + " generate --n 300 --p 0.04 --alpha 0.02 " + extra),
              0);
  }
};

TEST_F(CliTest, GenerateWritesInstanceFiles) {
  generate();
  for (const char* name : {"instance.json", "g_pi.el", "g_prime.el"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.file(std::string("inst/") + name))) << name;
  }
  const auto meta = load_instance_json(dir.file("inst/instance.json"));
  EXPECT_EQ(meta.params.n, 300u);
  EXPECT_EQ(meta.seed, 21u);
  const auto inst = sample_instance({300, 0.04, 0.02}, 21);
  EXPECT_EQ(meta.pi, inst.pi);
  EXPECT_EQ(load_edge_list(dir.file("inst/g_pi.el")).to_edge_list(), inst.g_pi.to_edge_list());
}

TEST_F(CliTest, StagesComposeToRun) {
  generate();
  const std::string graphs = "--g-pi " + dir.file("inst/g_pi.el") + " --g-prime " +
                             dir.file("inst/g_prime.el") + " --p 0.04";
  const std::string knobs = " --m 3 --w 4";
  ASSERT_EQ(cli("--seed 5 --out " + dir.file("b.txt") + " compare " + graphs + knobs), 0);
  ASSERT_EQ(cli("--out " + dir.file("al.txt") + " match --b " + dir.file("b.txt")), 0);
  ASSERT_EQ(cli("--seed 5 --out " + dir.file("ex.txt") + " refine " + graphs +
                " --threshold 2.5 --matching " + dir.file("al.txt")),
            0);
  ASSERT_EQ(cli("--seed 5 --out " + dir.file("run.txt") + " run " + graphs + knobs +
                " --threshold 2.5"),
            0);
  ASSERT_EQ(cli("--seed 5 --out " + dir.file("run_al.txt") + " run --almost-exact " + graphs +
                knobs),
            0);
  EXPECT_EQ(slurp(dir.file("ex.txt")), slurp(dir.file("run.txt")));
  EXPECT_EQ(slurp(dir.file("al.txt")), slurp(dir.file("run_al.txt")));
  EXPECT_FALSE(slurp(dir.file("run.txt")).empty());
  EXPECT_NE(slurp(dir.file("run.txt.provenance.txt")).find("depth = 3"), std::string::npos);

  // Same result as the library with the same seed.
  PipelineParams pp;
  pp.p = 0.04;
  pp.depth = 3;
  pp.w = 4;
  pp.seed = 5;
  pp.refine_threshold = 2.5;
  const auto lib = match_exact(load_edge_list(dir.file("inst/g_pi.el")),
                               load_edge_list(dir.file("inst/g_prime.el")), pp);
  std::ostringstream os;
  write_matching(os, lib.matching);
  EXPECT_EQ(os.str(), slurp(dir.file("run.txt")));
}

TEST_F(CliTest, RunFromInstanceDirectoryReportsTruth) {
  generate();
  ASSERT_EQ(cli("--seed 1 --out " + dir.file("m.txt") + " run --m 3 --w 4 --instance " + inst(),
                dir.file("log.txt")),
            0);
  const std::string log = slurp(dir.file("log.txt"));
  EXPECT_NE(log.find("overlap_al "), std::string::npos) << log;
  EXPECT_NE(log.find("round 1 "), std::string::npos) << log;
}

TEST_F(CliTest, ThreadCountDoesNotChangeOutput) {
  generate();
  const std::string args = " run --m 3 --w 4 --threshold 2 --instance " + inst();
  ASSERT_EQ(cli("--seed 3 --threads 1 --out " + dir.file("t1.txt") + args), 0);
  ASSERT_EQ(cli("--seed 3 --threads 4 --out " + dir.file("t4.txt") + args), 0);
  EXPECT_EQ(slurp(dir.file("t1.txt")), slurp(dir.file("t4.txt")));
}

TEST_F(CliTest, SignaturesDump) {
  generate();
  ASSERT_EQ(cli("--out " + dir.file("sig.txt") + " signatures --m 2 --p 0.04 --graph " +
                dir.file("inst/g_pi.el")),
            0);
  EXPECT_FALSE(slurp(dir.file("sig.txt")).empty());
}

TEST_F(CliTest, SweepWritesCsv) {
  ASSERT_EQ(cli("--seed 9 --threads 2 --out " + dir.file("s.csv") +
                " sweep --n 100 --np 2 --alpha 0,0.05 --m 3 --w 4 --trials 2"),
            0);
  std::ifstream in(dir.file("s.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 1 + 2 * 2);
}

TEST_F(CliTest, DiagnoseWritesPerVertexCsv) {
  generate();
  ASSERT_EQ(cli("--out " + dir.file("d.csv") + " diagnose --m 2 --instance " + inst()), 0);
  std::ifstream in(dir.file("d.csv"));
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("vertex,A1,A2,A3,A4,A5,A6,typical", 0), 0u) << header;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 300);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(cli("generate --n 10"), 2);                         // missing --p
  EXPECT_EQ(cli("generate --n 10 --p 0.5 --alpha 0.9"), 2);     // alpha > 1 - p
  EXPECT_EQ(cli("no-such-command"), 2);
  EXPECT_EQ(cli("--threads 0 generate --n 10 --p 0.5"), 2);
  EXPECT_EQ(cli("match --b " + dir.file("missing.txt")), 3);
  EXPECT_EQ(cli("--out /nonexistent-dir/x.csv sweep --n 50 --np 2 --alpha 0 --m 2 --w 2"), 3);
  {
    std::ofstream bad(dir.file("bad.txt"));
    bad << "n 2\nzero: 1\n";
  }
  EXPECT_EQ(cli("match --b " + dir.file("bad.txt")), 2);
  EXPECT_EQ(cli("--config " + dir.file("missing.cfg") + " generate --n 10 --p 0.5"), 3);
}

TEST_F(CliTest, ConfigFillsUnsetFlagsAndFlagsWin) {
  {
    std::ofstream cfg(dir.file("c.cfg"));
    cfg << "# instance\nseed = 21\nn = 300\np = 0.04\nalpha = 0.02\nout = " << inst() << '\n';
  }
  ASSERT_EQ(cli("--config " + dir.file("c.cfg") + " generate"), 0);
  const auto meta = load_instance_json(dir.file("inst/instance.json"));
  EXPECT_EQ(meta.params.n, 300u);
  EXPECT_EQ(meta.seed, 21u);

  ASSERT_EQ(cli("--config " + dir.file("c.cfg") + " --seed 22 generate --n 120"), 0);
  const auto over = load_instance_json(dir.file("inst/instance.json"));
  EXPECT_EQ(over.params.n, 120u);
  EXPECT_EQ(over.seed, 22u);
  EXPECT_DOUBLE_EQ(over.params.p, 0.04);

  {
    std::ofstream cfg(dir.file("bad.cfg"));
    cfg << "bogus = 1\n";
  }
  EXPECT_EQ(cli("--config " + dir.file("bad.cfg") + " generate --n 10 --p 0.5"), 2);
}

}  // namespace
}  // namespace ptmatch
