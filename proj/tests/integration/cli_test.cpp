#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Run {
  int code;
  std::string out;
};

// Runs the CLI with stdout captured and stderr discarded.
Run run(const std::string& args) {
  const std::string cmd = std::string(EVANSPOT_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (const std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string sample(const std::string& name) { return std::string(EVANSPOT_SAMPLES) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// '#' metadata lines, then a header line, then at least one data row.
void expect_csv_shape(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  int meta = 0, rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (!header && line.rfind('#', 0) == 0) {
      ++meta;
    } else if (!header) {
      header = true;
    } else {
      ++rows;
    }
  }
  EXPECT_GT(meta, 0);
  EXPECT_TRUE(header);
  EXPECT_GT(rows, 0);
}

}  // namespace

TEST(Cli, ClassifyPlane) {
  const auto r = run("classify --config " + sample("classify_plane.cfg"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\neuclidean,2,-,Parabolic,Diverges,"), std::string::npos);
  expect_csv_shape(r.out);
}

TEST(Cli, ClassifySweepCoversEveryTuple) {
  const auto r = run("classify --config " + sample("classify_sweep.cfg"));
  EXPECT_EQ(r.code, 0);
  std::size_t rows = 0;
  for (std::size_t pos = 0; (pos = r.out.find("linear-power", pos)) != std::string::npos; ++pos) ++rows;
  // 12 (manifold, operator) tuples, one potential row each; the metadata mentions none
  EXPECT_EQ(rows, 12u);
}

TEST(Cli, ClassifyBlindSpotIsInconclusive) {
  const auto r = run("classify --config " + sample("classify_blindspot.cfg"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("Inconclusive"), std::string::npos);
}

TEST(Cli, BadTagExitsOne) {
  EXPECT_EQ(run("classify --config " + sample("classify_plane.cfg") + " manifold=bogus").code, 1);
  EXPECT_EQ(run("classify --config /nonexistent.cfg").code, 1);
  EXPECT_EQ(run("nosuchcommand").code, 1);
}

TEST(Cli, EvansPlane) {
  const auto r = run("evans --config " + sample("evans_plane.cfg"));
  EXPECT_EQ(r.code, 0);
  expect_csv_shape(r.out);
}

TEST(Cli, EvansBlowUpExitsThree) {
  const auto r = run("evans --config " + sample("evans_blowup.cfg"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("# rho="), std::string::npos);
  EXPECT_EQ(run("evans --config " + sample("evans_plane.cfg") + " eps=0").code, 1);
}

TEST(Cli, Khasminskii) {
  const auto plane = run("khasminskii --config " + sample("khas_plane.cfg"));
  EXPECT_EQ(plane.code, 0);
  EXPECT_NE(plane.out.find("# verdict=PotentialBuilt"), std::string::npos);
  expect_csv_shape(plane.out);
  EXPECT_EQ(run("khasminskii --config " + sample("khas_space.cfg")).code, 4);
  EXPECT_EQ(run("khasminskii --config " + sample("khas_space.cfg") + " K_radius=3").code, 1);
}

TEST(Cli, Obstacle) {
  const auto r = run("obstacle --config " + sample("obstacle_cap.cfg"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\nr,u,psi\n"), std::string::npos);
  expect_csv_shape(r.out);
}

TEST(Cli, OutFileIsByteIdenticalAcrossRuns) {
  const std::string dir = ::testing::TempDir();
  for (const char* name : {"classify_sweep", "evans_plane", "khas_plane", "obstacle_cap"}) {
    const std::string cmd = std::string(name).substr(0, std::string(name).find('_'));
    const std::string sub = cmd == "khas" ? "khasminskii" : cmd;
    const std::string a = dir + "/a_" + name + ".csv", b = dir + "/b_" + name + ".csv";
    ASSERT_EQ(run(sub + " --config " + sample(std::string(name) + ".cfg") + " --out " + a).code, 0) << name;
    ASSERT_EQ(run(sub + " --config " + sample(std::string(name) + ".cfg") + " --out " + b).code, 0) << name;
    const auto first = slurp(a);
    EXPECT_FALSE(first.empty()) << name;
    EXPECT_EQ(first, slurp(b)) << name;
    EXPECT_EQ(first, run(sub + " --config " + sample(std::string(name) + ".cfg")).out) << name;
  }
}
