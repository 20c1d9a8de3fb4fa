#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "evanspot/cli/commands.hpp"

using namespace evanspot;
using namespace evanspot::io;

TEST(Fmt, ShortestRoundTrip) {
  EXPECT_EQ(fmt(0.1), "0.1");
  EXPECT_EQ(fmt(2.0), "2");
  EXPECT_EQ(fmt(-1e-300), "-1e-300");
  EXPECT_EQ(fmt(1.0 / 0.0), "inf");
  for (double x : {M_PI, 1.0 / 3.0, 6.02214076e23}) EXPECT_EQ(std::stod(fmt(x)), x);
}

TEST(Quote, OnlyWhenNeeded) {
  EXPECT_EQ(quote("euclidean"), "euclidean");
  EXPECT_EQ(quote("power-exp:alpha=3,m=2"), "\"power-exp:alpha=3,m=2\"");
  EXPECT_EQ(quote("a\"b,"), "\"a\"\"b,\"");
}

TEST(RunConfig, ParsesCommentsAndLastAssignmentWins) {
  const auto cfg = RunConfig::from_text("# header\nm = 2  # trailing\n\nmanifold=euclidean\nm=3\n");
  EXPECT_EQ(cfg.get_int("m", 0), 3);
  EXPECT_EQ(cfg.get_string("manifold"), "euclidean");
  EXPECT_FALSE(cfg.has("p"));
  EXPECT_EQ(cfg.get_double("p", 2.5), 2.5);
}

TEST(RunConfig, OverridesReplaceFileValues) {
  auto cfg = RunConfig::from_text("eps=0.1\n");
  cfg.apply_override("eps=0.2");
  cfg.apply_override(" radii = 4, 8 ,16 ");
  EXPECT_EQ(cfg.get_double("eps"), 0.2);
  EXPECT_EQ(cfg.get_doubles("radii"), (std::vector<double>{4, 8, 16}));
  EXPECT_THROW(cfg.apply_override("novalue"), ConfigError);
}

TEST(RunConfig, ErrorsNameTheKey) {
  const auto cfg = RunConfig::from_text("m=two\nn=2.5\nr=1,x\n");
  try {
    cfg.get_double("m");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "m");
    EXPECT_NE(std::string(e.what()).find("'m'"), std::string::npos);
  }
  EXPECT_THROW(cfg.get_int("n", 0), ConfigError);
  EXPECT_THROW(cfg.get_doubles("r"), ConfigError);
  EXPECT_THROW(cfg.get_string("missing"), ConfigError);
  EXPECT_THROW(RunConfig::from_text("just words\n"), ConfigError);
  EXPECT_THROW(RunConfig::from_file("/nonexistent/cfg"), ConfigError);
}

TEST(Registry, ManifoldTags) {
  EXPECT_EQ(make_manifold("euclidean", 3).dimension(), 3);
  EXPECT_EQ(make_manifold("hyperbolic:m=4", 2).dimension(), 4);
  const auto P = make_manifold("power-exp:alpha=2", 2);
  EXPECT_EQ(P.kind(), WarpKind::PowerExp);
  EXPECT_EQ(P.alpha(), 2.0);
  EXPECT_THROW(make_manifold("power-exp", 2), ConfigError);
  EXPECT_THROW(make_manifold("power-exp:alpha=-1", 2), ConfigError);
  EXPECT_THROW(make_manifold("euclidean:alpha=1", 2), ConfigError);
  EXPECT_THROW(make_manifold("sphere", 2), ConfigError);
  EXPECT_THROW(make_manifold("euclidean:m=2.5", 2), ConfigError);
  EXPECT_THROW(make_manifold("euclidean:m=1", 2), ConfigError);
}

TEST(Registry, TabulatedTableRelativeToConfig) {
  const std::string dir = ::testing::TempDir();
  {
    std::ofstream t(dir + "/warp.csv");
    t << "r,g\n";
    for (int i = 1; i <= 100; ++i) t << 0.01 * i << ',' << 0.01 * i << '\n';
  }
  const auto M = make_manifold("tabulated:file=warp.csv,monotone=1", 2, "manifold", dir);
  EXPECT_NEAR(M.g(0.5), 0.5, 1e-12);
  EXPECT_TRUE(M.monotone());
  EXPECT_THROW(make_manifold("tabulated:file=missing.csv", 2, "manifold", dir), ConfigError);
  EXPECT_THROW(make_manifold("tabulated", 2), ConfigError);
}

TEST(Registry, OperatorAndPotentialTags) {
  EXPECT_EQ(make_operator("p-laplacian:p=3").p(), 3.0);
  EXPECT_EQ(make_operator("perturbed:p=2").kind(), PhiKind::Perturbed);
  EXPECT_THROW(make_operator("p-laplacian"), ConfigError);
  EXPECT_THROW(make_operator("p-laplacian:p=1"), ConfigError);
  EXPECT_THROW(make_operator("p-laplacian:p=abc"), ConfigError);
  EXPECT_EQ(make_potential("zero").kind(), PotentialKind::Zero);
  EXPECT_EQ(make_potential("linear-power:p=2,lambda=1")(3.0), 3.0);
  EXPECT_EQ(make_potential("plateau:T=1,p=2")(0.5), 0.0);
  EXPECT_EQ(make_potential("superlinear:q=5")(2.0), 32.0);
  EXPECT_THROW(make_potential("linear-power:p=2"), ConfigError);
  EXPECT_THROW(make_potential("zero:q=1"), ConfigError);
  EXPECT_THROW(make_potential("cubic"), ConfigError);
  EXPECT_THROW(parse_tag("p-laplacian:p", "operator"), ConfigError);
}

TEST(Commands, ClassifyPlaneRow) {
  const auto cfg = RunConfig::from_text("manifold=euclidean\nm=2\noperator=p-laplacian:p=2\n");
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_classify(cfg, out, err), 0);
  EXPECT_NE(out.str().find("\nmanifold,p,potential,property,verdict,c,partial_integral,slope\n"), std::string::npos);
  EXPECT_NE(out.str().find("\neuclidean,2,-,Parabolic,Diverges,"), std::string::npos);
  EXPECT_TRUE(err.str().empty());
}

TEST(Commands, ErrorsGoToErrStreamWithExitOne) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_classify(RunConfig::from_text("manifold=bogus\noperator=p-laplacian:p=2\n"), out, err), 1);
  EXPECT_NE(err.str().find("'manifold'"), std::string::npos);
  EXPECT_TRUE(out.str().empty());
  err.str("");
  EXPECT_EQ(cli::run_evans(RunConfig::from_text("eps=-1\n"), out, err), 1);
  EXPECT_NE(err.str().find("'eps'"), std::string::npos);
  err.str("");
  EXPECT_EQ(cli::run_khasminskii(RunConfig::from_text("K_radius=3\nradii=4,8,16,32\n"), out, err), 1);
  EXPECT_NE(err.str().find("Omega_radius"), std::string::npos);
  err.str("");
  EXPECT_EQ(cli::run_obstacle(RunConfig::from_text("obstacle=wall:h=1\n"), out, err), 1);
  EXPECT_NE(err.str().find("'obstacle'"), std::string::npos);
  err.str("");
  EXPECT_EQ(cli::run_classify(RunConfig::from_text("manifold=euclidean\noperator=p-laplacian:p=2\ntol=0\n"), out, err), 1);
  EXPECT_NE(err.str().find("'tol'"), std::string::npos);
}

TEST(Commands, ObstacleReportsResidual) {
  std::ostringstream out, err;
  const auto cfg = RunConfig::from_text("a=1\nb=3\nnodes=31\nobstacle=cap:peak=0.5,curv=2\n");
  EXPECT_EQ(cli::run_obstacle(cfg, out, err), 0);
  EXPECT_NE(out.str().find("# stationarity="), std::string::npos);
  EXPECT_NE(out.str().find("\nr,u,psi\n"), std::string::npos);
}
