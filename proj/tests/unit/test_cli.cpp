#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "papevo/experiment.hpp"

using namespace papevo;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("papevo_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "run.cfg";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

const char* kExponents = "experiment=exponents\nd=3\nm=4\nr=9\nexpect_gamma=0.16666666666666666\n"
                         "expect_alpha1=1.25\nexpect_alpha2=0.75\n";

}  // namespace

TEST(Run, ExponentsSummary) {
  const auto dir = scratch("exponents");
  std::ostringstream diag;
  EXPECT_EQ(run(write_config(dir, kExponents).string(), diag, (dir / "out").string()), kExitOk);
  const auto summary = slurp(dir / "out" / "summary.txt");
  EXPECT_NE(summary.find("gamma 0.16667 0.16667 PASS\n"), std::string::npos);
  EXPECT_NE(summary.find("alpha1 1.25 1.25 PASS\n"), std::string::npos);
  EXPECT_NE(summary.find("alpha2 0.75 0.75 PASS\n"), std::string::npos);
  EXPECT_NE(slurp(dir / "out" / "exponents.csv").find("pY,4.5\n"), std::string::npos);
}

TEST(Run, MissingPhysicsKeyIsConfigError) {
  const auto dir = scratch("missing");
  std::ostringstream diag;
  EXPECT_EQ(run(write_config(dir, "experiment=exponents\nd=3\nm=4\n").string(), diag, (dir / "out").string()),
            kExitConfig);
  EXPECT_FALSE(fs::exists(dir / "out"));
  EXPECT_NE(diag.str().find("r"), std::string::npos);
}

TEST(Run, UnknownKeyIsConfigError) {
  const auto dir = scratch("unknown");
  std::ostringstream diag;
  const std::string text = std::string(kExponents) + "colour=blue\n";
  EXPECT_EQ(run(write_config(dir, text).string(), diag, (dir / "out").string()), kExitConfig);
  EXPECT_NE(diag.str().find("colour"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Run, FailingCheckExitsOne) {
  const auto dir = scratch("fail");
  std::ostringstream diag;
  const std::string text = "experiment=exponents\nd=3\nm=4\nr=9\nexpect_gamma=0.2\n";
  EXPECT_EQ(run(write_config(dir, text).string(), diag, (dir / "out").string()), kExitFail);
  EXPECT_NE(slurp(dir / "out" / "summary.txt").find("FAIL"), std::string::npos);
}

TEST(Run, OversizedBallIsHypothesisFailure) {
  const auto dir = scratch("picard");
  std::ostringstream diag;
  const std::string text =
      "experiment=picard\nbackend=kernel\nd=3\nn=8\nR=4\nb=1\ndelta=0.5\nm=4\nr=9\nH=2\nsigma=0.85\n"
      "t_floor=1e-3\nt_min=0\nt_max=4\ndt=0.5\nrho=5\nforcing_amplitude=0.01\ng_width=1\n";
  EXPECT_EQ(run(write_config(dir, text).string(), diag, (dir / "out").string()), kExitHypothesis);
  const auto summary = slurp(dir / "out" / "summary.txt");
  EXPECT_NE(summary.find("Ltilde*C < 0.9"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out" / "picard.csv"));
}

TEST(Run, OutputsAreByteIdenticalAcrossRuns) {
  const auto dir = scratch("determinism");
  const std::string text =
      "experiment=linear\nforcing=families\nbackend=kernel\nd=2\nn=16\nR=3\nb=1,0.2\ndelta=0.5\nx_p=1.5\ny_p=3\n"
      "H=3\nsigma=0.85\nt_floor=1e-3\ng_width=0.6\nwindow=2\ndt=0.25\ntol=0.5\n";
  const auto cfg = write_config(dir, text);
  std::ostringstream diag;
  run(cfg.string(), diag, (dir / "a").string());
  run(cfg.string(), diag, (dir / "b").string());
  EXPECT_EQ(slurp(dir / "a" / "linear.csv"), slurp(dir / "b" / "linear.csv"));
  EXPECT_EQ(slurp(dir / "a" / "summary.txt"), slurp(dir / "b" / "summary.txt"));
  EXPECT_FALSE(slurp(dir / "a" / "linear.csv").empty());
}

TEST(Run, PapTestDistinguishesSignals) {
  const auto dir = scratch("paptest");
  std::ostringstream diag;
  const std::string base = "experiment=pap-test\nt_min=-200\nt_max=200\nsteps=4000\nepsilon=0.25\nl_max=100\n"
                           "L_list=10,20,40,80,160\n";
  EXPECT_EQ(run(write_config(dir, base + "signal=quasi-periodic\nexpect_ap=true\nexpect_pap0=false\n").string(),
                diag, (dir / "a").string()),
            kExitOk)
      << diag.str();
  // The sum is neither almost periodic nor ergodic-zero.
  EXPECT_EQ(run(write_config(dir, base + "signal=pap\nexpect_ap=false\nexpect_pap0=false\n").string(), diag,
                (dir / "c").string()),
            kExitOk)
      << diag.str();
  EXPECT_EQ(run(write_config(dir, base + "signal=decay\nexpect_ap=false\nexpect_pap0=true\n").string(), diag,
                (dir / "b").string()),
            kExitOk)
      << diag.str();
}

TEST(Selftest, PassesAndDetectsInjectedFault) {
  const auto ok = selftest();
  EXPECT_TRUE(ok.passed()) << ok.summary();
  EXPECT_EQ(ok.summary(), selftest().summary());
  EXPECT_FALSE(selftest(SelftestFault::kernel_constant).passed());
  EXPECT_TRUE(selftest().passed());
}
