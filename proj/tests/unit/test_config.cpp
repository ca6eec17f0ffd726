#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "papevo/config.hpp"
#include "papevo/fit.hpp"
#include "papevo/format.hpp"
#include "papevo/parallel.hpp"

using namespace papevo;

TEST(Config, ParsesKeysCommentsAndLists) {
  const auto c = Config::parse_string("# header\nd = 3\nb=1,0.5  # trailing\nq=inf\nflag=true\n\n");
  EXPECT_EQ(c.get_int("d"), 3);
  EXPECT_EQ(c.get_list("b"), (std::vector<double>{1.0, 0.5}));
  EXPECT_TRUE(std::isinf(c.get_double("q")));
  EXPECT_TRUE(c.get_bool("flag"));
  EXPECT_EQ(c.get_or("missing", "x"), "x");
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(Config::parse_string("d=3\nd=4\n"), ConfigError);
  EXPECT_THROW(Config::parse_string("no equals sign\n"), ConfigError);
  const auto c = Config::parse_string("d=three\n");
  EXPECT_THROW(c.get_int("d"), ConfigError);
  EXPECT_THROW(c.get("m"), ConfigError);
  EXPECT_THROW(Config::parse_string("d=3\nzzz=1\n").reject_unknown({"d"}), ConfigError);
  EXPECT_THROW(Config::load("/nonexistent/path.cfg"), ConfigError);
}

TEST(Format, RoundTripsDoubles) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 6.02214076e23}) EXPECT_EQ(std::stod(fmt17(x)), x);
  EXPECT_EQ(fmtg(1.0 / 6.0, 5), "0.16667");
  EXPECT_EQ(fmt17(NAN), "nan");
}

TEST(Fit, RecoversPowerLaw) {
  std::vector<double> x, y;
  for (double t = 0.5; t < 20; t *= 1.3) {
    x.push_back(t);
    y.push_back(2.5 * std::pow(t, -0.75));
  }
  const auto f = fit_power_law(x, y);
  EXPECT_NEAR(f.exponent, -0.75, 1e-12);
  EXPECT_NEAR(f.constant, 2.5, 1e-12);
}

TEST(Parallel, EachIndexOnceAndExceptionsPropagate) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, [](std::size_t i) {
                 if (i == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
  EXPECT_GE(worker_count(), 1);
}
