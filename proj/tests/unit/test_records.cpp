#include <gtest/gtest.h>

#include <cstdlib>
#include <limits>
#include <sstream>

#include "lnls/records.hpp"

namespace {

using namespace lnls;

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(3.0), "3");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  for (double x : {1.0 / 3.0, 2.718281828459045, 1e-300, 6.02214076e23, -0.0}) {
    const auto s = format_double(x);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), x) << s;
  }
}

TEST(Records, CsvAndJsonLines) {
  ExperimentRecord a;
  a.experiment = "converge";
  a.h = 0.25;
  a.t = 1.0;
  a.value = 1.0 / 3.0;
  a.metadata["p"] = "3";
  ExperimentRecord b;
  b.experiment = "strichartz";
  b.q = 3.0;
  b.r = std::numeric_limits<double>::infinity();
  b.ratio = 0.5;

  std::ostringstream csv;
  write_csv(csv, {a, b});
  EXPECT_EQ(csv.str(),
            "experiment,h,N,q,r,epsilon,t,value,ratio\n"
            "converge,0.25,,,,,1,0.3333333333333333,\n"
            "strichartz,,,3,inf,,,,0.5\n");

  std::ostringstream jl;
  write_json_lines(jl, {a, b});
  std::istringstream in(jl.str());
  std::string line;
  std::getline(in, line);
  const auto ja = nlohmann::json::parse(line);
  EXPECT_EQ(ja["value"].get<double>(), 1.0 / 3.0);
  EXPECT_TRUE(ja["N"].is_null());
  EXPECT_EQ(ja["metadata"]["p"], "3");
  std::getline(in, line);
  EXPECT_EQ(nlohmann::json::parse(line)["r"], "inf");
}

TEST(Records, UniformityVerdict) {
  std::vector<ExperimentRecord> recs;
  for (auto [h, r] : {std::pair{0.4, 1.0}, {0.4, 2.0}, {0.2, 1.5}, {0.1, 5.0}}) {
    ExperimentRecord x;
    x.h = h;
    x.ratio = r;
    recs.push_back(x);
  }
  auto v = uniformity_verdict(recs);
  EXPECT_DOUBLE_EQ(v.spread, 5.0 / 1.5);
  EXPECT_FALSE(v.pass());
  recs.pop_back();
  v = uniformity_verdict(recs);
  EXPECT_DOUBLE_EQ(v.spread, 2.0 / 1.5);
  EXPECT_TRUE(v.pass());
}

}  // namespace
