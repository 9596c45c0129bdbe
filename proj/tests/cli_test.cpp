#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using rtadder::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp(const std::string& name) { return fs::temp_directory_path() / ("rtadder_cli_" + name); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(CliBuild, WritesNetlistAndCensus) {
  const auto path = temp("eo32.json");
  const auto r = call({"build", "--kind", "early-output", "--n", "32", "--out", path.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("gates: 352"), std::string::npos);
  EXPECT_EQ(rtadder::read_netlist(path.string()).gates().size(), 352U);
  fs::remove(path);
}

TEST(CliBuild, DimsCensus) {
  const auto r = call({"build", "--kind", "dims", "--n", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("gates: 20"), std::string::npos);
  EXPECT_NE(r.out.find("CELEMENT2 16"), std::string::npos);
  EXPECT_NE(r.out.find("OR4 4"), std::string::npos);
}

TEST(CliBuild, UsageErrors) {
  EXPECT_EQ(call({"build", "--kind", "early-output", "--n", "0"}).code, 2);
  EXPECT_EQ(call({"build", "--kind", "carry-save", "--n", "4"}).code, 2);
  EXPECT_EQ(call({"build"}).code, 2);
  EXPECT_EQ(call({}).code, 2);
  EXPECT_EQ(call({"frobnicate"}).code, 2);
  EXPECT_EQ(call({"build", "--n", "2", "--out", "/nonexistent/dir/x.json"}).code, 2);
  EXPECT_EQ(call({"--help"}).code, 0);
}

TEST(CliSim, RandomVectorsPass) {
  const auto r = call({"sim", "--kind", "early-output", "--n", "32", "--random", "200", "--seed", "7"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("200/200 pass"), std::string::npos);
  EXPECT_NE(r.out.find("generator=mt19937_64"), std::string::npos);
  EXPECT_NE(r.out.find("forward latency ns: min"), std::string::npos);
}

TEST(CliSim, ExhaustiveDims) {
  const auto r = call({"sim", "--kind", "dims", "--n", "4", "--exhaustive", "--threads", "2"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("512/512 pass"), std::string::npos);
}

TEST(CliSim, VectorSourceIsExclusive) {
  EXPECT_EQ(call({"sim", "--n", "2", "--random", "3", "--exhaustive"}).code, 2);
  EXPECT_EQ(call({"sim", "--n", "2"}).code, 2);
  EXPECT_EQ(call({"sim", "--n", "2", "--random", "0"}).code, 2);
  EXPECT_EQ(call({"sim", "--n", "2", "--seed", "3", "--exhaustive"}).code, 2);
}

TEST(CliSim, MalformedVectorFileNamesLine) {
  const auto path = temp("bad_vectors.txt");
  std::ofstream(path) << "1 2 0\n3 4 zz\n";
  const auto r = call({"sim", "--n", "4", "--vectors", path.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  fs::remove(path);
}

TEST(CliSim, OutOfRangeVectorIsACheckFailure) {
  const auto path = temp("wide_vectors.txt");
  std::ofstream(path) << "1ff 2 0\n";
  EXPECT_EQ(call({"sim", "--n", "4", "--vectors", path.string()}).code, 1);
  fs::remove(path);
}

TEST(CliSim, ReportsAndTracesRoundTrip) {
  const auto csv = temp("report.csv"), vcd = temp("trace.vcd"), csv2 = temp("report2.csv");
  const auto r = call({"sim", "--n", "8", "--random", "20", "--seed", "3", "--report", csv.string(), "--vcd",
                       vcd.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(csv);
  const auto report = rtadder::read_batch_csv(in);
  EXPECT_EQ(report.rows.size(), 20U);
  std::ifstream vin(vcd);
  EXPECT_FALSE(rtadder::read_vcd(vin).changes.empty());

  // Same seed, same bytes.
  call({"sim", "--n", "8", "--random", "20", "--seed", "3", "--threads", "3", "--report", csv2.string()});
  EXPECT_EQ(slurp(csv), slurp(csv2));
  fs::remove(csv);
  fs::remove(csv2);
  fs::remove(vcd);
}

TEST(CliSim, DelayConfigFromFileAndEnvironment) {
  const auto cfg = temp("delays.cfg");
  std::ofstream(cfg) << "AO22=0.100\n";
  const auto file = call({"sim", "--n", "1", "--vectors", "/dev/null", "--delays", cfg.string()});
  EXPECT_EQ(file.code, 0) << file.err;

  const auto vec = temp("one.txt");
  std::ofstream(vec) << "1 0 1\n";
  const auto base = call({"sim", "--n", "1", "--vectors", vec.string()});
  const auto slow = call({"sim", "--n", "1", "--vectors", vec.string(), "--delays", cfg.string()});
  EXPECT_NE(base.out.find("max 0.250"), std::string::npos) << base.out;
  EXPECT_NE(slow.out.find("max 0.300"), std::string::npos) << slow.out;

  ::setenv(rtadder::cli::kDelayEnv, cfg.string().c_str(), 1);
  const auto env = call({"sim", "--n", "1", "--vectors", vec.string()});
  ::unsetenv(rtadder::cli::kDelayEnv);
  EXPECT_NE(env.out.find("max 0.300"), std::string::npos) << env.out;

  std::ofstream(cfg) << "AO22=slow\n";
  EXPECT_EQ(call({"sim", "--n", "1", "--vectors", vec.string(), "--delays", cfg.string()}).code, 2);
  fs::remove(cfg);
  fs::remove(vec);
}

TEST(CliVerify, DefaultEarlyOutput) {
  const auto csv = temp("verify.csv");
  const auto r = call({"verify", "--csv", csv.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("slack -0.063"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("rt-uniform"), std::string::npos);
  EXPECT_NE(r.out.find("withdraw A0 only, all outputs reset"), std::string::npos) << r.out;
  std::ifstream in(csv);
  const auto checks = rtadder::read_report_csv(in);
  EXPECT_FALSE(checks.empty());
  fs::remove(csv);
}

TEST(CliVerify, SkewBeyondThresholdIsAnExpectedViolation) {
  const auto r = call({"verify", "--skew", "0.2"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("margin 0.088"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("threshold 0.112"), std::string::npos) << r.out;
  const auto small = call({"verify", "--skew", "0.1"});
  EXPECT_EQ(small.code, 0);
  EXPECT_NE(small.out.find("no violation"), std::string::npos);
  EXPECT_EQ(call({"verify", "--skew", "soon"}).code, 2);
}

TEST(CliVerify, DimsIsStrong) {
  const auto r = call({"verify", "--kind", "dims"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("strong"), std::string::npos);
  EXPECT_EQ(r.out.find("static-slack"), std::string::npos);
}

TEST(CliTable4, DefaultMatchesPublished) {
  const auto path = temp("table4.csv");
  const auto r = call({"table4", "--out", path.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("max deviation from published table: 0.0 ns"), std::string::npos);
  EXPECT_NE(r.out.find("relative-timed mean: 1.6 ns"), std::string::npos);
  std::ifstream in(path);
  EXPECT_EQ(rtadder::read_table4_csv(in).rows.size(), 10U);
  fs::remove(path);
}

TEST(CliTable4, OverriddenLatencies) {
  const auto path = temp("latencies.csv");
  std::ofstream(path) << "label,class,latency_ns\nmine,early-output,3.20\n";
  const auto r = call({"table4", "--latencies", path.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("mine,early-output,0.6,1.0,1.8,2.6,3.0,1.8"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("max deviation"), std::string::npos);
  std::ofstream(path) << "mine,early-output,abc\n";
  EXPECT_EQ(call({"table4", "--latencies", path.string()}).code, 2);
  fs::remove(path);
}

TEST(CliData, SampleFilesWork) {
  const char* dir = std::getenv("RTADDER_DATA_DIR");
  if (dir == nullptr) GTEST_SKIP() << "RTADDER_DATA_DIR not set";
  const fs::path data(dir);
  const auto sim = call({"sim", "--n", "8", "--vectors", (data / "vectors_8bit.txt").string(), "--delays",
                         (data / "delays_default.cfg").string()});
  EXPECT_EQ(sim.code, 0) << sim.err;
  EXPECT_NE(sim.out.find("6/6 pass"), std::string::npos);
  const auto slow = call({"verify", "--delays", (data / "delays_slow_ao22.cfg").string()});
  EXPECT_NE(slow.out.find("direct 0.300 indirect 0.363 slack -0.063"), std::string::npos) << slow.out;
  const auto table = call({"table4", "--latencies", (data / "latencies_32bit.csv").string()});
  const auto builtin = call({"table4"});
  EXPECT_EQ(table.code, 0) << table.err;
  EXPECT_EQ(builtin.out.substr(0, table.out.size()), table.out);
}
