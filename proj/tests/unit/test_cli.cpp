#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(LNLS_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, "popen failed"};
  std::string out;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string config(const std::string& name) { return std::string(LNLS_CONFIG_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lnls_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const auto path = fs::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

TEST(Cli, MissingConfigNamesPath) {
  const auto r = run("converge --config /no/such/file.json");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("/no/such/file.json"), std::string::npos) << r.output;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").exit_code, 2);
  EXPECT_EQ(run("frobnicate").exit_code, 2);
  EXPECT_EQ(run("converge").exit_code, 2);
  EXPECT_EQ(run("--help").exit_code, 0);
}

TEST(Cli, InvalidExponentRejected) {
  const auto path = write_file("lnls_bad_p.json", R"({"schema_version": 1, "command": "simulate",
    "params": {"p": 0.5, "lambda": 1},
    "initial_data": {"kind": "plane_wave", "dim": 1, "k": [1]},
    "lattice": {"M": 8}, "evolution": {"dt": 0.01, "t_final": 0.1}})");
  const auto r = run("simulate --config " + path.string() + " --out " + scratch("bad_p").string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("p > 1 required"), std::string::npos) << r.output;
}

TEST(Cli, TwoSpacingsRejected) {
  const auto r = run("converge --config " + config("converge_1d_quick.json") + " --h-list pi/8,pi/16 --out " +
                     scratch("two_h").string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find(">= 3 spacings required"), std::string::npos) << r.output;
}

TEST(Cli, ExcludedEndpointRejected) {
  const auto path = write_file("lnls_endpoint.json", R"({"schema_version": 1, "command": "strichartz",
    "strichartz": {"d": 3, "pairs": [[2, "inf"]], "profiles": []}})");
  const auto r = run("strichartz --config " + path.string() + " --out " + scratch("endpoint").string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("(2, inf, 3)"), std::string::npos) << r.output;
}

TEST(Cli, SyntaxErrorReportsLocation) {
  const auto path = write_file("lnls_syntax.json", "{\n  \"schema_version\": 1,\n  \"command\" \"converge\"\n}\n");
  const auto r = run("converge --config " + path.string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("line 3"), std::string::npos) << r.output;
}

TEST(Cli, UnderresolvedReferenceIsNumericalFailure) {
  const auto path = write_file("lnls_coarse.json", R"({"schema_version": 1, "command": "converge",
    "params": {"p": 3, "lambda": 1},
    "initial_data": {"kind": "gaussian", "dim": 1, "width": 0.15, "amplitude": 2.0},
    "study": {"h_levels": [3, 5], "times": [0, 0.25], "dt": 0.001,
              "reference": {"resolution": 8, "dt": 0.001, "self_convergence_tol": 1e-6}}})");
  const auto r = run("converge --config " + path.string() + " --out " + scratch("coarse").string());
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.output.find("self-convergence"), std::string::npos) << r.output;
}

TEST(Cli, DryRunWritesNothing) {
  const auto out = scratch("dry");
  const auto r = run("converge --config " + config("converge_1d_quick.json") + " --dry-run --out " + out.string());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("dry run"), std::string::npos);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, ConvergeOutputsAreDeterministic) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const auto ra = run("converge --config " + config("converge_1d_quick.json") + " --out " + a.string());
  const auto rb = run("converge --config " + config("converge_1d_quick.json") + " --out " + b.string() + " --threads 2");
  ASSERT_EQ(ra.exit_code, 0) << ra.output;
  ASSERT_EQ(rb.exit_code, 0) << rb.output;
  for (const char* f : {"converge.csv", "converge.jsonl", "decompose.csv", "converge.svg", "plot_t0.5.tsv", "summary.txt"}) {
    EXPECT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const auto resolved = slurp(a / "resolved_config.json");
  EXPECT_NE(resolved.find("\"command\": \"converge\""), std::string::npos) << resolved;
}

TEST(Cli, OverridesLandInResolvedConfig) {
  const auto out = scratch("override");
  const auto r = run("converge --config " + config("converge_1d_quick.json") +
                     " --h-list pi/8,pi/16,pi/32 --times 0,0.25 --seed 5 --out " + out.string());
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto resolved = slurp(out / "resolved_config.json");
  EXPECT_NE(resolved.find("\"seed\": 5"), std::string::npos) << resolved;
  EXPECT_NE(resolved.find("pi/32"), std::string::npos) << resolved;
  std::ifstream csv(out / "converge.csv");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 1u + 3 * 2);
}

TEST(Cli, SimulateAndConserveRun) {
  const auto sim = scratch("sim");
  const auto r = run("simulate --config " + config("simulate_plane_wave.json") + " --out " + sim.string());
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(fs::exists(sim / "trajectory" / "manifest.json"));
  EXPECT_TRUE(fs::exists(sim / "conserved.csv"));
  const auto dis = scratch("dispersive");
  const auto rd = run("dispersive --config " + config("dispersive.json") + " --out " + dis.string());
  ASSERT_EQ(rd.exit_code, 0) << rd.output;
  EXPECT_NE(rd.output.find("PASS  dispersive d = 2"), std::string::npos) << rd.output;
}

}  // namespace
