// Runs the linkage binary as a subprocess and checks outputs and exit codes.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string output; ///< stdout and stderr together
};

Run run(const std::string &args) {
  const std::string cmd = std::string(LINKAGE_CLI) + " " + args + " 2>&1";
  Run r;
  FILE *pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string &name) { return std::string(LINKAGE_DATA) + "/" + name; }

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string &name) {
  const auto dir = fs::temp_directory_path() / "linkage_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_scratch(const std::string &name, const std::string &text) {
  const auto p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

bool has(const std::string &hay, const std::string &needle) { return hay.find(needle) != std::string::npos; }

std::size_t count(const std::string &text, const std::string &needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

} // namespace

TEST(Cli, DescribeHeptagon) {
  const auto r = run("describe " + data("heptagon.json"));
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(has(r.output, "dim M = 4, type (2,2)")) << r.output;
  EXPECT_TRUE(has(r.output, "decomposition: valid")) << r.output;
}

TEST(Cli, DescribeHexagonAndChain) {
  EXPECT_TRUE(has(run("describe " + data("hexagon.json")).output, "dim M = 3, type (2,1)"));
  EXPECT_TRUE(has(run("describe " + data("three_piece_chain.json")).output, "dim M = 4, type (3,1)"));
}

TEST(Cli, DescribeCompleteFour) {
  const auto r = run("describe " + data("complete_four.json"));
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(has(r.output, "1 redundant bar")) << r.output;
}

TEST(Cli, MalformedFileIsAnInputError) {
  const auto p = write_scratch("malformed.json", "{\"vertices\": [\"A\",\n");
  const auto r = run("describe " + p.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(has(r.output, "parse error")) << r.output;
  EXPECT_TRUE(has(r.output, "line")) << r.output;
}

TEST(Cli, UnknownKeyIsAnInputError) {
  const auto p = write_scratch("unknown_key.json", R"({"vertices": ["A"], "colour": "red"})");
  const auto r = run("svg " + p.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(has(r.output, "unknown key")) << r.output;
}

TEST(Cli, InvalidSpecIsAnInputError) {
  const auto p = write_scratch("invalid.json",
                               R"({"vertices": ["A","B"], "edges": [{"a":"A","b":"B","length":1},{"a":"B","b":"A","length":1}]})");
  const auto r = run("describe " + p.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(has(r.output, "duplicate edge")) << r.output;
  EXPECT_EQ(run("solve " + p.string()).code, 2);
}

TEST(Cli, FlagValidation) {
  EXPECT_EQ(run("flow " + data("quadrangle.json") + " --bogus 3").code, 2);
  EXPECT_EQ(run("flow " + data("quadrangle.json") + " --dt -0.1").code, 2);
  EXPECT_EQ(run("flow " + data("quadrangle.json") + " --dt 0").code, 2);
  EXPECT_EQ(run("critical " + data("hexagon.json") + " --starts 0").code, 2);
  EXPECT_EQ(run("commute " + data("hexagon.json") + " --tol -1").code, 2);
  EXPECT_EQ(run("frobnicate " + data("hexagon.json")).code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("describe /nonexistent.json").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, NumericalFailureExitsWithOne) {
  const auto p = write_scratch("infeasible.json", R"({"vertices": ["A","B","C"], "edges": [
    {"a":"A","b":"B","length":1},{"a":"B","b":"C","length":1},{"a":"C","b":"A","length":5}]})");
  const auto r = run("solve " + p.string());
  EXPECT_EQ(r.code, 1) << r.output;
  EXPECT_TRUE(has(r.output, "no realization found")) << r.output;
  EXPECT_EQ(run("commute " + data("hexagon.json") + " --tol 1e-300").code, 1);
}

TEST(Cli, CommuteHexagon) {
  const auto r = run("commute " + data("hexagon.json") + " --s 0.2 --t 0.2 --dt 1e-3");
  EXPECT_EQ(r.code, 0) << r.output;
  const auto pos = r.output.find("defect ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LE(std::strtod(r.output.c_str() + pos + 7, nullptr), 1e-6);
}

TEST(Cli, Integrals) {
  const auto r = run("integrals " + data("heptagon.json"));
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(count(r.output, "drift "), 2u);
}

TEST(Cli, CriticalHexagonTable) {
  const auto r = run("critical " + data("hexagon.json"));
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(has(r.output, "max 3.4\n")) << r.output;
  EXPECT_TRUE(has(r.output, "saddles 0.8 1.4 1.2 1.3 2.5 2.1\n")) << r.output;
  EXPECT_TRUE(has(r.output, "min 0\n")) << r.output;
  EXPECT_EQ(count(r.output, ",yes"), 8u) << r.output;
  EXPECT_EQ(count(r.output, ",no"), 0u) << r.output;
}

TEST(Cli, CriticalConstantDiagonal) {
  const auto r = run("critical " + data("pinned_triangle.json") + " --diagonal A,B");
  EXPECT_EQ(r.code, 2) << r.output;
  EXPECT_TRUE(has(r.output, "constant function")) << r.output;
}

TEST(Cli, SvgPinnedTriangle) {
  const auto r = run("svg " + data("pinned_triangle.json"));
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(count(r.output, "<line class=\"bar\""), 2u);
  EXPECT_EQ(count(r.output, "<rect class=\"base\""), 2u);
  EXPECT_EQ(count(r.output, "stroke-dasharray"), 0u);
}

TEST(Cli, FieldOutputs) {
  const auto tri = run("field " + data("pinned_triangle.json"));
  EXPECT_EQ(tri.code, 0) << tri.output;
  EXPECT_TRUE(has(tri.output, "scalar 12\n") || has(tri.output, "scalar -12\n")) << tri.output;
  const auto hex = run("field " + data("hexagon.json"));
  EXPECT_EQ(hex.code, 0) << hex.output;
  EXPECT_TRUE(has(hex.output, "piece 0 ") && has(hex.output, "piece 1 ")) << hex.output;
  EXPECT_EQ(run("field " + data("complete_four.json")).code, 2);
}

TEST(Cli, FlowCsv) {
  const auto out = scratch("flow.csv");
  const auto r = run("flow " + data("hexagon.json") + " --t 0.01 --dt 1e-3 --piece 1 --out " + out.string());
  EXPECT_EQ(r.code, 0) << r.output;
  const auto csv = slurp(out);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "time,residual,F_1,x_1,y_1,x_2,y_2,x_3,y_3,x_4,y_4");
  EXPECT_EQ(count(csv, "\n"), 12u);
  EXPECT_EQ(run("flow " + data("hexagon.json") + " --piece 7").code, 2);
  EXPECT_EQ(run("flow " + data("quadrangle.json") + " --piece 0").code, 2);
}

TEST(Cli, SolveWritesEveryVertex) {
  const auto out = scratch("solve.csv");
  EXPECT_EQ(run("solve " + data("heptagon.json") + " --out " + out.string()).code, 0);
  const auto csv = slurp(out);
  EXPECT_EQ(count(csv, "\n"), 8u);
  EXPECT_TRUE(has(csv, "A,0,0\n")) << csv;
}

TEST(Cli, ByteIdenticalReruns) {
  for (const std::string cmd : {"flow " + data("heptagon.json") + " --t 0.2",
                                "flow " + data("four_bar.json") + " --t 0.5 --dt 0.01",
                                "svg " + data("hexagon.json"), "svg " + data("heptagon.json") + " --seed 7"}) {
    const auto a = scratch("rerun_a"), b = scratch("rerun_b");
    ASSERT_EQ(run(cmd + " --out " + a.string()).code, 0) << cmd;
    ASSERT_EQ(run(cmd + " --out " + b.string()).code, 0) << cmd;
    const auto ta = slurp(a), tb = slurp(b);
    EXPECT_FALSE(ta.empty());
    EXPECT_EQ(ta, tb) << cmd;
  }
  const auto s1 = run("svg " + data("hexagon.json") + " --seed 1").output;
  const auto s2 = run("svg " + data("hexagon.json") + " --seed 2").output;
  EXPECT_NE(s1, s2);
}
