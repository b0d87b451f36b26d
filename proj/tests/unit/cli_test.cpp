#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include "json.hpp"

namespace {

const std::string kCli = AINF_CLI_PATH;
const std::string kFixtures = AINF_FIXTURE_DIR;

struct Run {
  int code = -1;
  std::string out;
};

Run ainf(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + kCli + "' " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string fixture(const std::string& name) { return "'" + kFixtures + "/" + name + "'"; }

bool has(const Run& r, const std::string& s) { return r.out.find(s) != std::string::npos; }

std::string without_time(const std::string& text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    const std::string line = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos + 1);
    if (line.rfind("time: ", 0) != 0 && line.find("\"wall_time_s\"") == std::string::npos) out += line;
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return out;
}

TEST(Cli, CheckPassesAndFails) {
  auto ok = ainf("check " + fixture("f1.afd") + " --kind module");
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_TRUE(has(ok, "outcome: pass"));

  auto bad = ainf("check " + fixture("corrupted.afd") + " --kind module");
  EXPECT_EQ(bad.code, 1) << bad.out;
  EXPECT_TRUE(has(bad, "level 2, arity 0, inputs (w), residual [w]")) << bad.out;
}

TEST(Cli, InputErrors) {
  EXPECT_EQ(ainf("check " + fixture("missing.afd")).code, 2);
  EXPECT_EQ(ainf("check " + fixture("reject/syntax_error.afd")).code, 2);
  EXPECT_EQ(ainf("solve " + fixture("f1.afd") + " --cutoff 5").code, 2);
  EXPECT_EQ(ainf("solve " + fixture("f1.afd") + " --cyclic nope").code, 2);
  EXPECT_EQ(ainf("check " + fixture("f1.afd") + " --kind ring").code, 2);
  EXPECT_EQ(ainf("frobnicate").code, 2);
  EXPECT_EQ(ainf("").code, 2);
  auto diag = ainf("check " + fixture("reject/unresolved_name.afd"));
  EXPECT_TRUE(has(diag, "11:12: UNRESOLVED_NAME")) << diag.out;
}

TEST(Cli, Solve) {
  auto f1 = ainf("solve " + fixture("f1.afd"));
  EXPECT_EQ(f1.code, 0) << f1.out;
  EXPECT_TRUE(has(f1, "b = T^1 * p\n"));
  EXPECT_TRUE(has(f1, "b at level 1: p\n"));

  auto traced = ainf("solve " + fixture("f1.afd") + " --trace");
  EXPECT_TRUE(has(traced, "level 1: forcing v, b_1 = p")) << traced.out;

  auto trivial = ainf("solve " + fixture("trivial.afd"));
  EXPECT_EQ(trivial.code, 0);
  EXPECT_TRUE(has(trivial, "b = 0\n"));

  auto singular = ainf("solve " + fixture("singular.afd"));
  EXPECT_EQ(singular.code, 1) << singular.out;
  EXPECT_TRUE(has(singular, "cyclic condition (1) fails"));

  auto lowered = ainf("solve " + fixture("f1.afd") + " --cutoff 1");
  EXPECT_EQ(lowered.code, 0);
  EXPECT_TRUE(has(lowered, "b = 0\n")) << lowered.out;
}

TEST(Cli, SolveWithOracle) {
  auto r = ainf("solve " + fixture("f1.afd") + " --oracle");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(has(r, "oracle: unique solution"));
  auto starved = ainf("solve " + fixture("f1.afd") + " --oracle", "AINF_ORACLE_BUDGET=2");
  EXPECT_EQ(starved.code, 2) << starved.out;
}

TEST(Cli, Homology) {
  auto c = ainf("homology " + fixture("complex.afd") + " --differential floer");
  EXPECT_EQ(c.code, 0);
  EXPECT_TRUE(has(c, "free 0, torsion [1/2], threshold 2")) << c.out;

  auto z = ainf("homology " + fixture("zero_complex.afd") + " --differential floer");
  EXPECT_TRUE(has(z, "free 3, torsion [], threshold 3")) << z.out;

  auto t = ainf("homology " + fixture("f1.afd") + " --differential twisted");
  EXPECT_EQ(t.code, 0);
  EXPECT_TRUE(has(t, "free 2, torsion [], threshold 4")) << t.out;

  auto p = ainf("homology " + fixture("gluing_synthetic.afd") + " --differential pair");
  EXPECT_EQ(p.code, 0);
  EXPECT_TRUE(has(p, "free 2, torsion [], threshold 2")) << p.out;
}

TEST(Cli, Pair) {
  auto trivial = ainf("pair " + fixture("gluing_trivial.afd"));
  EXPECT_EQ(trivial.code, 0) << trivial.out;
  EXPECT_TRUE(has(trivial, "isomorphism verified: free 1, torsion []"));

  auto synthetic = ainf("pair " + fixture("gluing_synthetic.afd"));
  EXPECT_EQ(synthetic.code, 0) << synthetic.out;
  EXPECT_TRUE(has(synthetic, "isomorphism verified"));

  auto broken = ainf("pair " + fixture("gluing_broken.afd"));
  EXPECT_EQ(broken.code, 1) << broken.out;
  EXPECT_TRUE(has(broken, "stage pairing-relation: fail"));
}

TEST(Cli, ReportIsReproducible) {
  for (const std::string& args : {"pair " + fixture("gluing_synthetic.afd"), "solve " + fixture("f1.afd") + " --trace",
                                 "check " + fixture("corrupted.afd") + " --format machine"}) {
    auto a = ainf(args);
    auto b = ainf(args);
    EXPECT_EQ(without_time(a.out), without_time(b.out));
    EXPECT_NE(without_time(a.out), a.out);
  }
  auto text = ainf("check " + fixture("f1.afd"));
  EXPECT_EQ(text.out.rfind("ainf report 1\n", 0), 0u);
  EXPECT_TRUE(has(text, "sha256: "));
}

TEST(Cli, MachineFormat) {
  auto r = ainf("solve " + fixture("f1.afd") + " --format machine");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["report_version"], 1);
  EXPECT_EQ(j["outcome"], "pass");
  EXPECT_EQ(j["exit_code"], 0);
  EXPECT_EQ(j["sha256"].get<std::string>().size(), 64u);
}

}  // namespace
