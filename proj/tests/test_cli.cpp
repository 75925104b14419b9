#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace {

const std::string kCli = DOOBKIT_CLI;
const std::filesystem::path kRoot = DOOBKIT_SOURCE_DIR;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args, const std::string& env = {}) {
  const std::filesystem::path tmp = std::filesystem::temp_directory_path() / "doobkit-cli-test.out";
  const std::string cmd = "cd '" + kRoot.string() + "' && " + env + " '" + kCli + "' " + args + " > '" +
                          tmp.string() + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(tmp);
  std::stringstream buf;
  buf << in.rdbuf();
  r.out = buf.str();
  return r;
}

nlohmann::json parsed(const CliRun& r) { return nlohmann::json::parse(r.out); }

TEST(Cli, Validate) {
  EXPECT_EQ(run("validate fixtures/fixture-b.json").code, 0);
  EXPECT_EQ(run("validate fixtures/malformed.json").code, 3);
  EXPECT_EQ(run("validate fixtures/nope.json").code, 3);
  const CliRun many = run("validate fixtures/fixture-a.json fixtures/fixture-b.json --jobs 2");
  EXPECT_EQ(many.code, 0);
  EXPECT_EQ(parsed(many).size(), 2u);
}

TEST(Cli, PriceGenerators) {
  const CliRun r = run("price fixtures/fixture-a.json --claim call90 --mode generators --generators S");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(parsed(r)["fair_price"].get<double>(), 25.0, 1e-9);
  const CliRun one = run("price fixtures/fixture-a.json --claim call90 --mode generators --generators 1");
  EXPECT_NEAR(parsed(one)["fair_price"].get<double>(), 30.0, 1e-9);
  EXPECT_EQ(run("price fixtures/fixture-a.json --claim call90 --mode generators").code, 3);
}

TEST(Cli, PriceA0) {
  const CliRun r = run("price fixtures/fixture-a.json --claim call90");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(parsed(r)["fair_price"].get<double>(), 18.0, 1e-6);
  EXPECT_EQ(run("price fixtures/fixture-a.json --claim nope").code, 3);
}

TEST(Cli, AuditExpectations) {
  EXPECT_EQ(run("audit fixtures/fixture-b.json --claim-id lemma-tmars5 --expect-counterexample").code, 0);
  EXPECT_EQ(run("audit fixtures/fixture-b.json --claim-id lemma-tmars5 --expect-pass").code, 1);
  EXPECT_EQ(run("audit fixtures/fixture-b.json --claim-id lemma-zz").code, 3);
  EXPECT_EQ(run("audit --claim-id lemma-q5 --budget 0").code, 3);
  const CliRun all = run("audit fixtures/fixture-b.json");
  ASSERT_EQ(all.code, 0);
  EXPECT_GE(parsed(all).size(), 5u);
}

TEST(Cli, DecomposeAndClassify) {
  const CliRun d = run("decompose fixtures/genN-g.json --process f");
  ASSERT_EQ(d.code, 0);
  EXPECT_EQ(parsed(d)["status"], "ok");
  const CliRun bad = run("decompose fixtures/fixture-b.json");
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(parsed(bad)["status"], "fail");
  EXPECT_EQ(run("classify fixtures/genN-g.json").code, 0);
  EXPECT_EQ(run("classify fixtures/fixture-b.json --process f").code, 1);
}

TEST(Cli, EmmHedgeA0) {
  EXPECT_EQ(run("emm fixtures/arbitrage.json --process S").code, 2);
  EXPECT_EQ(run("emm fixtures/fixture-a.json").code, 0);
  const CliRun h = run("hedge fixtures/fixture-a.json --claim call90");
  ASSERT_EQ(h.code, 0);
  EXPECT_EQ(parsed(h)["strategy"]["capital"][0][0].get<double>(), 25.0);
  const CliRun csv = run("hedge fixtures/fixture-a.json --claim call90 --csv");
  EXPECT_EQ(csv.out.rfind("time,cell,X,H0,H,S", 0), 0u);
  EXPECT_EQ(run("a0 fixtures/fixture-b.json --claim xi").code, 0);
  EXPECT_EQ(run("a0 fixtures/fixture-b.json").code, 0);
}

TEST(Cli, FlagsAndEnvironment) {
  EXPECT_EQ(run("validate fixtures/fixture-b.json --bogus").code, 3);
  EXPECT_EQ(run("").code, 3);
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("validate fixtures/fixture-b.json", "DOOBKIT_TOL=abc").code, 3);
  // A loose tolerance hides the 0.06 violation.
  EXPECT_EQ(run("audit fixtures/fixture-b.json --claim-id lemma-tmars5 --expect-pass", "DOOBKIT_TOL=0.1").code, 0);
  EXPECT_EQ(run("audit fixtures/fixture-b.json --claim-id lemma-tmars5 --expect-pass --tol 1e-9",
                "DOOBKIT_TOL=0.1").code,
            1);
}

TEST(Cli, DeterministicBytesAndStamp) {
  const std::string args = "audit --claim-id thm-fmars5 --budget 50 --seed 4";
  EXPECT_EQ(run(args).out, run(args).out);
  EXPECT_EQ(run("price fixtures/fixture-a.json --claim call90").out.find("generated_at"), std::string::npos);
  EXPECT_NE(run("price fixtures/fixture-a.json --claim call90 --stamp").out.find("generated_at"), std::string::npos);
}

TEST(Cli, OutFileAndCsvSibling) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "doobkit-cli-out";
  std::filesystem::create_directories(dir);
  const std::string out = (dir / "hedge.json").string();
  ASSERT_EQ(run("hedge fixtures/fixture-a.json --claim put80 --csv --out '" + out + "'").code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "hedge.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "hedge.csv"));
  std::filesystem::remove_all(dir);
}

}  // namespace
