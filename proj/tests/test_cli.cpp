#include <crcartan/app.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace crcartan;
using Json = app::Json;

namespace {

struct CliRun {
  int code;
  std::string out, err;
  Json json() const { return Json::parse(out); }
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "crcartan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = app::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempFile {
 public:
  TempFile(const std::string& name, const std::string& content)
      : path_(std::filesystem::temp_directory_path() / ("crcartan-test-" + std::to_string(::getpid()) + "-" + name)) {
    std::ofstream(path_) << content;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace

TEST(Validate, ExitCodes) {
  EXPECT_EQ(run({"validate", "--surface", "mlc"}).code, app::exit_code::ok);
  EXPECT_EQ(run({"validate", "--surface", "mlc-mix"}).code, app::exit_code::ok);
  EXPECT_EQ(run({"validate", "--surface", "z1*zb1*z2 + z1*zb1*zb2"}).code, app::exit_code::failure);
  EXPECT_EQ(run({"validate", "--surface", "z1*zb1"}).code, app::exit_code::failure);

  CliRun bad = run({"validate", "--surface", "z1*("});
  EXPECT_EQ(bad.code, app::exit_code::usage);
  Json r = bad.json();
  EXPECT_EQ(r["status"], "error");
  EXPECT_TRUE(r["error"].contains("position"));
  EXPECT_NE(bad.err.find("crcartan:"), std::string::npos);
}

TEST(Validate, ReportsHypotheses) {
  Json r = run({"validate", "--surface", "z1*zb1"}).json();
  EXPECT_EQ(r["validation"]["two_nondegenerate"], false);
  EXPECT_EQ(r["exit_code"], 1);
}

TEST(Usage, BadArgumentsExitTwo) {
  EXPECT_EQ(run({"frobnicate"}).code, app::exit_code::usage);
  EXPECT_EQ(run({"verify", "--suite", "nope"}).code, app::exit_code::usage);
  EXPECT_EQ(run({"classify", "--samples", "0"}).code, app::exit_code::usage);
  EXPECT_EQ(run({"invariants", "--points", "/nonexistent/points.json"}).code, app::exit_code::usage);
  EXPECT_EQ(run({"--help"}).code, app::exit_code::ok);
}

TEST(Classify, Verdicts) {
  for (const char* s : {"mlc", "mlc-shear", "mlc-dilation", "mlc-mix"})
    EXPECT_EQ(run({"classify", "--surface", s, "--samples", "5"}).code, app::exit_code::ok) << s;

  CliRun cone = run({"classify", "--surface", "quartic-cone", "--samples", "5"});
  ASSERT_EQ(cone.code, app::exit_code::not_equivalent);
  Json c = cone.json()["classification"];
  EXPECT_EQ(c["verdict"], "NotModelEquivalent");
  EXPECT_EQ(c["invariant"], "V0");
  EXPECT_TRUE(c.contains("witness"));

  EXPECT_EQ(run({"classify", "--surface", "mlc", "--samples", "5", "--inject-v0", "z1*zb1+1"}).code,
            app::exit_code::not_equivalent);
  EXPECT_EQ(run({"classify", "--surface", "quartic-cone", "--samples", "5", "--mode", "float"}).code,
            app::exit_code::not_equivalent);
  EXPECT_EQ(run({"classify", "--surface", "mlc", "--samples", "5", "--mode", "float"}).code, app::exit_code::ok);
}

TEST(Classify, OnlySingularPointsIsInconclusive) {
  TempFile pts("singular.json", R"j([{"z1": "1/2", "z2": 1}, {"z1": 0, "z2": -1}])j");
  CliRun r = run({"classify", "--surface", "mlc", "--points", pts.path()});
  EXPECT_EQ(r.code, app::exit_code::inconclusive);
  EXPECT_EQ(r.json()["classification"]["verdict"], "Inconclusive");
}

TEST(Invariants, ModelPointsAreZero) {
  TempFile pts("model.json",
               R"j([{"z1": "1/3", "z2": "1/5 + i/7"}, {"z1": "i/2", "z2": "-1/4", "c": "2 - i"},
                   {"z1": 1, "z2": "i/3", "v": "1/2"}, {"z1": "-2/3", "z2": 0}, {"z1": "1/7", "z2": "1/2"}])j");
  for (const char* s : {"mlc", "mlc-shear"}) {
    CliRun r = run({"invariants", "--surface", s, "--points", pts.path()});
    ASSERT_EQ(r.code, app::exit_code::ok) << s << r.err;
    Json points = r.json()["invariants"]["points"];
    ASSERT_EQ(points.size(), 5u);
    for (const auto& p : points) {
      EXPECT_EQ(p["I0"], "0") << s;
      EXPECT_EQ(p["V0"], "0") << s;
      EXPECT_EQ(p["Q0"], "0") << s;
    }
  }
}

TEST(Invariants, BothWeightsAreReported) {
  Json r = run({"invariants", "--surface", "quartic-cone", "--samples", "2", "--seed", "3"}).json();
  Json section = r["invariants"];
  EXPECT_EQ(section["V0_weights"].size(), 3u);
  for (const auto& p : section["points"]) {
    ASSERT_TRUE(p.contains("V0_weighted"));
    EXPECT_EQ(p["V0_weighted"].size(), 3u);
    EXPECT_TRUE(p.contains("Q0_unhalved"));
    EXPECT_EQ(p["route_delta"]["V0"], "0");
  }
}

TEST(Invariants, SingularPointIsAnError) {
  TempFile pts("bad.json", R"j([{"z1": "1/2", "z2": 1}, {"z1": "1/2", "z2": "1/3"}])j");
  CliRun r = run({"invariants", "--surface", "mlc", "--points", pts.path()});
  EXPECT_EQ(r.code, app::exit_code::failure);
  Json points = r.json()["invariants"]["points"];
  EXPECT_TRUE(points[0].contains("error"));
  EXPECT_FALSE(points[1].contains("error"));
}

TEST(Invariants, MalformedPointsAreUsageErrors) {
  TempFile missing("missing.json", R"j([{"z1": "1/2"}])j");
  TempFile stray("stray.json", R"j([{"z1": "1/2", "z2": 0, "w": 1}])j");
  TempFile complex_v("cv.json", R"j([{"z1": "1/2", "z2": 0, "v": "i"}])j");
  for (const auto* f : {&missing, &stray, &complex_v})
    EXPECT_EQ(run({"invariants", "--points", f->path()}).code, app::exit_code::usage) << f->path();
}

TEST(Verify, SuitesPass) {
  for (const char* suite : {"liealg", "model", "brackets"}) {
    CliRun r = run({"verify", "--suite", suite, "--samples", "6"});
    EXPECT_EQ(r.code, app::exit_code::ok) << suite;
    EXPECT_EQ(r.json()["summary"]["fail"], 0) << suite;
  }
}

TEST(Verify, BracketDefinedConvention) {
  EXPECT_EQ(run({"verify", "--suite", "structure", "--samples", "6", "--convention", "bracket-defined"}).code,
            app::exit_code::ok);
}

TEST(Verify, LemmasHoldOffTheModel) {
  EXPECT_EQ(run({"verify", "--suite", "lemmas", "--surface", "quartic-cone", "--samples", "6"}).code,
            app::exit_code::ok);
}

TEST(Reports, DeterministicAndVersioned) {
  CliRun a = run({"verify", "--suite", "liealg", "--seed", "9"});
  CliRun b = run({"verify", "--suite", "liealg", "--seed", "9"});
  EXPECT_EQ(a.out, b.out);
  Json r = a.json();
  EXPECT_EQ(r["schema"], app::kSchemaName);
  EXPECT_EQ(r["schema_version"], app::kSchemaVersion);
  std::vector<std::string> keys;
  for (auto it = r.begin(); it != r.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys.front(), "schema");
  EXPECT_EQ(keys.back(), "checks");

  CliRun c1 = run({"classify", "--surface", "quartic-cone", "--seed", "4", "--samples", "4"});
  CliRun c2 = run({"classify", "--surface", "quartic-cone", "--seed", "4", "--samples", "4"});
  EXPECT_EQ(c1.out, c2.out);
}

TEST(Reports, SeedFromEnvironment) {
  ::setenv("CRCARTAN_SEED", "17", 1);
  CliRun env = run({"invariants", "--surface", "quartic-cone", "--samples", "2"});
  ::setenv("CRCARTAN_SEED", "oops", 1);
  CliRun bad = run({"invariants", "--samples", "2"});
  ::unsetenv("CRCARTAN_SEED");
  CliRun flag = run({"invariants", "--surface", "quartic-cone", "--samples", "2", "--seed", "17"});

  EXPECT_EQ(env.json()["command"]["seed"], 17);
  EXPECT_EQ(env.json()["invariants"], flag.json()["invariants"]);
  EXPECT_EQ(bad.code, app::exit_code::usage);
}

TEST(Reports, ReportFileMatchesStdout) {
  TempFile out("report.json", "");
  CliRun r = run({"validate", "--report", out.path()});
  std::ifstream in(out.path());
  std::string written((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(written, r.out);
}

TEST(Reports, TextOutput) {
  CliRun r = run({"classify", "--surface", "quartic-cone", "--samples", "3", "--output", "text"});
  EXPECT_EQ(r.code, app::exit_code::not_equivalent);
  EXPECT_NE(r.out.find("NotModelEquivalent"), std::string::npos);
  EXPECT_FALSE(Json::accept(r.out));
}

TEST(Surfaces, JsonAstFile) {
  TempFile ast("surface.json", R"j({"surface": {"op": "div",
      "args": [{"op": "mul", "args": [{"var": "z1"}, {"var": "zb1"}]},
               {"op": "sub", "args": [{"const": 1}, {"op": "mul", "args": [{"var": "z2"}, {"var": "zb2"}]}]}]}})j");
  CliRun r = run({"validate", "--surface", "@" + ast.path()});
  EXPECT_EQ(r.code, app::exit_code::failure) << r.err;  // Levi rank one fails
  EXPECT_EQ(r.json()["surface"]["kind"], "file");

  TempFile broken("broken.json", R"j({"surface": {"op": "nope"}})j");
  EXPECT_EQ(run({"validate", "--surface", "@" + broken.path()}).code, app::exit_code::usage);
  TempFile dsl("dsl.json", R"j({"surface": {"dsl": "(z1*zb1 + z1^2*zb2/2 + zb1^2*z2/2)/(1 - z2*zb2)"}})j");
  EXPECT_EQ(run({"classify", "--surface", "@" + dsl.path(), "--samples", "4"}).code, app::exit_code::ok);
}
