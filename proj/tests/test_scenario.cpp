#include <gtest/gtest.h>

#include <string>

#include "test_support.hpp"

namespace scenario_test {

using namespace ppbasis;
namespace pt = ppbasis::testing;
namespace sc = ppbasis::scenario;

std::string fixture(const std::string& name) { return std::string(PPBASIS_SCENARIO_DIR) + "/" + name; }

TEST(Round12, FormatsAndClamps) {
  EXPECT_EQ(sc::round12(1e-14), 0.0);
  EXPECT_EQ(sc::round12(-3e-13), 0.0);
  EXPECT_DOUBLE_EQ(sc::round12(2.0000000000001), 2.0);
  EXPECT_DOUBLE_EQ(sc::round12(0.1), 0.1);
}

TEST(ParseText, ReportsLineAndColumn) {
  try {
    sc::parse_text("{\n  \"a\": 1,\n  \"b\": ]\n}");
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 3, column 8"), std::string::npos) << e.what();
  }
}

TEST(RunScenario, SchemaErrorsAreInputErrors) {
  const sc::Report r = sc::run_scenario(sc::json::parse(R"({"name": "x", "tasks": []})"));
  EXPECT_EQ(r.exit_code, sc::kInputError);
  EXPECT_EQ(r.data["error"], "ParseError");
  const sc::Report bad_task = sc::run_scenario(sc::json::parse(
      R"({"name": "x", "model": {"kind": "diagonal_in_matrix", "n": 2}, "tasks": [{"task": "nonsense"}]})"));
  EXPECT_EQ(bad_task.exit_code, sc::kInputError);
}

TEST(RunScenario, NonUnitalInclusionExitsTwo) {
  const sc::Report r = sc::run_file(fixture("malformed.json"));
  EXPECT_EQ(r.exit_code, sc::kInputError);
  EXPECT_EQ(r.data["error"], "NonUnitalInclusion");
}

TEST(RunScenario, SyntaxErrorFixture) {
  const sc::Report r = sc::run_file(fixture("syntax-error.json"));
  EXPECT_EQ(r.exit_code, sc::kInputError);
  EXPECT_NE(r.text.find("line 4, column 23"), std::string::npos) << r.text;
}

TEST(RunScenario, MissingFile) {
  const sc::Report r = sc::run_file(fixture("does-not-exist.json"));
  EXPECT_EQ(r.exit_code, sc::kInputError);
}

TEST(RunScenario, Fixtures) {
  for (const char* name : {"diag-in-m2.json", "c-in-c.json"}) {
    const sc::Report r = sc::run_file(fixture(name));
    EXPECT_EQ(r.exit_code, sc::kPass) << r.text;
    EXPECT_TRUE(r.data["pass"].get<bool>());
  }
}

TEST(RunScenario, FailedExpectationExitsOne) {
  const sc::Report r = sc::run_scenario(sc::json::parse(
      R"({"name": "x", "model": {"kind": "diagonal_in_matrix", "n": 2},
          "tasks": [{"task": "markov", "expect": {"beta": 3}}]})"));
  EXPECT_EQ(r.exit_code, sc::kNumericFailure);
  EXPECT_NE(r.text.find("mismatch"), std::string::npos);
}

TEST(RunScenario, ExpectedErrorPasses) {
  const sc::Report r = sc::run_scenario(sc::json::parse(
      R"({"name": "x", "model": {"kind": "diagonal_in_matrix", "n": 2},
          "tasks": [{"task": "construct_with_support",
                     "params": {"target": {"central": 0}, "mode": "orthonormal-padded"},
                     "expect": {"error": "InfeasibleSupport"}}]})"));
  EXPECT_EQ(r.exit_code, sc::kPass) << r.text;
}

TEST(RunScenario, SeedOverrideIsRecorded) {
  sc::RunOptions opts;
  opts.seed = 7;
  const sc::Report r = sc::run_file(fixture("c-in-c.json"), opts);
  EXPECT_EQ(r.data["seed"], 7);
}

TEST(Generate, RoundtripsThroughRunner) {
  const std::vector<std::pair<std::string, std::map<std::string, std::string>>> kinds = {
      {"diagonal_in_matrix", {{"n", "3"}}},
      {"group_algebra_pair", {{"degree", "3"}, {"G", "1,2,0/1,0,2"}, {"H", ""}}},
      {"crossed_product", {{"k", "3"}}},
      {"crossed_product", {{"base", "m2-sign"}}},
      {"quadruple", {{"variant", "masa"}}}};
  for (const auto& [kind, params] : kinds) {
    const sc::json s = sc::generate_model(kind, params);
    const sc::Report a = sc::run_scenario(sc::json::parse(s.dump()));
    const sc::Report b = sc::run_scenario(s);
    EXPECT_EQ(a.exit_code, sc::kPass) << kind << "\n" << a.text;
    EXPECT_EQ(a.data.dump(), b.data.dump());
    EXPECT_EQ(a.text, b.text);
  }
}

TEST(Generate, RejectsUnknownKindsAndBadParameters) {
  EXPECT_TRUE(pt::throws_code([] { sc::generate_model("nonsense", {}); }, ErrorCode::InvalidInput));
  EXPECT_TRUE(pt::throws_code([] { sc::generate_model("group_algebra_pair", {{"degree", "3"}, {"G", "0,0,1"}}); },
                              ErrorCode::InvalidInput));
}

TEST(Selftest, PassesAndIsDeterministic) {
  const sc::SelftestResult a = sc::run_selftest();
  const sc::SelftestResult b = sc::run_selftest();
  EXPECT_EQ(a.exit_code, sc::kPass) << a.text;
  EXPECT_EQ(a.data.size(), sc::selftest_corpus().size());
  EXPECT_EQ(a.data.dump(), b.data.dump());
  EXPECT_EQ(a.text, b.text);
}

TEST(ExitCodes, InputErrorClassification) {
  EXPECT_TRUE(sc::is_input_error(ErrorCode::ParseError));
  EXPECT_TRUE(sc::is_input_error(ErrorCode::NonUnitalInclusion));
  EXPECT_FALSE(sc::is_input_error(ErrorCode::NotRegular));
  EXPECT_FALSE(sc::is_input_error(ErrorCode::NonConnected));
}

}  // namespace scenario_test
