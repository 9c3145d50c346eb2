#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "drxp/oracles.hpp"
#include "helpers.hpp"

using namespace drxp;
using drxp_test::fs;
using drxp_test::mock_oracle;

namespace {
OracleQuery query_of(const ExplanationProblem& problem, FeatureSet fixed,
                     double eps = 1.0, NormP p = NormP::L1) {
  return OracleQuery{problem, DistanceBudget(eps, Norm{p}), std::move(fixed)};
}
}  // namespace

TEST_CASE("robust round trips over several queries") {
  auto problem = drxp_test::running_problem_boxed();
  ExternalOracle oracle(mock_oracle("robust"), std::nullopt, "model.json");
  for (int i = 0; i < 4; ++i) {
    auto ans = find_adv_ex(query_of(problem, fs({1})), oracle);
    CHECK(ans.status == AnswerStatus::Robust);
    CHECK_FALSE(ans.witness.has_value());
  }
}

TEST_CASE("valid adversarial witness is accepted") {
  auto problem = drxp_test::running_problem_boxed();
  ExternalOracle oracle(mock_oracle("adv '[0,1,1]'"), std::nullopt,
                        "model.json");
  auto ans = find_adv_ex(query_of(problem, FeatureSet{}), oracle);
  CHECK(ans.status == AnswerStatus::AdversarialFound);
  REQUIRE(ans.witness.has_value());
  CHECK(*ans.witness == Point{0, 1, 1});
}

TEST_CASE("witness violating a fixed feature is rejected") {
  auto problem = drxp_test::running_problem_boxed();
  ExternalOracle oracle(mock_oracle("adv '[0,1,1]'"), std::nullopt,
                        "model.json");
  CHECK_THROWS_AS(find_adv_ex(query_of(problem, fs({1})), oracle),
                  OracleError);
}

TEST_CASE("non-adversarial witness is rejected") {
  auto problem = drxp_test::running_problem_boxed();
  ExternalOracle oracle(mock_oracle("unsound"), std::nullopt, "model.json");
  CHECK_THROWS_AS(find_adv_ex(query_of(problem, FeatureSet{}), oracle),
                  OracleError);
}

TEST_CASE("wrong-dimension witness is rejected") {
  auto problem = drxp_test::running_problem_boxed();
  ExternalOracle oracle(mock_oracle("adv '[0,1]'"), std::nullopt,
                        "model.json");
  CHECK_THROWS_AS(find_adv_ex(query_of(problem, FeatureSet{}), oracle),
                  OracleError);
}

TEST_CASE("declared timeout is forwarded") {
  auto problem = drxp_test::running_problem_boxed();
  ExternalOracle oracle(mock_oracle("timeout"), std::nullopt, "model.json");
  auto ans = find_adv_ex(query_of(problem, FeatureSet{}), oracle);
  CHECK(ans.status == AnswerStatus::Timeout);
  CHECK_FALSE(ans.witness.has_value());
}

TEST_CASE("hung subprocess is killed after the per-query timeout") {
  auto problem = drxp_test::running_problem_boxed();
  ExternalOracle oracle(mock_oracle("sleep"), 0.3, "model.json");
  auto ans = find_adv_ex(query_of(problem, FeatureSet{}), oracle);
  CHECK(ans.status == AnswerStatus::Timeout);
  // the adapter restarts the subprocess transparently for the next query
  auto ans2 = find_adv_ex(query_of(problem, FeatureSet{}), oracle);
  CHECK(ans2.status == AnswerStatus::Timeout);
}

TEST_CASE("responses with unknown ids are skipped") {
  auto problem = drxp_test::running_problem_boxed();
  ExternalOracle oracle(mock_oracle("noise"), std::nullopt, "model.json");
  for (int i = 0; i < 3; ++i) {
    auto ans = find_adv_ex(query_of(problem, FeatureSet{}), oracle);
    CHECK(ans.status == AnswerStatus::Robust);
  }
}

TEST_CASE("subprocess emitting garbage raises an oracle error") {
  auto problem = drxp_test::running_problem_boxed();
  ExternalOracle oracle("echo 'not json'", std::nullopt, "model.json");
  CHECK_THROWS_AS(find_adv_ex(query_of(problem, FeatureSet{}), oracle),
                  OracleError);
}

TEST_CASE("subprocess exiting without answering raises an oracle error") {
  auto problem = drxp_test::running_problem_boxed();
  ExternalOracle oracle("true", std::nullopt, "model.json");
  CHECK_THROWS_AS(find_adv_ex(query_of(problem, FeatureSet{}), oracle),
                  OracleError);
}

TEST_CASE("external oracles compose with the deletion algorithm") {
  auto problem = drxp_test::running_problem_boxed();
  ExternalOracle oracle(mock_oracle("robust"), std::nullopt, "model.json");
  auto xp = axp_deletion(problem, DistanceBudget(1.0, Norm{NormP::L1}),
                         oracle, make_order(3, "asc"));
  CHECK(xp.features == FeatureSet{});
  CHECK(xp.stats.oracle_calls == 3);
}
