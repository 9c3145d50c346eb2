#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "drxp/models.hpp"
#include "drxp/oracles.hpp"
#include "helpers.hpp"

using namespace drxp;
using drxp_test::fs;

namespace {

OracleAnswer ask(const ExplanationProblem& problem, double eps, NormP p,
                 const FeatureSet& fixed, AdvExOracle& oracle) {
  OracleQuery q{problem, DistanceBudget(eps, Norm{p}), fixed};
  return find_adv_ex(q, oracle);
}

BuiltinOracle builtin() { return BuiltinOracle(OracleConfig{}); }

}  // namespace

TEST_CASE("running example oracle verdicts") {
  auto problem = drxp_test::running_problem();
  auto oracle = builtin();
  auto a0 = ask(problem, 1.0, NormP::L1, FeatureSet{}, oracle);
  CHECK(a0.status == AnswerStatus::AdversarialFound);
  REQUIRE(a0.witness);
  CHECK(is_adversarial(*a0.witness, problem,
                       DistanceBudget(1.0, Norm{NormP::L1})));

  auto a1 = ask(problem, 1.0, NormP::L1, fs({1}), oracle);
  CHECK(a1.status == AnswerStatus::Robust);

  auto a23 = ask(problem, 1.0, NormP::L1, fs({2, 3}), oracle);
  CHECK(a23.status == AnswerStatus::AdversarialFound);
  REQUIRE(a23.witness);
  CHECK((*a23.witness)[1] == 1.0);
  CHECK((*a23.witness)[2] == 1.0);

  auto aall = ask(problem, 1.0, NormP::L1, FeatureSet::full(3), oracle);
  CHECK(aall.status == AnswerStatus::Robust);
}

TEST_CASE("running example under p=0 with unbounded domains") {
  auto problem = drxp_test::running_problem();
  auto oracle = builtin();
  CHECK(ask(problem, 3.0, NormP::L0, FeatureSet{}, oracle).status ==
        AnswerStatus::AdversarialFound);
  // each feature alone can flip the prediction when free
  CHECK(ask(problem, 3.0, NormP::L0, fs({2, 3}), oracle).status ==
        AnswerStatus::AdversarialFound);
  CHECK(ask(problem, 3.0, NormP::L0, fs({1, 3}), oracle).status ==
        AnswerStatus::AdversarialFound);
  CHECK(ask(problem, 3.0, NormP::L0, fs({1, 2}), oracle).status ==
        AnswerStatus::AdversarialFound);
  CHECK(ask(problem, 3.0, NormP::L0, FeatureSet::full(3), oracle).status ==
        AnswerStatus::Robust);
}

TEST_CASE("counterexample linear classifier under l-inf") {
  auto problem = drxp_test::counterexample_problem();
  auto oracle = builtin();
  auto a = ask(problem, 0.5, NormP::LInf, FeatureSet{}, oracle);
  CHECK(a.status == AnswerStatus::AdversarialFound);
  CHECK(ask(problem, 0.5, NormP::LInf, fs({2}), oracle).status ==
        AnswerStatus::Robust);
  CHECK(ask(problem, 1.0, NormP::LInf, fs({2}), oracle).status ==
        AnswerStatus::AdversarialFound);
}

TEST_CASE("tree oracle on a one-dimensional threshold tree") {
  auto model = load_model(R"({
    "feature_space":{"features":[{"kind":"real","lo":0,"hi":10}]},
    "classes":["0","1"],
    "model":{"tag":"tree","root":{"feat":1,"thr":2,
      "left":{"leaf":"0"},"right":{"leaf":"1"}}}})");
  auto inst = load_instance(R"({"point":[5],"label":"1"})", *model);
  ExplanationProblem problem(model, inst);
  auto oracle = builtin();
  // opposing cell is x <= 2 (closed on the adversarial side), distance 3
  CHECK(ask(problem, 2.9, NormP::LInf, FeatureSet{}, oracle).status ==
        AnswerStatus::Robust);
  auto a = ask(problem, 3.0, NormP::LInf, FeatureSet{}, oracle);
  CHECK(a.status == AnswerStatus::AdversarialFound);
  REQUIRE(a.witness);
  CHECK((*a.witness)[0] == doctest::Approx(2.0));
  CHECK(ask(problem, 9.0, NormP::LInf, fs({1}), oracle).status ==
        AnswerStatus::Robust);
}

TEST_CASE("single-leaf tree is robust for every budget") {
  auto model = load_model(R"({
    "feature_space":{"features":[{"kind":"real","lo":0,"hi":1}]},
    "classes":["0","1"],
    "model":{"tag":"tree","root":{"leaf":"0"}}})");
  auto inst = load_instance(R"({"point":[0.5],"label":"0"})", *model);
  ExplanationProblem problem(model, inst);
  auto oracle = builtin();
  for (double eps : {0.1, 1.0, 100.0})
    CHECK(ask(problem, eps, NormP::LInf, FeatureSet{}, oracle).status ==
          AnswerStatus::Robust);
}

TEST_CASE("tree oracle agrees with exhaustive enumeration on integer trees") {
  std::mt19937 rng(23);
  auto oracle = builtin();
  for (int t = 0; t < 60; ++t) {
    auto problem = drxp_test::random_tree_problem(rng, 2 + int(rng() % 3));
    const int m = problem.num_features();
    GridFalsifier grid(5);  // exhaustive for integer domains
    std::vector<int> fixed_idx;
    for (int i = 0; i < m; ++i)
      if (rng() % 2) fixed_idx.push_back(i);
    FeatureSet fixed(fixed_idx);
    for (auto p : {NormP::L0, NormP::L1, NormP::L2, NormP::LInf}) {
      double eps = 1.0 + double(rng() % 3);
      OracleQuery q{problem, DistanceBudget(eps, Norm{p}), fixed};
      auto exact = find_adv_ex(q, oracle);
      auto brute = find_adv_ex(q, grid);
      CHECK(exact.status == brute.status);
    }
  }
}

TEST_CASE("relu oracle on the threshold network") {
  auto model = load_model(R"({
    "feature_space":{"features":[{"kind":"real","lo":0,"hi":1}]},
    "classes":["0","1"],
    "model":{"tag":"relu_mlp","layers":[
      {"w":[[1]],"b":[-0.5]},
      {"w":[[0],[1]],"b":[0,0]}]}})");
  auto inst = load_instance(R"({"point":[1],"label":"1"})", *model);
  ExplanationProblem problem(model, inst);
  auto oracle = builtin();
  CHECK(ask(problem, 0.3, NormP::LInf, FeatureSet{}, oracle).status ==
        AnswerStatus::Robust);
  auto a = ask(problem, 0.6, NormP::LInf, FeatureSet{}, oracle);
  CHECK(a.status == AnswerStatus::AdversarialFound);
  REQUIRE(a.witness);
  CHECK((*a.witness)[0] <= 0.5);
}

TEST_CASE("affine relu net matches the equivalent linear classifier") {
  auto mlp = load_model(R"({
    "feature_space":{"features":[{"kind":"real","lo":0,"hi":1},
                                 {"kind":"real","lo":0,"hi":1}]},
    "classes":["0","1"],
    "model":{"tag":"relu_mlp","layers":[{"w":[[0,0],[1,1]],"b":[0,-1.25]}]}})");
  auto inst = load_instance(R"({"point":[1,1],"label":"1"})", *mlp);
  ExplanationProblem mlp_problem(mlp, inst);
  auto linear_problem = drxp_test::counterexample_problem();
  auto oracle = builtin();
  for (double eps : {0.2, 0.5, 1.0})
    for (auto p : {NormP::L1, NormP::LInf})
      for (const auto& fixed :
           {FeatureSet{}, fs({1}), fs({2}), FeatureSet::full(2)}) {
        auto a = ask(mlp_problem, eps, p, fixed, oracle);
        auto b = ask(linear_problem, eps, p, fixed, oracle);
        CHECK(a.status == b.status);
      }
}

TEST_CASE("relu oracle agrees with a fine grid on random networks") {
  std::mt19937 rng(31);
  auto oracle = builtin();
  GridFalsifier grid(101);
  for (int t = 0; t < 15; ++t) {
    auto problem = drxp_test::random_mlp_problem(rng, 2, 4);
    double eps = 0.1 + 0.4 * (rng() % 3);
    OracleQuery q{problem, DistanceBudget(eps, Norm{NormP::LInf}),
                  FeatureSet{}};
    auto exact = find_adv_ex(q, oracle);
    auto approx = find_adv_ex(q, grid);
    if (approx.status == AnswerStatus::AdversarialFound)
      CHECK(exact.status == AnswerStatus::AdversarialFound);
    if (exact.status == AnswerStatus::Robust)
      CHECK(approx.status == AnswerStatus::Robust);
  }
}

TEST_CASE("grid falsifier basics") {
  auto problem = drxp_test::running_problem_boxed();
  GridFalsifier grid(41);
  OracleQuery q{problem, DistanceBudget(1.0, Norm{NormP::L1}), FeatureSet{}};
  auto a = find_adv_ex(q, grid);
  CHECK(a.status == AnswerStatus::AdversarialFound);
  CHECK_FALSE(grid.complete());
  OracleQuery q2{problem, DistanceBudget(1.0, Norm{NormP::L1}),
                 FeatureSet::full(3)};
  CHECK(find_adv_ex(q2, grid).status == AnswerStatus::Robust);
  // unbounded domains are refused
  auto unbounded = drxp_test::running_problem();
  OracleQuery q3{unbounded, DistanceBudget(1.0, Norm{NormP::L0}),
                 FeatureSet{}};
  CHECK_THROWS_AS(grid.find(q3), UnsupportedError);
}

TEST_CASE("monotonicity in the fixed set and in epsilon") {
  std::mt19937 rng(47);
  auto oracle = builtin();
  for (int t = 0; t < 30; ++t) {
    auto problem = drxp_test::random_tree_problem(rng, 3);
    double eps = 1.0 + double(rng() % 2);
    for (unsigned mask = 0; mask < 8; ++mask) {
      std::vector<int> idx;
      for (int i = 0; i < 3; ++i)
        if (mask & (1u << i)) idx.push_back(i);
      FeatureSet s(idx);
      auto a = ask(problem, eps, NormP::L1, s, oracle);
      if (a.status == AnswerStatus::Robust) {
        // robust is preserved by fixing more
        for (int i = 0; i < 3; ++i)
          CHECK(ask(problem, eps, NormP::L1, s.with(i), oracle).status ==
                AnswerStatus::Robust);
      } else {
        // found is preserved by growing the ball
        CHECK(ask(problem, eps + 1.0, NormP::L1, s, oracle).status ==
              AnswerStatus::AdversarialFound);
      }
    }
  }
}

TEST_CASE("central soundness enforcement rejects bad witnesses") {
  struct UnsoundOracle : AdvExOracle {
    OracleAnswer find(const OracleQuery& q) override {
      return {AnswerStatus::AdversarialFound, q.problem.v(), 0.0};
    }
  } unsound;
  auto problem = drxp_test::running_problem();
  OracleQuery q{problem, DistanceBudget(1.0, Norm{NormP::L1}), FeatureSet{}};
  CHECK_THROWS_AS(find_adv_ex(q, unsound), OracleError);

  struct MovedFixedOracle : AdvExOracle {
    OracleAnswer find(const OracleQuery&) override {
      return {AnswerStatus::AdversarialFound, Point{0, 1, 1}, 0.0};
    }
  } moved;
  OracleQuery q2{problem, DistanceBudget(1.0, Norm{NormP::L1}), fs({1})};
  CHECK_THROWS_AS(find_adv_ex(q2, moved), OracleError);
}

TEST_CASE("unsupported (family, norm) pairs are refused") {
  auto problem = drxp_test::counterexample_problem();  // reals, no fallback
  auto oracle = builtin();
  // linear supports p in {0,1,2,inf}; relu rejects p=2 over reals
  auto mlp = load_model(R"({
    "feature_space":{"features":[{"kind":"real","lo":0,"hi":1}]},
    "classes":["0","1"],
    "model":{"tag":"relu_mlp","layers":[
      {"w":[[1]],"b":[-0.5]},{"w":[[0],[1]],"b":[0,0]}]}})");
  auto inst = load_instance(R"({"point":[1],"label":"1"})", *mlp);
  ExplanationProblem mp(mlp, inst);
  OracleQuery q{mp, DistanceBudget(0.5, Norm{NormP::L2}), FeatureSet{}};
  CHECK_THROWS_AS(oracle.find(q), UnsupportedError);
}

TEST_CASE("linear oracle handles l2 exactly on the counterexample") {
  auto problem = drxp_test::counterexample_problem();
  auto oracle = builtin();
  // distance from (1,1) to the flip boundary x1+x2 = 1.25 is 0.75/sqrt(2)
  CHECK(ask(problem, 0.52, NormP::L2, FeatureSet{}, oracle).status ==
        AnswerStatus::Robust);
  CHECK(ask(problem, 0.54, NormP::L2, FeatureSet{}, oracle).status ==
        AnswerStatus::AdversarialFound);
}

TEST_CASE("oracle config parsing") {
  CHECK(OracleConfig::parse("builtin").kind == OracleConfig::Kind::Builtin);
  auto g = OracleConfig::parse("grid:7");
  CHECK(g.kind == OracleConfig::Kind::Grid);
  CHECK(g.resolution == 7);
  auto e = OracleConfig::parse("external:python3 tool.py");
  CHECK(e.kind == OracleConfig::Kind::External);
  CHECK(e.command == "python3 tool.py");
  CHECK_THROWS_AS(OracleConfig::parse("grid:1"), ParseError);
  CHECK_THROWS_AS(OracleConfig::parse("bogus"), ParseError);
}
