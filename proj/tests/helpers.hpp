#pragma once

// Shared fixtures and scaffolding for the test binaries.

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "drxp/enumerate.hpp"
#include "drxp/explain.hpp"
#include "drxp/models.hpp"
#include "drxp/oracles.hpp"

namespace drxp_test {

inline std::string fixture_path(const std::string& name) {
  return std::string(DRXP_TEST_DIR) + "/fixtures/" + name;
}

inline std::string mock_oracle(const std::string& args) {
  return "python3 " + std::string(DRXP_TEST_DIR) + "/mock_oracle.py " + args;
}

inline drxp::ExplanationProblem load_problem(const std::string& model_file,
                                             const std::string& instance_file) {
  auto model = drxp::load_model_file(fixture_path(model_file));
  auto inst = drxp::load_instance_file(fixture_path(instance_file), *model);
  return drxp::ExplanationProblem(std::move(model), std::move(inst));
}

inline drxp::ExplanationProblem running_problem() {
  return load_problem("running_example_model.json",
                      "running_example_instance.json");
}

inline drxp::ExplanationProblem running_problem_boxed() {
  return load_problem("running_example_box_model.json",
                      "running_example_instance.json");
}

inline drxp::ExplanationProblem counterexample_problem() {
  return load_problem("counterexample_model.json",
                      "counterexample_instance.json");
}

// Counts find() invocations of an inner oracle.
class CountingOracle : public drxp::AdvExOracle {
 public:
  explicit CountingOracle(drxp::AdvExOracle& inner) : inner_(inner) {}
  drxp::OracleAnswer find(const drxp::OracleQuery& q) override {
    ++calls;
    return inner_.find(q);
  }
  bool complete() const override { return inner_.complete(); }
  int calls = 0;

 private:
  drxp::AdvExOracle& inner_;
};

// Returns Timeout whenever the query leaves one of the chosen features free;
// those features can therefore never be dropped by a deletion loop.
class FaultInjectingOracle : public drxp::AdvExOracle {
 public:
  FaultInjectingOracle(drxp::AdvExOracle& inner, drxp::FeatureSet faulty)
      : inner_(inner), faulty_(std::move(faulty)) {}
  drxp::OracleAnswer find(const drxp::OracleQuery& q) override {
    for (int i : faulty_)
      if (!q.fixed.contains(i))
        return {drxp::AnswerStatus::Timeout, std::nullopt, 0.0};
    return inner_.find(q);
  }
  bool complete() const override { return false; }

 private:
  drxp::AdvExOracle& inner_;
  drxp::FeatureSet faulty_;
};

// Random decision tree over m integer features in [0, hi], two classes.
inline drxp::ExplanationProblem random_tree_problem(std::mt19937& rng, int m,
                                                    int hi = 3,
                                                    int max_depth = 3) {
  using namespace drxp;
  FeatureSpace space;
  for (int i = 0; i < m; ++i)
    space.features.emplace_back(IntegerRange{0, hi});
  std::vector<std::string> classes = {"0", "1"};

  std::uniform_int_distribution<int> feat(1, m);
  std::uniform_int_distribution<int> thr(0, hi - 1);
  std::uniform_int_distribution<int> cls(0, 1);
  std::uniform_int_distribution<int> coin(0, 3);

  std::function<std::unique_ptr<TreeNode>(int)> gen =
      [&](int depth) -> std::unique_ptr<TreeNode> {
    auto node = std::make_unique<TreeNode>();
    if (depth >= max_depth || coin(rng) == 0) {
      node->leaf_class = cls(rng);
      return node;
    }
    node->feature = feat(rng) - 1;
    node->threshold = static_cast<double>(thr(rng));
    node->left = gen(depth + 1);
    node->right = gen(depth + 1);
    return node;
  };
  auto model = std::make_shared<DecisionTree>(space, classes, gen(0));

  std::uniform_int_distribution<int> val(0, hi);
  Point v;
  for (int i = 0; i < m; ++i) v.push_back(static_cast<double>(val(rng)));
  Instance inst;
  inst.point = v;
  inst.label = model->predict(v);
  return ExplanationProblem(std::move(model), std::move(inst));
}

// Random one-hidden-layer ReLU net on [0,1]^m, two classes.
inline drxp::ExplanationProblem random_mlp_problem(std::mt19937& rng, int m,
                                                   int hidden) {
  using namespace drxp;
  FeatureSpace space;
  for (int i = 0; i < m; ++i)
    space.features.emplace_back(RealInterval{0.0, 1.0});
  std::vector<std::string> classes = {"0", "1"};

  std::uniform_real_distribution<double> w(-2.0, 2.0);
  MlpLayer l1, l2;
  for (int h = 0; h < hidden; ++h) {
    std::vector<double> row;
    for (int i = 0; i < m; ++i) row.push_back(w(rng));
    l1.w.push_back(std::move(row));
    l1.b.push_back(w(rng));
  }
  for (int k = 0; k < 2; ++k) {
    std::vector<double> row;
    for (int h = 0; h < hidden; ++h) row.push_back(w(rng));
    l2.w.push_back(std::move(row));
    l2.b.push_back(w(rng));
  }
  auto model = std::make_shared<ReluMlp>(space, classes,
                                         std::vector<MlpLayer>{l1, l2});

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Point v;
  for (int i = 0; i < m; ++i) v.push_back(unit(rng));
  Instance inst;
  inst.point = v;
  inst.label = model->predict(v);
  return ExplanationProblem(std::move(model), std::move(inst));
}

inline drxp::FeatureSet fs(std::vector<int> one_based) {
  for (auto& i : one_based) --i;
  return drxp::FeatureSet(std::move(one_based));
}

}  // namespace drxp_test
