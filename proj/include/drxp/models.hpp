#pragma once

// Classifier families with total prediction functions, plus JSON loading.

#include <memory>
#include <string>
#include <vector>

#include "drxp/core.hpp"

namespace drxp {

enum class ModelFamily { Linear, Tree, ReluMlp, HalfspaceConjunction };

class Classifier {
 public:
  Classifier(FeatureSpace space, std::vector<std::string> classes);
  virtual ~Classifier() = default;

  // Returns the index of the predicted class. Argmax ties break toward the
  // lowest class index.
  virtual int predict(const Point& x) const = 0;
  virtual ModelFamily family() const = 0;

  const FeatureSpace& space() const { return space_; }
  const std::vector<std::string>& classes() const { return classes_; }
  int num_classes() const { return static_cast<int>(classes_.size()); }
  int num_features() const { return space_.size(); }

 protected:
  void check_dims(const Point& x) const;

 private:
  FeatureSpace space_;
  std::vector<std::string> classes_;
};

class LinearClassifier : public Classifier {
 public:
  LinearClassifier(FeatureSpace space, std::vector<std::string> classes,
                   std::vector<std::vector<double>> weights,
                   std::vector<double> biases);

  int predict(const Point& x) const override;
  ModelFamily family() const override { return ModelFamily::Linear; }

  const std::vector<std::vector<double>>& weights() const { return weights_; }
  const std::vector<double>& biases() const { return biases_; }

 private:
  std::vector<std::vector<double>> weights_;  // |K| x m
  std::vector<double> biases_;                // |K|
};

struct TreeNode {
  // feature < 0 marks a leaf carrying leaf_class.
  int feature = -1;
  double threshold = 0.0;          // ordinal test: x_i <= t goes left
  std::vector<int> left_labels;    // categorical test: x_i in subset goes left
  std::unique_ptr<TreeNode> left;
  std::unique_ptr<TreeNode> right;
  int leaf_class = -1;

  bool is_leaf() const { return feature < 0; }
};

class DecisionTree : public Classifier {
 public:
  DecisionTree(FeatureSpace space, std::vector<std::string> classes,
               std::unique_ptr<TreeNode> root);

  int predict(const Point& x) const override;
  ModelFamily family() const override { return ModelFamily::Tree; }

  const TreeNode& root() const { return *root_; }

 private:
  std::unique_ptr<TreeNode> root_;
};

struct MlpLayer {
  std::vector<std::vector<double>> w;  // out x in
  std::vector<double> b;               // out
};

class ReluMlp : public Classifier {
 public:
  // All layers but the last apply ReLU; the last is linear with argmax
  // readout and must have |K| outputs.
  ReluMlp(FeatureSpace space, std::vector<std::string> classes,
          std::vector<MlpLayer> layers);

  int predict(const Point& x) const override;
  ModelFamily family() const override { return ModelFamily::ReluMlp; }

  const std::vector<MlpLayer>& layers() const { return layers_; }
  int relu_units() const { return relu_units_; }
  std::vector<double> scores(const Point& x) const;

 private:
  std::vector<MlpLayer> layers_;
  int relu_units_ = 0;
};

struct HalfspaceConstraint {
  std::vector<double> a;
  double b = 0.0;
  bool strict = false;  // a.x > b instead of a.x >= b
};

// Positive class iff every constraint holds; exactly two classes.
class HalfspaceConjunction : public Classifier {
 public:
  HalfspaceConjunction(FeatureSpace space, std::vector<std::string> classes,
                       std::vector<HalfspaceConstraint> constraints,
                       int pos_class, int neg_class);

  int predict(const Point& x) const override;
  ModelFamily family() const override {
    return ModelFamily::HalfspaceConjunction;
  }

  const std::vector<HalfspaceConstraint>& constraints() const {
    return constraints_;
  }
  int pos_class() const { return pos_class_; }
  int neg_class() const { return neg_class_; }

 private:
  std::vector<HalfspaceConstraint> constraints_;
  int pos_class_ = 0;
  int neg_class_ = 0;
};

// Parses the model JSON document (see README for the schema). The feature
// space travels inline so a model file is self-describing.
std::shared_ptr<Classifier> load_model(const std::string& json_text);
std::shared_ptr<Classifier> load_model_file(const std::string& path);

// Parses {"point": [...], "label": ...} against the model's feature space
// and class list. Categorical coordinates may be given as label strings.
Instance load_instance(const std::string& json_text, const Classifier& model);
Instance load_instance_file(const std::string& path, const Classifier& model);

}  // namespace drxp
