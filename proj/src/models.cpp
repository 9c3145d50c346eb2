#include "drxp/models.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace drxp {

using nlohmann::json;

Classifier::Classifier(FeatureSpace space, std::vector<std::string> classes)
    : space_(std::move(space)), classes_(std::move(classes)) {
  space_.validate();
  if (classes_.size() < 2) throw ParseError("class set needs |K| >= 2");
}

void Classifier::check_dims(const Point& x) const {
  if (static_cast<int>(x.size()) != num_features())
    throw DimensionError("point has wrong dimension");
}

LinearClassifier::LinearClassifier(FeatureSpace space,
                                   std::vector<std::string> classes,
                                   std::vector<std::vector<double>> weights,
                                   std::vector<double> biases)
    : Classifier(std::move(space), std::move(classes)),
      weights_(std::move(weights)),
      biases_(std::move(biases)) {
  if (weights_.size() != this->classes().size() ||
      biases_.size() != this->classes().size())
    throw ParseError("linear model needs one weight row and bias per class");
  for (const auto& row : weights_)
    if (static_cast<int>(row.size()) != num_features())
      throw ParseError("linear weight row length != m");
}

int LinearClassifier::predict(const Point& x) const {
  check_dims(x);
  int best = 0;
  double best_score = 0;
  for (int k = 0; k < num_classes(); ++k) {
    double s = biases_[static_cast<size_t>(k)];
    const auto& w = weights_[static_cast<size_t>(k)];
    for (int i = 0; i < num_features(); ++i)
      s += w[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
    if (k == 0 || s > best_score) {
      best = k;
      best_score = s;
    }
  }
  return best;
}

namespace {

void validate_tree(const TreeNode& node, const FeatureSpace& space,
                   int num_classes) {
  if (node.is_leaf()) {
    if (node.leaf_class < 0 || node.leaf_class >= num_classes)
      throw ParseError("tree leaf class out of range");
    return;
  }
  if (node.feature >= space.size())
    throw ParseError("tree split feature out of range");
  if (!node.left || !node.right)
    throw ParseError("tree internal node misses a child");
  bool cat = std::holds_alternative<Categorical>(
      space.features[static_cast<size_t>(node.feature)]);
  if (cat && node.left_labels.empty())
    throw ParseError("categorical split needs a nonempty label subset");
  validate_tree(*node.left, space, num_classes);
  validate_tree(*node.right, space, num_classes);
}

}  // namespace

DecisionTree::DecisionTree(FeatureSpace space, std::vector<std::string> classes,
                           std::unique_ptr<TreeNode> root)
    : Classifier(std::move(space), std::move(classes)),
      root_(std::move(root)) {
  if (!root_) throw ParseError("empty tree");
  validate_tree(*root_, this->space(), num_classes());
}

int DecisionTree::predict(const Point& x) const {
  check_dims(x);
  const TreeNode* node = root_.get();
  while (!node->is_leaf()) {
    double xv = x[static_cast<size_t>(node->feature)];
    bool go_left;
    if (std::holds_alternative<Categorical>(
            space().features[static_cast<size_t>(node->feature)])) {
      int lab = static_cast<int>(xv);
      go_left = std::find(node->left_labels.begin(), node->left_labels.end(),
                          lab) != node->left_labels.end();
    } else {
      go_left = xv <= node->threshold;
    }
    node = go_left ? node->left.get() : node->right.get();
  }
  return node->leaf_class;
}

ReluMlp::ReluMlp(FeatureSpace space, std::vector<std::string> classes,
                 std::vector<MlpLayer> layers)
    : Classifier(std::move(space), std::move(classes)),
      layers_(std::move(layers)) {
  if (layers_.empty()) throw ParseError("MLP needs at least one layer");
  int width = num_features();
  for (size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.w.empty() || layer.w.size() != layer.b.size())
      throw ParseError("MLP layer weight/bias shapes disagree");
    for (const auto& row : layer.w)
      if (static_cast<int>(row.size()) != width)
        throw ParseError("MLP layer dimensions do not chain");
    width = static_cast<int>(layer.w.size());
    if (l + 1 < layers_.size()) relu_units_ += width;
  }
  if (width != num_classes())
    throw ParseError("MLP output layer width != |K|");
}

std::vector<double> ReluMlp::scores(const Point& x) const {
  check_dims(x);
  std::vector<double> cur(x.begin(), x.end());
  for (size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    std::vector<double> next(layer.w.size());
    for (size_t j = 0; j < layer.w.size(); ++j) {
      double s = layer.b[j];
      for (size_t i = 0; i < cur.size(); ++i) s += layer.w[j][i] * cur[i];
      next[j] = (l + 1 < layers_.size()) ? std::max(0.0, s) : s;
    }
    cur = std::move(next);
  }
  return cur;
}

int ReluMlp::predict(const Point& x) const {
  auto s = scores(x);
  int best = 0;
  for (size_t k = 1; k < s.size(); ++k)
    if (s[k] > s[static_cast<size_t>(best)]) best = static_cast<int>(k);
  return best;
}

HalfspaceConjunction::HalfspaceConjunction(
    FeatureSpace space, std::vector<std::string> classes,
    std::vector<HalfspaceConstraint> constraints, int pos_class,
    int neg_class)
    : Classifier(std::move(space), std::move(classes)),
      constraints_(std::move(constraints)),
      pos_class_(pos_class),
      neg_class_(neg_class) {
  if (num_classes() != 2)
    throw ParseError("halfspace conjunction needs exactly two classes");
  if (constraints_.empty())
    throw ParseError("halfspace conjunction needs at least one constraint");
  for (const auto& c : constraints_)
    if (static_cast<int>(c.a.size()) != num_features())
      throw ParseError("halfspace coefficient vector length != m");
  if (pos_class_ < 0 || pos_class_ > 1 || neg_class_ < 0 || neg_class_ > 1 ||
      pos_class_ == neg_class_)
    throw ParseError("halfspace pos/neg classes must name both classes");
}

int HalfspaceConjunction::predict(const Point& x) const {
  check_dims(x);
  for (const auto& c : constraints_) {
    double lhs = 0;
    for (size_t i = 0; i < c.a.size(); ++i) lhs += c.a[i] * x[i];
    bool holds = c.strict ? lhs > c.b : lhs >= c.b;
    if (!holds) return neg_class_;
  }
  return pos_class_;
}

// ---------------------------------------------------------------------------
// JSON loading

namespace {

double bound_from_json(const json& j, double unbounded) {
  if (j.is_null()) return unbounded;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ParseError("bad interval bound '" + s + "'");
  }
  return j.get<double>();
}

FeatureSpace space_from_json(const json& j) {
  if (!j.is_object() || !j.contains("features") || !j["features"].is_array())
    throw ParseError("feature_space must carry a 'features' array");
  FeatureSpace space;
  for (const auto& f : j["features"]) {
    const auto kind = f.at("kind").get<std::string>();
    if (kind == "real") {
      RealInterval r;
      r.lo = bound_from_json(f.value("lo", json()),
                             -std::numeric_limits<double>::infinity());
      r.hi = bound_from_json(f.value("hi", json()),
                             std::numeric_limits<double>::infinity());
      space.features.emplace_back(r);
    } else if (kind == "int") {
      IntegerRange r{f.at("lo").get<long long>(), f.at("hi").get<long long>()};
      space.features.emplace_back(r);
    } else if (kind == "cat") {
      Categorical c;
      for (const auto& lab : f.at("labels"))
        c.labels.push_back(lab.is_string() ? lab.get<std::string>()
                                           : lab.dump());
      space.features.emplace_back(std::move(c));
    } else {
      throw ParseError("unknown feature kind '" + kind + "'");
    }
  }
  space.validate();
  return space;
}

std::vector<std::string> classes_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("'classes' must be an array");
  std::vector<std::string> out;
  for (const auto& c : j)
    out.push_back(c.is_string() ? c.get<std::string>() : c.dump());
  return out;
}

int class_index(const std::vector<std::string>& classes, const json& label);

std::unique_ptr<TreeNode> tree_from_json(const json& j,
                                         const std::vector<std::string>& classes) {
  auto node = std::make_unique<TreeNode>();
  if (j.contains("leaf")) {
    node->leaf_class = class_index(classes, j.at("leaf"));
    return node;
  }
  node->feature = j.at("feat").get<int>() - 1;  // wire indices are 1-based
  if (node->feature < 0) throw ParseError("tree split feature must be >= 1");
  if (j.contains("thr")) node->threshold = j.at("thr").get<double>();
  if (j.contains("cats"))
    for (const auto& c : j.at("cats"))
      node->left_labels.push_back(c.get<int>());
  node->left = tree_from_json(j.at("left"), classes);
  node->right = tree_from_json(j.at("right"), classes);
  return node;
}

int class_index(const std::vector<std::string>& classes, const json& label) {
  std::string key = label.is_string() ? label.get<std::string>() : label.dump();
  for (size_t k = 0; k < classes.size(); ++k)
    if (classes[k] == key) return static_cast<int>(k);
  throw ParseError("label '" + key + "' is not in the class set");
}

}  // namespace

std::shared_ptr<Classifier> load_model(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
  try {
    auto space = space_from_json(doc.at("feature_space"));
    auto classes = classes_from_json(doc.at("classes"));
    const auto& m = doc.at("model");
    const auto tag = m.at("tag").get<std::string>();
    if (tag == "linear") {
      std::vector<std::vector<double>> w =
          m.at("weights").get<std::vector<std::vector<double>>>();
      std::vector<double> b = m.at("biases").get<std::vector<double>>();
      return std::make_shared<LinearClassifier>(std::move(space),
                                                std::move(classes),
                                                std::move(w), std::move(b));
    }
    if (tag == "tree") {
      auto root = tree_from_json(m.at("root"), classes);
      return std::make_shared<DecisionTree>(std::move(space),
                                            std::move(classes),
                                            std::move(root));
    }
    if (tag == "relu_mlp") {
      std::vector<MlpLayer> layers;
      for (const auto& lj : m.at("layers")) {
        MlpLayer layer;
        layer.w = lj.at("w").get<std::vector<std::vector<double>>>();
        layer.b = lj.at("b").get<std::vector<double>>();
        layers.push_back(std::move(layer));
      }
      return std::make_shared<ReluMlp>(std::move(space), std::move(classes),
                                       std::move(layers));
    }
    if (tag == "halfspace_conj") {
      std::vector<HalfspaceConstraint> cs;
      for (const auto& cj : m.at("constraints")) {
        HalfspaceConstraint c;
        c.a = cj.at("a").get<std::vector<double>>();
        c.b = cj.at("b").get<double>();
        c.strict = cj.value("strict", false);
      cs.push_back(std::move(c));
      }
      int pos = class_index(classes, m.at("pos_class"));
      int neg = class_index(classes, m.at("neg_class"));
      return std::make_shared<HalfspaceConjunction>(
          std::move(space), std::move(classes), std::move(cs), pos, neg);
    }
    throw ParseError("unknown model tag '" + tag + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("model document: ") + e.what());
  }
}

std::shared_ptr<Classifier> load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

Instance load_instance(const std::string& json_text, const Classifier& model) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("instance JSON: ") + e.what());
  }
  try {
    const auto& pj = doc.at("point");
    if (!pj.is_array() ||
        static_cast<int>(pj.size()) != model.num_features())
      throw ParseError("instance point length != m");
    Point p;
    for (int i = 0; i < model.num_features(); ++i) {
      const auto& cell = pj[static_cast<size_t>(i)];
      const auto* cat = std::get_if<Categorical>(
          &model.space().features[static_cast<size_t>(i)]);
      if (cell.is_string()) {
        if (!cat)
          throw ParseError("string value for a non-categorical feature");
        const auto lab = cell.get<std::string>();
        auto it = std::find(cat->labels.begin(), cat->labels.end(), lab);
        if (it == cat->labels.end())
          throw ParseError("unknown category label '" + lab + "'");
        p.push_back(static_cast<double>(it - cat->labels.begin()));
      } else {
        p.push_back(cell.get<double>());
      }
    }
    Instance inst;
    inst.point = std::move(p);
    inst.label = class_index(model.classes(), doc.at("label"));
    if (!model.space().contains(inst.point))
      throw ParseError("instance point lies outside the feature space");
    return inst;
  } catch (const json::exception& e) {
    throw ParseError(std::string("instance document: ") + e.what());
  }
}

Instance load_instance_file(const std::string& path, const Classifier& model) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_instance(ss.str(), model);
}

}  // namespace drxp
