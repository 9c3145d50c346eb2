#pragma once

// Feature spaces, instances, norms and the predicate vocabulary shared by
// all other components.

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace drxp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct UnsupportedError : Error {
  using Error::Error;
};
struct OracleError : Error {
  using Error::Error;
};
struct NoCXpError : Error {
  using Error::Error;
};
// A predicate came back indeterminate (oracle timeout) in a context that
// requires a definite answer.
struct IndeterminateError : Error {
  using Error::Error;
};

using Point = std::vector<double>;

enum class NormP { L0, L1, L2, LInf };

struct Norm {
  NormP p = NormP::LInf;

  static Norm parse(const std::string& s);
  std::string str() const;
};

struct DistanceBudget {
  double epsilon = 0.0;
  Norm norm;

  DistanceBudget(double eps, Norm n) : epsilon(eps), norm(n) {
    if (!(eps > 0.0)) throw Error("distance budget requires epsilon > 0");
  }
};

struct RealInterval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};
struct IntegerRange {
  long long lo = 0;
  long long hi = 0;
};
struct Categorical {
  std::vector<std::string> labels;  // k >= 2
};

using FeatureDomain = std::variant<RealInterval, IntegerRange, Categorical>;

bool domain_contains(const FeatureDomain& d, double value);
bool domain_is_bounded(const FeatureDomain& d);
bool domain_is_finite(const FeatureDomain& d);  // enumerable set of values

struct FeatureSpace {
  std::vector<FeatureDomain> features;

  int size() const { return static_cast<int>(features.size()); }
  bool contains(const Point& x) const;
  void validate() const;  // m >= 1, lo <= hi, k >= 2
};

// Subset of {0..m-1}, kept sorted and duplicate-free. Feature indices are
// 0-based internally; all external interfaces use 1-based indices.
class FeatureSet {
 public:
  FeatureSet() = default;
  explicit FeatureSet(std::vector<int> indices);
  static FeatureSet full(int m);

  bool contains(int i) const;
  FeatureSet with(int i) const;
  FeatureSet without(int i) const;
  FeatureSet set_minus(const FeatureSet& other) const;
  FeatureSet set_union(const FeatureSet& other) const;
  bool is_subset_of(const FeatureSet& other) const;
  bool intersects(const FeatureSet& other) const;

  int size() const { return static_cast<int>(idx_.size()); }
  bool empty() const { return idx_.empty(); }
  const std::vector<int>& indices() const { return idx_; }
  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }

  bool operator==(const FeatureSet&) const = default;
  bool operator<(const FeatureSet& o) const { return idx_ < o.idx_; }

 private:
  std::vector<int> idx_;
};

class Classifier;  // models.hpp

struct Instance {
  Point point;
  int label = 0;  // index into the classifier's class list
};

struct ExplanationProblem {
  std::shared_ptr<const Classifier> model;
  Instance instance;

  ExplanationProblem(std::shared_ptr<const Classifier> m, Instance inst);

  int num_features() const;
  const FeatureSpace& space() const;
  const Point& v() const { return instance.point; }
  int label() const { return instance.label; }
};

// ||a - b||_p. Categorical coordinates contribute an indicator (0 if equal,
// 1 otherwise) under every norm; pass the feature space so they can be told
// apart from ordinals. With space == nullptr all coordinates are ordinal.
double distance(const Point& a, const Point& b, Norm norm,
                const FeatureSpace* space = nullptr);

bool within_ball(const Point& x, const ExplanationProblem& problem,
                 const DistanceBudget& budget);

bool is_adversarial(const Point& x, const ExplanationProblem& problem,
                    const DistanceBudget& budget);

// D = {i | x_i != v_i}, exact comparison of stored values.
FeatureSet diff_set(const Point& x, const Point& v);

}  // namespace drxp
