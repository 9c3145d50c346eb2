#include "drxp/core.hpp"

#include <algorithm>
#include <cmath>

#include "drxp/models.hpp"

namespace drxp {

Norm Norm::parse(const std::string& s) {
  if (s == "0") return {NormP::L0};
  if (s == "1") return {NormP::L1};
  if (s == "2") return {NormP::L2};
  if (s == "inf" || s == "Inf" || s == "INF") return {NormP::LInf};
  throw ParseError("unknown norm '" + s + "' (expected 0, 1, 2 or inf)");
}

std::string Norm::str() const {
  switch (p) {
    case NormP::L0: return "0";
    case NormP::L1: return "1";
    case NormP::L2: return "2";
    case NormP::LInf: return "inf";
  }
  return "?";
}

bool domain_contains(const FeatureDomain& d, double value) {
  return std::visit(
      [&](const auto& dom) -> bool {
        using T = std::decay_t<decltype(dom)>;
        if constexpr (std::is_same_v<T, RealInterval>) {
          return value >= dom.lo && value <= dom.hi;
        } else if constexpr (std::is_same_v<T, IntegerRange>) {
          return value == std::floor(value) &&
                 value >= static_cast<double>(dom.lo) &&
                 value <= static_cast<double>(dom.hi);
        } else {
          return value == std::floor(value) && value >= 0.0 &&
                 value < static_cast<double>(dom.labels.size());
        }
      },
      d);
}

bool domain_is_bounded(const FeatureDomain& d) {
  if (const auto* r = std::get_if<RealInterval>(&d))
    return std::isfinite(r->lo) && std::isfinite(r->hi);
  return true;
}

bool domain_is_finite(const FeatureDomain& d) {
  return !std::holds_alternative<RealInterval>(d);
}

bool FeatureSpace::contains(const Point& x) const {
  if (static_cast<int>(x.size()) != size()) return false;
  for (int i = 0; i < size(); ++i)
    if (!domain_contains(features[i], x[i])) return false;
  return true;
}

void FeatureSpace::validate() const {
  if (features.empty()) throw ParseError("feature space needs m >= 1");
  for (const auto& d : features) {
    std::visit(
        [](const auto& dom) {
          using T = std::decay_t<decltype(dom)>;
          if constexpr (std::is_same_v<T, RealInterval>) {
            if (dom.lo > dom.hi) throw ParseError("real domain has lo > hi");
          } else if constexpr (std::is_same_v<T, IntegerRange>) {
            if (dom.lo > dom.hi) throw ParseError("int domain has lo > hi");
          } else {
            if (dom.labels.size() < 2)
              throw ParseError("categorical domain needs k >= 2 labels");
          }
        },
        d);
  }
}

FeatureSet::FeatureSet(std::vector<int> indices) : idx_(std::move(indices)) {
  std::sort(idx_.begin(), idx_.end());
  idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
  if (!idx_.empty() && idx_.front() < 0)
    throw Error("negative feature index");
}

FeatureSet FeatureSet::full(int m) {
  std::vector<int> all(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) all[static_cast<size_t>(i)] = i;
  return FeatureSet(std::move(all));
}

bool FeatureSet::contains(int i) const {
  return std::binary_search(idx_.begin(), idx_.end(), i);
}

FeatureSet FeatureSet::with(int i) const {
  auto v = idx_;
  v.push_back(i);
  return FeatureSet(std::move(v));
}

FeatureSet FeatureSet::without(int i) const {
  auto v = idx_;
  v.erase(std::remove(v.begin(), v.end(), i), v.end());
  FeatureSet out;
  out.idx_ = std::move(v);
  return out;
}

FeatureSet FeatureSet::set_minus(const FeatureSet& other) const {
  FeatureSet out;
  std::set_difference(idx_.begin(), idx_.end(), other.idx_.begin(),
                      other.idx_.end(), std::back_inserter(out.idx_));
  return out;
}

FeatureSet FeatureSet::set_union(const FeatureSet& other) const {
  FeatureSet out;
  std::set_union(idx_.begin(), idx_.end(), other.idx_.begin(),
                 other.idx_.end(), std::back_inserter(out.idx_));
  return out;
}

bool FeatureSet::is_subset_of(const FeatureSet& other) const {
  return std::includes(other.idx_.begin(), other.idx_.end(), idx_.begin(),
                       idx_.end());
}

bool FeatureSet::intersects(const FeatureSet& other) const {
  auto a = idx_.begin();
  auto b = other.idx_.begin();
  while (a != idx_.end() && b != other.idx_.end()) {
    if (*a == *b) return true;
    if (*a < *b) ++a; else ++b;
  }
  return false;
}

ExplanationProblem::ExplanationProblem(std::shared_ptr<const Classifier> m,
                                       Instance inst)
    : model(std::move(m)), instance(std::move(inst)) {
  if (!model) throw Error("explanation problem needs a model");
  if (!model->space().contains(instance.point))
    throw Error("instance point lies outside the feature space");
  if (instance.label < 0 || instance.label >= model->num_classes())
    throw Error("instance label is not a member of the class set");
  if (model->predict(instance.point) != instance.label)
    throw Error("model prediction disagrees with the instance label");
}

int ExplanationProblem::num_features() const { return model->num_features(); }

const FeatureSpace& ExplanationProblem::space() const {
  return model->space();
}

double distance(const Point& a, const Point& b, Norm norm,
                const FeatureSpace* space) {
  if (a.size() != b.size())
    throw DimensionError("distance: vectors have different lengths");
  auto categorical = [&](size_t i) {
    return space != nullptr &&
           std::holds_alternative<Categorical>(space->features[i]);
  };
  switch (norm.p) {
    case NormP::L0: {
      double count = 0;
      for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) count += 1;
      return count;
    }
    case NormP::L1: {
      double sum = 0;
      for (size_t i = 0; i < a.size(); ++i)
        sum += categorical(i) ? (a[i] != b[i] ? 1.0 : 0.0)
                              : std::abs(a[i] - b[i]);
      return sum;
    }
    case NormP::L2: {
      double sum = 0;
      for (size_t i = 0; i < a.size(); ++i) {
        double d = categorical(i) ? (a[i] != b[i] ? 1.0 : 0.0) : a[i] - b[i];
        sum += d * d;
      }
      return std::sqrt(sum);
    }
    case NormP::LInf: {
      double mx = 0;
      for (size_t i = 0; i < a.size(); ++i) {
        double d = categorical(i) ? (a[i] != b[i] ? 1.0 : 0.0)
                                  : std::abs(a[i] - b[i]);
        mx = std::max(mx, d);
      }
      return mx;
    }
  }
  return 0;
}

bool within_ball(const Point& x, const ExplanationProblem& problem,
                 const DistanceBudget& budget) {
  return distance(x, problem.v(), budget.norm, &problem.space()) <=
         budget.epsilon;
}

bool is_adversarial(const Point& x, const ExplanationProblem& problem,
                    const DistanceBudget& budget) {
  return within_ball(x, problem, budget) &&
         problem.model->predict(x) != problem.label();
}

FeatureSet diff_set(const Point& x, const Point& v) {
  if (x.size() != v.size())
    throw DimensionError("diff_set: vectors have different lengths");
  std::vector<int> out;
  for (size_t i = 0; i < x.size(); ++i)
    if (x[i] != v[i]) out.push_back(static_cast<int>(i));
  return FeatureSet(std::move(out));
}

}  // namespace drxp
