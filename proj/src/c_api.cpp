#include <cstring>
#include <random>
#include <string>

#include "drxp/drxp.h"
#include "drxp/enumerate.hpp"
#include "drxp/explain.hpp"
#include "drxp/json_io.hpp"
#include "drxp/models.hpp"
#include "drxp/oracles.hpp"
#include "json.hpp"

using nlohmann::json;

struct drxp_model_s {
  std::shared_ptr<drxp::Classifier> model;
};

struct drxp_problem_s {
  drxp::ExplanationProblem problem;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
drxp_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const drxp::ParseError& e) {
    g_last_error = e.what();
    return DRXP_ERR_PARSE;
  } catch (const drxp::NoCXpError& e) {
    g_last_error = e.what();
    return DRXP_ERR_NO_CXP;
  } catch (const drxp::UnsupportedError& e) {
    g_last_error = e.what();
    return DRXP_ERR_UNSUPPORTED;
  } catch (const drxp::OracleError& e) {
    g_last_error = e.what();
    return DRXP_ERR_ORACLE;
  } catch (const drxp::IndeterminateError& e) {
    g_last_error = e.what();
    return DRXP_ERR_ORACLE;
  } catch (const drxp::DimensionError& e) {
    g_last_error = e.what();
    return DRXP_ERR_USAGE;
  } catch (const drxp::Error& e) {
    g_last_error = e.what();
    return DRXP_ERR_USAGE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DRXP_ERR_INTERNAL;
  }
}

struct RunOptions {
  std::string mode;
  drxp::DistanceBudget budget;
  std::string algorithm = "del";
  drxp::OracleConfig oracle;
  std::string order = "asc";
  int max_xps = 0;
};

RunOptions parse_options(const char* options_json) {
  json j;
  try {
    j = json::parse(options_json);
  } catch (const json::exception& e) {
    throw drxp::Error(std::string("options JSON: ") + e.what());
  }
  if (!j.contains("mode") || !j.contains("epsilon"))
    throw drxp::Error("options need at least 'mode' and 'epsilon'");
  double eps = j.at("epsilon").get<double>();
  drxp::Norm norm{};
  try {
    norm = drxp::Norm::parse(j.value("norm", "inf"));
  } catch (const drxp::ParseError& e) {
    throw drxp::Error(e.what());  // bad option value, not a bad document
  }
  RunOptions opts{j.at("mode").get<std::string>(),
                  drxp::DistanceBudget(eps, norm)};
  opts.algorithm = j.value("algorithm", "del");
  opts.oracle = drxp::OracleConfig::parse(j.value("oracle", "builtin"));
  if (j.contains("timeout")) {
    double t = j.at("timeout").get<double>();
    if (!(t > 0)) throw drxp::Error("timeout must be > 0");
    opts.oracle.per_query_timeout = t;
  }
  opts.oracle.model_ref = j.value("model_ref", "");
  opts.order = j.value("order", "asc");
  opts.max_xps = j.value("max_xps", 0);
  if (opts.max_xps < 0) throw drxp::Error("max_xps must be >= 0");
  return opts;
}

json class_identifier(const drxp::Classifier& model, int k) {
  return json(model.classes()[static_cast<size_t>(k)]);
}

}  // namespace

extern "C" {

drxp_status drxp_model_load_json(const char* json_text, drxp_model** out) {
  if (!json_text || !out) {
    g_last_error = "null argument";
    return DRXP_ERR_USAGE;
  }
  return guarded([&] {
    auto model = drxp::load_model(json_text);
    *out = new drxp_model_s{std::move(model)};
    return DRXP_OK;
  });
}

drxp_status drxp_model_load_file(const char* path, drxp_model** out) {
  if (!path || !out) {
    g_last_error = "null argument";
    return DRXP_ERR_USAGE;
  }
  return guarded([&] {
    auto model = drxp::load_model_file(path);
    *out = new drxp_model_s{std::move(model)};
    return DRXP_OK;
  });
}

void drxp_model_free(drxp_model* model) { delete model; }

drxp_status drxp_model_predict(const drxp_model* model,
                               const char* point_json,
                               char** label_json_out) {
  if (!model || !point_json || !label_json_out) {
    g_last_error = "null argument";
    return DRXP_ERR_USAGE;
  }
  return guarded([&] {
    json pj;
    try {
      pj = json::parse(point_json);
    } catch (const json::exception& e) {
      throw drxp::ParseError(std::string("point JSON: ") + e.what());
    }
    if (!pj.is_array()) throw drxp::ParseError("point must be a JSON array");
    drxp::Point p = pj.get<drxp::Point>();
    int k = model->model->predict(p);
    *label_json_out = dup_string(class_identifier(*model->model, k).dump());
    return DRXP_OK;
  });
}

drxp_status drxp_model_sample(const drxp_model* model, int n,
                              unsigned long long seed,
                              char** instances_json_out) {
  if (!model || !instances_json_out) {
    g_last_error = "null argument";
    return DRXP_ERR_USAGE;
  }
  if (n < 0) {
    g_last_error = "sample count must be >= 0";
    return DRXP_ERR_USAGE;
  }
  return guarded([&] {
    const auto& space = model->model->space();
    for (const auto& dom : space.features)
      if (!drxp::domain_is_bounded(dom))
        throw drxp::Error("sampling needs bounded feature domains");
    std::mt19937_64 rng(seed);
    json arr = json::array();
    for (int s = 0; s < n; ++s) {
      drxp::Point p;
      for (const auto& dom : space.features) {
        if (const auto* r = std::get_if<drxp::RealInterval>(&dom)) {
          std::uniform_real_distribution<double> d(r->lo, r->hi);
          p.push_back(d(rng));
        } else if (const auto* ir = std::get_if<drxp::IntegerRange>(&dom)) {
          std::uniform_int_distribution<long long> d(ir->lo, ir->hi);
          p.push_back(static_cast<double>(d(rng)));
        } else {
          const auto& cat = std::get<drxp::Categorical>(dom);
          std::uniform_int_distribution<size_t> d(0, cat.labels.size() - 1);
          p.push_back(static_cast<double>(d(rng)));
        }
      }
      json inst;
      inst["point"] = p;
      inst["label"] = class_identifier(*model->model,
                                       model->model->predict(p));
      arr.push_back(std::move(inst));
    }
    *instances_json_out = dup_string(arr.dump());
    return DRXP_OK;
  });
}

drxp_status drxp_problem_create(const drxp_model* model,
                                const char* instance_json,
                                drxp_problem** out) {
  if (!model || !instance_json || !out) {
    g_last_error = "null argument";
    return DRXP_ERR_USAGE;
  }
  return guarded([&] {
    auto inst = drxp::load_instance(instance_json, *model->model);
    *out = new drxp_problem_s{
        drxp::ExplanationProblem(model->model, std::move(inst))};
    return DRXP_OK;
  });
}

void drxp_problem_free(drxp_problem* problem) { delete problem; }

drxp_status drxp_run(const drxp_problem* problem, const char* options_json,
                     char** result_json_out) {
  if (!problem || !options_json || !result_json_out) {
    g_last_error = "null argument";
    return DRXP_ERR_USAGE;
  }
  return guarded([&] {
    RunOptions opts = parse_options(options_json);
    auto oracle = drxp::make_oracle(opts.oracle, problem->problem);
    const int m = problem->problem.num_features();
    if (opts.mode == "axp") {
      drxp::Explanation xp;
      if (opts.algorithm == "qxp") {
        xp = drxp::axp_quickxplain(problem->problem, opts.budget, *oracle);
      } else if (opts.algorithm == "del") {
        auto order = drxp::make_order(m, opts.order);
        xp = opts.oracle.per_query_timeout
                 ? drxp::axp_relaxed(problem->problem, opts.budget, *oracle,
                                     order)
                 : drxp::axp_deletion(problem->problem, opts.budget, *oracle,
                                      order);
      } else {
        throw drxp::Error("unknown algorithm '" + opts.algorithm + "'");
      }
      *result_json_out = dup_string(drxp::explanation_to_json(xp));
      return DRXP_OK;
    }
    if (opts.mode == "cxp") {
      auto order = drxp::make_order(m, opts.order);
      auto xp =
          drxp::cxp_deletion(problem->problem, opts.budget, *oracle, order);
      *result_json_out = dup_string(drxp::explanation_to_json(xp));
      return DRXP_OK;
    }
    if (opts.mode == "enumerate") {
      std::optional<int> limit;
      if (opts.max_xps > 0) limit = opts.max_xps;
      auto res =
          drxp::enumerate_all(problem->problem, opts.budget, *oracle, limit);
      *result_json_out = dup_string(drxp::enumeration_to_json(res));
      return DRXP_OK;
    }
    throw drxp::Error("unknown mode '" + opts.mode + "'");
  });
}

drxp_status drxp_check(const drxp_problem* problem, const char* options_json,
                       const char* candidate_json, int* verdict_out) {
  if (!problem || !options_json || !candidate_json || !verdict_out) {
    g_last_error = "null argument";
    return DRXP_ERR_USAGE;
  }
  return guarded([&] {
    RunOptions opts = parse_options(options_json);
    auto oracle = drxp::make_oracle(opts.oracle, problem->problem);
    json cj;
    try {
      cj = json::parse(candidate_json);
    } catch (const json::exception& e) {
      throw drxp::ParseError(std::string("candidate JSON: ") + e.what());
    }
    const int m = problem->problem.num_features();
    auto features = drxp::feature_set_from_json(
        cj.at("features").dump(), m);
    auto kind = drxp::kind_from_name(cj.at("kind").get<std::string>());

    auto waxp = [&](const drxp::FeatureSet& s) {
      auto pv = drxp::is_waxp(s, problem->problem, opts.budget, *oracle);
      if (pv == drxp::PredicateValue::Indeterminate)
        throw drxp::IndeterminateError("oracle timed out during check");
      return pv == drxp::PredicateValue::Holds;
    };
    auto wcxp = [&](const drxp::FeatureSet& y) {
      auto pv = drxp::is_wcxp(y, problem->problem, opts.budget, *oracle);
      if (pv == drxp::PredicateValue::Indeterminate)
        throw drxp::IndeterminateError("oracle timed out during check");
      return pv == drxp::PredicateValue::Holds;
    };

    bool ok = false;
    switch (kind) {
      case drxp::ExplanationKind::WAXp:
        ok = waxp(features);
        break;
      case drxp::ExplanationKind::AXp: {
        ok = waxp(features);
        for (int i : features.indices())
          if (ok && waxp(features.without(i))) ok = false;
        break;
      }
      case drxp::ExplanationKind::WCXp:
        ok = wcxp(features);
        break;
      case drxp::ExplanationKind::CXp: {
        ok = wcxp(features);
        for (int i : features.indices())
          if (ok && wcxp(features.without(i))) ok = false;
        break;
      }
    }
    *verdict_out = ok ? 1 : 0;
    return DRXP_OK;
  });
}

void drxp_free_string(char* s) { delete[] s; }

const char* drxp_last_error(void) { return g_last_error.c_str(); }

const char* drxp_status_name(drxp_status status) {
  switch (status) {
    case DRXP_OK:
      return "ok";
    case DRXP_ERR_USAGE:
      return "usage";
    case DRXP_ERR_PARSE:
      return "parse";
    case DRXP_ERR_ORACLE:
      return "oracle";
    case DRXP_ERR_NO_CXP:
      return "no_cxp";
    case DRXP_ERR_UNSUPPORTED:
      return "unsupported";
    case DRXP_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

}  // extern "C"
