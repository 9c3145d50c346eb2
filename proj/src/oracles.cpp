#include <chrono>
#include <string>

#include "drxp/models.hpp"
#include "drxp/oracles.hpp"

namespace drxp {

OracleConfig OracleConfig::parse(const std::string& spec) {
  OracleConfig cfg;
  if (spec == "builtin" || spec.empty()) {
    cfg.kind = Kind::Builtin;
    return cfg;
  }
  if (spec.rfind("grid", 0) == 0) {
    cfg.kind = Kind::Grid;
    if (spec.size() > 4) {
      if (spec[4] != ':') throw ParseError("bad oracle spec: " + spec);
      try {
        cfg.resolution = std::stoi(spec.substr(5));
      } catch (const std::exception&) {
        throw ParseError("bad grid resolution in oracle spec: " + spec);
      }
    }
    if (cfg.resolution < 2)
      throw ParseError("grid resolution must be >= 2: " + spec);
    return cfg;
  }
  if (spec.rfind("external:", 0) == 0) {
    cfg.kind = Kind::External;
    cfg.command = spec.substr(9);
    if (cfg.command.empty())
      throw ParseError("external oracle spec needs a command");
    return cfg;
  }
  throw ParseError("unknown oracle spec: " + spec +
                   " (expected builtin, grid:R or external:CMD)");
}

std::unique_ptr<AdvExOracle> make_oracle(const OracleConfig& config,
                                         const ExplanationProblem&) {
  switch (config.kind) {
    case OracleConfig::Kind::Builtin:
      return std::make_unique<BuiltinOracle>(config);
    case OracleConfig::Kind::Grid:
      return std::make_unique<GridFalsifier>(config.resolution);
    case OracleConfig::Kind::External:
      return std::make_unique<ExternalOracle>(
          config.command, config.per_query_timeout, config.model_ref);
  }
  throw Error("unreachable oracle kind");
}

OracleAnswer BuiltinOracle::find(const OracleQuery& query) {
  switch (query.problem.model->family()) {
    case ModelFamily::Linear:
      return linear_oracle(query, config_.lp_tolerance);
    case ModelFamily::Tree:
      return tree_oracle(query, config_.lp_tolerance);
    case ModelFamily::ReluMlp:
      return relu_oracle(query, config_.lp_tolerance, /*pattern_cap=*/24,
                         config_.per_query_timeout);
    case ModelFamily::HalfspaceConjunction:
      return halfspace_oracle(query, config_.lp_tolerance);
  }
  throw UnsupportedError("unknown model family");
}

OracleAnswer find_adv_ex(const OracleQuery& query, AdvExOracle& oracle) {
  auto t0 = std::chrono::steady_clock::now();
  OracleAnswer ans = oracle.find(query);
  ans.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (ans.status != AnswerStatus::AdversarialFound) {
    ans.witness.reset();
    return ans;
  }
  if (!ans.witness)
    throw OracleError("oracle reported AdversarialFound without a witness");
  const Point& w = *ans.witness;
  if (static_cast<int>(w.size()) != query.problem.num_features())
    throw OracleError("oracle witness has wrong dimension");
  for (int i : query.fixed)
    if (w[static_cast<size_t>(i)] != query.problem.v()[static_cast<size_t>(i)])
      throw OracleError("oracle witness moved a fixed feature (soundness)");
  if (!is_adversarial(w, query.problem, query.budget))
    throw OracleError("oracle witness is not adversarial (soundness)");
  return ans;
}

}  // namespace drxp
