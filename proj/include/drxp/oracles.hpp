#pragma once

// The FindAdvEx(eps, S; E, p) contract and its implementations: exact
// built-in oracles per model family, a grid falsifier for testing, an
// external JSON-lines adapter, and central soundness enforcement.

#include <memory>
#include <optional>
#include <string>

#include "drxp/core.hpp"
#include "drxp/models.hpp"

namespace drxp {

struct OracleQuery {
  const ExplanationProblem& problem;
  DistanceBudget budget;
  FeatureSet fixed;  // for all i in fixed, x_i = v_i is enforced
};

enum class AnswerStatus { AdversarialFound, Robust, Timeout };

struct OracleAnswer {
  AnswerStatus status = AnswerStatus::Robust;
  std::optional<Point> witness;  // mandatory when AdversarialFound
  double elapsed_seconds = 0.0;
};

class AdvExOracle {
 public:
  virtual ~AdvExOracle() = default;
  virtual OracleAnswer find(const OracleQuery& query) = 0;
  // Whether a Robust answer certifies non-existence.
  virtual bool complete() const { return true; }
};

struct OracleConfig {
  enum class Kind { Builtin, Grid, External };
  Kind kind = Kind::Builtin;
  int resolution = 41;  // grid points per bounded real feature, >= 2
  std::string command;  // external subprocess command line
  std::optional<double> per_query_timeout;  // seconds
  double lp_tolerance = 1e-9;
  std::string model_ref;  // path handed to external tools; inline when empty

  // "builtin" | "grid:R" | "external:CMD"
  static OracleConfig parse(const std::string& spec);
};

std::unique_ptr<AdvExOracle> make_oracle(const OracleConfig& config,
                                         const ExplanationProblem& problem);

// Runs the oracle and enforces soundness: an AdversarialFound witness must
// pass is_adversarial and agree with v on every fixed feature, else an
// OracleError is raised. Fills elapsed_seconds.
OracleAnswer find_adv_ex(const OracleQuery& query, AdvExOracle& oracle);

// Complete decision procedures per model family. Exposed for tests; normal
// use goes through BuiltinOracle / find_adv_ex.
OracleAnswer linear_oracle(const OracleQuery& query, double lp_tolerance);
OracleAnswer tree_oracle(const OracleQuery& query, double lp_tolerance);
OracleAnswer relu_oracle(const OracleQuery& query, double lp_tolerance,
                         int pattern_cap = 24,
                         std::optional<double> deadline_seconds = {});
OracleAnswer halfspace_oracle(const OracleQuery& query, double lp_tolerance);

class BuiltinOracle : public AdvExOracle {
 public:
  explicit BuiltinOracle(OracleConfig config) : config_(std::move(config)) {}
  OracleAnswer find(const OracleQuery& query) override;

 private:
  OracleConfig config_;
};

// Scans the lattice of the fixed-restricted ball. AdversarialFound answers
// are sound; Robust means "none on the grid", complete only when every free
// domain is finite.
class GridFalsifier : public AdvExOracle {
 public:
  explicit GridFalsifier(int resolution);
  OracleAnswer find(const OracleQuery& query) override;
  bool complete() const override { return false; }

 private:
  int resolution_;
};

OracleAnswer grid_falsifier(const OracleQuery& query, int resolution);

// Drives a subprocess speaking the JSON-lines protocol. Witnesses are
// re-verified; Robust answers are trusted as declared-complete.
class ExternalOracle : public AdvExOracle {
 public:
  ExternalOracle(std::string command, std::optional<double> per_query_timeout,
                 std::string model_ref);
  ~ExternalOracle() override;

  OracleAnswer find(const OracleQuery& query) override;

 private:
  struct Process;
  void ensure_running(const OracleQuery& query);
  void shutdown();

  std::string command_;
  std::optional<double> timeout_;
  std::string model_ref_;
  std::unique_ptr<Process> proc_;
  long long next_id_ = 1;
};

}  // namespace drxp
