// drxp command-line front end. Talks to the shared library exclusively
// through the C API in drxp.h.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "drxp/drxp.h"
#include "json.hpp"

using nlohmann::json;

namespace {

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { drxp_free_string(s); }
  std::string str() const { return s ? s : ""; }
};

int exit_code_for(drxp_status st) {
  switch (st) {
    case DRXP_OK:
      return 0;
    case DRXP_ERR_USAGE:
    case DRXP_ERR_PARSE:
      return 1;
    case DRXP_ERR_NO_CXP:
      return 3;
    default:
      return 2;
  }
}

int fail(drxp_status st) {
  std::cerr << "error (" << drxp_status_name(st) << "): " << drxp_last_error()
            << "\n";
  return exit_code_for(st);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct JobSpec {
  std::string id;  // report row label
  std::string model_path;
  std::string instance_json;  // inline document
  json options;
};

struct RowResult {
  std::string id;
  bool ok = false;
  int size = 0;
  double time_s = 0.0;
  int timeouts = 0;
  std::string result_json;
  drxp_status status = DRXP_OK;
};

RowResult run_job(const JobSpec& job) {
  RowResult row;
  row.id = job.id;
  drxp_model* model = nullptr;
  drxp_status st = drxp_model_load_file(job.model_path.c_str(), &model);
  if (st != DRXP_OK) {
    row.status = st;
    return row;
  }
  drxp_problem* problem = nullptr;
  st = drxp_problem_create(model, job.instance_json.c_str(), &problem);
  if (st != DRXP_OK) {
    drxp_model_free(model);
    row.status = st;
    return row;
  }
  OwnedString result;
  auto t0 = std::chrono::steady_clock::now();
  st = drxp_run(problem, job.options.dump().c_str(), &result.s);
  row.time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  drxp_problem_free(problem);
  drxp_model_free(model);
  row.status = st;
  if (st != DRXP_OK) return row;
  row.ok = true;
  row.result_json = result.str();
  try {
    json r = json::parse(row.result_json);
    if (r.contains("features"))
      row.size = static_cast<int>(r["features"].size());
    else if (r.contains("axps"))
      row.size = static_cast<int>(r["axps"].size() + r["cxps"].size());
    if (r.contains("stats")) row.timeouts = r["stats"].value("timeouts", 0);
  } catch (const json::exception&) {
    // leave summary fields at defaults
  }
  return row;
}

void write_report(const std::string& path, const std::vector<RowResult>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report '" + path + "'");
  out << "instance,size,time_s,timeouts\n";
  for (const auto& r : rows) {
    if (r.ok)
      out << r.id << "," << r.size << "," << r.time_s << "," << r.timeouts
          << "\n";
    else
      out << r.id << ",error:" << drxp_status_name(r.status) << "," << r.time_s
          << ",\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distance-restricted abductive/contrastive explanations"};

  std::string model_path, instance_path, manifest_path;
  double epsilon = 0.0;
  std::string norm = "inf";
  std::string mode = "axp";
  std::string algorithm = "del";
  std::string oracle = "builtin";
  double timeout = 0.0;
  std::string order = "asc";
  int max_xps = 0;
  std::string output_path, report_path;
  int sample_n = 0;
  unsigned long long seed = 0;
  std::string candidate, kind;
  std::string model_ref;

  app.add_option("--model", model_path, "model JSON file");
  app.add_option("--instance", instance_path, "instance JSON file");
  app.add_option("--manifest", manifest_path,
                 "batch manifest (JSON array of jobs)");
  app.add_option("--epsilon", epsilon, "distance budget, > 0");
  app.add_option("--norm", norm, "0|1|2|inf")
      ->check(CLI::IsMember({"0", "1", "2", "inf"}));
  app.add_option("--mode", mode, "axp|cxp|enumerate|check")
      ->check(CLI::IsMember({"axp", "cxp", "enumerate", "check"}));
  app.add_option("--algorithm", algorithm, "del|qxp (axp only)")
      ->check(CLI::IsMember({"del", "qxp"}));
  app.add_option("--oracle", oracle, "builtin|grid:R|external:CMD");
  app.add_option("--timeout", timeout, "per-query oracle timeout, seconds");
  app.add_option("--order", order,
                 "asc|desc|random:SEED|comma list of 1-based indices");
  app.add_option("--max-xps", max_xps, "enumeration cap, 0 = unlimited");
  app.add_option("--output", output_path, "write result JSON here");
  app.add_option("--report", report_path, "write a CSV report here");
  app.add_option("--sample", sample_n,
                 "draw N instances from the model's feature space");
  app.add_option("--seed", seed, "sampling seed");
  app.add_option("--candidate", candidate,
                 "JSON array of 1-based features (mode=check)");
  app.add_option("--kind", kind, "axp|waxp|cxp|wcxp (mode=check)");
  app.add_option("--model-ref", model_ref,
                 "model reference forwarded to external oracles");

  CLI11_PARSE(app, argc, argv);

  try {
    json options;
    options["mode"] = mode;
    options["epsilon"] = epsilon;
    options["norm"] = norm;
    options["algorithm"] = algorithm;
    options["oracle"] = oracle;
    if (timeout > 0) options["timeout"] = timeout;
    options["order"] = order;
    if (max_xps > 0) options["max_xps"] = max_xps;
    if (!model_ref.empty())
      options["model_ref"] = model_ref;
    else if (oracle.rfind("external:", 0) == 0)
      options["model_ref"] = model_path;
    if (oracle.rfind("external:", 0) == 0 && timeout <= 0) {
      std::cerr << "error (usage): external oracles require --timeout\n";
      return 1;
    }

    // --- batch via manifest -------------------------------------------------
    if (!manifest_path.empty()) {
      json manifest = json::parse(read_file(manifest_path));
      if (!manifest.is_array()) {
        std::cerr << "error (usage): manifest must be a JSON array\n";
        return 1;
      }
      std::vector<RowResult> rows;
      int row_no = 0;
      for (const auto& entry : manifest) {
        ++row_no;
        JobSpec job;
        job.model_path = entry.at("model").get<std::string>();
        std::string inst = entry.at("instance").get<std::string>();
        job.instance_json = read_file(inst);
        job.id = entry.value("id", inst);
        job.options = options;
        job.options["epsilon"] = entry.at("epsilon").get<double>();
        if (entry.contains("norm")) job.options["norm"] = entry["norm"];
        if (entry.contains("mode")) job.options["mode"] = entry["mode"];
        rows.push_back(run_job(job));
        if (!rows.back().ok)
          std::cerr << "row " << row_no << " (" << job.id
                    << ") failed: " << drxp_status_name(rows.back().status)
                    << "\n";
      }
      if (!report_path.empty()) write_report(report_path, rows);
      return 0;  // per-row failures live in the report
    }

    if (model_path.empty()) {
      std::cerr << "error (usage): --model is required\n";
      return 1;
    }

    // --- sampled instances --------------------------------------------------
    if (sample_n > 0) {
      drxp_model* model = nullptr;
      drxp_status st = drxp_model_load_file(model_path.c_str(), &model);
      if (st != DRXP_OK) return fail(st);
      OwnedString instances;
      st = drxp_model_sample(model, sample_n, seed, &instances.s);
      drxp_model_free(model);
      if (st != DRXP_OK) return fail(st);
      json arr = json::parse(instances.str());
      std::vector<RowResult> rows;
      json results = json::array();
      int k = 0;
      for (const auto& inst : arr) {
        JobSpec job;
        job.id = "sample:" + std::to_string(k++);
        job.model_path = model_path;
        job.instance_json = inst.dump();
        job.options = options;
        rows.push_back(run_job(job));
        if (rows.back().ok)
          results.push_back(json::parse(rows.back().result_json));
        else
          std::cerr << job.id << " failed: "
                    << drxp_status_name(rows.back().status) << "\n";
      }
      if (!report_path.empty()) write_report(report_path, rows);
      if (!output_path.empty()) {
        std::ofstream out(output_path);
        out << results.dump() << "\n";
      } else {
        std::cout << results.dump() << "\n";
      }
      return 0;
    }

    if (instance_path.empty()) {
      std::cerr << "error (usage): --instance is required\n";
      return 1;
    }

    // --- check mode ---------------------------------------------------------
    if (mode == "check") {
      if (candidate.empty() || kind.empty()) {
        std::cerr << "error (usage): mode=check needs --candidate and --kind\n";
        return 1;
      }
      drxp_model* model = nullptr;
      drxp_status st = drxp_model_load_file(model_path.c_str(), &model);
      if (st != DRXP_OK) return fail(st);
      drxp_problem* problem = nullptr;
      st = drxp_problem_create(model, read_file(instance_path).c_str(),
                               &problem);
      if (st != DRXP_OK) {
        drxp_model_free(model);
        return fail(st);
      }
      json cand;
      cand["features"] = json::parse(candidate);
      cand["kind"] = kind;
      options["mode"] = "axp";  // check reuses the predicate machinery
      int verdict = 0;
      st = drxp_check(problem, options.dump().c_str(), cand.dump().c_str(),
                      &verdict);
      drxp_problem_free(problem);
      drxp_model_free(model);
      if (st != DRXP_OK) return fail(st);
      json out;
      out["valid"] = (verdict == 1);
      out["kind"] = kind;
      std::cout << out.dump() << "\n";
      return 0;
    }

    // --- single job ---------------------------------------------------------
    JobSpec job;
    job.id = instance_path;
    job.model_path = model_path;
    job.instance_json = read_file(instance_path);
    job.options = options;
    RowResult row = run_job(job);
    if (!report_path.empty()) write_report(report_path, {row});
    if (!row.ok) {
      std::cerr << "error (" << drxp_status_name(row.status)
                << "): " << drxp_last_error() << "\n";
      return exit_code_for(row.status);
    }
    if (!output_path.empty()) {
      std::ofstream out(output_path);
      if (!out) throw std::runtime_error("cannot write '" + output_path + "'");
      out << row.result_json << "\n";
    } else {
      std::cout << row.result_json << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
