#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <string>

#include "json.hpp"
#include "drxp/drxp.h"

using nlohmann::json;

namespace {

std::string fixture(const std::string& name) {
  return std::string(DRXP_TEST_DIR) + "/fixtures/" + name;
}

struct ModelGuard {
  drxp_model* m = nullptr;
  ~ModelGuard() { drxp_model_free(m); }
};
struct ProblemGuard {
  drxp_problem* p = nullptr;
  ~ProblemGuard() { drxp_problem_free(p); }
};
struct StringGuard {
  char* s = nullptr;
  ~StringGuard() { drxp_free_string(s); }
};

drxp_model* running_model() {
  drxp_model* m = nullptr;
  REQUIRE(drxp_model_load_file(fixture("running_example_model.json").c_str(),
                               &m) == DRXP_OK);
  return m;
}

drxp_problem* running_problem(const drxp_model* m) {
  drxp_problem* p = nullptr;
  REQUIRE(drxp_problem_create(m, R"({"point":[1,1,1],"label":"1"})", &p) ==
          DRXP_OK);
  return p;
}

}  // namespace

TEST_CASE("model load / predict round trip") {
  ModelGuard m{running_model()};
  StringGuard label;
  CHECK(drxp_model_predict(m.m, "[1,1,1]", &label.s) == DRXP_OK);
  CHECK(json::parse(label.s) == json("1"));
  StringGuard label0;
  CHECK(drxp_model_predict(m.m, "[0,1,1]", &label0.s) == DRXP_OK);
  CHECK(json::parse(label0.s) == json("0"));
  StringGuard bad;
  CHECK(drxp_model_predict(m.m, "[1,1]", &bad.s) == DRXP_ERR_USAGE);
  CHECK(std::strlen(drxp_last_error()) > 0);
}

TEST_CASE("model parse failures set PARSE and last_error") {
  drxp_model* m = nullptr;
  CHECK(drxp_model_load_json("{\"nope\":1}", &m) == DRXP_ERR_PARSE);
  CHECK(m == nullptr);
  CHECK(std::strlen(drxp_last_error()) > 0);
  CHECK(drxp_model_load_file("/no/such/file.json", &m) == DRXP_ERR_PARSE);
}

TEST_CASE("sampling labels instances with the model") {
  ModelGuard m;
  REQUIRE(drxp_model_load_file(
              fixture("running_example_box_model.json").c_str(), &m.m) ==
          DRXP_OK);
  StringGuard out;
  REQUIRE(drxp_model_sample(m.m, 5, 42, &out.s) == DRXP_OK);
  auto arr = json::parse(out.s);
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 5);
  for (const auto& inst : arr) {
    REQUIRE(inst["point"].size() == 3);
    for (const auto& x : inst["point"]) {
      CHECK(x.get<double>() >= -1.0);
      CHECK(x.get<double>() <= 3.0);
    }
    StringGuard label;
    REQUIRE(drxp_model_predict(m.m, inst["point"].dump().c_str(), &label.s) ==
            DRXP_OK);
    CHECK(json::parse(label.s) == inst["label"]);
  }
  // deterministic in the seed
  StringGuard again;
  REQUIRE(drxp_model_sample(m.m, 5, 42, &again.s) == DRXP_OK);
  CHECK(std::string(out.s) == again.s);
  // unbounded spaces cannot be sampled
  ModelGuard unb{running_model()};
  StringGuard fail;
  CHECK(drxp_model_sample(unb.m, 1, 0, &fail.s) == DRXP_ERR_USAGE);
}

TEST_CASE("problem creation validates the label") {
  ModelGuard m{running_model()};
  drxp_problem* p = nullptr;
  CHECK(drxp_problem_create(m.m, R"({"point":[0,1,1],"label":"1"})", &p) ==
        DRXP_ERR_USAGE);
  CHECK(p == nullptr);
  CHECK(drxp_problem_create(m.m, "garbage", &p) == DRXP_ERR_PARSE);
}

TEST_CASE("run axp on the running example") {
  ModelGuard m{running_model()};
  ProblemGuard p{running_problem(m.m)};
  StringGuard out;
  REQUIRE(drxp_run(p.p, R"({"mode":"axp","epsilon":1,"norm":"1"})", &out.s) ==
          DRXP_OK);
  auto doc = json::parse(out.s);
  CHECK(doc["kind"] == "axp");
  CHECK(doc["features"] == json::array({1}));
  CHECK(doc["minimal_guaranteed"] == true);
  CHECK(doc["stats"]["oracle_calls"] == 3);

  StringGuard qxp;
  REQUIRE(drxp_run(p.p,
                   R"({"mode":"axp","algorithm":"qxp","epsilon":1,"norm":"1"})",
                   &qxp.s) == DRXP_OK);
  CHECK(json::parse(qxp.s)["features"] == json::array({1}));
}

TEST_CASE("run cxp and enumerate") {
  ModelGuard m{running_model()};
  ProblemGuard p{running_problem(m.m)};
  StringGuard cxp;
  REQUIRE(drxp_run(p.p, R"({"mode":"cxp","epsilon":1,"norm":"1"})", &cxp.s) ==
          DRXP_OK);
  auto cdoc = json::parse(cxp.s);
  CHECK(cdoc["kind"] == "cxp");
  CHECK(cdoc["features"] == json::array({1}));

  StringGuard en;
  REQUIRE(drxp_run(p.p, R"({"mode":"enumerate","epsilon":1,"norm":"1"})",
                   &en.s) == DRXP_OK);
  auto edoc = json::parse(en.s);
  CHECK(edoc["axps"] == json::array({json::array({1})}));
  CHECK(edoc["cxps"] == json::array({json::array({1})}));
  CHECK(edoc["complete"] == true);
}

TEST_CASE("no cxp exists maps to DRXP_ERR_NO_CXP") {
  ModelGuard m;
  REQUIRE(drxp_model_load_json(R"({
    "feature_space":{"features":[{"kind":"real","lo":0,"hi":1}]},
    "classes":["0","1"],
    "model":{"tag":"tree","root":{"leaf":"1"}}})",
                               &m.m) == DRXP_OK);
  ProblemGuard p;
  REQUIRE(drxp_problem_create(m.m, R"({"point":[0.5],"label":"1"})", &p.p) ==
          DRXP_OK);
  StringGuard out;
  CHECK(drxp_run(p.p, R"({"mode":"cxp","epsilon":1,"norm":"1"})", &out.s) ==
        DRXP_ERR_NO_CXP);
  CHECK(std::strlen(drxp_last_error()) > 0);
}

TEST_CASE("option validation") {
  ModelGuard m{running_model()};
  ProblemGuard p{running_problem(m.m)};
  StringGuard out;
  CHECK(drxp_run(p.p, R"({"mode":"axp"})", &out.s) == DRXP_ERR_USAGE);
  CHECK(drxp_run(p.p, R"({"mode":"nope","epsilon":1})", &out.s) ==
        DRXP_ERR_USAGE);
  CHECK(drxp_run(p.p, R"({"mode":"axp","epsilon":-1})", &out.s) ==
        DRXP_ERR_USAGE);
  CHECK(drxp_run(p.p, R"({"mode":"axp","epsilon":1,"norm":"7"})", &out.s) ==
        DRXP_ERR_USAGE);
  CHECK(drxp_run(p.p, "not json", &out.s) == DRXP_ERR_USAGE);
  CHECK(drxp_run(nullptr, R"({"mode":"axp","epsilon":1})", &out.s) ==
        DRXP_ERR_USAGE);
}

TEST_CASE("check validates candidates") {
  ModelGuard m{running_model()};
  ProblemGuard p{running_problem(m.m)};
  const char* opts = R"({"mode":"axp","epsilon":1,"norm":"1"})";
  int verdict = -1;
  REQUIRE(drxp_check(p.p, opts, R"({"kind":"axp","features":[1]})",
                     &verdict) == DRXP_OK);
  CHECK(verdict == 1);
  REQUIRE(drxp_check(p.p, opts, R"({"kind":"axp","features":[2,3]})",
                     &verdict) == DRXP_OK);
  CHECK(verdict == 0);
  REQUIRE(drxp_check(p.p, opts, R"({"kind":"axp","features":[1,2]})",
                     &verdict) == DRXP_OK);
  CHECK(verdict == 0);  // waxp but not minimal
  REQUIRE(drxp_check(p.p, opts, R"({"kind":"waxp","features":[1,2]})",
                     &verdict) == DRXP_OK);
  CHECK(verdict == 1);
  REQUIRE(drxp_check(p.p, opts, R"({"kind":"cxp","features":[1]})",
                     &verdict) == DRXP_OK);
  CHECK(verdict == 1);
  REQUIRE(drxp_check(p.p, opts, R"({"kind":"wcxp","features":[2]})",
                     &verdict) == DRXP_OK);
  CHECK(verdict == 0);
  CHECK(drxp_check(p.p, opts, R"({"kind":"axp","features":[9]})", &verdict) ==
        DRXP_ERR_PARSE);
}

TEST_CASE("status names") {
  CHECK(std::string(drxp_status_name(DRXP_OK)) == "ok");
  CHECK(std::string(drxp_status_name(DRXP_ERR_NO_CXP)) == "no_cxp");
  CHECK(drxp_status_name(DRXP_ERR_UNSUPPORTED) != nullptr);
}

TEST_CASE("null argument handling") {
  CHECK(drxp_model_load_json(nullptr, nullptr) == DRXP_ERR_USAGE);
  drxp_model_free(nullptr);   // must be safe
  drxp_problem_free(nullptr);
  drxp_free_string(nullptr);
}
