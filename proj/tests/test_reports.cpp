#include <catch2/catch.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "qplab/run_config.hpp"
#include "qplab/serialize.hpp"
#include "qplab/verify.hpp"

using namespace qplab;
using nlohmann::json;

#ifndef QPLAB_SOURCE_DIR
#define QPLAB_SOURCE_DIR "."
#endif

namespace {

/// Structural validator for the subset of JSON Schema the shipped schemas
/// use: type, required, properties, items, and local $ref.
bool validates(const json& value, const json& schema, const json& root,
               std::string* why) {
  if (schema.contains("$ref")) {
    const std::string ref = schema["$ref"].get<std::string>();
    const std::string prefix = "#/definitions/";
    if (ref.rfind(prefix, 0) != 0) {
      *why = "unsupported $ref " + ref;
      return false;
    }
    return validates(value, root["definitions"][ref.substr(prefix.size())], root, why);
  }
  if (schema.contains("type")) {
    const auto matches = [&](const std::string& t) {
      if (t == "object") return value.is_object();
      if (t == "array") return value.is_array();
      if (t == "string") return value.is_string();
      if (t == "number") return value.is_number();
      if (t == "integer") return value.is_number_integer() || value.is_number_unsigned();
      if (t == "boolean") return value.is_boolean();
      if (t == "null") return value.is_null();
      return false;
    };
    bool ok = false;
    if (schema["type"].is_array()) {
      for (const auto& t : schema["type"]) ok = ok || matches(t.get<std::string>());
    } else {
      ok = matches(schema["type"].get<std::string>());
    }
    if (!ok) {
      *why = "type mismatch against " + schema["type"].dump() + " for " + value.dump();
      return false;
    }
  }
  if (schema.contains("required")) {
    for (const auto& key : schema["required"]) {
      if (!value.contains(key.get<std::string>())) {
        *why = "missing required key " + key.get<std::string>();
        return false;
      }
    }
  }
  if (schema.contains("properties") && value.is_object()) {
    for (const auto& [key, sub] : schema["properties"].items()) {
      if (value.contains(key) && !validates(value[key], sub, root, why)) return false;
    }
  }
  if (schema.contains("items") && value.is_array()) {
    for (const auto& item : value)
      if (!validates(item, schema["items"], root, why)) return false;
  }
  return true;
}

json load_schema(const std::string& name) {
  std::ifstream in(std::string(QPLAB_SOURCE_DIR) + "/schemas/" + name);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

}  // namespace

TEST_CASE("angle expressions") {
  CHECK(parse_angle("pi/2") == Approx(kPi / 2));
  CHECK(parse_angle("pi") == Approx(kPi));
  CHECK(parse_angle("2pi") == Approx(2 * kPi));
  CHECK(parse_angle("-pi/3") == Approx(-kPi / 3));
  CHECK(parse_angle("2*pi/3") == Approx(2 * kPi / 3));
  CHECK(parse_angle("0.5pi") == Approx(kPi / 2));
  CHECK(parse_angle("0.75") == Approx(0.75));
  CHECK(parse_angle("-1.25e-1") == Approx(-0.125));
  CHECK_THROWS_AS(parse_angle("pie"), std::invalid_argument);
  CHECK_THROWS_AS(parse_angle("1.2.3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_angle(""), std::invalid_argument);
}

TEST_CASE("chart point and grid parsing") {
  const ChartPoint p = parse_chart_point("pi/2,0,1");
  CHECK(p.tau == Approx(kPi / 2));
  CHECK(p.theta == 0.0);
  CHECK(p.rho == 1.0);
  CHECK_THROWS_AS(parse_chart_point("1,2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_chart_point("1,2,3,4"), std::invalid_argument);

  BtzConfig bc;
  parse_grid_spec("10x12x3", bc);
  CHECK(bc.grid_tau == 10);
  CHECK(bc.grid_theta == 12);
  CHECK(bc.grid_rho == 3);
  CHECK_THROWS_AS(parse_grid_spec("10x12", bc), std::invalid_argument);
}

TEST_CASE("config file loading and precedence") {
  const std::string path = "test_qplab_config.json";
  {
    std::ofstream f(path);
    f << R"({"seed": 7, "form_scale": 2.5, "steps": 123})";
  }
  setenv("QPLAB_CONFIG", path.c_str(), 1);

  RunConfig cfg;
  load_config_file(cfg);
  CHECK(cfg.seed == 7);
  CHECK(cfg.form_scale == Approx(2.5));
  CHECK(cfg.steps == 123);
  CHECK(cfg.format == "json");  // untouched default

  // A later flag assignment wins over the file value.
  cfg.seed = 42;
  CHECK(cfg.seed == 42);

  unsetenv("QPLAB_CONFIG");
  std::remove(path.c_str());
}

TEST_CASE("calibrated form scale persists through the config file") {
  const std::string path = "test_qplab_write.json";
  setenv("QPLAB_CONFIG", path.c_str(), 1);
  write_form_scale(1.25);
  RunConfig cfg;
  load_config_file(cfg);
  CHECK(cfg.form_scale == Approx(1.25));
  unsetenv("QPLAB_CONFIG");
  std::remove(path.c_str());
}

TEST_CASE("suite reports") {
  SuiteConfig cfg;
  cfg.group = "sl2r";
  const VerificationReport report = run_suite("core", cfg);

  SECTION("all core checks pass at default tolerances") {
    CHECK(report.pass);
    CHECK(report.n_checks > 0);
  }

  SECTION("byte-identical across repeated runs") {
    const VerificationReport again = run_suite("core", cfg);
    CHECK(report_to_json(report) == report_to_json(again));
  }

  SECTION("seed changes residuals but not structure") {
    SuiteConfig other = cfg;
    other.seed = 43;
    const VerificationReport alt = run_suite("core", other);
    CHECK(alt.n_checks == report.n_checks);
    CHECK(alt.pass);
  }

  SECTION("an unachievable tolerance fails the suite") {
    SuiteConfig strict = cfg;
    strict.tol_override = 1e-30;
    CHECK_FALSE(run_suite("core", strict).pass);
  }

  SECTION("unknown suites are rejected") {
    CHECK_THROWS_AS(run_suite("nope", cfg), std::invalid_argument);
  }

  SECTION("json validates against the shipped schema") {
    const json doc = json::parse(report_to_json(report));
    const json schema = load_schema("verification_report.schema.json");
    std::string why;
    const bool ok = validates(doc, schema, schema, &why);
    INFO(why);
    CHECK(ok);
  }

  SECTION("csv rendering has a header and one row per check") {
    const std::string csv = report_to_csv(report);
    CHECK(csv.rfind("name,group,sigma,n,max_residual,tolerance,kind,pass\n", 0) == 0);
    const auto rows = std::count(csv.begin(), csv.end(), '\n');
    CHECK(rows == report.n_checks + 1);
    CHECK(csv.find('\r') == std::string::npos);
  }
}

TEST_CASE("leaf trace json validates against the shipped schema") {
  BtzModel model(1.0);
  const LeafTrace tr = trace_leaf(model, {kPi / 2, 0.0, 1.0}, 10, 1e-3);
  const json doc =
      json::parse(trace_to_json(tr, {kPi / 2, 0.0, 1.0}, 10, 1e-3, 1.0, 42));
  const json schema = load_schema("leaf_trace.schema.json");
  std::string why;
  const bool ok = validates(doc, schema, schema, &why);
  INFO(why);
  CHECK(ok);
}

TEST_CASE("17-digit formatting is reproducible") {
  CHECK(fmt_g17(kPi) == fmt_g17(kPi));
  CHECK(fmt_g17(1.0) == "1");
  CHECK(fmt_g17(kPi).size() >= 17);
}
