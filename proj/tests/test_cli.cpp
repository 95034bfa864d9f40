// Black-box tests for the command-line binary: subcommand behavior, exit
// codes, output schemas, export determinism, and config precedence.  The
// binary path and the source tree come in through compile definitions.

#include <sys/wait.h>
#include <unistd.h>

#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "symfid/sdpsolve.hpp"

using nlohmann::json;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
};

CmdResult run_cli(const std::string& args) {
  std::string cmd = std::string(SYMFID_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult res;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) res.out.append(buf, got);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  f << content;
  REQUIRE(f.good());
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json load_schema(const std::string& name) {
  return json::parse(read_file(std::string(SYMFID_SOURCE_DIR) + "/schemas/" + name));
}

// Minimal JSON-schema checker covering the subset our schemas use: type,
// required, properties, additionalProperties, items, enum, minimum,
// minItems/maxItems, oneOf, and $ref into #/definitions.
bool schema_check(const json& root, const json& schema, const json& value, std::string& err) {
  if (schema.contains("$ref")) {
    std::string ref = schema["$ref"].get<std::string>();
    const std::string prefix = "#/definitions/";
    if (ref.rfind(prefix, 0) != 0) {
      err = "unsupported $ref " + ref;
      return false;
    }
    return schema_check(root, root["definitions"][ref.substr(prefix.size())], value, err);
  }
  if (schema.contains("oneOf")) {
    int matches = 0;
    for (const auto& sub : schema["oneOf"]) {
      std::string ignored;
      if (schema_check(root, sub, value, ignored)) ++matches;
    }
    if (matches != 1) {
      err = "oneOf matched " + std::to_string(matches) + " branches";
      return false;
    }
  }
  if (schema.contains("type")) {
    std::string t = schema["type"].get<std::string>();
    bool ok = (t == "object" && value.is_object()) || (t == "array" && value.is_array()) ||
              (t == "string" && value.is_string()) || (t == "boolean" && value.is_boolean()) ||
              (t == "integer" && value.is_number_integer()) || (t == "number" && value.is_number());
    if (!ok) {
      err = "expected type " + t;
      return false;
    }
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) found = found || e == value;
    if (!found) {
      err = "value not in enum";
      return false;
    }
  }
  if (schema.contains("minimum") && value.is_number() &&
      value.get<double>() < schema["minimum"].get<double>()) {
    err = "below minimum";
    return false;
  }
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const auto& k : schema["required"])
        if (!value.contains(k.get<std::string>())) {
          err = "missing required field " + k.get<std::string>();
          return false;
        }
    bool strict = schema.contains("additionalProperties") &&
                  schema["additionalProperties"].is_boolean() &&
                  !schema["additionalProperties"].get<bool>();
    for (const auto& [k, v] : value.items()) {
      if (schema.contains("properties") && schema["properties"].contains(k)) {
        if (!schema_check(root, schema["properties"][k], v, err)) {
          err = k + ": " + err;
          return false;
        }
      } else if (strict) {
        err = "unexpected field " + k;
        return false;
      }
    }
  }
  if (value.is_array()) {
    if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>()) {
      err = "too few items";
      return false;
    }
    if (schema.contains("maxItems") && value.size() > schema["maxItems"].get<std::size_t>()) {
      err = "too many items";
      return false;
    }
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < value.size(); ++i)
        if (!schema_check(root, schema["items"], value[i], err)) {
          err = "item " + std::to_string(i) + ": " + err;
          return false;
        }
    }
  }
  return true;
}

bool schema_valid(const json& schema, const json& value, std::string& err) {
  return schema_check(schema, schema, value, err);
}

std::string tmp_path(const std::string& stem) {
  return "/tmp/symfid_clitest_" + std::to_string(::getpid()) + "_" + stem;
}

}  // namespace

TEST_CASE("solve emits a schema-conforming result and the right value") {
  auto res = run_cli("solve --channel identity --level 1");
  REQUIRE(res.exit_code == 0);
  json out = json::parse(res.out);

  CHECK(out["value"].get<double>() == Catch::Approx(1.0).margin(1e-6));
  CHECK(out["level"] == 1);
  CHECK(out["M"] == 2);
  CHECK(out["status"] == "optimal");
  CHECK(out["blocks"] == json::array({16}));
  CHECK(out["solver"] == "ipm");
  CHECK(out["timings_ms"].contains("assemble"));

  std::string err;
  CHECK(schema_valid(load_schema("result.schema.json"), out, err));
  INFO(err);
  CHECK(err.empty());

  // validator sanity: removing a required field must fail
  json broken = out;
  broken.erase("value");
  CHECK_FALSE(schema_valid(load_schema("result.schema.json"), broken, err));
}

TEST_CASE("channel schema accepts the documented shape and rejects extras") {
  json schema = load_schema("channel.schema.json");
  std::string err;

  json good = {{"name", "custom"},
               {"d_in", 2},
               {"d_out", 2},
               {"kraus", json::array({json::array({json::array({1.0, 0.0}), json::array({0.0, 1.0})})})}};
  // the 2x2 identity written with [re, im] entries
  good["kraus"] = json::array({json::array({
      json::array({json::array({1.0, 0.0}), json::array({0.0, 0.0})}),
      json::array({json::array({0.0, 0.0}), json::array({1.0, 0.0})}),
  })});
  CHECK(schema_valid(schema, good, err));
  INFO(err);

  json extra = good;
  extra["surprise"] = 1;
  CHECK_FALSE(schema_valid(schema, extra, err));

  json both = good;
  both["choi"] = json::array({json::array({1.0})});
  CHECK_FALSE(schema_valid(schema, both, err));  // kraus and choi together violate oneOf
}

TEST_CASE("invalid inputs exit with code 2") {
  CHECK(run_cli("solve --channel identity --level 0").exit_code == 2);
  CHECK(run_cli("verify --suite not_a_suite").exit_code == 2);
  CHECK(run_cli("nonsense_subcommand").exit_code == 2);
  CHECK(run_cli("solve --channel identity --level 1 --solver bogus").exit_code == 2);

  std::string bad = tmp_path("unknown_field.json");
  write_file(bad, R"({"d_in": 2, "d_out": 2, "kraus": [[[1,0],[0,1]]], "extra": 1})");
  CHECK(run_cli("solve --channel " + bad + " --level 1").exit_code == 2);
  std::remove(bad.c_str());
}

TEST_CASE("CPTP violations exit with code 3") {
  std::string bad = tmp_path("not_tp.json");
  write_file(bad, R"({"name": "leaky", "d_in": 2, "d_out": 2, "kraus": [[[1, 0], [0, 0.5]]]})");
  CHECK(run_cli("solve --channel " + bad + " --level 1").exit_code == 3);
  std::remove(bad.c_str());
}

TEST_CASE("solver non-convergence exits with code 4 and still prints a result") {
  auto res = run_cli("solve --channel identity --level 1 --solver admm --max-iter 50");
  CHECK(res.exit_code == 4);
  json out = json::parse(res.out);
  CHECK(out["status"] == "max_iter");
  CHECK(out.contains("value"));
}

TEST_CASE("missing files exit with code 5") {
  CHECK(run_cli("solve --channel /tmp/symfid_no_such_channel.json --level 1").exit_code == 5);
  CHECK(run_cli("export --channel identity --level 1 --out /no_such_dir/x.dat-s").exit_code == 5);
}

TEST_CASE("export writes deterministic bytes plus a consistent manifest") {
  std::string out1 = tmp_path("exp1.dat-s"), out2 = tmp_path("exp2.dat-s");
  REQUIRE(run_cli("export --channel depolarizing --param 0.5 --level 2 --out " + out1).exit_code ==
          0);
  REQUIRE(run_cli("export --channel depolarizing --param 0.5 --level 2 --out " + out2).exit_code ==
          0);
  std::string bytes1 = read_file(out1);
  CHECK(bytes1 == read_file(out2));
  CHECK(bytes1.size() > 1000);

  json manifest = json::parse(read_file(out1 + ".manifest.json"));
  CHECK(manifest["format"] == "sdpa-sparse");
  CHECK(manifest["level"] == 2);
  CHECK(manifest["M"] == 2);
  CHECK(manifest["block_sides"] == json::array({40, 24}));
  CHECK(manifest["channel"]["name"] == "depolarizing");

  // the exported file parses back with matching dimensions
  std::istringstream stream(bytes1);
  auto prob = symfid::parse_sdpa(stream);
  CHECK(prob.num_vars == 2 * manifest["num_params"].get<int>());
  REQUIRE(prob.block_struct.size() == 3);
  CHECK(prob.block_struct[0] == 40);
  CHECK(prob.block_struct[1] == 24);
  CHECK(prob.block_struct[2] < 0);  // trailing diagonal block

  for (const std::string& p : {out1, out2, out1 + ".manifest.json", out2 + ".manifest.json"})
    std::remove(p.c_str());
}

TEST_CASE("config file fills defaults but explicit flags win") {
  std::string cfg = tmp_path("cfg.json");
  write_file(cfg, R"({"channel": "depolarizing", "param": 0.25, "level": 1, "solver": "ipm"})");

  auto from_cfg = run_cli("solve --config " + cfg);
  REQUIRE(from_cfg.exit_code == 0);
  json a = json::parse(from_cfg.out);
  CHECK(a["channel"]["param"].get<double>() == Catch::Approx(0.25));
  CHECK(a["value"].get<double>() < 0.999);

  auto overridden = run_cli("solve --config " + cfg + " --param 0");
  REQUIRE(overridden.exit_code == 0);
  json b = json::parse(overridden.out);
  CHECK(b["channel"]["param"].get<double>() == Catch::Approx(0.0));
  CHECK(b["value"].get<double>() == Catch::Approx(1.0).margin(1e-6));

  std::string bad_cfg = tmp_path("bad_cfg.json");
  write_file(bad_cfg, R"({"mystery_knob": true})");
  CHECK(run_cli("solve --channel identity --level 1 --config " + bad_cfg).exit_code == 2);

  std::remove(cfg.c_str());
  std::remove(bad_cfg.c_str());
}

TEST_CASE("verify subcommand reports suites as JSON") {
  auto res = run_cli("verify --suite combinatorics");
  REQUIRE(res.exit_code == 0);
  json report = json::parse(res.out);
  CHECK(report["passed"] == true);
  REQUIRE(report["suites"].size() == 1);
  CHECK(report["suites"][0]["name"] == "combinatorics");
  CHECK(report["suites"][0]["passed"] == true);
}
