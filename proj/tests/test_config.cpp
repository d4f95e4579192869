#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "spiral/cli_runner.hpp"
#include "spiral/config.hpp"

using namespace spiral;
using namespace spiral::config;

namespace {

std::string repo_path(const std::string& rel) {
  return std::string(SPIRAL_SOURCE_DIR) + "/" + rel;
}

}  // namespace

TEST_CASE("map spec round-trips through the echo form") {
  for (const char* name : {"configs/eb_map.json", "configs/eb_revisited.json",
                           "configs/example1.json", "configs/example4.json",
                           "configs/example5.json"}) {
    const json original = load_json(repo_path(name));
    const auto spec = parse_map_spec(original);
    const json echo = map_spec_to_json(spec);
    const auto spec2 = parse_map_spec(echo);
    CHECK(map_spec_to_json(spec2) == echo);
    CHECK(spec2.xi.x == spec.xi.x);
    CHECK(spec2.field_origin.component(0) == spec.field_origin.component(0));
    CHECK(spec2.field_xi.component(1) == spec.field_xi.component(1));
    CHECK(spec2.has_general_parts() == spec.has_general_parts());
  }
}

TEST_CASE("rd model round-trips") {
  for (const char* name : {"configs/fhnm4.json", "configs/mom_homotopy.json",
                           "configs/fhn_single_bell.json"}) {
    const json original = load_json(repo_path(name));
    const auto model = parse_rd_model(original);
    const json echo = rd_model_to_json(model);
    const auto model2 = parse_rd_model(echo);
    CHECK(rd_model_to_json(model2) == echo);
    CHECK(model2.bells.size() == model.bells.size());
  }
}

TEST_CASE("center bundle round-trips") {
  const json original = load_json(repo_path("configs/cb_wedge.json"));
  const auto sys = parse_bundle_system(original);
  const json echo = bundle_system_to_json(sys);
  const auto sys2 = parse_bundle_system(echo);
  CHECK(bundle_system_to_json(sys2) == echo);
  CHECK(sys2.centers == sys.centers);
  CHECK(sys2.lambda == sys.lambda);
}

TEST_CASE("digest is deterministic and content-sensitive") {
  const json a = {{"x", 1.25}, {"y", "z"}};
  const json b = {{"x", 1.25}, {"y", "z"}};
  const json c = {{"x", 1.26}, {"y", "z"}};
  CHECK(digest(a) == digest(b));
  CHECK(digest(a) != digest(c));
}

TEST_CASE("config errors carry key context") {
  SUBCASE("missing map") {
    CHECK_THROWS_WITH_AS(parse_map_spec(json::object()), "config: missing 'map'",
                         ConfigError);
  }
  SUBCASE("identically zero origin field is rejected") {
    json j = load_json(repo_path("configs/eb_map.json"));
    j["map"]["f"]["a"] = json::object();
    j["map"]["f"]["b"] = json::object();
    CHECK_THROWS_AS(parse_map_spec(j), ConfigError);
  }
  SUBCASE("origin field must vanish at 0") {
    json j = load_json(repo_path("configs/eb_map.json"));
    j["map"]["f"]["a"]["00"] = 0.5;
    CHECK_THROWS_AS(parse_map_spec(j), ConfigError);
  }
  SUBCASE("bad exponent key") {
    json j = load_json(repo_path("configs/eb_map.json"));
    j["map"]["f"]["a"]["abc"] = 1.0;
    CHECK_THROWS_AS(parse_map_spec(j), ConfigError);
  }
  SUBCASE("bell without width or rate") {
    json j = load_json(repo_path("configs/fhnm4.json"));
    j["model"]["bells"][0].erase("rate");
    CHECK_THROWS_AS(parse_rd_model(j), ConfigError);
  }
}

TEST_CASE("width and extended exponent keys parse") {
  json j = load_json(repo_path("configs/mom_homotopy.json"));
  const auto model = parse_rd_model(j);
  CHECK(model.bells[0].rate == doctest::Approx(-0.25));  // width 2 -> rate -1/4

  json m = load_json(repo_path("configs/eb_map.json"));
  m["map"]["f"]["a"]["10,2"] = 0.001;
  const auto spec = parse_map_spec(m);
  CHECK(spec.field_origin.component(0).at({10, 2}) == doctest::Approx(0.001));
}

TEST_CASE("cli echo files re-parse identically") {
  const std::string out = "/tmp/spiral_test_echo";
  cli::RunOptions opts;
  opts.config_path = repo_path("configs/cb_linear.json");
  opts.out_dir = out;
  REQUIRE(cli::run_centerbundle(opts) == cli::kExitOk);

  const json echo = load_json(out + "/config_echo.json");
  const auto sys = parse_bundle_system(echo);
  CHECK(bundle_system_to_json(sys)["system"] == echo["system"]);
}

TEST_CASE("identical configs give byte-identical outputs") {
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  cli::RunOptions opts;
  opts.config_path = repo_path("configs/example3.json");
  opts.out_dir = "/tmp/spiral_det_a";
  opts.workers = 1;
  REQUIRE(cli::run_levelset(opts) == cli::kExitOk);
  opts.out_dir = "/tmp/spiral_det_b";
  opts.workers = 2;
  REQUIRE(cli::run_levelset(opts) == cli::kExitOk);
  for (const char* name : {"/kappa.csv", "/fold1.csv", "/candidates.csv"}) {
    CHECK(slurp("/tmp/spiral_det_a" + std::string(name)) ==
          slurp("/tmp/spiral_det_b" + std::string(name)));
  }
}

TEST_CASE("cli exit codes") {
  cli::RunOptions opts;
  opts.out_dir = "/tmp/spiral_test_exit";

  SUBCASE("missing config file") {
    opts.config_path = repo_path("configs/does_not_exist.json");
    CHECK(cli::run_levelset(opts) == cli::kExitConfigError);
  }
  SUBCASE("non-hyperbolic center bundle run") {
    opts.config_path = repo_path("configs/cb_zero_lambda.json");
    CHECK(cli::run_centerbundle(opts) == cli::kExitNumericalError);
  }
}
