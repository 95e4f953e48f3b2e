#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "popot_cli/experiments.hpp"

using namespace popot;
using namespace popot::cli;

namespace fs = std::filesystem;

namespace {

json renewal_model(double a) {
  return {{"name", "renewal"},
          {"g", {{"type", "constant"}, {"c", 1}}},
          {"d", {{"type", "constant"}, {"value", 1}}},
          {"b", {{"type", "dirac"}, {"value", 0}}},
          {"a", a}};
}

json merge_contract(std::size_t n) {
  return {{"command", "contract"},
          {"model", renewal_model(1.0)},
          {"init", {{"first", {{"type", "dirac"}, {"value", 0}}}, {"second", {{"type", "dirac"}, {"value", 3}}}}},
          {"n_particles", n},
          {"horizon", 2},
          {"checkpoints", 4},
          {"ot_atoms", 50},
          {"seed", 4}};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("popot_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing rejects mistakes with a path") {
  json m = renewal_model(1.0);
  m["bogus"] = 1;
  try {
    parse_model(m, "model", std::nullopt);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("model.bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_law({{"type", "gauss"}}, "law"), ConfigError);
  CHECK_THROWS_AS(parse_rate({{"type", "power"}, {"alpha", 1}}, "d"), ConfigError);
  CHECK_THROWS_AS(parse_model({{"name", "unknown"}}, "model", std::nullopt), ConfigError);
  CHECK(parse_law({{"type", "uniform"}, {"lo", 0}, {"hi", 2}}, "law").mean() == doctest::Approx(1.0));
}

TEST_CASE("automatic truncation") {
  json m = {{"name", "growth_fragmentation"},
            {"g", {{"type", "constant"}, {"c", 1}}},
            {"d", {{"type", "power"}, {"alpha", 1}, {"beta", 1}, {"p", 1}}},
            {"beta", {{"type", "uniform"}, {"lo", 0}, {"hi", 1}}},
            {"a", "auto"}};
  const ModelSpec spec = parse_model(m, "model", std::nullopt);
  CHECK(spec.a_auto);
  CHECK(spec.a == doctest::Approx(0.45).epsilon(0.01));
  REQUIRE(spec.certificate);
  CHECK(spec.certificate->valid);
}

TEST_CASE("validate-a exit codes") {
  CHECK(cmd_validate_a({{"model", renewal_model(1.0)}}, {}).exit_code == 0);
  json linear = renewal_model(1.0);
  linear["d"] = {{"type", "power"}, {"alpha", 0}, {"beta", 1}, {"p", 1}};
  const CommandResult bad = cmd_validate_a({{"model", linear}}, {});
  CHECK(bad.exit_code == 2);
  CHECK(bad.summary.contains("witness"));
  json affine = renewal_model(1.0);
  affine["d"] = {{"type", "power"}, {"alpha", 1}, {"beta", 1}, {"p", 1}};
  CHECK(cmd_validate_a({{"model", affine}}, {}).exit_code == 0);
}

TEST_CASE("contract on identical laws stays at zero") {
  json cfg = merge_contract(2000);
  cfg["init"]["second"] = cfg["init"]["first"];
  const ContractResult r = run_contract(parse_contract(cfg, {}));
  for (const ContractRow& row : r.rows) {
    CHECK(row.exact_ot == 0.0);
    CHECK(row.mean_cost == 0.0);
    CHECK(row.paired_cost == 0.0);
  }
}

TEST_CASE("contract merge law") {
  const ContractResult r = run_contract(parse_contract(merge_contract(20000), {}));
  CHECK(r.passed());
  CHECK(r.initial_ot == doctest::Approx(1.0).epsilon(1e-12));
  for (const ContractRow& row : r.rows) {
    CHECK(std::abs(row.mean_cost - std::exp(-row.time)) <= 3 * row.stderr_cost + 1e-15);
    CHECK(row.exact_ot <= row.paired_cost + 1e-10);
  }
}

TEST_CASE("inadmissible truncation is refused") {
  json cfg = merge_contract(100);
  cfg["model"]["d"] = {{"type", "power"}, {"alpha", 0}, {"beta", 1}, {"p", 1}};
  CHECK(cmd_contract(cfg, {}).exit_code == 2);
}

TEST_CASE("ot command") {
  const fs::path dir = scratch("ot");
  fs::create_directories(dir);
  std::ofstream(dir / "mu.csv") << "x,weight\n0,0.5\n1,0.5\n";
  std::ofstream(dir / "nu.csv") << "0.9,0.5\n10,0.5\n";
  OtOptions o;
  o.mu_file = (dir / "mu.csv").string();
  o.nu_file = (dir / "nu.csv").string();
  o.a = 2.0;
  o.plan = true;
  const CommandResult r = cmd_ot(o);
  CHECK(r.exit_code == 0);
  CHECK(r.summary["cost"].get<double>() == doctest::Approx(1.05).epsilon(1e-12));
  REQUIRE(r.files.size() == 1);
  CHECK(r.files[0].content == "src_index,dst_index,mass\n0,1,0.5\n1,0,0.5\n");
  CHECK(read_atom_csv(o.mu_file).size() == 2);
}

TEST_CASE("outputs are byte-identical across runs") {
  const json cfg = merge_contract(3000);
  std::string first;
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = scratch("repro" + std::to_string(run));
    CommandResult r = cmd_contract(cfg, {});
    write_outputs(dir.string(), r, cfg);
    const std::string text = slurp(dir / "contract.csv") + slurp(dir / "summary.json");
    if (run == 0) first = text;
    else CHECK(text == first);
  }
  CommandResult other = cmd_contract(cfg, Overrides{std::uint64_t{5}, std::nullopt});
  CHECK(other.summary["seed"] == 5);
}

TEST_CASE("formatting and hashes") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0) == "1");
  CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(config_hash({{"a", 1}}).size() == 64);
  CHECK(config_hash({{"a", 1}}) != config_hash({{"a", 2}}));
}
