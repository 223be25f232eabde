#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "cli_support.hpp"
#include "darklattice/config.hpp"

using namespace darklattice;
namespace fs = std::filesystem;

namespace {

bool has_diag(const std::vector<std::string>& d, const std::string& needle) {
  return std::any_of(d.begin(), d.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("defaults validate for every experiment") {
  for (const auto& exp : experiment_kinds()) {
    const json c = default_config(exp);
    CHECK_MESSAGE(validate_config(c).empty(), exp);
  }
}

TEST_CASE("diagnostics name the offending key") {
  json c = default_config("retrieve");
  c["dynamics"]["dt"] = -0.1;
  auto d = validate_config(c);
  CHECK(has_diag(d, "dynamics.dt must be positive"));

  c = default_config("retrieve");
  c["pattern"]["params"] = json::parse("[[2.0, 0.5]]");
  d = validate_config(c);
  REQUIRE(d.size() == 1);
  CHECK(d[0].find("pattern.params[0]") != std::string::npos);
  CHECK(d[0].find("real") != std::string::npos);

  c = default_config("steer");
  c["pattern"] = json::parse(R"({"kind": "custom", "period": [4, 1],
      "components": [{"q": [1, 0], "amplitude": [0.0, 1.0]}, {"q": [3, 0], "amplitude": [0.0, 1.0]}]})");
  d = validate_config(c);
  CHECK(!d.empty());
  CHECK(has_diag(d, "pattern"));

  c = default_config("bands");
  c["lattice"]["spacnig"] = 0.2;
  CHECK(has_diag(validate_config(c), "lattice.spacnig"));

  c = default_config("bands");
  c["experiment"] = "fly";
  CHECK(has_diag(validate_config(c), "experiment"));
}

TEST_CASE("config hash ignores output plumbing") {
  json a = default_config("bands");
  json b = a;
  b["output"]["dir"] = "/elsewhere";
  b["threads"] = 7;
  CHECK(config_hash(a) == config_hash(b));
  b["lattice"]["spacing"] = 0.25;
  CHECK(config_hash(a) != config_hash(b));
  json m = default_config("bands");
  merge_config(m, json::parse(R"({"lattice": {"nx": 5}})"));
  CHECK(m["lattice"]["nx"] == 5);
  CHECK(m["lattice"]["ny"] == 21);
}

TEST_CASE("exit code mapping") {
  CHECK(exit_code_for(ErrorKind::invalid_input) == 2);
  CHECK(exit_code_for(ErrorKind::domain) == 2);
  CHECK(exit_code_for(ErrorKind::instability) == 3);
  CHECK(exit_code_for(ErrorKind::infeasible) == 4);
  CHECK(exit_code_for(ErrorKind::consistency) == 5);
}

TEST_CASE("bands run writes hashed CSV and JSON") {
  const fs::path dir = cli_support::fresh_dir("bands");
  const auto r = cli_support::run("bands --spacing 0.2 --path \"M',G,X',M'\" --samples 8 --truncation 40 --output-dir " +
                                  dir.string());
  REQUIRE_MESSAGE(r.code == 0, r.out);
  const fs::path csv = cli_support::only_file(dir, ".csv");
  const fs::path js = cli_support::only_file(dir, ".json");
  REQUIRE(!csv.empty());
  REQUIRE(!js.empty());
  CHECK(csv.stem() == js.stem());
  CHECK(csv.filename().string().rfind("bands-", 0) == 0);
  const std::string text = cli_support::slurp(csv);
  const std::string hash = csv.stem().string().substr(6);
  CHECK(text.rfind("# config-hash: " + hash + "\r\n", 0) == 0);
  CHECK(text.find("k_path_fraction,kx,ky,branch_index,shift,decay") != std::string::npos);
  const json summary = json::parse(cli_support::slurp(js));
  CHECK(summary["experiment"] == "bands");
  CHECK(summary["config_hash"] == hash);
}

TEST_CASE("dry run resolves without computing") {
  const fs::path dir = cli_support::fresh_dir("dry");
  const auto r = cli_support::run("retrieve --dry-run --nx 9 --ny 9 --waist 3 --output-dir " + dir.string());
  REQUIRE_MESSAGE(r.code == 0, r.out);
  const json out = json::parse(r.out);
  CHECK(out["config"]["lattice"]["nx"] == 9);
  CHECK(out["config"]["mode"]["waist"] == 3.0);
  CHECK(out["diagnostics"].empty());
  CHECK(fs::is_empty(dir));
  for (const auto& exp : experiment_kinds()) CHECK_MESSAGE(cli_support::run(exp + " --dry-run").code == 0, exp);
}

TEST_CASE("validation and infeasible targets map to exit codes") {
  auto r = cli_support::run("retrieve --dt -1 --dry-run");
  CHECK(r.code == 2);
  CHECK(r.out.find("dynamics.dt must be positive") != std::string::npos);
  r = cli_support::run("retrieve --dt 0.05");
  CHECK(r.code == 2);
  r = cli_support::run("spectrum --params \"[[1, 1]]\"");
  CHECK(r.code == 2);
  CHECK(r.out.find("\"kind\":\"invalid-input\"") != std::string::npos);

  const fs::path dir = cli_support::fresh_dir("shape");
  r = cli_support::run("shape --nx 5 --ny 5 --total 1.2 --output-dir " + dir.string());
  CHECK(r.code == 4);
  const json err = json::parse(r.out.substr(r.out.find('{')));
  CHECK(err["error"]["kind"] == "infeasible-target");
  CHECK(err["error"]["exit_code"] == 4);

  r = cli_support::run("nonsense");
  CHECK(r.code == 2);
}

TEST_CASE("validate subcommand") {
  const fs::path dir = cli_support::fresh_dir("validate");
  {
    std::ofstream f(dir / "bad.json");
    f << R"({"experiment": "retrieve", "dynamics": {"dt": -1}, "pattern": {"kind": "period4_x",
           "params": [1.0, [0.5, 0.5], [0.2, 0.3]]}})";
    std::ofstream g(dir / "good.json");
    g << R"({"experiment": "bands", "lattice": {"spacing": 0.2}})";
  }
  auto r = cli_support::run("validate --config " + (dir / "bad.json").string());
  CHECK(r.code == 2);
  CHECK(r.out.find("dynamics.dt must be positive") != std::string::npos);
  CHECK(r.out.find("pattern.params[2]") != std::string::npos);
  r = cli_support::run("validate --config " + (dir / "good.json").string());
  CHECK(r.code == 0);
  CHECK(r.out.rfind("ok ", 0) == 0);
}

TEST_CASE("small retrieval sweep through the runner") {
  json c = default_config("retrieve");
  c["lattice"]["nx"] = 7;
  c["lattice"]["ny"] = 7;
  c["sweep"] = {{"parameter", "waist"}, {"values", {2.0, 3.0}}};
  const fs::path dir = cli_support::fresh_dir("runner");
  c["output"]["dir"] = dir.string();
  const RunOutput out = run_experiment(c);
  CHECK(fs::exists(out.csv_path));
  CHECK(out.summary["results"].is_object());
  const std::string text = cli_support::slurp(out.csv_path);
  CHECK(std::count(text.begin(), text.end(), '\n') >= 4);
}
