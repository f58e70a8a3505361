#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "specgeo/error.hpp"
#include "specgeo/harness.hpp"
#include "specgeo/spectrum.hpp"

using namespace specgeo;
namespace fs = std::filesystem;

namespace {

const std::vector<double> kCp1 = closed_form_spectrum({ClosedFormShape::Kind::cpm, 1.0, 1.0, 1}, 16);

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "specgeo_test_harness";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Cheap but complete: one Euclidean shape and one curve.
nlohmann::json small_suite(const std::string& output) {
  auto j = nlohmann::json::parse(R"js({
    "seed": 11,
    "budgets": {"n_grassmann": 8, "stab_budget": 32, "crofton_samples": 2000, "crofton_frames": 2,
                "projection_samples": 8, "projection_resolution": 64, "max_centers": 64, "growth_radii": 6},
    "experiments": [
      {"name": "circle", "shape": "circle(64)", "k_max": 6},
      {"name": "identity", "kind": "cpn", "curve": "identity", "subdiv": 2, "k_max": 6}
    ]
  })js");
  j["output"] = output;
  return j;
}

fs::path write_config(const std::string& name, const nlohmann::json& j) {
  const auto p = scratch(name);
  std::ofstream(p) << j.dump(2);
  return p;
}

}  // namespace

TEST_CASE("Cheng-Yang recursion") {
  for (int n : {1, 2, 3}) {
    const auto steps = cheng_yang_bound({1.0, 1.0 + 4.0 / n}, n);
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].hypothesis_holds);
    CHECK(steps[0].hypothesis_lhs == doctest::Approx(steps[0].hypothesis_rhs).epsilon(1e-12));
    CHECK(steps[0].bound == doctest::Approx(steps[0].mu_next).epsilon(1e-12));
  }

  std::vector<double> mu(kCp1.begin(), kCp1.begin() + 6);
  for (auto& v : mu) v += 4.0;
  const auto cp = cheng_yang_bound(mu, 2);
  CHECK(cp[0].bound == 12.0);
  CHECK(cp[0].mu_next == 12.0);
  CHECK(cp[0].hypothesis_holds);
  for (const auto& st : cp) CHECK(st.mu_next <= st.bound * (1 + 1e-12));

  const auto flat = cheng_yang_bound(std::vector<double>(5, 3.0), 2);
  for (const auto& st : flat) {
    CHECK(st.hypothesis_holds);
    CHECK(st.hypothesis_lhs == 0.0);
    CHECK(st.bound >= 3.0);
  }

  CHECK_THROWS_AS(cheng_yang_bound({2.0, 1.0}, 2), Error);
  CHECK_THROWS_AS(cheng_yang_bound({0.0, 1.0}, 2), Error);
  CHECK_THROWS_AS(cheng_yang_bound({1.0, 2.0}, 0), Error);
}

TEST_CASE("universal inequality on the closed-form CP1 spectrum") {
  const auto [l1, r1] = universal_inequality_sides(kCp1, 1, 1);
  CHECK(l1 == 64.0);
  CHECK(r1 == 64.0);
  const auto [l4, r4] = universal_inequality_sides(kCp1, 1, 4);
  CHECK(l4 == 1344.0);
  CHECK(r4 == 1344.0);
  CHECK(universal_inequality_residual(kCp1, 1, 1) == 0.0);
  CHECK(universal_inequality_residual(kCp1, 1, 4) == 0.0);
  for (int k = 1; k <= 15; ++k) CHECK(universal_inequality_residual(kCp1, 1, k) >= -1e-9);

  // A repeated top eigenvalue leaves a zero term but a defined residual.
  CHECK(std::isfinite(universal_inequality_residual({0, 8, 8, 8}, 1, 2)));
  CHECK_THROWS_AS(universal_inequality_residual(kCp1, 1, 0), Error);
  CHECK_THROWS_AS(universal_inequality_residual({0, 8}, 1, 2), Error);
  CHECK_THROWS_AS(universal_inequality_residual({0, 8, 2}, 1, 2), Error);
}

TEST_CASE("report verdicts") {
  const auto ok = asserted("f", "thm-1.2", 1, 8.1, 8.0, 0.02, {}, {});
  CHECK(ok.verdict == Verdict::holds);
  CHECK(ok.slack == doctest::Approx(-0.1));
  CHECK(asserted("f", "thm-1.2", 1, 8.2, 8.0, 0.02, {}, {}).verdict == Verdict::violated);
  CHECK(asserted("f", "cor-2.6", 1, 1.0, 1.0, 0.0, {}, {}).verdict == Verdict::holds);

  const auto r = ratio("f", "cde-ratio", 3, 0.7, {}, {});
  CHECK(r.verdict == Verdict::ratio_only);
  CHECK_FALSE(r.rhs);
  CHECK(to_string(r.verdict) == "ratio-only");

  CHECK_THROWS_AS(asserted("f", "cde-ratio", 1, 1, 2, 0, {}, {}), Error);
  CHECK_THROWS_AS(asserted("f", "no-such-id", 1, 1, 2, 0, {}, {}), Error);
  CHECK_THROWS_AS(asserted("f", "thm-1.2", 1, std::nan(""), 2, 0, {}, {}), Error);
  CHECK_THROWS_AS(ratio("f", "thm-1.2", 1, 1, {}, {}), Error);

  std::set<std::string> ratio_ids;
  for (const auto& id : inequality_ids())
    if (is_ratio_only(id)) ratio_ids.insert(id);
  CHECK(ratio_ids == std::set<std::string>{"cde-ratio", "ehi-ratio", "normalized-cpn"});
}

TEST_CASE("reports round trip through JSON") {
  Provenance prov;
  prov.seed = 7;
  prov.mesh = "sphere(2)";
  prov.vertices = 162;
  prov.simplices = 320;
  prov.samples = {{"n_grassmann", 16}};
  const auto a = asserted("sphere", "cor-2.6", 4, 6.0, 1e5, 0.0, {{"N", 36}, {"rho", INFINITY}}, prov);
  const auto b = report_from_json(nlohmann::json::parse(to_json(a).dump()));
  CHECK(b.fixture == a.fixture);
  CHECK(b.inequality_id == a.inequality_id);
  CHECK(b.k == a.k);
  CHECK(b.lhs == a.lhs);
  CHECK(b.rhs == a.rhs);
  CHECK(b.verdict == a.verdict);
  CHECK(b.provenance.mesh == "sphere(2)");
  CHECK(std::isinf(b.constants.at(1).second));

  const auto c = report_from_json(nlohmann::json::parse(to_json(ratio("x", "normalized-cpn", 2, 0.3, {}, {})).dump()));
  CHECK_FALSE(c.rhs);
  CHECK(c.verdict == Verdict::ratio_only);
}

TEST_CASE("config parsing") {
  const auto suite = parse_suite_config(small_suite("out.jsonl"));
  REQUIRE(suite.experiments.size() == 2);
  CHECK(suite.seed == 11);
  CHECK(suite.experiments[0].seed == 11);
  CHECK(suite.experiments[0].budgets.n_grassmann == 8);
  CHECK(suite.experiments[0].budgets.covering_radii == Budgets{}.covering_radii);
  CHECK(suite.experiments[1].kind == ExperimentConfig::Kind::cpn);
  CHECK(suite.format == ReportFormat::json_lines);

  auto no_seed = small_suite("x");
  no_seed.erase("seed");
  CHECK_THROWS_AS(parse_suite_config(no_seed), ConfigError);
  auto bad_key = small_suite("x");
  bad_key["experiments"][0]["colour"] = "red";
  CHECK_THROWS_AS(parse_suite_config(bad_key), ConfigError);
  auto zero_budget = small_suite("x");
  zero_budget["budgets"]["stab_budget"] = 0;
  CHECK_THROWS_AS(parse_suite_config(zero_budget), ConfigError);
  auto bad_eps = small_suite("x");
  bad_eps["experiments"][0]["eps"] = 1.0;
  CHECK_THROWS_AS(parse_suite_config(bad_eps), ConfigError);
  auto dup = small_suite("x");
  dup["experiments"][1]["name"] = "circle";
  CHECK_THROWS_AS(parse_suite_config(dup), ConfigError);
  auto kind = small_suite("x");
  kind["experiments"][0]["kind"] = "hyperbolic";
  CHECK_THROWS_AS(parse_suite_config(kind), ConfigError);
  CHECK_THROWS_AS(parse_suite_config(nlohmann::json::parse(R"({"seed": 1, "experiments": []})")), ConfigError);
  CHECK_THROWS_AS(parse_report_format("xml"), Error);
  CHECK(parse_metric("graph-geodesic") == Metric::graph_geodesic);
}

TEST_CASE("curve specs") {
  CHECK(curve_degree(parse_curve_spec("identity")) == 1);
  CHECK(curve_degree(parse_curve_spec("veronese")) == 2);
  CHECK(curve_degree(parse_curve_spec("rnc(4)")) == 4);
  const auto c = parse_curve_spec(nlohmann::json::parse("[[1], [0, [0, 2]]]"));
  CHECK(curve_degree(c) == 1);
  CHECK(fs_density(c, 0.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(parse_curve_spec("rnc(x)"), ConfigError);
  CHECK_THROWS_AS(parse_curve_spec("conic"), ConfigError);
  CHECK_THROWS_AS(parse_curve_spec(nlohmann::json::parse("[[1], [0, \"z\"]]")), ConfigError);
}

TEST_CASE("suite reports are complete, sound and deterministic") {
  const auto suite = parse_suite_config(small_suite("unused"));
  const auto a = run_suite(suite);
  const auto b = run_suite(suite);
  CHECK(serialize(a, ReportFormat::json_lines) == serialize(b, ReportFormat::json_lines));

  std::set<std::string> ids;
  for (const auto& r : a) {
    ids.insert(r.inequality_id);
    CHECK_MESSAGE(r.verdict != Verdict::violated, r.fixture << " " << r.inequality_id << " k=" << r.k);
  }
  // The circle is a hypersurface of R^2, so every id shows up.
  CHECK(ids == std::set<std::string>(inequality_ids().begin(), inequality_ids().end()));

  const auto csv = serialize(a, ReportFormat::csv);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line.rfind("fixture,inequality_id,k,", 0) == 0);
  std::set<std::string> keys;
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    std::istringstream cells(line);
    std::string fixture, id, k;
    std::getline(cells, fixture, ',');
    std::getline(cells, id, ',');
    std::getline(cells, k, ',');
    CHECK(keys.insert(fixture + "/" + id + "/" + k).second);
  }
  CHECK(rows == a.size());
}

TEST_CASE("run writes identical files and fails cleanly") {
  const auto out1 = scratch("run1.jsonl"), out2 = scratch("run2.jsonl");
  fs::remove(out1);
  fs::remove(out2);
  const auto cfg = write_config("suite.json", small_suite(out1.string()));
  std::ostringstream log;
  CHECK(run(cfg.string(), std::nullopt, log) == kExitOk);
  CHECK(run(cfg.string(), out2.string(), log) == kExitOk);
  CHECK(slurp(out1) == slurp(out2));
  CHECK_FALSE(fs::exists(out1.string() + ".tmp"));

  auto bad = small_suite(scratch("bad.jsonl").string());
  bad["experiments"][1]["shape"] = "dodecahedron(2)";
  bad["experiments"][1]["kind"] = "euclidean";
  bad["experiments"][1].erase("curve");
  fs::remove(scratch("bad.jsonl"));
  const auto bad_cfg = write_config("bad.json", bad);
  CHECK(run(bad_cfg.string(), std::nullopt, log) == kExitError);
  CHECK_FALSE(fs::exists(scratch("bad.jsonl")));
  CHECK_FALSE(fs::exists(scratch("bad.jsonl.tmp")));
  CHECK(run(scratch("missing.json").string(), std::nullopt, log) == kExitError);
}

TEST_CASE("command line") {
  const char* cli = std::getenv("SPECGEO_CLI");
  if (!cli) {
    MESSAGE("SPECGEO_CLI not set; skipping");
    return;
  }
  const auto quiet = " > " + scratch("cli.log").string() + " 2>&1";
  const auto out = scratch("cli_cpn.csv");
  fs::remove(out);
  const std::string cmd = std::string(cli) + " verify-cpn --curve veronese --subdiv 2 --k 5 --seed 3 --format csv --out " +
                          out.string() + quiet;
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(slurp(out).rfind("fixture,inequality_id", 0) == 0);

  const auto rout = scratch("cli_bad.jsonl");
  fs::remove(rout);
  auto bad = small_suite(rout.string());
  bad["experiments"][0]["shape"] = "klein_bottle(8)";
  const auto bad_cfg = write_config("cli_bad.json", bad);
  CHECK(std::system((std::string(cli) + " report --config " + bad_cfg.string() + quiet).c_str()) != 0);
  CHECK_FALSE(fs::exists(rout));
  CHECK(std::system((std::string(cli) + " spectrum --shape 'circle(64)' --k 3" + quiet).c_str()) == 0);
  CHECK(std::system((std::string(cli) + " spectrum --shape nonsense" + quiet).c_str()) != 0);
}
