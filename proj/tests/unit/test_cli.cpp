#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "addyn/commands.hpp"
#include "addyn/config.hpp"
#include "addyn/errors.hpp"
#include "addyn/fitness.hpp"

using namespace addyn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("addyn_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int run(const std::string& cmd, const std::string& ini, const fs::path& out,
        std::string* stdout_text = nullptr, std::string* stderr_text = nullptr) {
  CommandOptions opt;
  opt.out = out.string();
  std::ostringstream o, e;
  const int code = run_command(cmd, parse_config(ini), opt, o, e);
  if (stdout_text) {
    *stdout_text = o.str();
  }
  if (stderr_text) {
    *stderr_text = e.str();
  }
  return code;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config("[model]\nsigma_alpha = 0.7\nK = 200\n[run]\nseed = 4\n");
  CHECK(cfg.get_double("model.sigma_alpha", 0) == 0.7);
  CHECK(cfg.get_int("model.K", 0) == 200);
  CHECK(cfg.get_int("run.replicates", 3) == 3);
  CHECK_THROWS_AS(parse_config("[model]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nowhere]\nseed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[model\nK = 1\n"), ConfigError);
  CHECK_THROWS_AS(cfg.get_int("model.sigma_alpha", 0), ConfigError);
  CHECK_THROWS_AS(build_model(parse_config("[model]\nfamily = nothing\n")), ConfigError);

  const auto reordered = parse_config("[run]\nseed = 4\n[model]\nK = 200\nsigma_alpha = 0.7\n");
  CHECK(cfg.hash() == reordered.hash());
  CHECK(cfg.hash().size() == 16);
  CHECK(cfg.hash() != parse_config("[model]\nsigma_alpha = 0.7\nK = 201\n[run]\nseed = 4\n").hash());

  const auto m = build_model(cfg);
  CHECK(m.carrying_scale == 200);
  CHECK(m.competition(0.0, 0.7) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
}

TEST_CASE("custom family from tables") {
  const auto dir = scratch("tables");
  const int n = 81;
  std::ofstream lam(dir / "lambda.csv"), mu(dir / "mu.csv"), alpha(dir / "alpha.csv");
  lam << "x,value\n";
  mu << "x,value\n";
  alpha << "x,y,value\n";
  lam.precision(17);
  alpha.precision(17);
  for (int i = 0; i < n; ++i) {
    const double x = -2.0 + 4.0 * i / (n - 1);
    lam << x << ',' << std::exp(-x * x / 1.62) << '\n';
    mu << x << ",0\n";
    for (int j = 0; j < n; ++j) {
      const double y = -2.0 + 4.0 * j / (n - 1);
      alpha << x << ',' << y << ',' << std::exp(-(x - y) * (x - y) / 2) << '\n';
    }
  }
  lam.close();
  mu.close();
  alpha.close();
  std::ofstream ini(dir / "run.ini");
  ini << "[model]\nfamily = custom\nlambda_table = lambda.csv\nmu_table = mu.csv\n"
         "alpha_table = alpha.csv\nsigma = 0.05\n";
  ini.close();
  const auto m = build_model(load_config((dir / "run.ini").string()));
  CHECK(m.space.lower == doctest::Approx(-2.0));
  CHECK(m.space.upper == doctest::Approx(2.0));
  CHECK(std::abs(m.birth(0.33) - std::exp(-0.33 * 0.33 / 1.62)) < 1e-4);
  CHECK(std::abs(monomorphic_equilibrium(m, -1.0) - std::exp(-1.0 / 1.62)) < 1e-4);

  std::ofstream bad(dir / "bad.ini");
  bad << "[model]\nfamily = custom\nlambda_table = lambda.csv\n";
  bad.close();
  CommandOptions opt;
  opt.config_path = (dir / "bad.ini").string();
  std::ostringstream o, e;
  CHECK(run_command("analyze", opt, o, e) == 2);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  std::ostringstream o, e;
  CommandOptions opt;
  opt.config_path = (dir / "missing.ini").string();
  CHECK(run_command("analyze", opt, o, e) == 2);
  CHECK(run("no-such-command", "[model]\n", dir) == 2);
  CHECK(run("simulate-ibm", "[model]\nK = 0\n", dir) == 2);

#ifdef ADDYN_CLI_PATH
  std::ofstream(dir / "bad.ini") << "[model]\nwhat = 1\n";
  const std::string cmd = std::string(ADDYN_CLI_PATH) + " analyze -c " + (dir / "bad.ini").string() +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 2);
  const std::string none = std::string(ADDYN_CLI_PATH) + " > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(none.c_str())) == 2);
#endif
}

TEST_CASE("small ibm runs are fast and reproducible") {
  const std::string ini =
      "[model]\nK = 50\nsigma = 0.05\n[run]\nseed = 3\nreplicates = 3\n"
      "[simulate-ibm]\nt_end = 20\nsnapshots = 20\nlog_events = true\n";
  const auto a = scratch("ibm_a"), b = scratch("ibm_b"), c = scratch("ibm_c");
  const auto start = std::chrono::steady_clock::now();
  REQUIRE(run("simulate-ibm", ini, a) == 0);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(secs < 1.0);
  REQUIRE(run("simulate-ibm", ini, b) == 0);
  CommandOptions opt;
  opt.out = c.string();
  opt.workers = 3;
  std::ostringstream o, e;
  REQUIRE(run_command("simulate-ibm", parse_config(ini), opt, o, e) == 0);
  for (const auto& name : {"ibm_rep0.csv", "ibm_rep2.csv", "summary.json", "ibm_rep1.events.ndjson"}) {
    REQUIRE(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
    CHECK(slurp(a / name) == slurp(c / name));
  }
  const auto csv = slurp(a / "ibm_rep0.csv");
  CHECK(csv.rfind("# addyn ", 0) == 0);
  CHECK(csv.find("config_hash=" + parse_config(ini).hash()) != std::string::npos);
  const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
  CHECK(summary.contains("header"));
}

TEST_CASE("scaling advisory is printed as a warning") {
  const auto dir = scratch("advisory");
  std::string err;
  REQUIRE(run("simulate-ibm", "[model]\nK = 50\n[simulate-ibm]\nt_end = 1\n", dir, nullptr, &err) ==
          0);
  CHECK(err.find("warning:") != std::string::npos);

  GaussianExampleParams gp;
  gp.K = 1000;
  gp.u_K = 1e-6;
  CHECK_FALSE(scaling_advisory(make_gaussian_example(gp)));
  gp.u_K = 1.0;
  CHECK(scaling_advisory(make_gaussian_example(gp)));
}

TEST_CASE("gap clusters and headers") {
  PopulationState s;
  s.K = 10;
  s.add(-0.5, 2);
  s.add(-0.45, 2);
  s.add(0.3, 6);
  const auto c = gap_clusters(s, 0.1);
  REQUIRE(c.size() == 2);
  CHECK(c[0].lo == -0.5);
  CHECK(c[0].hi == -0.45);
  CHECK(c[0].mean == doctest::Approx(-0.475));
  CHECK(c[0].mass == doctest::Approx(0.4));
  CHECK(c[1].mass == doctest::Approx(0.6));
  CHECK(gap_clusters(s, 1.0).size() == 1);
  CHECK(gap_clusters(PopulationState{}, 0.1).empty());

  CHECK(output_header("pip", "abc", 7) == "# addyn 0.1.0 format=pip config_hash=abc seed=7");

  std::vector<int> hits(50, 0);
  parallel_for(50, 4, [&](int i) { hits[i] += 1; });
  for (int h : hits) {
    CHECK(h == 1);
  }
  CHECK_THROWS(parallel_for(5, 2, [](int i) {
    if (i == 3) {
      throw DomainError("boom");
    }
  }));
}

TEST_CASE("analyze verdicts") {
  const auto dir = scratch("analyze");
  std::string text;
  REQUIRE(run("analyze", "[model]\nsigma_alpha = 0.7\n", dir, &text) == 0);
  auto j = nlohmann::json::parse(text);
  CHECK(j["verdict"] == "branching");
  CHECK(fs::exists(dir / "analyze.json"));
  REQUIRE(run("analyze", "[model]\nsigma_alpha = 1.0\n", dir, &text) == 0);
  j = nlohmann::json::parse(text);
  CHECK(j["verdict"] == "attracting_no_branching");
  REQUIRE(j["singularities"].size() == 1);
  CHECK(std::abs(j["singularities"][0]["x_star"].get<double>()) < 1e-9);
}

TEST_CASE("other commands write their outputs") {
  const auto dir = scratch("others");
  const std::string base = "[model]\nsigma_alpha = 0.7\nsigma = 0.3\nepsilon = 0.1\n";
  CHECK(run("canonical", base + "[canonical]\nt_end = 50\nsamples = 10\n", dir) == 0);
  CHECK(fs::exists(dir / "canonical.csv"));
  CHECK(run("pip", base + "[pip]\nresolution = 21\n", dir) == 0);
  CHECK(fs::exists(dir / "pip.csv"));
  const auto pj = nlohmann::json::parse(slurp(dir / "pip.json"));
  CHECK(pj.contains("boundary_slopes"));
  CHECK(run("simulate-pes", base + "[simulate-pes]\nt_end = 50\n", dir) == 0);
  CHECK(fs::exists(dir / "pes_rep0.ndjson"));
  const auto bj = nlohmann::json::parse(slurp(dir / "branching.json"));
  CHECK(bj.contains("branching_fraction"));
  CHECK(run("simulate-tss", base + "[simulate-tss]\nt_end = 10\nsamples = 10\n", dir) == 0);
  CHECK(fs::exists(dir / "tss_mean.csv"));
  CHECK(run("simulate-pes", base + "[simulate-pes]\nvariant = odd\n", dir) == 2);
}
