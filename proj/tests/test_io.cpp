#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "contagion/config.hpp"
#include "contagion/csv_io.hpp"
#include "contagion/errors.hpp"
#include "contagion/numerics.hpp"
#include "contagion/process.hpp"
#include "contagion/optimizer.hpp"
#include "contagion/runner.hpp"
#include "contagion/stats.hpp"
#include "test_helpers.hpp"

using namespace contagion;
using namespace contagion::testing;

namespace fs = std::filesystem;

namespace {

const char* kBaseConfig = R"(
[model]
alpha = 4.0
beta = 1.0
lambda0 = 1.0
rho = 0.5
r = 0.0
eta = 3.0
horizon = 1.0
claim_dist = uniform 0 1
ext_dist = uniform 0 1
self_excitation = linear 1.0

[contract]
kind = proportional

[premium]
kind = evp
theta_i = 0.1
theta_r = 0.5

[grids]
t_points = 4
lambda_min = 1.0
lambda_max = 2.5
lambda_points = 3
n_paths = 400
master_seed = 42

[run]
sim_paths = 2
timechange_min_claims = 400
policy_u = 0.5
)";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("contagion_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string write_config(const TempDir& dir, const std::string& text) {
  const fs::path p = dir.path / "scenario.cfg";
  std::ofstream out(p, std::ios::binary);
  out << text;
  return p.string();
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("full round trip of the base config") {
    const auto cfg = parse_scenario_text(kBaseConfig);
    CHECK(cfg.model.alpha == 4.0);
    CHECK(cfg.model.eta == 3.0);
    CHECK(cfg.model.excitation.form() == SelfExcitation::Form::Linear);
    CHECK(cfg.contract.kind() == RetentionContract::Kind::Proportional);
    CHECK(cfg.principle.kind == PremiumPrinciple::Kind::EVP);
    CHECK(cfg.t_points == 4);
    CHECK(cfg.master_seed == 42);
    CHECK(cfg.policy_u == 0.5);
    CHECK(cfg.t_grid().front() == 0.0);
    CHECK(cfg.t_grid().back() == 1.0);
  }

  SUBCASE("unknown keys are rejected by name") {
    std::string text = kBaseConfig;
    text += "\n[model]\nfoo = 1\n";
    try {
      parse_scenario_text(text);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("model.foo") != std::string::npos);
    }
  }

  SUBCASE("missing keys are named") {
    std::string text = kBaseConfig;
    const auto pos = text.find("eta = 3.0");
    text.erase(pos, 9);
    try {
      parse_scenario_text(text);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("model.eta") != std::string::npos);
    }
  }

  SUBCASE("premium parameters are cross-validated") {
    std::string text = kBaseConfig;
    const auto pos = text.find("theta_i = 0.1");
    text.insert(pos, "eta_i = 0.3\n");
    CHECK_THROWS_AS(parse_scenario_text(text), ConfigError);
  }

  SUBCASE("floats parse in full precision") {
    std::string text = kBaseConfig;
    const auto pos = text.find("alpha = 4.0");
    text.replace(pos, 11, "alpha = 4.0000000000000123");
    const auto cfg = parse_scenario_text(text);
    CHECK(cfg.model.alpha == 4.0000000000000123);
  }

  SUBCASE("limited_xl requires beta_m") {
    std::string text = kBaseConfig;
    const auto pos = text.find("kind = proportional");
    text.replace(pos, std::string("kind = proportional").size(),
                 "kind = limited_xl");
    CHECK_THROWS_AS(parse_scenario_text(text), ConfigError);
    text.insert(text.find("[premium]"), "beta_m = 0.5\n");
    const auto cfg = parse_scenario_text(text);
    CHECK(cfg.contract.kind() == RetentionContract::Kind::LimitedXL);
    CHECK(cfg.contract.u_cap() == 1.0);  // claim support max
  }
}

TEST_CASE("float formatting round-trips bit-faithfully") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double x = (rng.uniform01() - 0.5) * std::pow(10.0, i % 17 - 8);
    const double y = std::stod(format_float(x));
    CHECK(x == y);
  }
}

TEST_CASE("phi and policy CSV round trips") {
  TempDir dir;
  PhiTable phi;
  phi.phi = GridTable(linspace(0.0, 1.0, 3), linspace(1.0, 2.0, 4), 1.0);
  phi.stderr_ = phi.phi;
  Rng rng(9);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      phi.phi.at(i, j) = 0.5 + rng.uniform01();
      phi.stderr_.at(i, j) = 0.01 * rng.uniform01();
    }
  const std::string file = (dir.path / "phi.csv").string();
  write_phi_csv(file, phi, artifact_header(0xabcdef, 7));
  const PhiTable back = read_phi_csv(file);
  REQUIRE(back.phi.nt() == 3);
  REQUIRE(back.phi.nl() == 4);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(back.phi.at(i, j) == phi.phi.at(i, j));
      CHECK(back.stderr_.at(i, j) == phi.stderr_.at(i, j));
    }

  PolicyTable pol;
  pol.u = phi.phi;
  pol.regions.assign(12, FocRegion::Interior);
  pol.regions[0] = FocRegion::MaxReinsurance;
  pol.regions[11] = FocRegion::NullReinsurance;
  const std::string pfile = (dir.path / "policy.csv").string();
  write_policy_csv(pfile, pol, artifact_header(1, 2));
  const PolicyTable pback = read_policy_csv(pfile);
  CHECK(pback.u.at(1, 2) == pol.u.at(1, 2));
  CHECK(pback.regions[0] == FocRegion::MaxReinsurance);
  CHECK(pback.regions[11] == FocRegion::NullReinsurance);
}

TEST_CASE("statistics sanity") {
  SUBCASE("gamma_q against known chi-square quantiles") {
    // P(chi2_1 > 3.841) ~ 0.05, P(chi2_10 > 18.307) ~ 0.05
    CHECK(gamma_q(0.5, 3.841 / 2.0) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(gamma_q(5.0, 18.307 / 2.0) == doctest::Approx(0.05).epsilon(1e-3));
  }

  SUBCASE("KS accepts true exponentials and rejects uniforms") {
    Rng rng(31);
    std::vector<double> expo(20000), unif(20000);
    for (auto& v : expo) v = rng.exponential(1.0);
    for (auto& v : unif) v = rng.uniform01();
    CHECK(ks_test_exponential(expo).p_value > 0.01);
    CHECK(ks_test_exponential(unif).p_value < 1e-6);
  }

  SUBCASE("pairwise sum is exact on a telescoping sample") {
    std::vector<double> xs(1001);
    for (std::size_t i = 0; i < xs.size(); ++i)
      xs[i] = static_cast<double>(i);
    CHECK(pairwise_sum(xs) == 500500.0);
  }
}

TEST_CASE("CLI commands produce artifacts and honor exit codes") {
  TempDir dir;
  const std::string cfg_path = write_config(dir, kBaseConfig);

  SUBCASE("simulate") {
    RunOptions opt{cfg_path, (dir.path / "out").string(), 2, {}};
    CHECK(run_command("simulate", opt) == 0);
    CHECK(fs::exists(dir.path / "out" / "path_0000.csv"));
    CHECK(fs::exists(dir.path / "out" / "path_0001.csv"));
    CHECK(fs::exists(dir.path / "out" / "timechange_summary.csv"));
    const std::string body = read_file(dir.path / "out" / "path_0000.csv");
    CHECK(body.find("time,kind,mark,lambda_after") != std::string::npos);
    CHECK(body.substr(0, 14) == "# config_hash=");
  }

  SUBCASE("phi grid") {
    RunOptions opt{cfg_path, (dir.path / "out").string(), 2, {}};
    CHECK(run_command("phi", opt) == 0);
    const PhiTable table =
        read_phi_csv((dir.path / "out" / "phi.csv").string());
    CHECK(table.phi.nt() == 4);
    CHECK(table.phi.nl() == 3);
    table.validate();  // positivity and terminal condition
  }

  SUBCASE("optimize on a shot-noise config: lambda-free table, closed form") {
    std::string cox_cfg = kBaseConfig;
    const auto pos = cox_cfg.find("self_excitation = linear 1.0");
    cox_cfg.replace(pos, std::string("self_excitation = linear 1.0").size(),
                    "self_excitation = zero");
    const std::string path = (dir.path / "cox.cfg").string();
    std::ofstream(path, std::ios::binary) << cox_cfg;
    RunOptions opt{path, (dir.path / "out_cox").string(), 2, {}};
    CHECK(run_command("optimize", opt) == 0);
    const PolicyTable table =
        read_policy_csv((dir.path / "out_cox" / "policy.csv").string());
    const auto cfg = parse_scenario_text(cox_cfg);
    for (std::size_t i = 0; i < table.u.nt(); ++i) {
      const double closed = cox_optimal(table.u.t_grid()[i], cfg.contract,
                                        cfg.principle, cfg.model);
      for (std::size_t j = 0; j < table.u.nl(); ++j)
        CHECK(table.u.at(i, j) == doctest::Approx(closed).epsilon(1e-9));
    }
  }

  SUBCASE("optimize is byte-identical across runs and worker counts") {
    for (int workers : {1, 2, 3}) {
      RunOptions opt{cfg_path,
                     (dir.path / ("out_w" + std::to_string(workers))).string(),
                     workers,
                     {}};
      CHECK(run_command("optimize", opt) == 0);
    }
    const std::string a = read_file(dir.path / "out_w1" / "policy.csv");
    const std::string b = read_file(dir.path / "out_w2" / "policy.csv");
    const std::string c = read_file(dir.path / "out_w3" / "policy.csv");
    CHECK(a == b);
    CHECK(a == c);
    CHECK(read_file(dir.path / "out_w1" / "phi.csv") ==
          read_file(dir.path / "out_w2" / "phi.csv"));
    CHECK(fs::exists(dir.path / "out_w1" / "diagnostics.jsonl"));
  }

  SUBCASE("check") {
    RunOptions opt{cfg_path, (dir.path / "out").string(), 2, {}};
    CHECK(run_command("check", opt) == 0);
    CHECK(fs::exists(dir.path / "out" / "strana.csv"));
    CHECK(fs::exists(dir.path / "out" / "monotonicity.csv"));
  }

  SUBCASE("compare") {
    RunOptions opt{cfg_path, (dir.path / "out").string(), 2, {}};
    CHECK(run_command("compare", opt) == 0);
    const std::string body = read_file(dir.path / "out" / "comparison.csv");
    CHECK(body.find("# precondition=verified") != std::string::npos);
    CHECK(body.find("t,lambda,u_star,u_cox,violation") != std::string::npos);
  }

  SUBCASE("seed override changes artifacts deterministically") {
    RunOptions a{cfg_path, (dir.path / "s1").string(), 2, 7ULL};
    RunOptions b{cfg_path, (dir.path / "s2").string(), 2, 7ULL};
    RunOptions c{cfg_path, (dir.path / "s3").string(), 2, 8ULL};
    CHECK(run_command("phi", a) == 0);
    CHECK(run_command("phi", b) == 0);
    CHECK(run_command("phi", c) == 0);
    CHECK(read_file(dir.path / "s1" / "phi.csv") ==
          read_file(dir.path / "s2" / "phi.csv"));
    CHECK(read_file(dir.path / "s1" / "phi.csv") !=
          read_file(dir.path / "s3" / "phi.csv"));
  }

  SUBCASE("validation failures exit 1") {
    RunOptions opt{(dir.path / "missing.cfg").string(),
                   (dir.path / "out").string(),
                   1,
                   {}};
    CHECK(run_command("phi", opt) == 1);
    std::string broken = kBaseConfig;
    broken += "\n[model]\nbogus = 1\n";
    const std::string bad_path = (dir.path / "bad.cfg").string();
    std::ofstream(bad_path) << broken;
    RunOptions opt2{bad_path, (dir.path / "out").string(), 1, {}};
    CHECK(run_command("phi", opt2) == 1);
    CHECK(run_command("frobnicate", opt2) == 1);
  }
}
