// Drives the command-line tool as a subprocess.

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#ifndef NPS_CLI_PATH
#error "NPS_CLI_PATH must be defined"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / ("npslab_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" NPS_CLI_PATH "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json summary(const fs::path& p) { return json::parse(slurp(p)); }

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

const char* kEquilibrium = R"([params]
eps = 0.5
[bc]
alpha1 = 1
alpha2 = 1
beta1 = 0.36787944117144233
beta2 = 2.7182818284590451
voltage = 1
[grid]
n = 65
)";

const char* kWeak = R"([bc]
alpha1 = 1
alpha2 = 1.1
beta1 = 0.9
beta2 = 1.2
voltage = 0.1
[evolve]
nx = 17
ny = 16
dt = 0.005
t_end = 1
output_every = 4
initial = random-bounded
seed = 11
)";

std::string circle_file(double (*w)(double), int n = 256) {
  std::ostringstream out;
  out.precision(17);
  for (int k = 0; k < n; ++k) {
    const double t = 2 * std::numbers::pi * k / n;
    out << t << ' ' << std::cos(t) << ' ' << std::sin(t) << ' ' << 1 + std::cos(t) << " 1 " << w(t) << '\n';
  }
  return out.str();
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 64);
  EXPECT_EQ(run("bogus"), 64);
  EXPECT_EQ(run("steady --no-such-flag"), 64);
  EXPECT_EQ(run("steady --grid abc"), 64);
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("steady --help"), 0);
}

TEST(Cli, SteadyEquilibrium) {
  const auto dir = scratch("steady_eq");
  const auto cfg = write_file(dir, "eq.ini", kEquilibrium);
  ASSERT_EQ(run("steady --config " + cfg.string() + " --out " + dir.string()), 0);
  const auto s = summary(dir / "steady_summary.json");
  EXPECT_LT(std::abs(s["currents"]["j1"].get<double>()), 1e-10);
  EXPECT_LT(std::abs(s["currents"]["j2"].get<double>()), 1e-10);
  EXPECT_EQ(s["paths"]["state_table"].get<std::string>(), (dir / "steady.csv").string());
  EXPECT_TRUE(fs::exists(dir / "steady.csv"));
}

TEST(Cli, SteadyConstantTable) {
  const auto dir = scratch("steady_const");
  ASSERT_EQ(run("steady --grid 17 --out " + dir.string()), 0);
  std::istringstream in(slurp(dir / "steady.csv"));
  std::string line, first;
  std::getline(in, line);
  EXPECT_EQ(line, "x,c1,c2,phi,eta1,eta2,mu1,mu2");
  int rows = 0;
  while (std::getline(in, line)) {
    const std::string tail = line.substr(line.find(','));
    if (rows == 0) first = tail;
    EXPECT_EQ(tail, first);
    ++rows;
  }
  EXPECT_EQ(rows, 17);
}

TEST(Cli, SteadyRefinementOrder) {
  const auto dir = scratch("steady_refine");
  ASSERT_EQ(run("steady --grid 33 --refine 3 --set bc.voltage=0.8 --set bc.beta1=2 --set params.eps=0.2 --out " +
                dir.string()),
            0);
  const auto s = summary(dir / "steady_summary.json");
  EXPECT_GE(s["convergence"]["min_order"].get<double>(), 1.9);
  EXPECT_EQ(s["convergence"]["levels"].size(), 4u);
  EXPECT_TRUE(fs::exists(dir / "convergence.csv"));
}

TEST(Cli, SteadyRefinementOfExactSolutionHasNoOrder) {
  // equal boundary concentrations: c = 1 and a linear potential solve the discrete problem exactly
  const auto dir = scratch("steady_refine_exact");
  ASSERT_EQ(run("steady --grid 17 --refine 2 --set bc.voltage=0.8 --out " + dir.string()), 0);
  const auto s = summary(dir / "steady_summary.json");
  EXPECT_TRUE(s["convergence"]["rounding_only"].get<bool>());
  EXPECT_TRUE(s["convergence"]["min_order"].is_null());
}

TEST(Cli, SteadyFailures) {
  const auto dir = scratch("steady_fail");
  const auto bad = write_file(dir, "bad.ini", "[bc]\nvoltage = one\n");
  EXPECT_EQ(run("steady --config " + bad.string() + " --out " + dir.string()), 64);
  EXPECT_EQ(run("steady --config " + (dir / "missing.ini").string()), 64);
  EXPECT_EQ(run("steady --set bc.voltage=1.5 --set bc.beta2=0.3 --set solver.max_outer=1 --out " + dir.string()), 2);
  EXPECT_EQ(run("steady --set nokey=1 --out " + dir.string()), 64);
}

TEST(Cli, CriteriaEquilibriumAndLargeVoltage) {
  const auto dir = scratch("criteria");
  const auto cfg = write_file(dir, "eq.ini", kEquilibrium);
  ASSERT_EQ(run("criteria --config " + cfg.string() + " --out " + dir.string()), 0);
  auto s = summary(dir / "criteria_summary.json")["report"];
  EXPECT_TRUE(s["weak_current_ok"].get<bool>());
  EXPECT_TRUE(s["sufficient"]["log_form"]["ok"].get<bool>());
  EXPECT_TRUE(s["sufficient"]["exp_form"]["ok"].get<bool>());
  EXPECT_EQ(s["kappa_delta"].get<double>(),
            std::min({s["kappa1_delta"].get<double>(), s["kappa2_delta"].get<double>(), s["kappa_fluid"].get<double>()}));
  EXPECT_EQ(s["scan"].size(), 11u);

  ASSERT_EQ(run("criteria --grid 257 --set bc.voltage=10 --set bc.alpha1=0.5 --set bc.alpha2=2 --set bc.beta1=2 "
                "--set bc.beta2=0.5 --set params.eps=0.2 --out " + dir.string()),
            0);
  s = summary(dir / "criteria_summary.json")["report"];
  EXPECT_FALSE(s["weak_current_ok"].get<bool>());
  EXPECT_LT(s["margin"].get<double>(), 0.0);
}

TEST(Cli, EvolveCertifyWeakCurrent) {
  const auto dir = scratch("evolve_weak");
  const auto cfg = write_file(dir, "weak.ini", kWeak);
  ASSERT_EQ(run("evolve --certify --plot --config " + cfg.string() + " --out " + dir.string()), 0);
  const auto s = summary(dir / "evolve_summary.json");
  EXPECT_TRUE(s["certificate"]["applicable"].get<bool>());
  EXPECT_TRUE(s["certificate"]["certified"].get<bool>());
  EXPECT_TRUE(fs::exists(dir / "diagnostics.csv"));
  EXPECT_TRUE(fs::exists(dir / "energy.svg"));
  EXPECT_TRUE(fs::exists(dir / "monitors.svg"));
  EXPECT_LE(s["monitors"]["max_rise_m_hi"].get<double>(), 1e-8);
}

TEST(Cli, EvolveConstantData) {
  const auto dir = scratch("evolve_const");
  ASSERT_EQ(run("evolve --set evolve.nx=16 --set evolve.ny=8 --set evolve.t_end=0.1 --set evolve.initial=constant "
                "--out " + dir.string()),
            0);
  std::istringstream in(slurp(dir / "diagnostics.csv"));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  std::string first;
  while (std::getline(in, line)) {
    const std::string tail = line.substr(line.find(','));
    if (rows++ == 0) first = tail;
    EXPECT_EQ(tail, first);
  }
  EXPECT_EQ(rows, 11);
  const auto s = summary(dir / "evolve_summary.json");
  EXPECT_EQ(s["final"]["energy_f"].get<double>(), 0.0);
}

TEST(Cli, EvolveSpikedRecordsEntryTime) {
  const auto dir = scratch("evolve_spiked");
  const auto cfg = write_file(dir, "weak.ini", kWeak);
  ASSERT_EQ(run("evolve --config " + cfg.string() + " --set evolve.initial=spiked --set evolve.t_end=2 --set "
                "evolve.snapshot_every=200 --out " + dir.string()),
            0);
  const auto s = summary(dir / "evolve_summary.json");
  ASSERT_TRUE(s["entry_time"].is_number());
  EXPECT_GT(s["entry_time"].get<double>(), 0.0);
  EXPECT_EQ(s["paths"]["snapshots"].size(), 3u);
}

TEST(Cli, EvolveCflFailure) {
  const auto dir = scratch("evolve_cfl");
  EXPECT_EQ(run("evolve --set evolve.initial=spiked --set evolve.dt=0.5 --set evolve.t_end=1 --out " + dir.string()), 2);
}

TEST(Cli, EvolveSeedIsReproducible) {
  const auto a = scratch("seed_a"), b = scratch("seed_b"), c = scratch("seed_c");
  const std::string base = "evolve --set evolve.nx=16 --set evolve.ny=8 --set evolve.t_end=0.1 "
                           "--set evolve.initial=random-bounded --set bc.beta2=1.5 ";
  ASSERT_EQ(run(base + "--seed 7 --out " + a.string()), 0);
  ASSERT_EQ(run(base + "--seed 7 --out " + b.string()), 0);
  ASSERT_EQ(run(base + "--seed 8 --out " + c.string()), 0);
  EXPECT_EQ(slurp(a / "diagnostics.csv"), slurp(b / "diagnostics.csv"));
  EXPECT_EQ(slurp(a / "final_state.txt"), slurp(b / "final_state.txt"));
  EXPECT_NE(slurp(a / "diagnostics.csv"), slurp(c / "diagnostics.csv"));
}

TEST(Cli, FlowcheckFiles) {
  const auto dir = scratch("flow");
  const auto circle = write_file(dir, "circle.txt", circle_file([](double t) { return std::sin(t); }));
  ASSERT_EQ(run("flowcheck " + circle.string() + " --out " + dir.string()), 0);
  auto s = summary(dir / "flowcheck_summary.json");
  EXPECT_NEAR(s["i1"].get<double>(), std::numbers::pi, 1e-6);
  EXPECT_TRUE(s["predicts_flow"].get<bool>());

  const auto flat = write_file(dir, "flat.txt", circle_file([](double) { return 0.7; }));
  ASSERT_EQ(run("flowcheck " + flat.string() + " --out " + dir.string()), 0);
  EXPECT_FALSE(summary(dir / "flowcheck_summary.json")["predicts_flow"].get<bool>());

  const auto annulus = write_file(dir, "annulus.txt",
                                  "# outer then inner\n" + circle_file([](double t) { return std::sin(t); }) + "\n" +
                                      circle_file([](double t) { return std::cos(2 * t); }, 64));
  ASSERT_EQ(run("flowcheck --verbose " + annulus.string() + " --out " + dir.string()), 0);
  s = summary(dir / "flowcheck_summary.json");
  ASSERT_EQ(s["components"].size(), 2u);
  double sum = 0.0;
  for (const auto& c : s["components"]) {
    EXPECT_LE(std::abs(c["i1_plus_i2"].get<double>()), 1e-8);
    sum += c["i1"].get<double>();
  }
  EXPECT_NEAR(s["i1"].get<double>(), sum, 1e-12);

  const auto broken = write_file(dir, "broken.txt", "0 1 2\n");
  EXPECT_EQ(run("flowcheck " + broken.string() + " --out " + dir.string()), 64);
  EXPECT_EQ(run("flowcheck --out " + dir.string()), 64);
}

TEST(Cli, SweepVoltage) {
  const auto dir = scratch("sweep_v");
  ASSERT_EQ(run("sweep --grid 65 --sweep \"bc.voltage=0,0.5,1.0\" --out " + dir.string()), 0);
  std::istringstream in(slurp(dir / "sweep.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("bc.voltage,status,j1,j2,", 0), 0u);
  std::vector<double> j1;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::string v, status, j;
    std::getline(ls, v, ',');
    std::getline(ls, status, ',');
    std::getline(ls, j, ',');
    EXPECT_EQ(status, "0");
    j1.push_back(std::stod(j));
  }
  ASSERT_EQ(j1.size(), 3u);
  // Phi(0) = -V lowers eta_1(0), so the cation current grows with V
  EXPECT_EQ(j1[0], 0.0);
  EXPECT_GT(j1[1], j1[0]);
  EXPECT_GT(j1[2], j1[1]);
}

TEST(Cli, SweepEmptyMatchesCriteria) {
  const auto dir = scratch("sweep_empty");
  const std::string common = " --grid 65 --set bc.voltage=0.3 --set bc.beta2=1.4 --out " + dir.string();
  ASSERT_EQ(run("sweep" + common), 0);
  ASSERT_EQ(run("criteria" + common), 0);
  std::istringstream in(slurp(dir / "sweep.csv"));
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::string extra;
  EXPECT_FALSE(static_cast<bool>(std::getline(in, extra)));
  const auto s = summary(dir / "criteria_summary.json")["report"];
  std::stringstream hs(header), rs(row);
  std::string h, v;
  int checked = 0;
  while (std::getline(hs, h, ',') && std::getline(rs, v, ',')) {
    if (h == "status") continue;
    if (h == "weak_current_ok") {
      EXPECT_EQ(std::stod(v) != 0.0, s[h].get<bool>());
    } else if (h == "suff_log_ok" || h == "suff_exp_ok") {
      EXPECT_EQ(std::stod(v) != 0.0, s["sufficient"][h == "suff_log_ok" ? "log_form" : "exp_form"]["ok"].get<bool>());
    } else {
      EXPECT_EQ(std::stod(v), s[h].get<double>()) << h;
    }
    ++checked;
  }
  EXPECT_EQ(checked, 15);
}

TEST(Cli, SweepDeterministicAcrossJobs) {
  const auto a = scratch("sweep_a"), b = scratch("sweep_b");
  const std::string spec = " --grid 33 --sweep \"bc.voltage=0.1,0.4;params.eps=0.3,1\" ";
  ASSERT_EQ(run("sweep" + spec + "--jobs 1 --out " + a.string()), 0);
  ASSERT_EQ(run("sweep" + spec + "--jobs 3 --out " + b.string()), 0);
  const auto ta = slurp(a / "sweep.csv");
  EXPECT_EQ(ta, slurp(b / "sweep.csv"));
  // first key varies slowest
  std::istringstream in(ta);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> prefixes;
  while (std::getline(in, line)) prefixes.push_back(line.substr(0, line.find(',', line.find(',') + 1)));
  EXPECT_EQ(prefixes, (std::vector<std::string>{"0.1,0.3", "0.1,1", "0.4,0.3", "0.4,1"}));
}

TEST(Cli, SweepInvalidSpec) {
  const auto dir = scratch("sweep_bad");
  EXPECT_EQ(run("sweep --sweep \"bc.voltage\" --out " + dir.string()), 64);
  EXPECT_EQ(run("sweep --sweep \"bc.voltage=\" --out " + dir.string()), 64);
  EXPECT_EQ(run("sweep --sweep \"bc.nothing=1,2\" --out " + dir.string()), 64);
  EXPECT_EQ(run("sweep --sweep \"bc.voltage=1;bc.voltage=2\" --out " + dir.string()), 64);
  EXPECT_EQ(run("sweep --sweep \"bc.voltage=x\" --out " + dir.string()), 64);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const auto dir = scratch("env_out");
  ASSERT_EQ(run("steady --grid 9", "NPS_OUT_DIR=" + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "steady.csv"));
  EXPECT_TRUE(fs::exists(dir / "steady_summary.json"));
}
