#include <npslab/config.hpp>
#include <npslab/error.hpp>
#include <npslab/evolve.hpp>
#include <npslab/io.hpp>
#include <npslab/steady1d.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using namespace npslab;

TEST(FormatDouble, RoundTripsExactly) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = U(rng) * std::pow(10.0, (k % 40) - 20);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_TRUE(std::isnan(parse_double(format_double(std::nan("")))));
  EXPECT_EQ(parse_double("-inf"), -std::numeric_limits<double>::infinity());
  EXPECT_THROW(parse_double("1.5x"), IoError);
  EXPECT_THROW(parse_double(""), IoError);
}

TEST(Csv, RoundTrip) {
  CsvTable t;
  t.header = {"a", "b", "c"};
  t.rows = {{1.0, 0.1, -3e-300}, {std::nan(""), 1e300, 2.0 / 3.0}};
  std::stringstream ss;
  write_csv(ss, t);
  const auto back = read_csv(ss);
  EXPECT_EQ(back.header, t.header);
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[0], t.rows[0]);
  EXPECT_TRUE(std::isnan(back.rows[1][0]));
  EXPECT_EQ(back.rows[1][2], 2.0 / 3.0);
}

TEST(Csv, Errors) {
  std::istringstream ragged("a,b\n1,2\n3\n");
  EXPECT_THROW(read_csv(ragged), IoError);
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty), IoError);
  CsvTable t;
  t.header = {"a"};
  t.rows = {{1.0, 2.0}};
  std::ostringstream out;
  EXPECT_THROW(write_csv(out, t), IoError);
  EXPECT_THROW(read_csv_file("/nonexistent/x.csv"), IoError);
}

TEST(StateTable, ColumnsAndConstantState) {
  const auto r = solve_steady_1d({}, {}, Grid1D::uniform(9, 1.0));
  const auto t = state_table(r.state);
  EXPECT_EQ(t.header, (std::vector<std::string>{"x", "c1", "c2", "phi", "eta1", "eta2", "mu1", "mu2"}));
  ASSERT_EQ(t.rows.size(), 9u);
  for (const auto& row : t.rows) {
    for (std::size_t k = 1; k < row.size(); ++k) EXPECT_EQ(row[k], t.rows[0][k]);
  }
  std::stringstream ss;
  write_csv(ss, t);
  const auto back = read_csv(ss);
  EXPECT_EQ(back.rows, t.rows);
}

TEST(Snapshot, RoundTripNodalFields) {
  EvolveConfig cfg;
  cfg.nx = 12;
  cfg.ny = 8;
  cfg.bc = {1.0, 1.1, 0.9, 1.2, 0.1, 1.5};
  cfg.initial.kind = InitialKind::RandomBounded;
  cfg.initial.seed = 3;
  Evolver ev(cfg);
  auto s = ev.initial_state();
  ev.step(s, 0.01);
  std::stringstream ss;
  write_snapshot(ss, s);
  const auto back = read_snapshot(ss);
  EXPECT_EQ(back.grid.nx, 12u);
  EXPECT_EQ(back.grid.ny, 8u);
  EXPECT_EQ(back.grid.length, 1.5);
  EXPECT_EQ(back.time, s.time);
  EXPECT_EQ(back.c1.data(), s.c1.data());
  EXPECT_EQ(back.c2.data(), s.c2.data());
  EXPECT_EQ(back.phi.data(), s.phi.data());
  EXPECT_EQ(back.ux.data(), s.ux.data());
  // writing the reconstruction again gives the same nodal concentrations
  std::stringstream again;
  write_snapshot(again, back);
  const auto twice = read_snapshot(again);
  EXPECT_EQ(twice.c1.data(), s.c1.data());
}

TEST(Snapshot, FileInitialCondition) {
  EvolveConfig cfg;
  cfg.nx = 10;
  cfg.ny = 8;
  cfg.initial.kind = InitialKind::Spiked;
  Evolver ev(cfg);
  const auto s = ev.initial_state();
  const std::string path = ::testing::TempDir() + "/npslab_snapshot.txt";
  write_snapshot_file(path, s);
  auto from_file = cfg;
  from_file.initial.kind = InitialKind::File;
  from_file.initial.path = path;
  Evolver ef(from_file);
  const auto t = ef.initial_state();
  EXPECT_EQ(t.c1.data(), s.c1.data());
  auto wrong = from_file;
  wrong.nx = 11;
  EXPECT_THROW(Evolver(wrong).initial_state(), Error);
}

TEST(Snapshot, MalformedInput) {
  std::istringstream no_header("1 2 3\n");
  EXPECT_THROW(read_snapshot(no_header), IoError);
  std::istringstream truncated("# nx=8 ny=8 L=1 time=0\n0 0 1 1 0 0 0 0\n");
  EXPECT_THROW(read_snapshot(truncated), IoError);
}

TEST(Config, ParseFormatRoundTrip) {
  std::istringstream in(R"(# electrolyte
[params]
d1 = 0.5
eps = 0.25   # Debye
[bc]
alpha1 = 1.0
beta2 = 1.7
voltage = 0.3
[grid]
n = 65
grading = 1.5
[solver]
damping = 0.8
[evolve]
nx = 32
initial = random-bounded
seed = 99
navier_stokes = true
)");
  const auto cfg = parse_config(in, "test");
  EXPECT_EQ(cfg.params.d1, 0.5);
  EXPECT_EQ(cfg.params.eps, 0.25);
  EXPECT_EQ(cfg.bc.beta2, 1.7);
  EXPECT_EQ(cfg.grid_n, 65u);
  EXPECT_EQ(cfg.solver.damping, 0.8);
  EXPECT_EQ(cfg.evolve.nx, 32u);
  EXPECT_EQ(cfg.evolve.initial.kind, InitialKind::RandomBounded);
  EXPECT_EQ(cfg.evolve.initial.seed, 99u);
  EXPECT_TRUE(cfg.evolve.navier_stokes);
  const auto ec = cfg.evolve_config();
  EXPECT_EQ(ec.bc.voltage, 0.3);
  EXPECT_EQ(ec.params.eps, 0.25);
  EXPECT_EQ(cfg.make_grid().size(), 65u);

  std::istringstream again(format_config(cfg));
  const auto back = parse_config(again);
  for (const auto& key : config_keys()) EXPECT_EQ(get_config_value(back, key), get_config_value(cfg, key)) << key;
}

TEST(Config, Errors) {
  auto bad = [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
  };
  EXPECT_THROW(bad("[params]\nd3 = 1\n"), ConfigError);
  EXPECT_THROW(bad("[physics]\n"), ConfigError);
  EXPECT_THROW(bad("d1 = 1\n"), ConfigError);
  EXPECT_THROW(bad("[params]\nd1 1\n"), ConfigError);
  EXPECT_THROW(bad("[params]\nd1 = abc\n"), ConfigError);
  EXPECT_THROW(bad("[params]\nd1 = -1\n"), ConfigError);
  EXPECT_THROW(bad("[params]\nd1 =\n"), ConfigError);
  EXPECT_THROW(bad("[grid]\nn = 2\n"), ConfigError);
  EXPECT_THROW(bad("[evolve]\nseed = -4\n"), ConfigError);
  EXPECT_THROW(bad("[evolve]\nnavier_stokes = maybe\n"), ConfigError);
  EXPECT_THROW(bad("[evolve]\ninitial = gaussian\n"), ConfigError);
  EXPECT_THROW(bad("[params\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.ini"), ConfigError);
  AppConfig c;
  EXPECT_THROW(set_config_value(c, "bc.gamma", "1"), ConfigError);
  EXPECT_THROW(get_config_value(c, "nope"), ConfigError);
}
