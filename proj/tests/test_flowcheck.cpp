#include <npslab/error.hpp>
#include <npslab/flowcheck.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

using namespace npslab;

namespace {

constexpr double pi = std::numbers::pi;

using Fn = std::function<double(double)>;

// Circle of radius r; theta runs counterclockwise unless reversed. Optional jitter makes
// the parameter non-equispaced.
std::vector<CurveSample> circle(std::size_t n, double r, const Fn& f, const Fn& w, bool reversed = false,
                                double jitter = 0.0, unsigned seed = 1) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  std::vector<CurveSample> out;
  for (std::size_t k = 0; k < n; ++k) {
    double th = 2 * pi * (k + jitter * U(rng)) / n;
    if (reversed) th = -th;
    out.push_back({std::abs(th), r * std::cos(th), r * std::sin(th), 1.0 + f(th), 1.0, w(th)});
  }
  if (reversed) {
    for (auto& s : out) s.s = std::abs(s.s);
  }
  return out;
}

}  // namespace

TEST(FlowIndicator, UnitCircleCosSin) {
  BoundaryCurve2D c;
  c.components.push_back(circle(256, 1.0, [](double t) { return std::cos(t); }, [](double t) { return std::sin(t); }));
  const auto r = flow_indicator(c);
  EXPECT_NEAR(r.i1, pi, 1e-6);
  EXPECT_NEAR(r.i2, -pi, 1e-6);
  EXPECT_TRUE(r.predicts_flow);
  ASSERT_EQ(r.components.size(), 1u);
  EXPECT_TRUE(r.components[0].spectral);
}

TEST(FlowIndicator, ConstantPotentialPredictsNoFlow) {
  BoundaryCurve2D c;
  c.components.push_back(circle(64, 1.0, [](double t) { return std::cos(3 * t) + 0.2; }, [](double) { return 2.5; }));
  c.components.push_back(circle(48, 0.5, [](double t) { return std::sin(t); }, [](double) { return 2.5; }, true));
  const auto r = flow_indicator(c);
  EXPECT_NEAR(r.components[0].i1, 0.0, 1e-14);
  EXPECT_LE(std::abs(r.i2), r.tolerance);
  EXPECT_FALSE(r.predicts_flow);
}

TEST(FlowIndicator, ClosedCurveIdentityPerComponent) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const double a = U(rng), b = U(rng), c0 = U(rng);
    const int m = 1 + t % 4;
    Fn f = [=](double th) { return a * std::cos(m * th) + b * std::sin(th); };
    Fn w = [=](double th) { return c0 * std::sin(m * th + 0.3) + std::cos(2 * th); };
    for (double jitter : {0.0, 0.6}) {
      BoundaryCurve2D curve;
      curve.components.push_back(circle(128, 1.0, f, w, false, jitter, t + 1));
      curve.components.push_back(circle(96, 0.4, f, w, true, jitter, t + 7));
      const auto r = flow_indicator(curve);
      for (const auto& comp : r.components) EXPECT_LE(std::abs(comp.i1 + comp.i2), 1e-8);
      EXPECT_NEAR(r.i1, r.components[0].i1 + r.components[1].i1, 1e-14);
      EXPECT_EQ(r.components[0].spectral, jitter == 0.0);
    }
  }
}

TEST(FlowIndicator, NonEquispacedConvergesToAnalyticValue) {
  BoundaryCurve2D c;
  c.components.push_back(
      circle(4096, 1.0, [](double t) { return std::cos(t); }, [](double t) { return std::sin(t); }, false, 0.5));
  const auto r = flow_indicator(c);
  EXPECT_FALSE(r.components[0].spectral);
  EXPECT_NEAR(r.i1, pi, 1e-5);
}

TEST(FlowIndicator, AnnulusSumsComponents) {
  BoundaryCurve2D c;
  Fn f = [](double t) { return std::cos(t); };
  Fn w = [](double t) { return std::sin(t); };
  c.components.push_back(circle(256, 2.0, f, w));
  c.components.push_back(circle(256, 1.0, f, w, true));
  const auto r = flow_indicator(c);
  // the inner circle is traversed clockwise, so its contribution flips sign
  EXPECT_NEAR(r.components[0].i1, pi, 1e-10);
  EXPECT_NEAR(r.components[1].i1, -pi, 1e-10);
  EXPECT_NEAR(r.i1, 0.0, 1e-10);
}

TEST(FlowIndicator, RejectsShortOrDegenerateComponents) {
  BoundaryCurve2D c;
  c.components.push_back(circle(8, 1.0, [](double) { return 0.0; }, [](double) { return 0.0; }));
  EXPECT_THROW(flow_indicator(c), InvalidArgument);
  BoundaryCurve2D d;
  auto pts = circle(20, 1.0, [](double) { return 0.0; }, [](double) { return 0.0; });
  pts.push_back(pts.front());
  d.components.push_back(pts);
  EXPECT_THROW(flow_indicator(d), InvalidArgument);
  EXPECT_THROW(flow_indicator(BoundaryCurve2D{}), InvalidArgument);
}

TEST(CurveIo, RoundTripAndComments) {
  BoundaryCurve2D c;
  c.components.push_back(circle(20, 1.0, [](double t) { return std::cos(t); }, [](double t) { return std::sin(t); }));
  c.components.push_back(circle(16, 0.3, [](double t) { return 0.1 * t; }, [](double t) { return t * t; }, true));
  std::stringstream ss;
  write_curve(ss, c);
  const auto back = read_curve(ss);
  ASSERT_EQ(back.components.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    ASSERT_EQ(back.components[k].size(), c.components[k].size());
    for (std::size_t j = 0; j < c.components[k].size(); ++j) {
      const auto &a = c.components[k][j], &b = back.components[k][j];
      EXPECT_EQ(a.s, b.s);
      EXPECT_EQ(a.x, b.x);
      EXPECT_EQ(a.y, b.y);
      EXPECT_EQ(a.gamma1, b.gamma1);
      EXPECT_EQ(a.gamma2, b.gamma2);
      EXPECT_EQ(a.w, b.w);
    }
  }
  std::istringstream bad("# header\n0 1 2 3 4\n");
  EXPECT_THROW(read_curve(bad), IoError);
  std::istringstream trailing("0 1 2 3 4 5 6\n");
  EXPECT_THROW(read_curve(trailing), IoError);
  EXPECT_THROW(read_curve_file("/nonexistent/curve.txt"), IoError);
}
