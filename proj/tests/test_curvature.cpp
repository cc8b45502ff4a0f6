#include <gtest/gtest.h>

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <random>

#include "pgeom/curvature.hpp"

using namespace pgeom;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

GeodesicPath origin_path(const MetricModel& m, double range, int axis = 0) {
  const Vec o = m.origin();
  return GeodesicPath(m, {o, m.tangent_basis(o).col(axis)}, range);
}

double coth(double x) { return 1.0 / std::tanh(x); }

// Independent oracle for the sphere value S'/S with S(0) = 0, S'(0) = 1.
double odeint_sphere_value(const std::function<double(double)>& k, double r) {
  using State = std::array<double, 2>;
  auto rhs = [&](const State& y, State& dy, double t) { dy = {y[1], -k(t) * y[0]}; };
  State y{0.0, 1.0};
  boost::numeric::odeint::integrate_adaptive(
      boost::numeric::odeint::make_controlled<boost::numeric::odeint::runge_kutta_dopri5<State>>(1e-13,
                                                                                                1e-13),
      rhs, y, 0.0, r, 1e-4);
  return y[1] / y[0];
}

void expect_scalar_matrix(const Mat& m, double value, double tol) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) EXPECT_NEAR(m(i, j), i == j ? value : 0.0, tol);
}

}  // namespace

TEST(SphereShape, HyperbolicPlaneCoth) {
  const MetricModel m = MetricModel::space_form(2, -1.0);
  const GeodesicPath g = origin_path(m, 5.0);
  EXPECT_NEAR(sphere_shape(m, g, 1.0).matrix(0, 0), 1.3130352855, 1e-9);
  for (double r : {0.05, 0.5, 2.0, 5.0}) EXPECT_NEAR(sphere_shape(m, g, r).matrix(0, 0), coth(r), 1e-12 * coth(r));
}

TEST(SphereShape, CurvatureMinusFourBothDirections) {
  const MetricModel m = MetricModel::space_form(3, -4.0);
  const GeodesicPath g = origin_path(m, 3.0, 1);
  for (double r : {0.1, 1.0, 3.0}) expect_scalar_matrix(sphere_shape(m, g, r).matrix, 2 * coth(2 * r), 1e-11);
}

TEST(SphereShape, WarpedMatchesIndependentIntegrator) {
  const WarpProfile prof = WarpProfile::polynomial({1.0, 0.0, 1.0});
  const MetricModel w = MetricModel::warped_surface(prof, -INFINITY, INFINITY);
  const double r0 = -1.0;
  const GeodesicPath g(w, {v2(r0, 0.0), v2(1.0, 0.0)}, 4.0);
  auto k = [&](double t) { return -prof.d2_over_f(r0 + t); };
  for (double r : {0.2, 1.0, 2.5, 4.0})
    EXPECT_NEAR(sphere_shape(w, g, r).matrix(0, 0), odeint_sphere_value(k, r), 1e-8);
}

TEST(SphereShape, RejectsTinyRadius) {
  const MetricModel m = MetricModel::space_form(2, -1.0);
  EXPECT_THROW(sphere_shape(m, origin_path(m, 1.0), 1e-9), InvalidInput);
}

TEST(HorosphereShape, ConstantCurvatureIsScaledIdentity) {
  for (double b : {1.0, 2.0, 3.0}) {
    const MetricModel m = MetricModel::space_form(3, -b * b);
    const Vec o = m.origin();
    const ShapeForm s = horosphere_shape(m, {o, m.tangent_basis(o).col(0)}, 1e-7);
    expect_scalar_matrix(s.matrix, b, 1e-7);
  }
  const MetricModel e = MetricModel::euclidean(3);
  expect_scalar_matrix(horosphere_shape(e, {Vec::Zero(3), Vec::Unit(3, 2)}, 1e-7).matrix, 0.0, 1e-7);
}

TEST(HorosphereShape, WarpedExpProfileLevelCurve) {
  const MetricModel w = MetricModel::warped_surface(WarpProfile::exp(2.0), -INFINITY, INFINITY);
  for (double r : {-1.0, 0.0, 1.5}) {
    const ShapeForm s = horosphere_shape(w, {v2(r, 0.3), v2(1.0, 0.0)}, 1e-6);
    EXPECT_NEAR(s.matrix(0, 0), 2.0, 1e-6);
  }
}

TEST(HorosphereShape, NonnegativeOnRandomWarpedDirections) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ang(0.0, two_pi), pos(-1.0, 1.0);
  const MetricModel w =
      MetricModel::warped_surface(WarpProfile::cosh_sum({1.0, 1.0}, {1.0, 2.0}), -INFINITY, INFINITY);
  for (int i = 0; i < 20; ++i) {
    const Vec p = v2(pos(rng), pos(rng));
    const double a = ang(rng);
    const Vec v = v2(std::cos(a), std::sin(a) / w.warp()->f(p(0)));
    const ShapeForm s = horosphere_shape(w, {p, v}, 1e-6);
    EXPECT_GE(s.matrix(0, 0), -1e-6);
    EXPECT_LE(s.matrix(0, 0), 2.0 + 1e-6);
  }
}

TEST(Comparison, ReferenceRows) {
  const MetricModel m = MetricModel::space_form(2, -1.0);
  const ComparisonReport rep = comparison_report(m, origin_path(m, 3.0), {0.1, 1.0, 3.0});
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_TRUE(rep.pass);
  EXPECT_NEAR(rep.rows[0].difference, 9.0333, 5e-5);
  EXPECT_NEAR(rep.rows[0].difference, coth(0.1) - 1.0, 1e-7);
  EXPECT_DOUBLE_EQ(rep.rows[0].bound, 10.0);
  EXPECT_NEAR(rep.rows[2].difference, 0.0050, 5e-5);
  EXPECT_NEAR(rep.rows[2].difference, coth(3.0) - 1.0, 1e-7);
  for (const auto& row : rep.rows) EXPECT_TRUE(row.pass);
}

TEST(Comparison, SandwichHoldsOnRandomRadiiProperty) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ub(0.3, 3.0), ur(0.05, 30.0);
  for (int trial = 0; trial < 12; ++trial) {
    const double b = ub(rng);
    const MetricModel m = trial % 2 ? MetricModel::space_form(3, -b * b)
                                    : MetricModel::warped_surface(WarpProfile::cosh(b), -INFINITY, INFINITY);
    std::vector<double> grid;
    for (int i = 0; i < 5; ++i) grid.push_back(ur(rng));
    std::sort(grid.begin(), grid.end());
    EXPECT_TRUE(comparison_report(m, origin_path(m, grid.back()), grid).pass) << m.describe();
  }
}

TEST(Comparison, RejectsUnsortedGrid) {
  const MetricModel m = MetricModel::space_form(2, -1.0);
  EXPECT_THROW(comparison_report(m, origin_path(m, 3.0), {1.0, 0.5}), InvalidInput);
}

TEST(ChartShape, GeodesicSphereInwardNormal) {
  const MetricModel m = MetricModel::space_form(3, -1.0);
  const HypersurfaceChart c = charts::geodesic_sphere(m, m.origin(), 1.0);
  for (const Vec& u : {Vec(Vec::Zero(2)), v2(0.7, -0.4), v2(-1.2, 1.1)}) {
    const ShapeForm s = hypersurface_shape(c, u, +1);
    expect_scalar_matrix(s.matrix, coth(1.0), 1e-6);
    expect_scalar_matrix(hypersurface_shape(c, u, -1).matrix, -coth(1.0), 1e-6);
  }
}

TEST(ChartShape, HorosphereAndSheet) {
  const MetricModel m = MetricModel::space_form(3, -1.0);
  const Vec o = m.origin();
  const Mat b = m.tangent_basis(o);
  expect_scalar_matrix(hypersurface_shape(charts::horosphere(m, o, b.col(2)), v2(0.3, 0.4), +1).matrix, 1.0,
                       1e-6);
  expect_scalar_matrix(hypersurface_shape(charts::geodesic_sheet(m, o, b.col(2)), v2(0.3, 0.4), +1).matrix, 0.0,
                       1e-6);
}

TEST(ChartShape, EuclideanGraphCurvatures) {
  const MetricModel e = MetricModel::euclidean(3);
  const HypersurfaceChart c = charts::sheet_graph(e, Vec::Zero(3), Vec::Unit(3, 2), {0.5, 2.0});
  const Mat s = hypersurface_shape(c, Vec::Zero(2), +1).matrix;
  EXPECT_NEAR(s(0, 0), 0.5, 1e-6);
  EXPECT_NEAR(s(1, 1), 2.0, 1e-6);
  EXPECT_NEAR(s(0, 1), 0.0, 1e-6);
}

TEST(ChartShape, TorusGraphCurvature) {
  // y = 0.3 sin 2x at x = pi/4: y' = 0, y'' = -1.2
  const MetricModel t = MetricModel::flat_torus(2);
  const HypersurfaceChart c = charts::torus_graph(t, 0.3, 2, 0.0, 0.0);
  EXPECT_NEAR(hypersurface_shape(c, (Vec(1) << pi / 4).finished(), +1).matrix(0, 0), -1.2, 1e-5);
  // general point: y'' / (1 + y'^2)^{3/2}
  const double x = 0.4, y1 = 0.6 * std::cos(0.8), y2 = -1.2 * std::sin(0.8);
  EXPECT_NEAR(hypersurface_shape(c, (Vec(1) << x).finished(), +1).matrix(0, 0),
              y2 / std::pow(1 + y1 * y1, 1.5), 1e-5);
}

TEST(ChartShape, WarpedLevelAndRay) {
  const MetricModel w = MetricModel::warped_surface(WarpProfile::cosh(1.0), -INFINITY, INFINITY);
  for (double r0 : {-0.5, 0.5, 1.5})
    EXPECT_NEAR(hypersurface_shape(charts::warped_level(w, r0), Vec::Zero(1), +1).matrix(0, 0), std::tanh(r0),
                1e-6);
  EXPECT_NEAR(hypersurface_shape(charts::warped_ray(w, 0.5, 0.0), Vec::Zero(1), +1).matrix(0, 0), 0.0, 1e-6);
}

TEST(ChartShape, GeodesicCircleInWarpedHyperbolicPlane) {
  const MetricModel w = MetricModel::warped_surface(WarpProfile::cosh(1.0), -INFINITY, INFINITY);
  const HypersurfaceChart c = charts::geodesic_sphere(w, v2(0.2, 0.1), 0.8);
  for (double u : {-1.0, 0.0, 0.9})
    EXPECT_NEAR(hypersurface_shape(c, (Vec(1) << u).finished(), +1).matrix(0, 0), coth(0.8), 1e-5);
}

TEST(ChartShape, SymmetricProperty) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const MetricModel m = MetricModel::space_form(3, -2.0);
  const Vec o = m.origin();
  const HypersurfaceChart c = charts::sheet_graph(m, o, m.tangent_basis(o).col(0), {0.4, -0.9});
  for (int i = 0; i < 20; ++i) {
    const Mat s = hypersurface_shape(c, v2(0.3 * u(rng), 0.3 * u(rng)), +1).matrix;
    EXPECT_NEAR(s(0, 1), s(1, 0), 1e-12);
  }
  EXPECT_THROW(hypersurface_shape(charts::flat_subtorus(MetricModel::flat_torus(3),
                                                        Eigen::MatrixXi::Identity(3, 1), Vec::Zero(3)),
                                  Vec::Zero(1), +1),
               InvalidInput);
}
