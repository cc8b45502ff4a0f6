#include <gtest/gtest.h>

#include <boost/numeric/odeint.hpp>
#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "pgeom/jacobi.hpp"

using namespace pgeom;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

GeodesicPath origin_path(const MetricModel& m, double range, int axis = 0) {
  const Vec o = m.origin();
  return GeodesicPath(m, {o, m.tangent_basis(o).col(axis)}, range);
}

// Independent oracle: fundamental solutions of h'' = -K(t) h with Boost's
// Dormand-Prince stepper, combined into the Dirichlet solution.
double odeint_dirichlet(const std::function<double(double)>& k, double s, double r) {
  using State = std::array<double, 4>;  // C, C', S, S'
  auto rhs = [&](const State& y, State& dy, double t) {
    dy = {y[1], -k(t) * y[0], y[3], -k(t) * y[2]};
  };
  auto solve = [&](double t_end) {
    State y{1.0, 0.0, 0.0, 1.0};
    if (t_end > 0)
      boost::numeric::odeint::integrate_adaptive(
          boost::numeric::odeint::make_controlled<boost::numeric::odeint::runge_kutta_dopri5<State>>(
              1e-13, 1e-13),
          rhs, y, 0.0, t_end, 1e-3);
    return y;
  };
  const State at_s = solve(s), at_r = solve(r);
  return at_r[0] - at_s[0] / at_s[2] * at_r[2];
}

}  // namespace

TEST(Geodesic, HyperboloidClosedForm) {
  const MetricModel m = MetricModel::space_form(3, -1.0);
  const Vec p = m.origin();
  const Vec v = m.tangent_basis(p).col(1);
  const GeodesicPath g(m, {p, v}, 5.0);
  for (double t : {-5.0, -1.0, 0.5, 3.0, 5.0}) {
    EXPECT_LT((g.point(t) - (std::cosh(t) * p + std::sinh(t) * v)).norm(), 1e-12 * std::cosh(t));
    EXPECT_NEAR(m.norm(g.point(t), g.velocity(t)), 1.0, 1e-8);
  }
}

TEST(Geodesic, ParallelFrameOrthonormal) {
  const MetricModel w = MetricModel::warped_surface(WarpProfile::polynomial({1.0, 0.0, 1.0}), -INFINITY,
                                                    INFINITY);
  const Vec p = v2(0.3, 0.0);
  const double f = w.warp()->f(0.3);
  const GeodesicPath g(w, {p, v2(0.6, 0.8 / f)}, 6.0);
  for (double t = -6.0; t <= 6.0; t += 0.5) {
    const PointTangent st = g.state(t);
    const Vec x = g.normal(0, t);
    EXPECT_NEAR(w.norm(st.point, st.vector), 1.0, 1e-8);
    EXPECT_NEAR(w.norm(st.point, x), 1.0, 1e-8);
    EXPECT_NEAR(w.inner(st.point, x, st.vector), 0.0, 1e-8);
  }
}

TEST(Geodesic, WarpedCoshEquatorIsHyperbolicGeodesic) {
  const MetricModel w = MetricModel::warped_surface(WarpProfile::cosh(1.0), -INFINITY, INFINITY);
  const MetricModel h = MetricModel::space_form(2, -1.0);
  const GeodesicPath g(w, {v2(0, 0), v2(std::cos(0.4), std::sin(0.4))}, 3.0);
  auto lift = [](const Vec& x) {
    return (Vec(3) << std::cosh(x(0)) * std::cosh(x(1)), std::cosh(x(0)) * std::sinh(x(1)),
            std::sinh(x(0)))
        .finished();
  };
  for (double t : {0.5, 1.0, 2.0, 3.0})
    EXPECT_NEAR(distance(h, lift(g.point(0.0)), lift(g.point(t))), t, 1e-9);
}

TEST(Geodesic, RejectsNonUnitDirection) {
  const MetricModel m = MetricModel::euclidean(2);
  try {
    GeodesicPath(m, {v2(0, 0), v2(2, 0)}, 1.0);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_STREQ(e.what(), "non-unit direction");
  }
}

TEST(Dirichlet, FlatIsLinear) {
  const MetricModel m = MetricModel::euclidean(2);
  const JacobiSolution h = dirichlet_jacobi(origin_path(m, 1.0), 0, 4.0);
  for (double r : {0.0, 1.0, 2.5, 4.0}) EXPECT_NEAR(h.value(r), 1.0 - r / 4.0, 1e-15);
}

TEST(Dirichlet, HyperbolicClosedForm) {
  const MetricModel m = MetricModel::space_form(2, -1.0);
  const JacobiSolution h = dirichlet_jacobi(origin_path(m, 2.0), 0, 2.0);
  const double want = std::cosh(1.0) - std::sinh(1.0) / std::tanh(2.0);
  EXPECT_NEAR(want, 0.324027136832, 1e-12);
  EXPECT_NEAR(h.value(1.0), want, 1e-13);
  EXPECT_NEAR(h.value(2.0), 0.0, 1e-10);
  // residual h'' - h by central differences of h'
  for (double r : {0.3, 1.0, 1.7}) {
    const double d = 1e-5;
    const double h2 = (h.derivative(r + d) - h.derivative(r - d)) / (2 * d);
    EXPECT_NEAR(h2 - h.value(r), 0.0, 1e-8);
  }
}

TEST(Dirichlet, LargeEndpointsStayFinite) {
  const MetricModel m = MetricModel::space_form(2, -1.0);
  const JacobiSolution h = dirichlet_jacobi(origin_path(m, 1.0), 0, 5000.0);
  EXPECT_NEAR(h.value(1.0), std::exp(-1.0), 1e-12);
  EXPECT_GE(h.value(4999.0), 0.0);
  EXPECT_LE(h.value(4999.0), 1.0 / 5000.0);
}

TEST(Dirichlet, WarpedMatchesIndependentIntegrator) {
  const WarpProfile prof = WarpProfile::polynomial({1.0, 0.0, 1.0});
  const MetricModel w = MetricModel::warped_surface(prof, -INFINITY, INFINITY);
  const double r0 = -0.5;
  // radial geodesic theta = 0; K(t) = -f''/f at r0 + t
  const GeodesicPath g(w, {v2(r0, 0.0), v2(1.0, 0.0)}, 8.0);
  auto k = [&](double t) { return -prof.d2_over_f(r0 + t); };
  for (double s : {1.5, 8.0}) {
    const JacobiSolution h = dirichlet_jacobi(g, 0, s);
    for (double r : {0.25 * s, 0.5 * s, 0.9 * s}) EXPECT_NEAR(h.value(r), odeint_dirichlet(k, s, r), 1e-9);
    EXPECT_NEAR(h.value(s), 0.0, 1e-10);
  }
  const MetricModel c = MetricModel::warped_surface(WarpProfile::cosh(1.0), -INFINITY, INFINITY);
  const GeodesicPath gc(c, {v2(0, 0), v2(1, 0)}, 2.0);
  EXPECT_NEAR(dirichlet_jacobi(gc, 0, 2.0).value(1.0), 0.324027136832, 1e-9);
}

TEST(Dirichlet, ConvexitySandwichProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> us(0.5, 60.0), ub(0.1, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double b = ub(rng), s = us(rng);
    const MetricModel m = trial % 3 == 2
                              ? MetricModel::warped_surface(WarpProfile::cosh(b), -INFINITY, INFINITY)
                              : MetricModel::space_form(2 + trial % 2, -b * b);
    const GeodesicPath g = origin_path(m, s);
    const JacobiSolution h = dirichlet_jacobi(g, 0, s);
    for (int i = 0; i <= 200; ++i) {
      const double r = s * i / 200.0;
      ASSERT_GE(h.value(r), -1e-10);
      ASSERT_LE(h.value(r), 1.0 - r / s + 1e-10);
    }
  }
}

TEST(Dirichlet, PositiveCurvatureComparisonViolation) {
  const MetricModel s = MetricModel::round_sphere(2);
  try {
    dirichlet_jacobi(origin_path(s, 4.0), 0, pi);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_STREQ(e.what(), "comparison violation");
  }
}

TEST(Stable, ClosedFormDecay) {
  const MetricModel e = MetricModel::euclidean(3);
  const JacobiSolution h0 = stable_jacobi(origin_path(e, 1.0), 1, 1.0, 1e-6);
  EXPECT_NEAR(h0.value(0.7), 1.0, 1e-6);
  EXPECT_NEAR(h0.derivative(0.0), 0.0, 1e-6);
  for (double b : {1.0, 2.0}) {
    const MetricModel m = MetricModel::space_form(2, -b * b);
    const JacobiSolution h = stable_jacobi(origin_path(m, 1.0), 0, 1.0, 1e-7);
    EXPECT_NEAR(h.derivative(0.0), -b, 1e-7);
    for (double r : {0.25, 0.5, 1.0}) EXPECT_NEAR(h.value(r), std::exp(-b * r), h.truncation_bound + 1e-12);
    EXPECT_LE(h.truncation_bound, 1e-7 * (1 + 1e-12));
  }
}

TEST(Stable, WarpedExpProfileDecays) {
  const MetricModel w = MetricModel::warped_surface(WarpProfile::exp(1.5), -INFINITY, INFINITY);
  const GeodesicPath g(w, {v2(0, 0), v2(1, 0)}, 2.0);
  const JacobiSolution h = stable_jacobi(g, 0, 1.0, 1e-6);
  EXPECT_NEAR(h.derivative(0.0), -1.5, 1e-6);
  EXPECT_NEAR(h.value(1.0), std::exp(-1.5), 1e-6);
}

TEST(Stable, ToleranceUnachievable) {
  const MetricModel m = MetricModel::space_form(2, -1.0);
  try {
    stable_jacobi(origin_path(m, 1.0), 0, 1.0, 1e-8);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_STREQ(e.what(), "tolerance unachievable");
  }
}

TEST(Stable, MonotoneLimitProperty) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> us(1.0, 30.0), uf(1.05, 4.0);
  const WarpProfile prof = WarpProfile::polynomial({1.0, 0.0, 1.0});
  const MetricModel w = MetricModel::warped_surface(prof, -INFINITY, INFINITY);
  const GeodesicPath g(w, {v2(0.2, 0.0), v2(1.0, 0.0)}, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double s1 = us(rng), s2 = s1 * uf(rng);
    const JacobiSolution a = dirichlet_jacobi(g, 0, s1), b = dirichlet_jacobi(g, 0, s2);
    for (int i = 0; i <= 50; ++i) {
      const double r = s1 * i / 50.0;
      ASSERT_LE(std::abs(b.value(r) - a.value(r)), r * (1 / s1 - 1 / s2) + 1e-10);
      ASSERT_LE(b.value(r), 1.0);
    }
  }
}

TEST(InitialValue, SinhSolution) {
  const MetricModel m = MetricModel::space_form(2, -4.0);
  const JacobiSolution h = initial_value_jacobi(origin_path(m, 1.0), 0, 3.0);
  EXPECT_NEAR(h.value(1.5), std::sinh(3.0) / 2.0, 1e-12);
  EXPECT_NEAR(h.derivative(1.5), std::cosh(3.0), 1e-12);
}
