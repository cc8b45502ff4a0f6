#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <random>

#include "pgeom/oscint.hpp"

using namespace pgeom;
using boost::math::quadrature::gauss_kronrod;

namespace {

OscillatoryProblem problem(int n, Vec c, Mat q, int lo = 4, int hi = 9) {
  OscillatoryProblem p;
  p.dimension = n;
  p.phase = Phase::affine_quadratic("test", std::move(c), std::move(q));
  p.lambda_grid = dyadic_grid(lo, hi);
  return p;
}

Mat diag(std::initializer_list<double> d) {
  Vec v(static_cast<Eigen::Index>(d.size()));
  int i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

// Adaptive Gauss-Kronrod oracle for int_{-1}^{1} a(|x|) e^{i lambda phi(x)} dx.
std::complex<double> gk_1d(const RadialBump& a, const std::function<double(double)>& phi, double lambda) {
  auto re = [&](double x) { return a(std::abs(x)) * std::cos(lambda * phi(x)); };
  auto im = [&](double x) { return a(std::abs(x)) * std::sin(lambda * phi(x)); };
  // split at the plateau edges, where the bump is smooth but not analytic
  const double b = a.plateau();
  std::complex<double> sum = 0.0;
  for (const auto& [lo, hi] : {std::pair{-1.0, -b}, std::pair{-b, b}, std::pair{b, 1.0}})
    sum += std::complex<double>(gauss_kronrod<double, 61>::integrate(re, lo, hi, 12, 1e-13),
                                gauss_kronrod<double, 61>::integrate(im, lo, hi, 12, 1e-13));
  return sum;
}

double bump_integral_1d(const RadialBump& a) {
  const double b = a.plateau();
  return 2 * b + 2 * gauss_kronrod<double, 61>::integrate([&](double x) { return a(x); }, b, 1.0, 12, 1e-15);
}

double bump_integral_2d(const RadialBump& a) {
  const double b = a.plateau();
  return pi * b * b +
         two_pi * gauss_kronrod<double, 61>::integrate([&](double r) { return r * a(r); }, b, 1.0, 12, 1e-15);
}

// Curved sheets through gamma(-r/2) and gamma(r/2) with normals na, nb given
// at the origin and carried along gamma. The symmetric placement keeps both
// points near the hyperboloid origin, where coordinates are well conditioned.
std::pair<HypersurfaceChart, HypersurfaceChart> symmetric_pair(const MetricModel& m, const Vec& dir,
                                                               const Vec& na, const Vec& nb, double r) {
  const Vec o = m.origin();
  const GeodesicPath g(m, {o, dir}, r);
  auto transport = [&](const Vec& n, double t) -> Vec {
    Vec out = g.velocity(t) * m.inner(o, n, dir);
    for (int i = 0; i < g.normal_count(); ++i) out += g.normal(i, t) * m.inner(o, n, g.normal(i, 0.0));
    return out;
  };
  return {charts::sheet_graph(m, g.point(-r / 2), transport(na, -r / 2), {0.3, -0.2}),
          charts::sheet_graph(m, g.point(r / 2), transport(nb, r / 2), {-0.1, 0.4})};
}

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

}  // namespace

TEST(Bump, SupportAndShape) {
  const RadialBump a(0.5);
  EXPECT_EQ(a(0.0), 1.0);
  EXPECT_EQ(a(0.5), 1.0);
  EXPECT_EQ(a(1.0), 0.0);
  EXPECT_LT(a(0.999), 1e-12);
  EXPECT_GT(a(0.75), 0.0);
  EXPECT_LT(a(0.75), 1.0);
  EXPECT_THROW(RadialBump(1.0), InvalidInput);
  EXPECT_THROW(RadialBump(-0.1), InvalidInput);
}

TEST(Evaluate, ZeroPhaseIsBumpIntegral) {
  const RadialBump a(0.5);
  const double one_d = bump_integral_1d(a);
  const double two_d = bump_integral_2d(a);
  const OscillatoryProblem p1 = problem(1, Vec::Zero(1), Mat::Zero(1, 1));
  const OscillatoryProblem p2 = problem(2, Vec::Zero(2), Mat::Zero(2, 2));
  for (double lambda : {1.0, 100.0, 1e4}) {
    EXPECT_NEAR(evaluate(p1, lambda).value.real(), one_d, 1e-12);
    EXPECT_NEAR(evaluate(p2, lambda).value.real(), two_d, 1e-10);
    EXPECT_NEAR(evaluate(p2, lambda).value.imag(), 0.0, 1e-14);
  }
}

TEST(Evaluate, MatchesGaussKronrodOracle) {
  const OscillatoryProblem q = problem(1, Vec::Zero(1), Mat::Identity(1, 1));
  const OscillatoryProblem l = problem(1, Vec::Constant(1, 3.0), Mat::Zero(1, 1));
  for (double lambda : {16.0, 64.0, 256.0}) {
    const auto want_q = gk_1d(q.amplitude, [](double x) { return 0.5 * x * x; }, lambda);
    const QuadratureResult got_q = evaluate(q, lambda);
    EXPECT_LE(std::abs(got_q.value - want_q), got_q.error_estimate + 1e-12) << lambda;
    EXPECT_TRUE(got_q.meets_target);
    const auto want_l = gk_1d(l.amplitude, [](double x) { return 3.0 * x; }, lambda);
    const QuadratureResult got_l = evaluate(l, lambda);
    EXPECT_LE(std::abs(got_l.value - want_l), got_l.error_estimate + 1e-12) << lambda;
    EXPECT_TRUE(got_l.meets_target);
  }
}

TEST(Evaluate, FresnelLimit) {
  const OscillatoryProblem q = problem(1, Vec::Zero(1), Mat::Identity(1, 1));
  const double lambda = 512.0;
  EXPECT_NEAR(std::sqrt(lambda) * std::abs(evaluate(q, lambda).value), std::sqrt(two_pi), 1e-3);
  EXPECT_NEAR(std::sqrt(two_pi), 2.5066, 1e-4);
  // 2-D product: lambda |I| -> 2 pi
  const OscillatoryProblem q2 = problem(2, Vec::Zero(2), Mat::Identity(2, 2));
  EXPECT_NEAR(lambda * std::abs(evaluate(q2, lambda).value), two_pi, 1e-2);
}

TEST(Evaluate, NodeCountFollowsFrequency) {
  const OscillatoryProblem q = problem(1, Vec::Constant(1, 2.0), Mat::Zero(1, 1));
  EXPECT_EQ(nodes_per_axis(q, 1.0), 64u);
  const std::size_t n = nodes_per_axis(q, 1000.0);
  EXPECT_GE(n, static_cast<std::size_t>(10 * 1000.0 * 2.0 / pi));
  EXPECT_EQ(n % 2, 0u);
}

TEST(Evaluate, CapErrors) {
  const OscillatoryProblem q = problem(2, Vec::Zero(2), Mat::Identity(2, 2));
  try {
    evaluate(q, 1e5);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_STREQ(e.what(), "frequency too high for direct quadrature");
  }
  EXPECT_THROW(evaluate(q, 64.0, 1e3), NumericalError);
  EXPECT_THROW(evaluate(q, -1.0), InvalidInput);
  OscillatoryProblem bad = q;
  bad.dimension = 4;
  EXPECT_THROW(evaluate(bad, 1.0), InvalidInput);
}

TEST(Evaluate, DoublingResolutionWithinEstimateProperty) {
  const std::vector<OscillatoryProblem> built_ins = {
      problem(1, Vec::Zero(1), Mat::Identity(1, 1)), problem(2, Vec::Zero(2), Mat::Identity(2, 2)),
      problem(2, Vec::Zero(2), diag({1.0, -1.0})), problem(1, Vec::Constant(1, 1.0), Mat::Zero(1, 1)),
      problem(2, Vec::Unit(2, 0), diag({0.0, 2.0}))};
  for (const auto& p : built_ins)
    for (double lambda : {16.0, 128.0}) {
      const QuadratureResult r = evaluate(p, lambda);
      double abs_sum = 0.0;
      const auto finer = detail::trapezoid(p, lambda, 4 * nodes_per_axis(p, lambda), 1, &abs_sum);
      EXPECT_LE(std::abs(finer - r.value), r.error_estimate) << p.phase.name << " " << lambda;
    }
}

TEST(Evaluate, ThreadCountIsDeterministic) {
  const OscillatoryProblem q = problem(2, Vec::Zero(2), diag({1.0, -1.0}));
  const auto a = evaluate(q, 100.0, default_node_cap, 1).value;
  const auto b = evaluate(q, 100.0, default_node_cap, 3).value;
  EXPECT_EQ(a, b);
}

TEST(Nondegenerate, QuadraticExponents) {
  struct Case {
    int n;
    Mat q;
    double rate;
  };
  for (const Case& c : {Case{1, Mat::Identity(1, 1), -0.5}, Case{2, Mat::Identity(2, 2), -1.0},
                        Case{2, diag({1.0, -1.0}), -1.0}}) {
    const BoundCheck b = verify_nondegenerate_bound(problem(c.n, Vec::Zero(c.n), c.q), 1.0);
    EXPECT_TRUE(b.pass);
    EXPECT_TRUE(b.precondition);
    EXPECT_NEAR(b.fit.exponent, c.rate, 0.1);
    EXPECT_EQ(b.fit.points, 6);
    EXPECT_DOUBLE_EQ(b.certified_c, 1.0);
    EXPECT_LT(b.constant, 10.0);
  }
}

TEST(Nondegenerate, PreconditionGuardsConstant) {
  const BoundCheck b = verify_nondegenerate_bound(problem(2, Vec::Zero(2), diag({0.5, 1.0})), 1.0);
  EXPECT_FALSE(b.precondition);
  EXPECT_FALSE(b.pass);
  EXPECT_THROW(verify_nondegenerate_bound(problem(1, Vec::Zero(1), Mat::Identity(1, 1), 4, 8), 1.0),
               InvalidInput);
}

TEST(Nonstationary, LinearAndTiltedPass) {
  const BoundCheck a = verify_nonstationary_bound(problem(1, Vec::Constant(1, 3.0), Mat::Zero(1, 1)), 3.0, 5);
  EXPECT_TRUE(a.pass);
  EXPECT_TRUE(a.precondition);
  EXPECT_LE(a.fit.exponent, -5.0);
  const BoundCheck b = verify_nonstationary_bound(problem(2, Vec::Unit(2, 0), diag({0.0, 2.0})), 1.0, 3);
  EXPECT_TRUE(b.pass);
  EXPECT_NEAR(b.certified_c, 1.0, 1e-12);
}

TEST(Nonstationary, CriticalPointIsNegativeControl) {
  const BoundCheck b = verify_nonstationary_bound(problem(2, Vec::Zero(2), Mat::Identity(2, 2)), 1.0, 3);
  EXPECT_FALSE(b.pass);
  EXPECT_FALSE(b.precondition);
  EXPECT_NEAR(b.fit.exponent, -1.0, 0.1);
}

TEST(PhaseHessian, EuclideanParallelLines) {
  const MetricModel e = MetricModel::euclidean(2);
  const HypersurfaceChart a = charts::geodesic_sheet(e, v2(0, 0), v2(0, 1));
  const HypersurfaceChart b = charts::geodesic_sheet(e, v2(0, 4), v2(0, 1));
  const PhaseHessian h = distance_phase_hessian(e, a, b, Vec::Zero(1), Vec::Zero(1));
  // d((x,0),(y,4)) = sqrt((x-y)^2 + 16): xx = yy = 1/4, xy = -1/4
  EXPECT_NEAR(h.r, 4.0, 1e-14);
  EXPECT_NEAR(h.finite_difference(0, 0), 0.25, 1e-6);
  EXPECT_NEAR(h.finite_difference(1, 1), 0.25, 1e-6);
  EXPECT_NEAR(std::abs(h.finite_difference(0, 1)), 0.25, 1e-6);
  EXPECT_LT(h.discrepancy, 1e-5);
  EXPECT_DOUBLE_EQ(h.mixed_bound, 0.5);
  EXPECT_LE(h.mixed_max, h.mixed_bound);
  EXPECT_NEAR(h.gradient_fd.norm(), 0.0, 1e-8);
}

TEST(PhaseHessian, RadialDirectionGradientIsPlusMinusOne) {
  const MetricModel e = MetricModel::euclidean(2);
  const HypersurfaceChart a = charts::geodesic_sheet(e, v2(0, 0), v2(1, 0));
  const HypersurfaceChart b = charts::geodesic_sheet(e, v2(0, 4), v2(1, 0));
  const PhaseHessian h = distance_phase_hessian(e, a, b, Vec::Zero(1), Vec::Zero(1));
  EXPECT_NEAR(std::abs(h.gradient_fd(0)), 1.0, 1e-8);
  EXPECT_NEAR(std::abs(h.gradient_fd(1)), 1.0, 1e-8);
  EXPECT_LT((h.gradient_fd - h.gradient_formula).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(PhaseHessian, HyperbolicGeodesicsCothDiagonal) {
  const MetricModel m = MetricModel::space_form(2, -1.0);
  const Vec o = m.origin();
  const Mat basis = m.tangent_basis(o);
  for (double r : {2.0, 5.0, 10.0}) {
    const GeodesicPath g(m, {o, basis.col(0)}, r);
    // perpendicular geodesics through gamma(-r/2) and gamma(r/2)
    const HypersurfaceChart a = charts::geodesic_sheet(m, g.point(-r / 2), g.velocity(-r / 2));
    const HypersurfaceChart b = charts::geodesic_sheet(m, g.point(r / 2), g.velocity(r / 2));
    const PhaseHessian h = distance_phase_hessian(m, a, b, Vec::Zero(1), Vec::Zero(1));
    EXPECT_NEAR(h.r, r, 1e-10);
    EXPECT_NEAR(h.finite_difference(0, 0), 1.0 / std::tanh(r), 1e-4) << r;
    EXPECT_NEAR(h.finite_difference(1, 1), 1.0 / std::tanh(r), 1e-4) << r;
    EXPECT_NEAR(std::abs(h.finite_difference(0, 1)), 1.0 / std::sinh(r), 1e-4) << r;
    EXPECT_LT(h.discrepancy, 1e-3) << r;
    EXPECT_LE(h.mixed_max, 2.0 / r + 1e-3);
    EXPECT_NEAR(h.finite_difference(0, 1), h.finite_difference(1, 0), 1e-5);
  }
}

TEST(PhaseHessian, OutsideValidityRegime) {
  const MetricModel e = MetricModel::euclidean(2);
  const HypersurfaceChart a = charts::geodesic_sheet(e, v2(0, 0), v2(0, 1));
  const HypersurfaceChart b = charts::geodesic_sheet(e, v2(0, 0.5), v2(0, 1));
  try {
    distance_phase_hessian(e, a, b, Vec::Zero(1), Vec::Zero(1));
    FAIL();
  } catch (const InvalidInput& ex) {
    EXPECT_STREQ(ex.what(), "outside validity regime");
  }
}

TEST(PhaseHessian, MixedBlockBoundProperty) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> ur(1.0, 20.0);
  for (int trial = 0; trial < 40; ++trial) {
    const MetricModel m = trial % 2 ? MetricModel::space_form(3, -1.0) : MetricModel::euclidean(3);
    const Mat basis = m.tangent_basis(m.origin());
    auto unit = [&]() -> Vec {
      Vec c(3);
      for (int i = 0; i < 3; ++i) c(i) = gauss(rng);
      return basis * c.normalized();
    };
    const double r = ur(rng);
    const Vec dir = unit(), na = unit(), nb = unit();
    const auto [a, b] = symmetric_pair(m, dir, na, nb, r);
    const PhaseHessian h = distance_phase_hessian(m, a, b, Vec::Zero(2), Vec::Zero(2));
    EXPECT_NEAR(h.r, r, 1e-8 * r) << trial;
    EXPECT_LE(h.mixed_max, 2.0 / h.r + 5e-3) << trial;
    EXPECT_LT((h.finite_difference - h.finite_difference.transpose()).cwiseAbs().maxCoeff(), 1e-5) << trial;
  }
}

TEST(PhaseHessian, FormulaAgreesAtReferenceDistances) {
  const MetricModel m = MetricModel::space_form(3, -1.0);
  const Mat basis = m.tangent_basis(m.origin());
  const Vec na = (basis.col(1) + basis.col(0)).normalized();
  const Vec nb = (basis.col(2) - 0.5 * basis.col(0)).normalized();
  for (double r : {2.0, 5.0, 10.0}) {
    const auto [a, b] = symmetric_pair(m, basis.col(0), na, nb, r);
    EXPECT_LT(distance_phase_hessian(m, a, b, Vec::Zero(2), Vec::Zero(2)).discrepancy, 1e-3) << r;
  }
}
