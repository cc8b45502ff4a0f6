#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <boost/math/special_functions/spherical_harmonic.hpp>
#include <cmath>
#include <random>

#include "pgeom/kuznecov.hpp"

using namespace pgeom;

namespace {

IntVec iv(std::initializer_list<std::int64_t> v) {
  IntVec out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (auto x : v) out(i++) = x;
  return out;
}

HypersurfaceChart axis_subtorus(int n, int d, Vec x0 = Vec()) {
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n, d);
  for (int c = 0; c < d; ++c) a(c, c) = 1;
  return charts::flat_subtorus(MetricModel::flat_torus(n), a, x0.size() ? x0 : Vec(Vec::Zero(n)));
}

// Brute-force N(cap) for the axis subtorus T^d x {0}: lattice points with the
// first d coordinates zero, each contributing (2pi)^{2d-n}.
double brute_axis_count(int n, int d, int cap) {
  const int free = n - d;
  std::int64_t count = 0;
  std::vector<int> m(free, -cap);
  while (true) {
    std::int64_t s = 0;
    for (int x : m) s += static_cast<std::int64_t>(x) * x;
    if (s <= static_cast<std::int64_t>(cap) * cap) ++count;
    int i = 0;
    while (i < free && ++m[i] > cap) m[i++] = -cap;
    if (i == free) break;
  }
  return static_cast<double>(count) * std::pow(two_pi, 2.0 * d - n);
}

}  // namespace

TEST(TorusEigenfunction, UnitNormalizationProperty) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> u(-40, 40);
  const int nodes = 128;
  for (int trial = 0; trial < 10; ++trial) {
    const IntVec m = iv({u(rng), u(rng)});
    double acc = 0.0;
    for (int i = 0; i < nodes; ++i)
      for (int j = 0; j < nodes; ++j) {
        const Vec x = (Vec(2) << two_pi * i / nodes, two_pi * j / nodes).finished();
        acc += std::norm(torus_eigenfunction(m, x));
      }
    EXPECT_NEAR(acc * std::pow(two_pi / nodes, 2), 1.0, 1e-10);
  }
}

TEST(TorusPeriod, SelectionRuleOnAxisCircle) {
  const HypersurfaceChart s = axis_subtorus(2, 1);
  EXPECT_LT(std::abs(torus_period(iv({3, 0}), s)), 1e-12);
  EXPECT_NEAR(std::abs(torus_period(iv({0, 5}), s)), 1.0, 1e-12);
  EXPECT_NEAR(torus_period(iv({0, 0}), s).real(), two_pi * std::pow(two_pi, -1.0), 1e-12);
  for (int m1 = -6; m1 <= 6; ++m1)
    for (int m2 = -6; m2 <= 6; ++m2) {
      const Complex q = torus_period(iv({m1, m2}), s);
      const Complex e = torus_period_exact(iv({m1, m2}), s);
      EXPECT_LT(std::abs(q - e), 1e-12);
      if (m1 != 0) {
        EXPECT_LT(std::abs(q), 1e-12);
      }
    }
}

TEST(TorusPeriod, AxisSubtorusClosedForm) {
  const Vec x0 = (Vec(3) << 0.0, 0.0, 0.7).finished();
  const HypersurfaceChart s = axis_subtorus(3, 2, x0);
  const Complex p = torus_period(iv({0, 0, 4}), s);
  EXPECT_NEAR(std::abs(p), std::pow(two_pi, 2 - 1.5), 1e-12);
  EXPECT_NEAR(std::arg(p), 4 * 0.7, 1e-12);
  EXPECT_LT(std::abs(torus_period(iv({1, 0, 4}), s)), 1e-12);
  EXPECT_LT(std::abs(torus_period(iv({0, -2, 0}), s)), 1e-12);
}

TEST(TorusPeriod, TiltedCircleMatchesExact) {
  const MetricModel t = MetricModel::flat_torus(2);
  const Eigen::MatrixXi a = (Eigen::MatrixXi(2, 1) << 1, 2).finished();
  const HypersurfaceChart s = charts::flat_subtorus(t, a, (Vec(2) << 0.3, 0.1).finished());
  for (const IntVec& m : {iv({2, -1}), iv({-4, 2}), iv({1, 1}), iv({0, 0})}) {
    EXPECT_LT(std::abs(torus_period(m, s) - torus_period_exact(m, s)), 1e-12);
  }
  // m = 0: length sqrt(5) 2pi times (2pi)^{-1}
  EXPECT_NEAR(torus_period_exact(iv({0, 0}), s).real(), std::sqrt(5.0), 1e-12);
}

TEST(TorusPeriod, CurvedGraphDecays) {
  const MetricModel t = MetricModel::flat_torus(2);
  const HypersurfaceChart s = charts::torus_graph(t, 0.5, 1, 0.0, 0.0);
  double prev = std::abs(torus_period(iv({0, 0}), s));
  // m = 0 gives the arclength over 2pi
  const double length = 4 * std::sqrt(1.25) * std::comp_ellint_2(std::sqrt(0.25 / 1.25));
  EXPECT_NEAR(prev, length / two_pi, 1e-10);
  for (int lam : {4, 16, 64, 256}) {
    const double v = std::abs(torus_period(iv({0, lam}), s));
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 0.1);
}

TEST(TorusPeriod, CurveQuadratureConverges) {
  const MetricModel t = MetricModel::flat_torus(2);
  const HypersurfaceChart s = charts::torus_graph(t, 0.4, 2, 0.3, 1.0);
  for (const IntVec& m : {iv({0, 7}), iv({3, 2}), iv({-5, 11})})
    EXPECT_LT(std::abs(torus_period(m, s, 2048) - torus_period(m, s, 4096)), 1e-12);
}

TEST(RationalDirection, ReducesAndRejects) {
  const Eigen::VectorXi d = rational_direction((Vec(2) << 0.5, 1.0).finished());
  EXPECT_EQ(d(0), 1);
  EXPECT_EQ(d(1), 2);
  const Eigen::VectorXi e = rational_direction((Vec(3) << -3.0, 6.0, 9.0).finished());
  EXPECT_EQ(e(0), -1);
  EXPECT_EQ(e(1), 2);
  EXPECT_EQ(e(2), 3);
  try {
    rational_direction((Vec(2) << 1.0, std::sqrt(2.0)).finished());
    FAIL();
  } catch (const InvalidInput& ex) {
    EXPECT_STREQ(ex.what(), "not closed in torus");
  }
}

TEST(IntegerKernel, AnnihilatesDirections) {
  const Eigen::MatrixXi a = (Eigen::MatrixXi(3, 2) << 1, 0, 2, 1, 0, 3).finished();
  const IntMat k = integer_kernel(a);
  ASSERT_EQ(k.cols(), 1);
  const IntMat prod = a.cast<std::int64_t>().transpose() * k;
  EXPECT_EQ(prod.cwiseAbs().maxCoeff(), 0);
  EXPECT_GT(k.cwiseAbs().maxCoeff(), 0);
}

TEST(TorusKuznecov, AxisCircleCount) {
  const KuznecovSeries s = torus_kuznecov(axis_subtorus(2, 1), 10.0);
  EXPECT_NEAR(s.cumulative_at(10.0), 21.0, 1e-9);
  for (int lam : {1, 3, 7, 10}) EXPECT_NEAR(s.cumulative_at(lam), 2 * lam + 1, 1e-9);
  EXPECT_DOUBLE_EQ(s.predicted_exponent, 1.0);
}

TEST(TorusKuznecov, MatchesBruteForceEnumeration) {
  for (const auto& [n, d] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {3, 2}}) {
    const KuznecovSeries s = torus_kuznecov(axis_subtorus(n, d), 30.0);
    EXPECT_NEAR(s.cumulative_at(30.0), brute_axis_count(n, d, 30), 1e-8 * brute_axis_count(n, d, 30));
  }
}

TEST(TorusKuznecov, GrowthExponents) {
  const KuznecovSeries c2 = torus_kuznecov(axis_subtorus(2, 1), 1000.0);
  EXPECT_GE(c2.fit.exponent, 0.95);
  EXPECT_LE(c2.fit.exponent, 1.05);
  const KuznecovSeries c3 = torus_kuznecov(axis_subtorus(3, 1), 300.0);
  EXPECT_NEAR(c3.fit.exponent, 2.0, 0.1);
  const KuznecovSeries p3 = torus_kuznecov(axis_subtorus(3, 2), 1000.0);
  EXPECT_NEAR(p3.fit.exponent, 1.0, 0.1);
  EXPECT_EQ(c3.fit.points, 16);
}

TEST(TorusKuznecov, CumulativeMonotone) {
  const MetricModel t = MetricModel::flat_torus(2);
  const KuznecovSeries s = torus_kuznecov(charts::torus_graph(t, 0.3, 1, 0.0, 0.5), 40.0);
  double prev = 0.0, prev_lambda = 0.0;
  for (const auto& e : s.entries) {
    EXPECT_GE(e.abs2, 0.0);
    EXPECT_GE(e.cumulative, prev);
    EXPECT_GE(e.eigenvalue, prev_lambda);
    prev = e.cumulative;
    prev_lambda = e.eigenvalue;
  }
}

TEST(TorusKuznecov, RejectsOutOfScope) {
  EXPECT_THROW(torus_kuznecov(axis_subtorus(2, 1), 2500.0), InvalidInput);
  EXPECT_THROW(torus_kuznecov(axis_subtorus(2, 1), 0.5), InvalidInput);
  try {
    torus_kuznecov(axis_subtorus(5, 1), 2000.0);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_STREQ(e.what(), "count budget exceeded");
  }
}

TEST(Sphere, LegendreAtZeroMatchesBoost) {
  for (int l = 0; l <= 200; ++l)
    EXPECT_NEAR(legendre_at_zero(l), boost::math::legendre_p(l, 0.0), 1e-14) << l;
}

TEST(Sphere, ZonalPeriodReferenceValues) {
  EXPECT_NEAR(sphere_zonal_period(0), std::sqrt(pi), 1e-14);
  EXPECT_NEAR(sphere_zonal_period(0), 1.77245, 1e-5);
  EXPECT_EQ(sphere_zonal_period(1), 0.0);
  EXPECT_NEAR(sphere_zonal_period(2), -1.9817, 1e-4);
  for (int l = 1; l < 300; l += 2) EXPECT_EQ(sphere_zonal_period(l), 0.0);
}

TEST(Sphere, NormalizedLegendreMatchesBoostHarmonic) {
  for (int l : {0, 1, 2, 5, 17, 30})
    for (int k = 0; k <= l; k += std::max(1, l / 4))
      for (double theta : {0.3, 1.1, pi / 2, 2.7}) {
        const double want = std::abs(boost::math::spherical_harmonic_r(l, k, theta, 0.0));
        EXPECT_NEAR(std::abs(normalized_legendre(l, k, std::cos(theta))), want, 1e-12) << l << " " << k;
      }
}

TEST(Sphere, HarmonicsAreUnitNormalized) {
  for (int l : {0, 3, 10, 40})
    for (int k : {0, l / 2, l}) EXPECT_NEAR(sphere_harmonic_norm2(l, k), 1.0, 1e-12) << l << " " << k;
}

TEST(Sphere, ZonalQuadratureCrossCheck) {
  // Gauss-Legendre on the explicit equator period 2pi Y_l^0(pi/2) against a
  // direct azimuthal quadrature of Boost's unnormalized harmonic.
  for (int l = 0; l <= 30; ++l) {
    const Complex q = sphere_period_quadrature(l, 0, 64);
    EXPECT_NEAR(q.real(), sphere_zonal_period(l), 1e-9);
    double acc = 0.0;
    for (int j = 0; j < 64; ++j)
      acc += boost::math::spherical_harmonic_r(l, 0, pi / 2, two_pi * j / 64.0);
    EXPECT_NEAR(acc * two_pi / 64.0, sphere_zonal_period(l), 1e-9);
  }
  for (int k = 1; k <= 5; ++k) EXPECT_LT(std::abs(sphere_period_quadrature(12, k, 48)), 1e-13);
}

TEST(Sphere, SharpnessAndGrowth) {
  const KuznecovSeries s = sphere_kuznecov(200);
  EXPECT_GE(s.sup_period, 1.0);
  EXPECT_LE(s.sup_period, 3.0);
  double tail_min = INFINITY;
  for (int l = 100; l <= 200; l += 2) tail_min = std::min(tail_min, std::abs(sphere_zonal_period(l)));
  EXPECT_GE(tail_min, 1.0);
  // asymptotic |period| -> 2 for even l
  EXPECT_NEAR(std::abs(sphere_zonal_period(10000)), 2.0, 1e-3);
  const KuznecovSeries big = sphere_kuznecov(500);
  EXPECT_GE(big.fit.exponent, 0.9);
  EXPECT_LE(big.fit.exponent, 1.1);
  EXPECT_THROW(sphere_kuznecov(501), InvalidInput);
}

TEST(LatticeCount, ReferenceValues) {
  EXPECT_EQ(lattice_sphere_count(2, 25), 12);
  EXPECT_EQ(lattice_sphere_count(3, 1), 6);
  EXPECT_EQ(lattice_sphere_count(2, 3), 0);
  EXPECT_EQ(lattice_sphere_count(4, 1), 8);
  // r_2(65) = 4 (d_1 - d_3) = 16
  EXPECT_EQ(lattice_sphere_count(2, 65), 16);
  try {
    lattice_sphere_count(3, 20'000'000);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_STREQ(e.what(), "count budget exceeded");
  }
}

TEST(LatticeCount, SumOverShellsIsBallCount) {
  std::int64_t total = 0;
  for (int r2 = 0; r2 <= 100; ++r2) total += lattice_sphere_count(2, r2);
  std::int64_t brute = 0;
  for (int a = -10; a <= 10; ++a)
    for (int b = -10; b <= 10; ++b) brute += a * a + b * b <= 100;
  EXPECT_EQ(total, brute);
}

TEST(Parseval, BesselInequalityTightens) {
  const double norm2 = std::pow(two_pi * boost::math::cyl_bessel_i(0, 2.0), 2);
  double prev_gap = INFINITY;
  for (double cap : {1.0, 2.0, 4.0, 8.0}) {
    const ParsevalCheck c = parseval_check(cap);
    EXPECT_NEAR(c.norm2, norm2, 1e-10 * norm2);
    EXPECT_LE(c.partial_sum, c.norm2 * (1 + 1e-12));
    const double gap = c.norm2 - c.partial_sum;
    EXPECT_LT(gap, prev_gap);
    prev_gap = gap;
  }
  EXPECT_LT(prev_gap, 1e-6 * norm2);
}
