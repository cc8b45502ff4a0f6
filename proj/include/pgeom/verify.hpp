#pragma once

// Invariant suite shared by `pgeom verify-all` and the acceptance driver.
// Every check is deterministic given the seed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pgeom/curvature.hpp"
#include "pgeom/hypothesis.hpp"
#include "pgeom/jacobi.hpp"
#include "pgeom/kuznecov.hpp"
#include "pgeom/manifold.hpp"
#include "pgeom/oscint.hpp"

namespace pgeom {

struct Check {
  std::string id;
  std::string description;
  bool pass = false;
  std::string detail;
};

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct SuiteOptions {
  unsigned long long seed = 0;
  int threads = 1;
};

namespace verify {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec random_unit(Rng& rng, int n) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v / v.norm();
}

/// Random unit tangent at p.
inline Vec random_tangent(const MetricModel& m, const Vec& p, Rng& rng) {
  const Mat b = m.tangent_basis(p);
  return b * random_unit(rng, m.dim());
}

/// Random point within distance `spread` of the origin.
inline Vec random_point(const MetricModel& m, Rng& rng, double spread) {
  const Vec o = m.origin();
  return exp_map(m, {o, random_tangent(m, o, rng)}, uniform(rng, 0.0, spread));
}

inline Check make(std::string id, std::string description, bool pass, std::string detail) {
  return {std::move(id), std::move(description), pass, std::move(detail)};
}

// --- acceptance criteria ---------------------------------------------------

inline Check horosphere_exactness() {
  double worst = 0.0;
  for (double b : {1.0, 2.0, 3.0})
    for (int n : {2, 3}) {
      const MetricModel m = MetricModel::space_form(n, -b * b);
      const Vec o = m.origin();
      const double tol = 1e-7;
      const ShapeForm s = horosphere_shape(m, {o, m.tangent_basis(o).col(0)}, tol);
      for (int i = 0; i < s.matrix.rows(); ++i)
        for (int j = 0; j < s.matrix.cols(); ++j)
          worst = std::max(worst, std::abs(s.matrix(i, j) - (i == j ? b : 0.0)));
    }
  return make("horosphere_exactness", "horosphere diagonal equals b on SpaceForm(n,-b^2)",
              worst <= 1e-6, "max deviation " + fmt(worst));
}

inline std::vector<double> riccati_grid() {
  std::vector<double> g;
  for (int i = 0; i < 50; ++i) g.push_back(0.05 * std::pow(1000.0, i / 49.0));
  return g;
}

inline Check riccati_comparison(ComparisonReport* out = nullptr) {
  const MetricModel m = MetricModel::space_form(2, -1.0);
  const Vec o = m.origin();
  const GeodesicPath path(m, {o, m.tangent_basis(o).col(0)}, 50.0);
  ComparisonReport rep = comparison_report(m, path, riccati_grid());
  int ok = 0;
  for (const auto& row : rep.rows) ok += row.pass;
  if (out) *out = rep;
  return make("riccati_comparison", "0 < sphere - horosphere <= 1/r on 50 radii in [0.05, 50]",
              rep.pass, std::to_string(ok) + "/" + std::to_string(rep.rows.size()) + " rows");
}

struct SandwichModel {
  MetricModel model;
  PointTangent start;
};

inline SandwichModel random_jacobi_model(Rng& rng) {
  const int pick = static_cast<int>(uniform(rng, 0.0, 5.0));
  const double b = uniform(rng, 0.5, 2.0);
  auto at_origin = [&](MetricModel m) {
    const Vec o = m.origin();
    const Vec v = random_tangent(m, o, rng);
    return SandwichModel{m, {o, v}};
  };
  switch (pick) {
    case 0: return at_origin(MetricModel::euclidean(2));
    case 1: return at_origin(MetricModel::space_form(2, -b * b));
    case 2: return at_origin(MetricModel::space_form(3, -b * b));
    case 3: {
      const MetricModel m = MetricModel::warped_surface(WarpProfile::cosh(b), -INFINITY, INFINITY);
      return SandwichModel{m, {Vec::Zero(2), Vec((Vec(2) << 0.0, 1.0).finished())}};
    }
    default: {
      const MetricModel m =
          MetricModel::warped_surface(WarpProfile::polynomial({1.0, 0.0, 1.0}), -INFINITY, INFINITY);
      const double r0 = uniform(rng, -1.0, 1.0);
      const double angle = uniform(rng, 0.0, two_pi);
      const double f = m.warp()->f(r0);
      Vec v(2);
      v << std::cos(angle), std::sin(angle) / f;
      return SandwichModel{m, {(Vec(2) << r0, 0.0).finished(), v}};
    }
  }
}

inline Check dirichlet_sandwich(unsigned long long seed) {
  Rng rng(seed ^ 0x5eedULL);
  double worst_low = 0.0, worst_high = 0.0, worst_tail = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    SandwichModel sm = random_jacobi_model(rng);
    const double s = uniform(rng, 1.0, 40.0);
    const GeodesicPath path(sm.model, sm.start, s);
    const int i = sm.model.dim() > 2 ? static_cast<int>(uniform(rng, 0.0, sm.model.dim() - 1.0)) : 0;
    const JacobiSolution hs = dirichlet_jacobi(path, i, s);
    for (int k = 0; k < 200; ++k) {
      const double r = s * k / 199.0;
      const double h = hs.value(r);
      worst_low = std::min(worst_low, h);
      worst_high = std::max(worst_high, h - (1.0 - r / s));
    }
    const double r_max = std::min(s, 5.0);
    const JacobiSolution stable = stable_jacobi(path, i, r_max, 1e-6);
    for (int k = 0; k < 200; ++k) {
      const double r = r_max * k / 199.0;
      const double excess = std::abs(stable.value(r) - hs.value(r)) -
                            (r_max / s + stable.truncation_bound);
      worst_tail = std::max(worst_tail, excess);
    }
  }
  // Rounding slack matches the boundary-value accuracy h_s(s) = 0 to 1e-10.
  ok = worst_low >= -1e-10 && worst_high <= 1e-10 && worst_tail <= 1e-9;
  return make("dirichlet_sandwich", "0 <= h_s <= 1 - r/s and |h - h_s| <= r_max/s on 20 random pairs",
              ok,
              "min h " + fmt(worst_low) + ", max excess over 1-r/s " + fmt(worst_high) +
                  ", max tail excess " + fmt(worst_tail));
}

struct HessianCase {
  std::string name;
  MetricModel model;
  HypersurfaceChart a;
  HypersurfaceChart b;
};

/// Two charts centred on a geodesic segment of length r through the origin;
/// the second is curved when `curved` is set.
inline HessianCase hessian_case(const MetricModel& m, double r, bool curved, const Vec& na,
                                const Vec& nb) {
  const Vec o = m.origin();
  const Vec e = m.tangent_basis(o).col(0);
  const GeodesicPath g(m, {o, e}, r);
  const Vec xa = g.point(-0.5 * r), xb = g.point(0.5 * r);
  // w holds components in the parallel frame (gamma', X_1, ..., X_{n-1})
  auto transport = [&](double t, const Vec& w) {
    Vec out = w(0) * g.velocity(t);
    for (int k = 1; k < m.dim(); ++k) out += w(k) * g.normal(k - 1, t);
    return out;
  };
  HypersurfaceChart a = charts::geodesic_sheet(m, xa, transport(-0.5 * r, na));
  HypersurfaceChart b =
      curved ? charts::sheet_graph(m, xb, transport(0.5 * r, nb),
                                   m.dim() == 2 ? std::vector<double>{0.4}
                                                : std::vector<double>{0.4, -0.3})
             : charts::geodesic_sheet(m, xb, transport(0.5 * r, nb));
  return {m.describe(), m, a, b};
}

inline Vec axis(int n, int i) { return unit_vector(n, i); }

inline Check hessian_decomposition() {
  double worst = 0.0, worst_mixed_excess = -INFINITY;
  int cases = 0;
  for (double r : {2.0, 5.0, 10.0})
    for (int n : {2, 3})
      for (int hyperbolic = 0; hyperbolic < 2; ++hyperbolic)
        for (int curved = 0; curved < 2; ++curved) {
          const MetricModel m =
              hyperbolic ? MetricModel::space_form(n, -1.0) : MetricModel::euclidean(n);
          // sheets orthogonal to the connecting geodesic
          const HessianCase c = hessian_case(m, r, curved, axis(n, 0), axis(n, 0));
          const PhaseHessian h = distance_phase_hessian(m, c.a, c.b, Vec::Zero(n - 1),
                                                        Vec::Zero(n - 1));
          worst = std::max(worst, h.discrepancy);
          worst_mixed_excess = std::max(worst_mixed_excess, h.mixed_max - (2.0 / r + 1e-3));
          ++cases;
        }
  return make("hessian_decomposition",
              "distance-phase Hessian formula matches finite differences at r in {2,5,10}",
              worst <= 1e-3 && worst_mixed_excess <= 0.0,
              std::to_string(cases) + " cases, max discrepancy " + fmt(worst) +
                  ", max mixed excess over 2/r " + fmt(worst_mixed_excess));
}

inline OscillatoryProblem quadratic_problem(int n) {
  OscillatoryProblem p;
  p.dimension = n;
  p.phase = Phase::affine_quadratic("quadratic", Vec::Zero(n), Mat::Identity(n, n));
  p.lambda_grid = dyadic_grid(4, 9);
  return p;
}

inline OscillatoryProblem linear_problem(double slope) {
  OscillatoryProblem p;
  p.dimension = 1;
  p.phase = Phase::affine_quadratic("linear", Vec::Constant(1, slope), Mat::Zero(1, 1));
  p.lambda_grid = dyadic_grid(4, 9);
  return p;
}

inline Check stationary_phase_rates(int threads, std::vector<BoundCheck>* out = nullptr) {
  std::string detail;
  bool ok = true;
  for (int n : {1, 2}) {
    const BoundCheck b = verify_nondegenerate_bound(quadratic_problem(n), 1.0, default_node_cap, threads);
    const bool in_band = std::abs(b.fit.exponent + 0.5 * n) <= 0.1;
    ok = ok && b.pass && in_band;
    detail += "n=" + std::to_string(n) + " exponent " + fmt(b.fit.exponent) + "; ";
    if (out) out->push_back(b);
  }
  const BoundCheck lin = verify_nonstationary_bound(linear_problem(1.0), 1.0, 4, default_node_cap, threads);
  ok = ok && lin.pass;
  detail += "linear exponent " + fmt(lin.fit.exponent);
  if (out) out->push_back(lin);
  return make("stationary_phase_rates",
              "decay -n/2 +- 0.1 for quadratic phases, <= -4 for the linear phase", ok, detail);
}

inline HypersurfaceChart axis_subtorus(int n, int d) {
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n, d);
  for (int c = 0; c < d; ++c) a(c, c) = 1;
  return charts::flat_subtorus(MetricModel::flat_torus(n), a, Vec::Zero(n));
}

inline Check torus_kuznecov_law(KuznecovSeries* out = nullptr) {
  const HypersurfaceChart c = axis_subtorus(2, 1);
  const double n10 = torus_kuznecov(c, 10).cumulative_at(10);
  const KuznecovSeries s = torus_kuznecov(c, 1000);
  if (out) *out = s;
  const bool ok = n10 == 21.0 && s.fit.exponent >= 0.95 && s.fit.exponent <= 1.05;
  return make("torus_kuznecov", "axis circle in T^2: N(10) = 21, growth exponent in [0.95, 1.05]",
              ok, "N(10) " + fmt(n10) + ", exponent " + fmt(s.fit.exponent));
}

inline Check sphere_sharpness() {
  double sup = 0.0, tail_min = INFINITY, odd_max = 0.0;
  for (int l = 0; l <= 200; ++l) {
    const double p = std::abs(sphere_zonal_period(l));
    sup = std::max(sup, p);
    if (l % 2 == 1) odd_max = std::max(odd_max, p);
    if (l % 2 == 0 && l >= 100) tail_min = std::min(tail_min, p);
  }
  const bool ok = sup >= 1.0 && sup <= 3.0 && tail_min >= 1.0 && odd_max == 0.0;
  return make("sphere_sharpness", "equator zonal periods O(1), non-decaying, odd degrees zero",
              ok, "sup " + fmt(sup) + ", min over even l in [100,200] " + fmt(tail_min) +
                      ", max odd " + fmt(odd_max));
}

struct NamedSweep {
  std::string name;
  SweepResult result;
  bool expect_pass = true;
};

inline std::vector<NamedSweep> dichotomy_sweeps(int threads) {
  const MetricModel h3 = MetricModel::space_form(3, -1.0);
  const Vec o = h3.origin();
  const Mat b = h3.tangent_basis(o);
  const RankTolerances tol;
  const CurvatureBounds hyp{1.0, 1.0}, flat{0.0, 0.0};
  std::vector<NamedSweep> out;
  auto run = [&](std::string name, const HypersurfaceChart& c, CurvatureBounds cb, bool expect) {
    out.push_back({std::move(name), surface_sweep(c, sweep_grid(c, 10), tol, cb, threads), expect});
  };
  run("sphere_h3", charts::geodesic_sphere(h3, o, 1.0), hyp, true);
  run("sheet_h3", charts::geodesic_sheet(h3, o, b.col(2)), hyp, true);
  run("horosphere_h3", charts::horosphere(h3, o, b.col(2)), hyp, false);
  run("plane_t3", axis_subtorus(3, 2), flat, false);
  return out;
}

inline Check hypothesis_dichotomy(const std::vector<NamedSweep>& sweeps) {
  bool ok = true;
  std::string detail;
  for (const auto& s : sweeps) {
    const auto& sum = s.result.summary;
    const bool good = s.expect_pass ? sum.passed == sum.total && sum.total == 100
                                    : sum.passed == 0 && sum.total == 100;
    ok = ok && good;
    detail += s.name + " " + std::to_string(sum.passed) + "/" + std::to_string(sum.total) + "; ";
  }
  if (!detail.empty()) detail.resize(detail.size() - 2);
  return make("hypothesis_dichotomy",
              "spheres and sheets in SpaceForm(3,-1) pass everywhere, horospheres and torus planes fail everywhere",
              ok, detail);
}

/// Clause screens on 2-dimensional built-ins, complementing the sweeps.
inline std::vector<NamedSweep> surface_sweeps(int threads) {
  const MetricModel h2 = MetricModel::space_form(2, -1.0);
  const MetricModel t2 = MetricModel::flat_torus(2);
  const Vec o = h2.origin();
  const Mat b = h2.tangent_basis(o);
  const RankTolerances tol;
  std::vector<NamedSweep> out;
  auto run = [&](std::string name, const HypersurfaceChart& c, CurvatureBounds cb, bool expect) {
    out.push_back({std::move(name), surface_sweep(c, sweep_grid(c, 10), tol, cb, threads), expect});
  };
  run("circle_h2", charts::geodesic_sphere(h2, o, 1.0), {1.0, 1.0}, true);
  run("geodesic_h2", charts::geodesic_sheet(h2, o, b.col(1)), {1.0, 1.0}, true);
  run("horocycle_h2", charts::horosphere(h2, o, b.col(1)), {1.0, 1.0}, false);
  const MetricModel h3 = MetricModel::space_form(3, -1.0);
  const Vec o3 = h3.origin();
  run("graph_h3", charts::sheet_graph(h3, o3, h3.tangent_basis(o3).col(2), {2.5, -2.5}),
      {1.0, 1.0}, true);
  run("line_t2", axis_subtorus(2, 1), {0.0, 0.0}, false);
  return out;
}

inline Check corollary_consistency(const std::vector<NamedSweep>& sweeps) {
  int clause_points = 0, violations = 0;
  for (const auto& s : sweeps) {
    clause_points += s.result.summary.clause_points;
    violations += s.result.summary.clause_violations;
  }
  return make("corollary_consistency", "no sweep point satisfies a criterion clause while failing the rank condition",
              violations == 0 && clause_points > 0,
              std::to_string(clause_points) + " clause points, " + std::to_string(violations) +
                  " violations");
}

// --- module invariants -----------------------------------------------------

inline std::vector<MetricModel> metric_models() {
  return {MetricModel::euclidean(2), MetricModel::euclidean(3), MetricModel::space_form(2, -1.0),
          MetricModel::space_form(3, -4.0), MetricModel::flat_torus(2), MetricModel::round_sphere(2)};
}

inline Check distance_symmetry(unsigned long long seed) {
  Rng rng(seed ^ 0xd157ULL);
  double worst = 0.0;
  for (const MetricModel& m : metric_models())
    for (int i = 0; i < 1000; ++i) {
      const Vec p = random_point(m, rng, 3.0), q = random_point(m, rng, 3.0);
      worst = std::max(worst, std::abs(distance(m, p, q) - distance(m, q, p)));
    }
  return make("distance_symmetry", "d(p,q) = d(q,p) on 1000 random pairs per model", worst <= 1e-12,
              "max asymmetry " + fmt(worst));
}

inline Check triangle_inequality(unsigned long long seed) {
  Rng rng(seed ^ 0x7e1aULL);
  double worst = 0.0;
  for (const MetricModel& m : metric_models())
    for (int i = 0; i < 1000; ++i) {
      const Vec p = random_point(m, rng, 3.0), q = random_point(m, rng, 3.0),
                x = random_point(m, rng, 3.0);
      worst = std::min(worst, distance(m, p, x) + distance(m, x, q) - distance(m, p, q));
    }
  return make("triangle_inequality", "d(p,q) <= d(p,x) + d(x,q) on random triples", worst >= -1e-10,
              "min slack " + fmt(worst));
}

inline Check exp_distance_consistency(unsigned long long seed) {
  Rng rng(seed ^ 0xe4bULL);
  double worst = 0.0;
  for (int n : {2, 3})
    for (double k : {-1.0, -4.0}) {
      const MetricModel m = MetricModel::space_form(n, k);
      for (int i = 0; i < 200; ++i) {
        const Vec p = random_point(m, rng, 2.0);
        const Vec v = random_tangent(m, p, rng) * uniform(rng, 0.5, 2.0);
        const double t = uniform(rng, 0.0, 10.0 / m.norm(p, v));
        const double want = t * m.norm(p, v);
        worst = std::max(worst, std::abs(distance(m, p, exp_map(m, {p, v}, t)) - want));
      }
    }
  return make("exp_distance_consistency", "d(p, exp_p(tv)) = t|v| for t|v| <= 10 on space forms",
              worst <= 1e-8, "max error " + fmt(worst));
}

inline Check warped_curvature() {
  const WarpProfile prof = WarpProfile::polynomial({1.0, 0.0, 1.0});
  const MetricModel m = MetricModel::warped_surface(prof, -INFINITY, INFINITY);
  double worst = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double r = -2.0 + 0.1 * i;
    const double h = 1e-4;
    const double fd = (prof.f(r + h) - 2 * prof.f(r) + prof.f(r - h)) / (h * h);
    const Vec p = (Vec(2) << r, 0.0).finished();
    const double k = sectional_curvature(m, {p, (Vec(2) << 1.0, 0.0).finished()},
                                         (Vec(2) << 0.0, 1.0).finished());
    worst = std::max(worst, std::abs(k + fd / prof.f(r)));
  }
  return make("warped_curvature", "warped surface curvature equals -f''/f", worst <= 1e-6,
              "max deviation " + fmt(worst));
}

inline Check geodesic_frames(unsigned long long seed) {
  Rng rng(seed ^ 0x9e0ULL);
  double worst = 0.0;
  std::vector<MetricModel> models = {MetricModel::space_form(3, -1.0), MetricModel::euclidean(3),
                                     MetricModel::warped_surface(WarpProfile::cosh(1.0), -INFINITY, INFINITY)};
  for (const MetricModel& m : models)
    for (int trial = 0; trial < 5; ++trial) {
      const Vec p = m.kind() == ModelKind::warped_surface ? Vec(Vec::Zero(2)) : random_point(m, rng, 1.0);
      Vec v = random_tangent(m, p, rng);
      v /= m.norm(p, v);
      const GeodesicPath g(m, {p, v}, 8.0);
      for (int k = 0; k <= 40; ++k) {
        const double t = -8.0 + 0.4 * k;
        const PointTangent st = g.state(t);
        worst = std::max(worst, std::abs(m.norm(st.point, st.vector) - 1.0));
        for (int i = 0; i < g.normal_count(); ++i) {
          const Vec xi = g.normal(i, t);
          worst = std::max(worst, std::abs(m.inner(st.point, xi, st.vector)));
          for (int j = 0; j < g.normal_count(); ++j)
            worst = std::max(worst, std::abs(m.inner(st.point, xi, g.normal(j, t)) - (i == j)));
        }
      }
    }
  return make("geodesic_frames", "unit speed and orthonormal parallel frames along geodesics",
              worst <= 1e-8, "max defect " + fmt(worst));
}

inline Check jacobi_limits(unsigned long long seed) {
  Rng rng(seed ^ 0x11aULL);
  double monotone = -INFINITY, bounded_low = 0.0, bounded_high = 0.0, slope = -INFINITY,
         residual = 0.0, cross = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    SandwichModel sm = random_jacobi_model(rng);
    const double s1 = uniform(rng, 2.0, 20.0), s2 = s1 * uniform(rng, 1.1, 3.0);
    const GeodesicPath path(sm.model, sm.start, s2);
    const JacobiSolution h1 = dirichlet_jacobi(path, 0, s1), h2 = dirichlet_jacobi(path, 0, s2);
    for (int k = 0; k <= 100; ++k) {
      const double r = s1 * k / 100.0;
      monotone = std::max(monotone, std::abs(h2.value(r) - h1.value(r)) - r * (1 / s1 - 1 / s2) - 1e-10);
    }
    const JacobiSolution st = stable_jacobi(path, 0, 4.0, 1e-6);
    for (int k = 0; k <= 100; ++k) {
      const double r = 4.0 * k / 100.0;
      const auto [h, dh] = st(r);
      bounded_low = std::min(bounded_low, h);
      bounded_high = std::max(bounded_high, h - 1.0);
      slope = std::max(slope, dh);
      if (k > 0 && k < 100) {
        const double d = 1e-4;
        const double h2nd = (st.derivative(r + d) - st.derivative(r - d)) / (2 * d);
        residual = std::max(residual, std::abs(h2nd + path.curvature(r) * h));
      }
    }
  }
  for (double b : {0.5, 1.0, 2.0, 3.0}) {
    const MetricModel m = MetricModel::space_form(2, -b * b);
    const Vec o = m.origin();
    const GeodesicPath g(m, {o, m.tangent_basis(o).col(0)}, 1.0);
    const double tol = 1e-7;
    cross = std::max(cross, std::abs(stable_jacobi(g, 0, 1.0, tol).derivative(0.0) + b) - std::max(tol, 1e-8));
  }
  const bool ok = monotone <= 0 && bounded_low >= -1e-10 && bounded_high <= 1e-10 && slope <= 1e-10 &&
                  residual <= 1e-5 && cross <= 0;
  return make("jacobi_limits",
              "monotone limit bound, stable solution in [0,1] decreasing, ODE residual, h'(0) = -b",
              ok,
              "monotone excess " + fmt(monotone) + ", min h " + fmt(bounded_low) + ", max h-1 " +
                  fmt(bounded_high) + ", max h' " + fmt(slope) + ", residual " + fmt(residual) +
                  ", cross-validation excess " + fmt(cross));
}

inline Check horosphere_bounds() {
  const MetricModel m =
      MetricModel::warped_surface(WarpProfile::cosh_sum({1.0, 1.0}, {1.0, 2.0}), -INFINITY, INFINITY);
  double low = INFINITY, high = -INFINITY;
  for (int k = 0; k < 12; ++k) {
    const double angle = two_pi * k / 12.0 + 0.1;
    const double r0 = -1.0 + 0.2 * k;
    const Vec p = (Vec(2) << r0, 0.0).finished();
    const Vec v = (Vec(2) << std::cos(angle), std::sin(angle) / m.warp()->f(r0)).finished();
    const double d = horosphere_shape(m, {p, v}, 1e-7).matrix(0, 0);
    low = std::min(low, d);
    high = std::max(high, d);
  }
  return make("horosphere_bounds", "a <= horosphere curvature <= b when -a^2 >= K >= -b^2 (a=1, b=2)",
              low >= 1.0 - 1e-6 && high <= 2.0 + 1e-6, "range [" + fmt(low) + ", " + fmt(high) + "]");
}

inline Check horosphere_semidefinite(unsigned long long seed) {
  Rng rng(seed ^ 0x95dULL);
  std::vector<MetricModel> models = {
      MetricModel::space_form(3, -1.0), MetricModel::space_form(2, -0.25), MetricModel::euclidean(3),
      MetricModel::warped_surface(WarpProfile::polynomial({1.0, 0.0, 1.0}), -INFINITY, INFINITY)};
  double worst = INFINITY;
  for (int i = 0; i < 200; ++i) {
    const MetricModel& m = models[static_cast<std::size_t>(i) % models.size()];
    Vec p;
    Vec v;
    if (m.kind() == ModelKind::warped_surface) {
      const double r0 = uniform(rng, -2.0, 2.0), angle = uniform(rng, 0.0, two_pi);
      p = (Vec(2) << r0, 0.0).finished();
      v = (Vec(2) << std::cos(angle), std::sin(angle) / m.warp()->f(r0)).finished();
    } else {
      p = random_point(m, rng, 2.0);
      v = random_tangent(m, p, rng);
      v /= m.norm(p, v);
    }
    const auto ev = symmetric_eigenvalues(horosphere_shape(m, {p, v}, 1e-6).matrix);
    worst = std::min(worst, *std::min_element(ev.begin(), ev.end()));
  }
  return make("horosphere_semidefinite", "horosphere forms are positive semidefinite on 200 random v",
              worst >= -1e-8, "min eigenvalue " + fmt(worst));
}

inline Check horosphere_continuity() {
  const MetricModel m =
      MetricModel::warped_surface(WarpProfile::polynomial({1.0, 0.0, 1.0}), -INFINITY, INFINITY);
  const double r0 = 0.5, angle = 0.7;
  const Vec p = (Vec(2) << r0, 0.0).finished();
  auto value = [&](double a) {
    const Vec v = (Vec(2) << std::cos(a), std::sin(a) / m.warp()->f(r0)).finished();
    return horosphere_shape(m, {p, v}, 1e-6).matrix(0, 0);
  };
  const double base = value(angle);
  std::vector<double> diffs;
  for (int k = 0; k <= 5; ++k) diffs.push_back(std::abs(value(angle + 1e-3 * std::ldexp(1.0, -k)) - base));
  bool ok = true;
  std::string detail = "ratios";
  for (int k = 0; k < 5; ++k) {
    const double ratio = diffs[k + 1] / diffs[k];
    ok = ok && ratio >= 0.3 && ratio <= 0.7;
    detail += " " + fmt(ratio);
  }
  detail += "; fitted C " + fmt(diffs[0] / 1e-3);
  return make("horosphere_continuity", "horosphere form differences halve with the angle", ok, detail);
}

inline Check sphere_chart_consistency() {
  double worst = 0.0;
  for (int n : {2, 3})
    for (double rho : {0.5, 1.0, 2.0}) {
      const MetricModel m = MetricModel::space_form(n, -1.0);
      const Vec o = m.origin();
      const HypersurfaceChart c = charts::geodesic_sphere(m, o, rho);
      const Vec u = Vec::Constant(n - 1, 0.3);
      const ShapeForm chart_form = hypersurface_shape(c, u, 1);
      const Vec w = charts::sphere_direction(m.tangent_basis(o), u);
      const GeodesicPath g(m, {o, w}, rho);
      const ShapeForm s = sphere_shape(m, g, rho);
      const auto a = symmetric_eigenvalues(chart_form.matrix), b = symmetric_eigenvalues(s.matrix);
      for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    }
  return make("sphere_chart_consistency", "geodesic-sphere chart curvature matches the Jacobi sphere form",
              worst <= 1e-6, "max deviation " + fmt(worst));
}

inline Check rank_stability_orientation() {
  const MetricModel h3 = MetricModel::space_form(3, -1.0);
  const Vec o = h3.origin();
  const Mat b = h3.tangent_basis(o);
  const std::vector<HypersurfaceChart> cs = {charts::geodesic_sphere(h3, o, 1.0),
                                             charts::geodesic_sheet(h3, o, b.col(2)),
                                             charts::horosphere(h3, o, b.col(2)),
                                             axis_subtorus(3, 2)};
  bool stable = true, swapped = true;
  double min_gap = INFINITY;
  for (const auto& c : cs)
    for (const Vec& u : sweep_grid(c, 3)) {
      const RankReport base = rank_condition(c, u, 1e-6, 1e-6);
      for (double t = 1e-2; t >= 1e-10; t *= 0.5) {
        const RankReport r = rank_condition(c, u, t, 1e-6);
        stable = stable && r.rank_plus == base.rank_plus && r.rank_minus == base.rank_minus;
      }
      const RankReport flip = rank_condition(c, u, 1e-6, 1e-6, -1);
      swapped = swapped && flip.rank_plus == base.rank_minus && flip.rank_minus == base.rank_plus;
      for (double s : base.singular_plus)
        if (s > 1e-6) min_gap = std::min(min_gap, s);
      for (double s : base.singular_minus)
        if (s > 1e-6) min_gap = std::min(min_gap, s);
    }
  return make("rank_stability_orientation",
              "ranks unchanged as rank_tol shrinks; flipping the normal swaps the two ranks",
              stable && swapped, "smallest counted singular value " + fmt(min_gap));
}

inline Check mixed_hessian_bound(unsigned long long seed) {
  Rng rng(seed ^ 0x3badULL);
  double worst = -INFINITY, asym = 0.0;
  for (int model = 0; model < 3; ++model)
    for (int i = 0; i < 100; ++i) {
      const int n = model == 2 ? 3 : 2;
      const MetricModel m = model == 0 ? MetricModel::euclidean(2) : MetricModel::space_form(n, -1.0);
      const double r = uniform(rng, 1.5, 20.0);
      const Vec na = random_unit(rng, n), nb = random_unit(rng, n);
      // keep the sheets transverse to the connecting geodesic
      Vec ma = na, mb = nb;
      ma(0) = std::copysign(std::max(std::abs(ma(0)), 0.5), ma(0));
      mb(0) = std::copysign(std::max(std::abs(mb(0)), 0.5), mb(0));
      const HessianCase c = hessian_case(m, r, false, ma.normalized(), mb.normalized());
      Vec pa(n - 1), pb(n - 1);
      for (int k = 0; k < n - 1; ++k) {
        pa(k) = uniform(rng, -0.3, 0.3);
        pb(k) = uniform(rng, -0.3, 0.3);
      }
      const PhaseHessian h = distance_phase_hessian(m, c.a, c.b, pa, pb);
      worst = std::max(worst, h.mixed_max - (2.0 / h.r + 5e-3));
      const Mat& f = h.finite_difference;
      asym = std::max(asym, (f - f.transpose()).cwiseAbs().maxCoeff());
    }
  return make("mixed_hessian_bound", "mixed Hessian block within 2/r on 100 random configurations per model",
              worst <= 0 && asym <= 1e-5, "max excess " + fmt(worst) + ", max asymmetry " + fmt(asym));
}

inline Check quadrature_self_consistency(int threads) {
  bool ok = true;
  double worst = 0.0;
  std::vector<OscillatoryProblem> probs = {quadratic_problem(1), quadratic_problem(2), linear_problem(3.0)};
  for (const auto& p : probs)
    for (double lam : {16.0, 128.0}) {
      const QuadratureResult q = evaluate(p, lam, default_node_cap, threads);
      double abs_sum = 0.0;
      const std::size_t n = 2 * nodes_per_axis(p, lam);
      const auto finer = detail::trapezoid(p, lam, 2 * n, threads, &abs_sum);
      const double change = std::abs(finer - q.value);
      ok = ok && change <= q.error_estimate;
      worst = std::max(worst, change / q.error_estimate);
    }
  return make("quadrature_self_consistency", "doubling resolution changes I(lambda) by less than its error estimate",
              ok, "max change / estimate " + fmt(worst));
}

inline Check torus_periods(unsigned long long seed) {
  Rng rng(seed ^ 0x70ULL);
  double norm_err = 0.0, sel_err = 0.0;
  for (int i = 0; i < 10; ++i) {
    const int n = 2 + i % 2;
    IntVec m(n);
    for (int k = 0; k < n; ++k) m(k) = static_cast<std::int64_t>(uniform(rng, -20.0, 20.0));
    // |e_m|^2 integrated by the trapezoid rule over [0, 2pi)^n
    const int nodes = 64;
    double acc = 0.0;
    const std::size_t total = static_cast<std::size_t>(std::pow(nodes, n));
    for (std::size_t idx = 0; idx < total; ++idx) {
      Vec x(n);
      std::size_t rest = idx;
      for (int k = 0; k < n; ++k) {
        x(k) = two_pi * static_cast<double>(rest % nodes) / nodes;
        rest /= nodes;
      }
      acc += std::norm(torus_eigenfunction(m, x));
    }
    norm_err = std::max(norm_err, std::abs(acc * std::pow(two_pi / nodes, n) - 1.0));
  }
  const std::vector<HypersurfaceChart> cs = {
      axis_subtorus(2, 1), axis_subtorus(3, 1), axis_subtorus(3, 2),
      charts::flat_subtorus(MetricModel::flat_torus(2), (Eigen::MatrixXi(2, 1) << 1, 2).finished(),
                            (Vec(2) << 0.3, 0.1).finished())};
  for (const auto& c : cs)
    for (int i = 0; i < 40; ++i) {
      const int n = c.model().dim();
      IntVec m(n);
      for (int k = 0; k < n; ++k) m(k) = static_cast<std::int64_t>(uniform(rng, -6.0, 6.0));
      if (i < 8) m.head(c.dim()).setZero();  // kernel-heavy samples
      sel_err = std::max(sel_err, std::abs(torus_period(m, c) - torus_period_exact(m, c)));
    }
  return make("torus_periods", "eigenfunctions unit-normalized; quadrature periods match the selection rule",
              norm_err <= 1e-10 && sel_err <= 1e-12,
              "normalization error " + fmt(norm_err) + ", selection error " + fmt(sel_err));
}

inline Check torus_exponents() {
  bool ok = true;
  std::string detail;
  struct Case { int n, d; double cap; };
  for (const Case c : {Case{2, 1, 1000}, Case{3, 1, 100}, Case{3, 2, 1000}}) {
    const KuznecovSeries s = torus_kuznecov(axis_subtorus(c.n, c.d), c.cap);
    const double want = c.n - c.d;
    ok = ok && std::abs(s.fit.exponent - want) <= 0.1;
    detail += "T^" + std::to_string(c.n) + " d=" + std::to_string(c.d) + " exponent " + fmt(s.fit.exponent) + "; ";
  }
  const IntVec probe = (IntVec(2) << 0, 1).finished();
  const HypersurfaceChart g = charts::torus_graph(MetricModel::flat_torus(2), 0.3, 1, 0.0, 0.0);
  double last = INFINITY;
  bool decays = true;
  for (int l : {4, 16, 64, 256}) {
    const double v = std::abs(torus_period((probe * l).eval(), g));
    decays = decays && v < last;
    last = v;
  }
  ok = ok && decays;
  detail += decays ? "curved graph periods decay" : "curved graph periods do not decay";
  return make("torus_exponents", "Kuznecov growth exponents n - d on axis subtori; curved graph decay", ok,
              detail);
}

inline Check sphere_periods() {
  double worst = 0.0, norm_err = 0.0;
  for (int l = 0; l <= 30; ++l) {
    // explicit polynomial P_l(x) = 2^-l sum_j (-1)^j C(l,j) C(2l-2j,l) x^(l-2j); on the
    // equator x = 0 only j = l/2 survives, and C(l, l) = 1
    long double p0 = 0.0L;
    if (l % 2 == 0) {
      const int j = l / 2;
      long double c1 = 1.0L;
      for (int i = 1; i <= j; ++i) c1 = c1 * (l - j + i) / i;
      p0 = ((j % 2) ? -1.0L : 1.0L) * c1 / std::pow(2.0L, l);
    }
    const double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * pi));
    std::vector<double> terms(64, norm * static_cast<double>(p0));
    const double quad = pairwise_sum(terms) * (two_pi / 64);
    worst = std::max(worst, std::abs(quad - sphere_zonal_period(l)));
    worst = std::max(worst, std::abs(sphere_period_quadrature(l, 0, 64).real() - sphere_zonal_period(l)));
    for (int k = 0; k <= l; k += std::max(1, l / 4))
      norm_err = std::max(norm_err, std::abs(sphere_harmonic_norm2(l, k) - 1.0));
  }
  const KuznecovSeries s = sphere_kuznecov(500);
  const bool ok = worst <= 1e-9 && norm_err <= 1e-10 && std::abs(s.fit.exponent - 1.0) <= 0.1;
  return make("sphere_periods", "zonal recurrence matches quadrature; harmonics normalized; sphere growth exponent near 1",
              ok, "max period mismatch " + fmt(worst) + ", normalization error " + fmt(norm_err) +
                      ", exponent " + fmt(s.fit.exponent) + ", sup period " + fmt(s.sup_period));
}

inline Check lattice_counts_parseval() {
  const bool counts = lattice_sphere_count(2, 25) == 12 && lattice_sphere_count(3, 1) == 6 &&
                      lattice_sphere_count(2, 3) == 0;
  bool bessel = true;
  double prev_gap = INFINITY;
  std::string detail;
  for (double cap : {1.0, 2.0, 4.0, 8.0}) {
    const ParsevalCheck p = parseval_check(cap);
    const double gap = p.norm2 - p.partial_sum;
    bessel = bessel && gap >= -1e-9 && gap <= prev_gap;
    prev_gap = gap;
    detail += "gap(" + fmt(cap) + ") " + fmt(gap) + "; ";
  }
  detail.resize(detail.size() - 2);
  return make("lattice_counts_parseval", "lattice sphere counts; Bessel inequality with shrinking margin",
              counts && bessel, detail);
}

}  // namespace verify

/// Criteria 1-9 in order, without the determinism check (which needs the CLI).
inline std::vector<Check> acceptance_checks(const SuiteOptions& opt) {
  std::vector<Check> out;
  out.push_back(verify::horosphere_exactness());
  out.push_back(verify::riccati_comparison());
  out.push_back(verify::dirichlet_sandwich(opt.seed));
  out.push_back(verify::hessian_decomposition());
  out.push_back(verify::stationary_phase_rates(opt.threads));
  out.push_back(verify::torus_kuznecov_law());
  out.push_back(verify::sphere_sharpness());
  auto sweeps = verify::dichotomy_sweeps(opt.threads);
  out.push_back(verify::hypothesis_dichotomy(sweeps));
  for (auto& s : verify::surface_sweeps(opt.threads)) sweeps.push_back(std::move(s));
  out.push_back(verify::corollary_consistency(sweeps));
  return out;
}

/// Acceptance criteria followed by the per-module invariants.
inline std::vector<Check> full_suite(const SuiteOptions& opt) {
  std::vector<Check> out = acceptance_checks(opt);
  out.push_back(verify::distance_symmetry(opt.seed));
  out.push_back(verify::triangle_inequality(opt.seed));
  out.push_back(verify::exp_distance_consistency(opt.seed));
  out.push_back(verify::warped_curvature());
  out.push_back(verify::geodesic_frames(opt.seed));
  out.push_back(verify::jacobi_limits(opt.seed));
  out.push_back(verify::horosphere_bounds());
  out.push_back(verify::horosphere_semidefinite(opt.seed));
  out.push_back(verify::horosphere_continuity());
  out.push_back(verify::sphere_chart_consistency());
  out.push_back(verify::rank_stability_orientation());
  out.push_back(verify::mixed_hessian_bound(opt.seed));
  out.push_back(verify::quadrature_self_consistency(opt.threads));
  out.push_back(verify::torus_periods(opt.seed));
  out.push_back(verify::torus_exponents());
  out.push_back(verify::sphere_periods());
  out.push_back(verify::lattice_counts_parseval());
  return out;
}

}  // namespace pgeom
