#pragma once

// Oscillatory integrals I(lambda) = int a(x) exp(i lambda phi(x)) dx over the
// unit ball by tensor trapezoid quadrature, decay-rate fits, and the
// Hessian of the distance phase d(A(x), B(y)) between two charts.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "pgeom/curvature.hpp"
#include "pgeom/error.hpp"
#include "pgeom/fit.hpp"
#include "pgeom/jacobi.hpp"
#include "pgeom/linalg.hpp"
#include "pgeom/manifold.hpp"
#include "pgeom/parallel.hpp"
#include "pgeom/quadrature.hpp"

namespace pgeom {

/// Radial bump: 1 on |x| <= plateau, smooth monotone transition to 0 at
/// |x| = 1, vanishing to infinite order there.
class RadialBump {
 public:
  explicit RadialBump(double plateau = 0.5) : plateau_(plateau) {
    if (!(plateau >= 0 && plateau < 1)) throw InvalidInput("bump plateau must lie in [0, 1)");
  }

  double plateau() const noexcept { return plateau_; }

  double operator()(double r) const {
    if (r <= plateau_) return 1.0;
    if (r >= 1.0) return 0.0;
    const double t = (r - plateau_) / (1.0 - plateau_);
    return step(1.0 - t);
  }

 private:
  static double step(double t) {
    if (t <= 0) return 0.0;
    if (t >= 1) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
  }

  double plateau_;
};

/// Phase phi(x) = <c, x> + x^T Q x / 2, or an arbitrary function with a
/// declared gradient bound on the unit ball.
struct Phase {
  std::string name;
  Vec linear;     // c
  Mat quadratic;  // Q, symmetric
  std::function<double(const Vec&)> custom;
  double custom_gradient_sup = 0.0;

  static Phase affine_quadratic(std::string name, Vec c, Mat q) {
    Phase p;
    p.name = std::move(name);
    p.linear = std::move(c);
    p.quadratic = 0.5 * (q + q.transpose());
    return p;
  }
  static Phase zero(int n) { return affine_quadratic("zero", Vec::Zero(n), Mat::Zero(n, n)); }

  bool is_affine_quadratic() const { return !custom; }

  double operator()(const Vec& x) const {
    if (custom) return custom(x);
    return linear.dot(x) + 0.5 * x.dot(quadratic * x);
  }

  /// Upper bound for |grad phi| on the unit ball.
  double gradient_sup() const {
    if (custom) return custom_gradient_sup;
    const auto sv = symmetric_singular_values(quadratic);
    return linear.norm() + (sv.empty() ? 0.0 : sv.front());
  }

  /// Smallest singular value of the (constant) Hessian.
  double hessian_lower_bound() const {
    if (custom) return 0.0;
    const auto sv = symmetric_singular_values(quadratic);
    return sv.empty() ? 0.0 : sv.back();
  }

  /// min |grad phi| over a sample of the unit ball.
  double gradient_lower_bound(int samples_per_axis = 41) const {
    const int n = static_cast<int>(linear.size());
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> idx(n, 0);
    const std::size_t total = static_cast<std::size_t>(std::pow(samples_per_axis, n));
    for (std::size_t k = 0; k < total; ++k) {
      std::size_t rest = k;
      Vec x(n);
      for (int a = 0; a < n; ++a) {
        x(a) = -1.0 + 2.0 * (rest % samples_per_axis) / (samples_per_axis - 1);
        rest /= samples_per_axis;
      }
      if (x.norm() > 1.0) continue;
      Vec g;
      if (custom) {
        g = Vec(n);
        for (int a = 0; a < n; ++a) {
          Vec xp = x, xm = x;
          xp(a) += 1e-6;
          xm(a) -= 1e-6;
          g(a) = (custom(xp) - custom(xm)) / 2e-6;
        }
      } else {
        g = linear + quadratic * x;
      }
      best = std::min(best, g.norm());
    }
    return best;
  }
};

struct OscillatoryProblem {
  int dimension = 1;
  RadialBump amplitude{0.5};
  Phase phase = Phase::zero(1);
  std::vector<double> lambda_grid;
};

inline constexpr double default_node_cap = 4e8;

struct QuadratureResult {
  double lambda = 0.0;
  std::complex<double> value;
  std::size_t nodes = 0;       // nodes in the finer grid
  double error_estimate = 0.0;
  bool meets_target = false;   // error_estimate <= 1e-3 lambda^{-n/2}
};

/// True if the amplitude is below 1e-12 on a shell just inside |x| = 1.
inline bool amplitude_support_ok(const RadialBump& a) {
  for (int i = 0; i < 100; ++i) {
    const double r = 1.0 - 1e-3 * i / 100.0;
    if (!(a(r) < 1e-12)) return false;
  }
  return true;
}

namespace detail {

inline std::complex<double> trapezoid(const OscillatoryProblem& p, double lambda,
                                      std::size_t per_axis, int threads,
                                      double* abs_sum) {
  const int n = p.dimension;
  const double h = 2.0 / static_cast<double>(per_axis);
  std::size_t rows = 1;
  for (int a = 0; a < n - 1; ++a) rows *= per_axis;
  std::vector<std::complex<double>> row_sum(rows);
  std::vector<double> row_abs(rows);
  const bool fast = p.phase.is_affine_quadratic();
  const Vec& c = p.phase.linear;
  const Mat& q = p.phase.quadratic;
  parallel_for(rows, threads, [&](std::size_t row) {
    Vec x(n);
    std::size_t rest = row;
    double outer2 = 0.0;
    for (int a = 0; a < n - 1; ++a) {
      x(a) = -1.0 + h * static_cast<double>(rest % per_axis);
      rest /= per_axis;
      outer2 += x(a) * x(a);
    }
    if (outer2 >= 1.0) return;
    // phi along the row is alpha + beta t + gamma t^2 / 2 in the last axis.
    double alpha = 0.0, beta = 0.0, gamma = 0.0;
    if (fast) {
      const int last = n - 1;
      for (int a = 0; a < last; ++a) {
        alpha += c(a) * x(a);
        for (int b = 0; b < last; ++b) alpha += 0.5 * q(a, b) * x(a) * x(b);
        beta += q(last, a) * x(a);
      }
      beta += c(last);
      gamma = q(last, last);
    }
    std::vector<std::complex<double>> terms;
    terms.reserve(per_axis);
    double abs_acc = 0.0;
    for (std::size_t k = 0; k < per_axis; ++k) {
      const double t = -1.0 + h * static_cast<double>(k);
      const double r2 = outer2 + t * t;
      if (r2 >= 1.0) continue;
      const double amp = p.amplitude(std::sqrt(r2));
      if (amp == 0.0) continue;
      double phi;
      if (fast) {
        phi = alpha + beta * t + 0.5 * gamma * t * t;
      } else {
        x(n - 1) = t;
        phi = p.phase(x);
      }
      const double arg = lambda * phi;
      terms.emplace_back(amp * std::cos(arg), amp * std::sin(arg));
      abs_acc += amp;
    }
    row_sum[row] = pairwise_sum(terms);
    row_abs[row] = abs_acc;
  });
  const double vol = std::pow(h, n);
  *abs_sum = pairwise_sum(row_abs) * vol;
  return pairwise_sum(row_sum) * vol;
}

}  // namespace detail

/// Nodes per axis for frequency lambda: at least 10 nodes per oscillation
/// period of exp(i lambda phi).
inline std::size_t nodes_per_axis(const OscillatoryProblem& p, double lambda) {
  const double g = p.phase.gradient_sup();
  const double want = std::ceil(10.0 * lambda * g / pi);
  std::size_t n = std::max<std::size_t>(64, static_cast<std::size_t>(want));
  return n + (n % 2);
}

/// I(lambda) from a grid with 2N nodes per axis; the error estimate
/// compares with N nodes and is floored by the rounding level.
inline QuadratureResult evaluate(const OscillatoryProblem& p, double lambda,
                                 double node_cap = default_node_cap, int threads = 1) {
  if (p.dimension < 1 || p.dimension > 3) throw InvalidInput("oscint dimension must be 1, 2 or 3");
  if (p.phase.is_affine_quadratic() &&
      (p.phase.linear.size() != p.dimension || p.phase.quadratic.rows() != p.dimension))
    throw InvalidInput("phase dimension does not match the problem");
  if (!(lambda > 0)) throw InvalidInput("frequency must be positive");
  const std::size_t coarse = nodes_per_axis(p, lambda);
  const std::size_t fine = 2 * coarse;
  const double total = std::pow(static_cast<double>(fine), p.dimension);
  if (total > node_cap) throw NumericalError("frequency too high for direct quadrature");
  double abs_c = 0.0, abs_f = 0.0;
  const auto ic = detail::trapezoid(p, lambda, coarse, threads, &abs_c);
  const auto ifine = detail::trapezoid(p, lambda, fine, threads, &abs_f);
  QuadratureResult r;
  r.lambda = lambda;
  r.value = ifine;
  r.nodes = static_cast<std::size_t>(total);
  r.error_estimate = std::max(std::abs(ifine - ic), 64.0 * 2.2e-16 * abs_f);
  r.meets_target = r.error_estimate <= 1e-3 * std::pow(lambda, -0.5 * p.dimension);
  return r;
}

/// Dyadic grid 2^lo, ..., 2^hi.
inline std::vector<double> dyadic_grid(int lo, int hi) {
  std::vector<double> out;
  for (int k = lo; k <= hi; ++k) out.push_back(std::ldexp(1.0, k));
  return out;
}

struct BoundCheck {
  DecayFit fit;
  std::vector<QuadratureResult> samples;
  double constant = 0.0;       // sup |I| lambda^{rate} over the grid
  double certified_c = 0.0;    // Hessian or gradient bound used
  bool precondition = false;   // certified_c >= requested c
  bool pass = false;
};

namespace detail {

inline BoundCheck sample_and_fit(const OscillatoryProblem& p, double rate,
                                 double node_cap, int threads) {
  if (p.lambda_grid.size() < 6) throw InvalidInput("decay fits need at least 6 frequencies");
  BoundCheck out;
  std::vector<double> lam, mag;
  for (double l : p.lambda_grid) {
    out.samples.push_back(evaluate(p, l, node_cap, threads));
    lam.push_back(l);
    mag.push_back(std::abs(out.samples.back().value));
    out.constant = std::max(out.constant, mag.back() * std::pow(l, rate));
  }
  out.fit = fit_loglog(lam, mag);
  return out;
}

}  // namespace detail

/// Checks |I| <= C lambda^{-n/2} for a phase with |Hess phi xi| >= c |xi|.
inline BoundCheck verify_nondegenerate_bound(const OscillatoryProblem& p, double c,
                                             double node_cap = default_node_cap,
                                             int threads = 1) {
  const double rate = 0.5 * p.dimension;
  BoundCheck out = detail::sample_and_fit(p, rate, node_cap, threads);
  out.certified_c = p.phase.hessian_lower_bound();
  out.precondition = out.certified_c >= c && c > 0;
  out.pass = out.precondition && out.fit.exponent <= -rate + 0.1 &&
             std::isfinite(out.constant);
  return out;
}

/// Checks the decay rate lambda^{-N} for a phase with |grad phi| >= c.
inline BoundCheck verify_nonstationary_bound(const OscillatoryProblem& p, double c, int order,
                                             double node_cap = default_node_cap,
                                             int threads = 1) {
  BoundCheck out = detail::sample_and_fit(p, order, node_cap, threads);
  out.certified_c = p.phase.gradient_lower_bound();
  out.precondition = out.certified_c >= c && c > 0;
  out.pass = out.fit.exponent <= -static_cast<double>(order);
  return out;
}

struct PhaseHessian {
  double r = 0.0;
  Mat finite_difference;  // covariant Hessian in orthonormal chart frames
  Mat formula;
  double discrepancy = 0.0;   // max entrywise |fd - formula|
  double mixed_max = 0.0;     // max |mixed block entry|
  double mixed_bound = 0.0;   // 2 / r
  Vec gradient_fd;
  Vec gradient_formula;       // (<e_a, T_x>, <f_b, T_y>)
};

inline constexpr double phase_fd_step = 1e-4;

namespace detail {

inline Vec shift(const Vec& u, int i, double h) {
  Vec w = u;
  w(i) += h;
  return w;
}

// Christoffel symbols Gamma^k_ij of the induced metric, as d matrices.
inline std::vector<Mat> induced_christoffel(const MetricModel& m, const ChartJet& jet) {
  const int d = static_cast<int>(jet.d1.cols());
  const Mat ginv = jet.gram.inverse();
  std::vector<Mat> gam(d, Mat::Zero(d, d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Vec lower(d);
      for (int l = 0; l < d; ++l) lower(l) = m.inner(jet.point, jet.second(i, j), jet.d1.col(l));
      const Vec up = ginv * lower;
      for (int k = 0; k < d; ++k) gam[k](i, j) = up(k);
    }
  }
  return gam;
}

}  // namespace detail

/// Finite-difference and Jacobi-field Hessians of phi(x, y) =
/// d(chartA(x), chartB(y)), both in orthonormal frames at the two points
/// (A block first).
inline PhaseHessian distance_phase_hessian(const MetricModel& model,
                                           const HypersurfaceChart& chart_a,
                                           const HypersurfaceChart& chart_b,
                                           const Vec& pa, const Vec& pb) {
  const Vec x = chart_a(pa);
  const Vec y = chart_b(pb);
  const double r = lifted_distance(model, x, y);
  if (!(r >= 1.0)) throw InvalidInput("outside validity regime");
  const int da = chart_a.dim(), db = chart_b.dim(), dt = da + db;

  auto phi = [&](const Vec& z) {
    return lifted_distance(model, chart_a(z.head(da)), chart_b(z.tail(db)));
  };
  Vec z(dt);
  z << pa, pb;
  const double h = phase_fd_step;
  auto grad = [&](double s) {
    Vec g(dt);
    for (int i = 0; i < dt; ++i)
      g(i) = (phi(detail::shift(z, i, s)) - phi(detail::shift(z, i, -s))) / (2 * s);
    return g;
  };
  auto hess = [&](double s) {
    Mat hm(dt, dt);
    const double f0 = phi(z);
    for (int i = 0; i < dt; ++i) {
      hm(i, i) = (phi(detail::shift(z, i, s)) - 2 * f0 + phi(detail::shift(z, i, -s))) / (s * s);
      for (int j = i + 1; j < dt; ++j) {
        auto at = [&](double si, double sj) {
          return phi(detail::shift(detail::shift(z, i, si), j, sj));
        };
        hm(i, j) = hm(j, i) = (at(s, s) - at(s, -s) - at(-s, s) + at(-s, -s)) / (4 * s * s);
      }
    }
    return hm;
  };
  const Vec g = (4 * grad(h / 2) - grad(h)) / 3;
  Mat hc = (4 * hess(h / 2) - hess(h)) / 3;

  const ChartJet ja = chart_jet(chart_a, pa);
  const ChartJet jb = chart_jet(chart_b, pb);
  const auto gam_a = detail::induced_christoffel(model, ja);
  const auto gam_b = detail::induced_christoffel(model, jb);
  for (int k = 0; k < da; ++k) hc.topLeftCorner(da, da) -= g(k) * gam_a[k];
  for (int k = 0; k < db; ++k) hc.bottomRightCorner(db, db) -= g(da + k) * gam_b[k];
  Mat t = Mat::Zero(dt, dt);
  t.topLeftCorner(da, da) = ja.to_frame;
  t.bottomRightCorner(db, db) = jb.to_frame;

  PhaseHessian out;
  out.r = r;
  out.finite_difference = t.transpose() * hc * t;
  out.gradient_fd = t.transpose() * g;

  // Geodesic from y to x and the reverse one.
  const Vec w = (model.kind() == ModelKind::flat_torus ? Vec(x - y) : log_map(model, y, x)) / r;
  const GeodesicPath fwd(model, {y, w}, r);
  // On the hyperboloid the log map at x is better conditioned than the
  // transported velocity, whose components cancel at large r.
  const Vec tx = model.embedded() ? Vec(-log_map(model, x, y) / r) : fwd.velocity(r);
  const GeodesicPath back(model, {x, -tx}, r);
  const int k = fwd.normal_count();
  const Mat& ea = ja.frame;
  const Mat& fb = jb.frame;
  Mat xx = second_fundamental_along(chart_a, ja, tx);
  Mat yy = second_fundamental_along(chart_b, jb, -w);
  Mat xy = Mat::Zero(da, db);
  const double vx = detail::sphere_value(fwd, r);
  const double vy = detail::sphere_value(back, r);
  for (int i = 0; i < k; ++i) {
    const Vec xi_x = fwd.normal(i, r);
    const Vec xi_y = fwd.normal(i, 0.0);
    const Vec yi_y = back.normal(i, r);
    const double gprime = dirichlet_jacobi(fwd, i, r).derivative(r);
    Vec ca(da), cb(db), cby(db);
    for (int a = 0; a < da; ++a) ca(a) = model.inner(x, ea.col(a), xi_x);
    for (int b = 0; b < db; ++b) {
      cb(b) = model.inner(y, fb.col(b), xi_y);
      cby(b) = model.inner(y, fb.col(b), yi_y);
    }
    xx += vx * ca * ca.transpose();
    yy += vy * cby * cby.transpose();
    xy += gprime * ca * cb.transpose();
  }
  out.formula = Mat(dt, dt);
  out.formula << xx, xy, xy.transpose(), yy;
  out.gradient_formula = Vec(dt);
  for (int a = 0; a < da; ++a) out.gradient_formula(a) = model.inner(x, ea.col(a), tx);
  for (int b = 0; b < db; ++b) out.gradient_formula(da + b) = -model.inner(y, fb.col(b), w);
  out.discrepancy = (out.finite_difference - out.formula).cwiseAbs().maxCoeff();
  out.mixed_max = xy.size() ? xy.cwiseAbs().maxCoeff() : 0.0;
  out.mixed_bound = 2.0 / r;
  return out;
}

}  // namespace pgeom
