#pragma once

// Geodesics with parallel normal frames, and scalar Jacobi fields
// h'' + K h = 0 along them: Dirichlet solutions h_s (h(0) = 1, h(s) = 0),
// the bounded solution as a certified limit of h_s, and the initial value
// solution h(0) = 0, h'(0) = 1.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "pgeom/error.hpp"
#include "pgeom/linalg.hpp"
#include "pgeom/manifold.hpp"
#include "pgeom/ode.hpp"
#include "pgeom/quadrature.hpp"

namespace pgeom {

/// Unit-speed geodesic on [-r_max, r_max] with a parallel orthonormal frame
/// of the normal bundle.
class GeodesicPath {
 public:
  GeodesicPath(MetricModel model, PointTangent initial, double r_max)
      : model_(std::move(model)), initial_(std::move(initial)), r_max_(r_max) {
    if (!(r_max > 0)) throw InvalidInput("geodesic range must be positive");
    const Vec& p = initial_.point;
    if (!model_.in_domain(p)) throw InvalidInput("point outside model chart");
    initial_.vector = model_.tangent_project(p, initial_.vector);
    if (model_.unit_defect(p, initial_.vector) > 1e-10)
      throw InvalidInput("non-unit direction");
    if (model_.kind() == ModelKind::warped_surface) {
      const double f = model_.warp()->f(p(0));
      frame0_ = Mat(2, 1);
      frame0_ << -f * initial_.vector(1), initial_.vector(0) / f;
      auto opt = detail::geodesic_options();
      opt.rtol = 1e-12;
      opt.atol = 1e-14;
      const ode::State<4> y0{p(0), p(1), initial_.vector(0), initial_.vector(1)};
      for (int side = 0; side < 2; ++side) {
        auto& traj = side == 0 ? forward_ : backward_;
        auto obs = [&](double t, const ode::State<4>& y,
                       const ode::State<4>& dy) {
          detail::check_warped_domain(model_, y[0]);
          traj.push(t, y, dy);
          return ode::Control::proceed;
        };
        ode::integrate<4>(detail::WarpedGeodesic{model_.warp()}, 0.0, y0,
                          side == 0 ? r_max : -r_max, opt, obs);
      }
    } else {
      frame0_ = model_.complete_basis(p, {initial_.vector}, model_.dim());
    }
  }

  const MetricModel& model() const noexcept { return model_; }
  const PointTangent& initial() const noexcept { return initial_; }
  double r_max() const noexcept { return r_max_; }
  int normal_count() const noexcept { return model_.dim() - 1; }

  Vec point(double r) const { return state(r).point; }
  Vec velocity(double r) const { return state(r).vector; }

  /// Point and unit velocity at parameter r. Torus and Euclidean points are
  /// returned in lifted coordinates.
  PointTangent state(double r) const {
    check_range(r);
    const Vec& p = initial_.point;
    const Vec& v = initial_.vector;
    switch (model_.kind()) {
      case ModelKind::euclidean:
      case ModelKind::flat_torus: return {p + r * v, v};
      case ModelKind::space_form: {
        const double R = model_.radius();
        const double a = r / R;
        return {std::cosh(a) * p + R * std::sinh(a) * v,
                (std::sinh(a) / R) * p + std::cosh(a) * v};
      }
      case ModelKind::round_sphere:
        return {std::cos(r) * p + std::sin(r) * v,
                -std::sin(r) * p + std::cos(r) * v};
      case ModelKind::warped_surface: {
        const auto y = warped_state(r);
        Vec q(2), w(2);
        q << y[0], y[1];
        w << y[2], y[3];
        return {q, w};
      }
    }
    return initial_;
  }

  /// Parallel unit normal X_{i+2}(r), i = 0..n-2.
  Vec normal(int i, double r) const {
    if (i < 0 || i >= normal_count()) throw InvalidInput("normal index out of range");
    if (model_.kind() != ModelKind::warped_surface) {
      check_range(r);
      return frame0_.col(i);
    }
    const auto y = warped_state(r);
    const double f = model_.warp()->f(y[0]);
    Vec x(2);
    x << -f * y[3], y[2] / f;
    return x;
  }

  Mat normal_frame(double r) const {
    Mat out(model_.coord_dim(), normal_count());
    for (int i = 0; i < normal_count(); ++i) out.col(i) = normal(i, r);
    return out;
  }

  /// Sectional curvature of the plane (gamma', X_i) at gamma(r).
  double curvature(double r) const {
    if (model_.kind() != ModelKind::warped_surface)
      return model_.curvature_constant();
    return -model_.warp()->d2_over_f(warped_state(r)[0]);
  }

 private:
  void check_range(double r) const {
    if (!(std::abs(r) <= r_max_ * (1 + 1e-12)))
      throw InvalidInput("parameter outside geodesic range");
  }

  // Re-integrates from the nearest stored node so queries carry the full
  // integrator accuracy.
  ode::State<4> warped_state(double r) const {
    check_range(r);
    const auto& traj = r >= 0 ? forward_ : backward_;
    const auto& ts = traj.times();
    std::size_t k = 0;
    if (r >= 0)
      k = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), r) -
                                   ts.begin());
    else
      k = static_cast<std::size_t>(
          std::upper_bound(ts.begin(), ts.end(), r, std::greater<>{}) -
          ts.begin());
    k = k == 0 ? 0 : k - 1;
    if (ts[k] == r) return traj.node(k);
    auto opt = detail::geodesic_options();
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    return ode::integrate<4>(detail::WarpedGeodesic{model_.warp()}, ts[k],
                             traj.node(k), r, opt)
        .y;
  }

  MetricModel model_;
  PointTangent initial_;
  double r_max_;
  Mat frame0_;
  ode::HermiteTrajectory<4> forward_;
  ode::HermiteTrajectory<4> backward_;
};

inline GeodesicPath integrate_geodesic(const MetricModel& model,
                                       const PointTangent& initial,
                                       double r_max) {
  return GeodesicPath(model, initial, r_max);
}

/// Samples and evaluator of a scalar Jacobi amplitude on [0, range].
struct JacobiSolution {
  enum class Kind { dirichlet, stable, initial_value };

  Kind kind = Kind::dirichlet;
  int normal_index = 0;
  double s = 0.0;                 // Dirichlet endpoint (dirichlet, stable)
  double tolerance = 0.0;         // requested tolerance (stable)
  double truncation_bound = 0.0;  // certified |h - h_s| bound (stable)
  double range = 0.0;             // evaluation interval [0, range]
  std::vector<double> r;
  std::vector<double> h;
  std::vector<double> h_prime;

  /// (h(t), h'(t)) for t in [0, range].
  std::pair<double, double> operator()(double t) const {
    if (t < -1e-12 || t > range * (1 + 1e-12) + 1e-12)
      throw InvalidInput("Jacobi evaluation outside its range");
    return eval_(std::clamp(t, 0.0, range));
  }
  double value(double t) const { return (*this)(t).first; }
  double derivative(double t) const { return (*this)(t).second; }

  std::function<std::pair<double, double>(double)> eval_;

  void sample(int count = 201) {
    r.clear();
    h.clear();
    h_prime.clear();
    for (int i = 0; i < count; ++i) {
      const double t = range * i / (count - 1);
      const auto [a, b] = eval_(t);
      r.push_back(t);
      h.push_back(a);
      h_prime.push_back(b);
    }
  }
};

namespace detail {

/// Closed-form fundamental solutions C (C(0)=1, C'(0)=0) and S (S(0)=0,
/// S'(0)=1) of h'' + K h = 0 for constant K.
struct ConstantJacobi {
  double k;

  double b() const { return std::sqrt(std::abs(k)); }
  double S(double t) const {
    if (k == 0) return t;
    const double bb = b();
    return k < 0 ? std::sinh(bb * t) / bb : std::sin(bb * t) / bb;
  }
  double C(double t) const {
    if (k == 0) return 1.0;
    const double bb = b();
    return k < 0 ? std::cosh(bb * t) : std::cos(bb * t);
  }
  double dC(double t) const {
    if (k == 0) return 0.0;
    const double bb = b();
    return k < 0 ? bb * std::sinh(bb * t) : -bb * std::sin(bb * t);
  }

  /// h_s(r) = S(s - r) / S(s) and its derivative, without overflow for
  /// large b s.
  std::pair<double, double> dirichlet(double s, double r) const {
    if (k == 0) return {(s - r) / s, -1.0 / s};
    const double bb = b();
    if (k > 0) {
      const double den = std::sin(bb * s);
      if (std::abs(den) < 1e-12) throw NumericalError("comparison violation");
      return {std::sin(bb * (s - r)) / den, -bb * std::cos(bb * (s - r)) / den};
    }
    const double x = bb * (s - r);
    const double den = -std::expm1(-2.0 * bb * s);
    const double e = std::exp(-bb * r);
    return {e * -std::expm1(-2.0 * x) / den,
            -bb * e * (1.0 + std::exp(-2.0 * x)) / den};
  }
};

inline double quintic_value(double u, double h, double y0, double d0,
                            double a0, double y1, double d1, double a1,
                            double* derivative) {
  const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
  const double H0 = 1 - 10 * u3 + 15 * u4 - 6 * u5;
  const double H1 = u - 6 * u3 + 8 * u4 - 3 * u5;
  const double H2 = 0.5 * (u2 - 3 * u3 + 3 * u4 - u5);
  const double G0 = 10 * u3 - 15 * u4 + 6 * u5;
  const double G1 = -4 * u3 + 7 * u4 - 3 * u5;
  const double G2 = 0.5 * (u3 - 2 * u4 + u5);
  if (derivative) {
    const double dH0 = -30 * u2 + 60 * u3 - 30 * u4;
    const double dH1 = 1 - 18 * u2 + 32 * u3 - 15 * u4;
    const double dH2 = 0.5 * (2 * u - 9 * u2 + 12 * u3 - 5 * u4);
    const double dG1 = -12 * u2 + 28 * u3 - 15 * u4;
    const double dG2 = 0.5 * (3 * u2 - 8 * u3 + 5 * u4);
    *derivative = (dH0 * y0 - dH0 * y1) / h + dH1 * d0 + dG1 * d1 +
                  h * (dH2 * a0 + dG2 * a1);
  }
  return H0 * y0 + h * H1 * d0 + h * h * H2 * a0 + G0 * y1 + h * G1 * d1 +
         h * h * G2 * a1;
}

/// Fundamental solutions y1 = C, y2 = S integrated along a warped-surface
/// geodesic together with the geodesic itself. State layout:
/// (r, theta, r', theta', y1, y1', y2, y2').
class NumericFundamental {
 public:
  using State = ode::State<8>;

  NumericFundamental(const GeodesicPath& path, double t_end, double stop_radius,
                     bool allow_early_stop) {
    const MetricModel& m = path.model();
    const WarpProfile* warp = m.warp();
    const PointTangent& init = path.initial();
    auto rhs = [warp](double t, const State& y) {
      const ode::State<4> g{y[0], y[1], y[2], y[3]};
      const auto dg = WarpedGeodesic{warp}(t, g);
      const double k = -warp->d2_over_f(y[0]);
      return State{dg[0], dg[1], dg[2], dg[3], y[5], -k * y[4], y[7], -k * y[6]};
    };
    ode::Options opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    opt.failure_message = "geodesic integration failed";
    double y2_at_radius = -1.0, dy2_at_radius = -1.0;
    auto obs = [&](double t, const State& y, const State& dy) {
      check_warped_domain(m, y[0]);
      traj_.push(t, y, dy);
      if (t >= stop_radius && y2_at_radius < 0) {
        y2_at_radius = y[6];
        dy2_at_radius = y[7];
      }
      if (y[6] > 1e250) return ode::Control::stop;
      if (allow_early_stop && y2_at_radius > 0 && t > 0 && y[6] > 0 && y[7] > 0) {
        const double tail = 1.0 / (y[6] * y[7]);
        if (std::max(y2_at_radius, dy2_at_radius) * tail <= 1e-15)
          return ode::Control::stop;
      }
      return ode::Control::proceed;
    };
    const State y0{init.point(0), init.point(1), init.vector(0), init.vector(1),
                   1.0, 0.0, 0.0, 1.0};
    ode::integrate<8>(rhs, 0.0, y0, t_end, opt, obs);
    end_ = traj_.back_time();
  }

  double end() const noexcept { return end_; }
  const ode::HermiteTrajectory<8>& trajectory() const noexcept { return traj_; }

  /// (y1, y1', y2, y2') at t by quintic Hermite interpolation in each
  /// solution (second derivatives come from the equation).
  std::array<double, 4> fundamental(double t) const {
    const std::size_t j = segment(t);
    if (traj_.times()[j] == t) {
      const auto& y = traj_.node(j);
      return {y[4], y[5], y[6], y[7]};
    }
    const double t0 = traj_.times()[j], t1 = traj_.times()[j + 1];
    const double h = t1 - t0;
    const double u = (t - t0) / h;
    const auto& a = traj_.node(j);
    const auto& b = traj_.node(j + 1);
    const auto& da = traj_.node_derivative(j);
    const auto& db = traj_.node_derivative(j + 1);
    std::array<double, 4> out;
    out[0] = quintic_value(u, h, a[4], a[5], da[5], b[4], b[5], db[5], &out[1]);
    out[2] = quintic_value(u, h, a[6], a[7], da[7], b[6], b[7], db[7], &out[3]);
    return out;
  }

  double y2(double t) const {
    const std::size_t j = segment(t);
    const double t0 = traj_.times()[j], t1 = traj_.times()[j + 1];
    const auto& a = traj_.node(j);
    const auto& b = traj_.node(j + 1);
    return quintic_value((t - t0) / (t1 - t0), t1 - t0, a[6], a[7],
                         traj_.node_derivative(j)[7], b[6], b[7],
                         traj_.node_derivative(j + 1)[7], nullptr);
  }

  /// Index j with t_j <= t <= t_{j+1}.
  std::size_t segment(double t) const {
    const auto& ts = traj_.times();
    if (ts.size() < 2) throw NumericalError("geodesic integration failed");
    std::size_t j = static_cast<std::size_t>(
        std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
    j = std::clamp<std::size_t>(j, 1, ts.size() - 1);
    return j - 1;
  }

 private:
  ode::HermiteTrajectory<8> traj_;
  double end_ = 0.0;
};

/// h_s along a warped geodesic through the Wronskian identity
/// h_s = y2(r) * int_r^s y2^-2, switching to y1 - c y2 near r = 0.
class NumericDirichlet {
 public:
  NumericDirichlet(const GeodesicPath& path, double s, double stop_radius,
                   bool allow_early_stop)
      : fund_(std::make_shared<NumericFundamental>(path, s, stop_radius,
                                                   allow_early_stop)),
        s_(s) {
    const auto& traj = fund_->trajectory();
    const auto& ts = traj.times();
    const std::size_t n = ts.size();
    k0_ = n - 1;
    for (std::size_t k = 1; k < n; ++k) {
      if (ts[k] >= 1.0 || traj.node(k)[4] >= 2.0) {
        k0_ = k;
        break;
      }
    }
    tail_.assign(n, 0.0);
    for (std::size_t k = n - 1; k-- > k0_;) {
      tail_[k] = tail_[k + 1] + segment_integral(k, ts[k]);
    }
    const auto& y = traj.node(k0_);
    if (!(y[6] > 0)) throw NumericalError("comparison violation");
    c_ = y[4] / y[6] - tail_[k0_];
  }

  std::pair<double, double> operator()(double r) const {
    const auto& traj = fund_->trajectory();
    const auto& ts = traj.times();
    if (r > fund_->end()) return {0.0, 0.0};  // beyond overflow, h underflows
    if (r >= s_) r = s_;
    const auto f = fund_->fundamental(r);
    if (r <= ts[k0_]) return {f[0] - c_ * f[2], f[1] - c_ * f[3]};
    const std::size_t j = fund_->segment(r);
    const double integral = tail_[j + 1] + segment_integral(j, r);
    return {f[2] * integral, f[3] * integral - 1.0 / f[2]};
  }

  double c() const noexcept { return c_; }

 private:
  // int_from^{t_{k+1}} y2^-2 over part of segment k.
  double segment_integral(std::size_t k, double from) const {
    const double to = fund_->trajectory().times()[k + 1];
    if (to <= from) return 0.0;
    return gauss_integrate(
        [this](double t) {
          const double y = fund_->y2(t);
          return 1.0 / (y * y);
        },
        from, to, 10);
  }

  std::shared_ptr<NumericFundamental> fund_;
  double s_;
  std::size_t k0_ = 0;
  std::vector<double> tail_;
  double c_ = 0.0;
};

inline void check_normal_index(const GeodesicPath& path, int i) {
  if (i < 0 || i >= path.normal_count())
    throw InvalidInput("normal index out of range");
}

}  // namespace detail

/// The solution with h(0) = 1, h(s) = 0, as a combination of the two
/// fundamental solutions.
inline JacobiSolution dirichlet_jacobi(const GeodesicPath& path,
                                       int normal_index, double s) {
  detail::check_normal_index(path, normal_index);
  if (!(s > 0)) throw InvalidInput("Dirichlet endpoint must be positive");
  JacobiSolution sol;
  sol.kind = JacobiSolution::Kind::dirichlet;
  sol.normal_index = normal_index;
  sol.s = s;
  sol.range = s;
  if (path.model().constant_curvature()) {
    detail::ConstantJacobi cj{path.model().curvature_constant()};
    sol.eval_ = [cj, s](double r) { return cj.dirichlet(s, r); };
  } else {
    auto nd = std::make_shared<detail::NumericDirichlet>(path, s, s, false);
    sol.eval_ = [nd](double r) { return (*nd)(r); };
  }
  sol.sample();
  return sol;
}

inline constexpr double default_range_cap = 1e7;

/// Bounded Jacobi field with h(0) = 1 on [0, r_max], realized as h_s with
/// s = r_max / tol so that |h - h_s| <= r_max / s <= tol.
inline JacobiSolution stable_jacobi(const GeodesicPath& path, int normal_index,
                                    double r_max, double tol,
                                    double range_cap = default_range_cap) {
  detail::check_normal_index(path, normal_index);
  if (!(tol > 0)) throw InvalidInput("tolerance must be positive");
  if (!(r_max > 0)) throw InvalidInput("range must be positive");
  const double s = r_max / tol;
  if (s > range_cap * (1 + 1e-12)) throw NumericalError("tolerance unachievable");
  JacobiSolution sol;
  sol.kind = JacobiSolution::Kind::stable;
  sol.normal_index = normal_index;
  sol.s = s;
  sol.tolerance = tol;
  sol.truncation_bound = r_max / s;
  sol.range = r_max;
  if (path.model().constant_curvature()) {
    detail::ConstantJacobi cj{path.model().curvature_constant()};
    sol.eval_ = [cj, s](double r) { return cj.dirichlet(s, r); };
  } else {
    auto nd = std::make_shared<detail::NumericDirichlet>(path, s, r_max, true);
    sol.eval_ = [nd](double r) { return (*nd)(r); };
  }
  sol.sample();
  return sol;
}

/// The solution with h(0) = 0, h'(0) = 1 on [0, r_max].
inline JacobiSolution initial_value_jacobi(const GeodesicPath& path,
                                           int normal_index, double r_max) {
  detail::check_normal_index(path, normal_index);
  if (!(r_max > 0)) throw InvalidInput("range must be positive");
  JacobiSolution sol;
  sol.kind = JacobiSolution::Kind::initial_value;
  sol.normal_index = normal_index;
  sol.range = r_max;
  if (path.model().constant_curvature()) {
    detail::ConstantJacobi cj{path.model().curvature_constant()};
    sol.eval_ = [cj](double r) { return std::pair{cj.S(r), cj.C(r)}; };
  } else {
    auto nf = std::make_shared<detail::NumericFundamental>(path, r_max, r_max,
                                                           false);
    if (nf->end() < r_max) throw NumericalError("geodesic integration failed");
    sol.eval_ = [nf](double r) {
      const auto f = nf->fundamental(r);
      return std::pair{f[2], f[3]};
    };
  }
  sol.sample();
  return sol;
}

}  // namespace pgeom
