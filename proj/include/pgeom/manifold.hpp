#pragma once

// Model Riemannian spaces: Euclidean space, negatively curved space forms
// (hyperboloid model), flat tori R^n / 2piZ^n, round spheres and warped
// surfaces dr^2 + f(r)^2 dtheta^2.

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pgeom/error.hpp"
#include "pgeom/linalg.hpp"
#include "pgeom/ode.hpp"

namespace pgeom {

/// Warp profile f of a surface dr^2 + f(r)^2 dtheta^2, evaluated through
/// log f so that profiles growing like e^r stay representable.
class WarpProfile {
 public:
  enum class Kind { cosh, exp, sinh, polynomial, cosh_sum };

  /// f = cosh(b r); curvature -b^2, r = 0 is a geodesic.
  static WarpProfile cosh(double b = 1.0) { return {Kind::cosh, {b}, {}}; }
  /// f = e^{b r}; curvature -b^2, theta-lines are horocycles.
  static WarpProfile exp(double b = 1.0) { return {Kind::exp, {b}, {}}; }
  /// f = sinh(b r) / b; geodesic polar coordinates, r > 0 only.
  static WarpProfile sinh(double b = 1.0) { return {Kind::sinh, {b}, {}}; }
  /// f = sum_k c_k r^k.
  static WarpProfile polynomial(std::vector<double> coefficients) {
    return {Kind::polynomial, std::move(coefficients), {}};
  }
  /// f = sum_i w_i cosh(b_i r) / sum_i w_i with w_i > 0; curvature lies in
  /// [-max b_i^2, -min b_i^2].
  static WarpProfile cosh_sum(std::vector<double> weights,
                              std::vector<double> rates) {
    if (weights.size() != rates.size() || weights.empty())
      throw InvalidInput("cosh_sum needs matching nonempty weights and rates");
    for (double w : weights)
      if (!(w > 0)) throw InvalidInput("cosh_sum weights must be positive");
    return {Kind::cosh_sum, std::move(weights), std::move(rates)};
  }

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& parameters() const noexcept { return a_; }
  const std::vector<double>& rates() const noexcept { return b_; }

  double log_f(double r) const {
    switch (kind_) {
      case Kind::cosh: return log_cosh(a_[0] * r);
      case Kind::exp: return a_[0] * r;
      case Kind::sinh: {
        const double x = a_[0] * r;
        if (x <= 0) return -std::numeric_limits<double>::infinity();
        return log_sinhc(x) + std::log(r);
      }
      case Kind::polynomial: {
        const double f = poly(r, 0);
        return f > 0 ? std::log(f) : std::numeric_limits<double>::quiet_NaN();
      }
      case Kind::cosh_sum: {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < a_.size(); ++i)
          mx = std::max(mx, std::log(a_[i]) + log_cosh(b_[i] * r));
        double acc = 0.0, wsum = 0.0;
        for (std::size_t i = 0; i < a_.size(); ++i) {
          acc += std::exp(std::log(a_[i]) + log_cosh(b_[i] * r) - mx);
          wsum += a_[i];
        }
        return mx + std::log(acc) - std::log(wsum);
      }
    }
    return 0.0;
  }

  /// f'(r) / f(r).
  double dlog_f(double r) const {
    switch (kind_) {
      case Kind::cosh: return a_[0] * std::tanh(a_[0] * r);
      case Kind::exp: return a_[0];
      case Kind::sinh: return a_[0] / std::tanh(a_[0] * r);
      case Kind::polynomial: return poly(r, 1) / poly(r, 0);
      case Kind::cosh_sum: return weighted_ratio(r, 1);
    }
    return 0.0;
  }

  /// f''(r) / f(r); the Gauss curvature is its negative.
  double d2_over_f(double r) const {
    switch (kind_) {
      case Kind::cosh:
      case Kind::exp:
      case Kind::sinh: return a_[0] * a_[0];
      case Kind::polynomial: return poly(r, 2) / poly(r, 0);
      case Kind::cosh_sum: return weighted_ratio(r, 2);
    }
    return 0.0;
  }

  double f(double r) const { return std::exp(log_f(r)); }

  std::string describe() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::cosh: os << "cosh(" << a_[0] << " r)"; break;
      case Kind::exp: os << "exp(" << a_[0] << " r)"; break;
      case Kind::sinh: os << "sinh(" << a_[0] << " r)/" << a_[0]; break;
      case Kind::polynomial: {
        os << "poly[";
        for (std::size_t i = 0; i < a_.size(); ++i) os << (i ? "," : "") << a_[i];
        os << "]";
        break;
      }
      case Kind::cosh_sum: os << "cosh_sum"; break;
    }
    return os.str();
  }

 private:
  WarpProfile(Kind k, std::vector<double> a, std::vector<double> b)
      : kind_(k), a_(std::move(a)), b_(std::move(b)) {}

  double poly(double r, int derivative) const {
    double acc = 0.0;
    for (int k = static_cast<int>(a_.size()) - 1; k >= derivative; --k) {
      double c = a_[k];
      for (int j = 0; j < derivative; ++j) c *= (k - j);
      acc = acc * r + c;
    }
    return acc;
  }

  // sum w_i b_i^p g_i(b_i r) / sum w_i cosh(b_i r) with g = sinh (p=1), cosh
  // (p=2); computed relative to the dominant term.
  double weighted_ratio(double r, int p) const {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a_.size(); ++i)
      mx = std::max(mx, std::log(a_[i]) + log_cosh(b_[i] * r));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) {
      const double c = std::exp(std::log(a_[i]) + log_cosh(b_[i] * r) - mx);
      den += c;
      num += c * (p == 1 ? b_[i] * std::tanh(b_[i] * r) : b_[i] * b_[i]);
    }
    return num / den;
  }

  Kind kind_;
  std::vector<double> a_;
  std::vector<double> b_;
};

enum class ModelKind { euclidean, space_form, flat_torus, round_sphere, warped_surface };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::euclidean: return "euclidean";
    case ModelKind::space_form: return "space_form";
    case ModelKind::flat_torus: return "flat_torus";
    case ModelKind::round_sphere: return "round_sphere";
    case ModelKind::warped_surface: return "warped_surface";
  }
  return "?";
}

/// A point together with a tangent vector, both in model coordinates.
struct PointTangent {
  Vec point;
  Vec vector;
};

/// Immutable description of a model space.
///
/// Coordinates: Euclidean and torus use R^n (torus points reduced to
/// [0, 2pi)^n by exp_map); space forms use the hyperboloid
/// <x,x>_L = -R^2, x_0 > 0 in Minkowski R^{n,1} with R = 1/sqrt(-K); the
/// round sphere is the unit sphere in R^{n+1}; warped surfaces use (r, theta)
/// with theta ranging over the whole real line.
class MetricModel {
 public:
  static MetricModel euclidean(int n) {
    check_dim(n);
    return MetricModel(ModelKind::euclidean, n, 0.0);
  }

  static MetricModel space_form(int n, double curvature) {
    check_dim(n);
    if (!(curvature < 0))
      throw InvalidInput("space_form requires negative curvature");
    return MetricModel(ModelKind::space_form, n, curvature);
  }

  static MetricModel flat_torus(int n) {
    check_dim(n);
    return MetricModel(ModelKind::flat_torus, n, 0.0);
  }

  static MetricModel round_sphere(int n) {
    check_dim(n);
    return MetricModel(ModelKind::round_sphere, n, 1.0);
  }

  /// Warped surface on r in [r_lo, r_hi] (infinite ends allowed). Rejects
  /// profiles that are not positive with nonpositive curvature on a
  /// 1000-point grid of the (clipped) domain.
  static MetricModel warped_surface(WarpProfile profile, double r_lo,
                                    double r_hi) {
    if (!(r_lo < r_hi)) throw InvalidInput("warped_surface: empty r-domain");
    if (profile.kind() == WarpProfile::Kind::sinh && r_lo <= 0)
      throw InvalidInput("warped_surface: polar profile needs r_lo > 0");
    const double lo = std::max(r_lo, -100.0);
    const double hi = std::min(r_hi, 100.0);
    for (int i = 0; i < 1000; ++i) {
      const double r = lo + (hi - lo) * i / 999.0;
      const double lf = profile.log_f(r);
      if (!std::isfinite(lf))
        throw InvalidInput("warped_surface: profile not positive at r = " +
                           std::to_string(r));
      if (profile.d2_over_f(r) < -1e-12)
        throw InvalidInput(
            "warped_surface: positive curvature at r = " + std::to_string(r));
    }
    if (profile.kind() == WarpProfile::Kind::polynomial) {
      const auto& c = profile.parameters();
      // Beyond the checked window the leading term decides sign and
      // convexity.
      if ((std::isinf(r_hi) || std::isinf(r_lo)) && c.size() > 1) {
        const double lead = c.back();
        const int deg = static_cast<int>(c.size()) - 1;
        if (std::isinf(r_hi) && lead < 0)
          throw InvalidInput("warped_surface: profile turns negative");
        if (std::isinf(r_lo) && lead * (deg % 2 == 0 ? 1 : -1) < 0)
          throw InvalidInput("warped_surface: profile turns negative");
        if (deg == 1 && (std::isinf(r_hi) || std::isinf(r_lo)) && lead != 0)
          throw InvalidInput("warped_surface: linear profile vanishes");
      }
    }
    MetricModel m(ModelKind::warped_surface, 2, 0.0);
    m.warp_ = std::make_shared<const WarpProfile>(std::move(profile));
    m.r_lo_ = r_lo;
    m.r_hi_ = r_hi;
    return m;
  }

  ModelKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  bool embedded() const noexcept {
    return kind_ == ModelKind::space_form || kind_ == ModelKind::round_sphere;
  }
  /// Number of chart coordinates (n + 1 for embedded models).
  int coord_dim() const noexcept { return embedded() ? dim_ + 1 : dim_; }
  bool constant_curvature() const noexcept {
    return kind_ != ModelKind::warped_surface;
  }
  /// Sectional curvature of constant-curvature models.
  double curvature_constant() const noexcept { return curvature_; }
  /// Radius of the hyperboloid / sphere.
  double radius() const noexcept {
    return embedded() ? 1.0 / std::sqrt(std::abs(curvature_)) : 0.0;
  }
  const WarpProfile* warp() const noexcept { return warp_.get(); }
  double r_lo() const noexcept { return r_lo_; }
  double r_hi() const noexcept { return r_hi_; }

  std::string describe() const {
    std::ostringstream os;
    os << to_string(kind_) << "(n=" << dim_;
    if (kind_ == ModelKind::space_form) os << ", K=" << curvature_;
    if (warp_) os << ", f=" << warp_->describe();
    os << ")";
    return os.str();
  }

  /// Canonical base point.
  Vec origin() const {
    Vec o = Vec::Zero(coord_dim());
    if (kind_ == ModelKind::space_form) o(0) = radius();
    if (kind_ == ModelKind::round_sphere) o(0) = 1.0;
    if (kind_ == ModelKind::warped_surface) {
      o(0) = std::isfinite(r_lo_) && std::isfinite(r_hi_)
                 ? 0.5 * (r_lo_ + r_hi_)
                 : (std::isfinite(r_lo_) ? r_lo_ + 1.0
                                         : (std::isfinite(r_hi_) ? r_hi_ - 1.0
                                                                 : 0.0));
    }
    return o;
  }

  double inner(const Vec& p, const Vec& u, const Vec& w) const {
    switch (kind_) {
      case ModelKind::space_form: return u.dot(w) - 2.0 * u(0) * w(0);
      case ModelKind::warped_surface: {
        const double f2 = std::exp(2.0 * warp_->log_f(p(0)));
        return u(0) * w(0) + f2 * u(1) * w(1);
      }
      default: return u.dot(w);
    }
  }

  double norm(const Vec& p, const Vec& u) const {
    return std::sqrt(std::max(0.0, inner(p, u, u)));
  }

  /// Christoffel contraction Gamma(u, w) in chart coordinates. Flat and
  /// embedded models use the ambient flat connection followed by tangential
  /// projection, so this is zero for them.
  Vec christoffel(const Vec& p, const Vec& u, const Vec& w) const {
    Vec out = Vec::Zero(coord_dim());
    if (kind_ == ModelKind::warped_surface) {
      const double dl = warp_->dlog_f(p(0));
      const double f2 = std::exp(2.0 * warp_->log_f(p(0)));
      out(0) = -f2 * dl * u(1) * w(1);
      out(1) = dl * (u(0) * w(1) + u(1) * w(0));
    }
    return out;
  }

  /// |<u,u> - 1|, relative to the Euclidean size of the representation so
  /// that hyperboloid vectors far from the origin are judged fairly.
  double unit_defect(const Vec& p, const Vec& u) const {
    return std::abs(inner(p, u, u) - 1.0) / std::max(1.0, u.squaredNorm());
  }

  /// Projection of a chart vector onto T_pM.
  Vec tangent_project(const Vec& p, const Vec& w) const {
    switch (kind_) {
      case ModelKind::space_form: {
        const double r2 = radius() * radius();
        return w + (inner(p, w, p) / r2) * p;
      }
      case ModelKind::round_sphere: return w - w.dot(p) * p;
      default: return w;
    }
  }

  /// Orthonormal basis of T_pM (columns), deterministic.
  Mat tangent_basis(const Vec& p) const { return complete_basis(p, {}, dim_); }

  /// Orthonormal vectors of T_pM orthogonal to the given (orthonormal)
  /// vectors, extending them to `count` total.
  Mat complete_basis(const Vec& p, const std::vector<Vec>& existing,
                     int count) const {
    if (kind_ == ModelKind::space_form) return boosted_basis(p, existing, count);
    std::vector<Vec> basis = existing;
    const int m = coord_dim();
    while (static_cast<int>(basis.size()) < count) {
      double best = -1.0;
      Vec best_vec;
      for (int a = 0; a < m; ++a) {
        Vec w = tangent_project(p, unit_vector(m, a));
        if (kind_ == ModelKind::warped_surface && a == 1)
          w /= std::exp(warp_->log_f(p(0)));
        for (const Vec& b : basis) w -= inner(p, w, b) * b;
        const double nw = norm(p, w);
        if (nw > best + 1e-9) {
          best = nw;
          best_vec = w;
        }
      }
      if (best < 1e-8) throw NumericalError("tangent basis construction failed");
      best_vec /= best;
      // one re-orthogonalization pass
      for (const Vec& b : basis) best_vec -= inner(p, best_vec, b) * b;
      best_vec /= norm(p, best_vec);
      basis.push_back(best_vec);
    }
    Mat out(m, count - static_cast<int>(existing.size()));
    for (int i = static_cast<int>(existing.size()); i < count; ++i)
      out.col(i - static_cast<int>(existing.size())) = basis[i];
    return out;
  }

  /// Columns of the Lorentz boost taking the origin to p, applied to the
  /// spatial axes: an exactly orthonormal tangent frame at p.
  Mat boost_frame(const Vec& p) const {
    const Vec s = p.tail(dim_) / radius();
    const double u0 = std::sqrt(1.0 + s.squaredNorm());
    Vec e0u(dim_ + 1);
    e0u << 1.0 + u0, s;
    Mat f(dim_ + 1, dim_);
    for (int i = 0; i < dim_; ++i) {
      f.col(i) = (s(i) / (1.0 + u0)) * e0u;
      f(i + 1, i) += 1.0;
    }
    return f;
  }

  /// Gram-Schmidt in boost-frame coordinates, where axis candidates stay
  /// well conditioned however far p is from the origin.
  Mat boosted_basis(const Vec& p, const std::vector<Vec>& existing, int count) const {
    const Mat f = boost_frame(p);
    std::vector<Vec> basis;
    for (const Vec& w : existing) {
      Vec c(dim_);
      for (int i = 0; i < dim_; ++i) c(i) = inner(p, w, f.col(i));
      basis.push_back(c);
    }
    const std::size_t given = basis.size();
    while (static_cast<int>(basis.size()) < count) {
      double best = -1.0;
      Vec best_vec;
      for (int a = 0; a < dim_; ++a) {
        Vec w = unit_vector(dim_, a);
        for (const Vec& b : basis) w -= w.dot(b) * b;
        if (w.norm() > best + 1e-9) {
          best = w.norm();
          best_vec = w;
        }
      }
      if (best < 1e-8) throw NumericalError("tangent basis construction failed");
      best_vec /= best;
      for (const Vec& b : basis) best_vec -= best_vec.dot(b) * b;
      basis.push_back(best_vec.normalized());
    }
    Mat out(dim_ + 1, count - static_cast<int>(given));
    for (int i = static_cast<int>(given); i < count; ++i)
      out.col(i - static_cast<int>(given)) = f * basis[i];
    return out;
  }

  /// Sampled range [K_min, K_max] of sectional curvature over the model.
  std::pair<double, double> curvature_range() const {
    if (kind_ != ModelKind::warped_surface) return {curvature_, curvature_};
    const double lo = std::max(r_lo_, -100.0);
    const double hi = std::min(r_hi_, 100.0);
    double kmin = std::numeric_limits<double>::infinity();
    double kmax = -kmin;
    for (int i = 0; i < 1000; ++i) {
      const double k = -warp_->d2_over_f(lo + (hi - lo) * i / 999.0);
      kmin = std::min(kmin, k);
      kmax = std::max(kmax, k);
    }
    return {kmin, kmax};
  }

  bool in_domain(const Vec& p) const {
    if (p.size() != coord_dim()) return false;
    if (kind_ == ModelKind::warped_surface)
      return p(0) >= r_lo_ && p(0) <= r_hi_;
    return true;
  }

 private:
  MetricModel(ModelKind k, int n, double curvature)
      : kind_(k), dim_(n), curvature_(curvature) {}

  static void check_dim(int n) {
    if (n < 2) throw InvalidInput("model dimension must be at least 2");
  }

  ModelKind kind_;
  int dim_;
  double curvature_;
  std::shared_ptr<const WarpProfile> warp_;
  double r_lo_ = -std::numeric_limits<double>::infinity();
  double r_hi_ = std::numeric_limits<double>::infinity();
};

namespace detail {

inline ode::Options geodesic_options() {
  ode::Options o;
  o.failure_message = "geodesic integration failed";
  return o;
}

/// Geodesic equation on a warped surface, state (r, theta, r', theta').
struct WarpedGeodesic {
  const WarpProfile* warp;

  ode::State<4> operator()(double, const ode::State<4>& y) const {
    const double dl = warp->dlog_f(y[0]);
    double ftheta2 = 0.0;  // (f theta')^2 without overflowing f^2
    if (y[3] != 0.0)
      ftheta2 = std::exp(2.0 * (warp->log_f(y[0]) + std::log(std::abs(y[3]))));
    return {y[2], y[3], dl * ftheta2, -2.0 * dl * y[2] * y[3]};
  }
};

inline void check_warped_domain(const MetricModel& model, double r) {
  if (!(r >= model.r_lo() && r <= model.r_hi()))
    throw NumericalError("geodesic integration failed: left the chart domain");
}

inline ode::State<4> warped_exp_state(const MetricModel& model, const Vec& p,
                                      const Vec& v, double t) {
  WarpedGeodesic rhs{model.warp()};
  ode::State<4> y0{p(0), p(1), v(0), v(1)};
  auto obs = [&](double, const ode::State<4>& y, const ode::State<4>&) {
    check_warped_domain(model, y[0]);
    return ode::Control::proceed;
  };
  auto opt = geodesic_options();
  opt.rtol = 1e-12;
  opt.atol = 1e-14;
  return ode::integrate<4>(rhs, 0.0, y0, t, opt, obs).y;
}

inline Vec warped_exp(const MetricModel& model, const Vec& p, const Vec& v,
                      double t) {
  const auto y = warped_exp_state(model, p, v, t);
  Vec q(2);
  q << y[0], y[1];
  return q;
}

inline Vec torus_reduce(Vec p) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    p(i) = std::fmod(p(i), two_pi);
    if (p(i) < 0) p(i) += two_pi;
    if (p(i) >= two_pi) p(i) -= two_pi;
  }
  return p;
}

inline double hyperboloid_distance(double radius, const Vec& p, const Vec& q) {
  // -<p,q>/R^2 = cosh(d/R) keeps full relative accuracy for well separated
  // points, where the Minkowski chord |p - q|_L cancels catastrophically.
  const double sp = p.cwiseAbs().maxCoeff();
  const double sq = q.cwiseAbs().maxCoeff();
  const Vec ph = p / sp;
  const Vec qh = q / sq;
  const double mink = -(ph.dot(qh) - 2.0 * ph(0) * qh(0));
  const double logx = std::log(sp) + std::log(sq) + std::log(mink) - 2.0 * std::log(radius);
  if (logx > std::log(1.5)) {
    if (logx < 300.0) {
      const double x = std::exp(logx);
      return radius * std::acosh(x);
    }
    return radius * (logx + std::log1p(std::sqrt(1.0 - std::exp(-2.0 * logx))));
  }
  const Vec diff = p - q;
  const double d2 = std::max(0.0, diff.squaredNorm() - 2.0 * diff(0) * diff(0));
  return 2.0 * radius * std::asinh(std::sqrt(d2) / (2.0 * radius));
}

}  // namespace detail

/// Sectional curvature of the plane spanned by at.vector and second.
inline double sectional_curvature(const MetricModel& model,
                                  const PointTangent& at, const Vec& second) {
  const Vec& p = at.point;
  const Vec u = model.tangent_project(p, at.vector);
  const Vec w = model.tangent_project(p, second);
  const double uu = model.inner(p, u, u);
  const double ww = model.inner(p, w, w);
  const double uw = model.inner(p, u, w);
  if (!(uu * ww - uw * uw > 1e-12 * uu * ww) || uu <= 0 || ww <= 0)
    throw InvalidInput("degenerate plane");
  if (model.kind() == ModelKind::warped_surface)
    return -model.warp()->d2_over_f(p(0));
  return model.curvature_constant();
}

/// Point at parameter `time` along the geodesic with initial velocity
/// at.vector (not necessarily unit).
inline Vec exp_map(const MetricModel& model, const PointTangent& at,
                   double time) {
  const Vec& p = at.point;
  const Vec v = model.tangent_project(p, at.vector);
  const double speed = model.norm(p, v);
  if (!(speed > 0)) throw InvalidInput("exp_map: zero vector");
  switch (model.kind()) {
    case ModelKind::euclidean: return p + time * v;
    case ModelKind::flat_torus: return detail::torus_reduce(p + time * v);
    case ModelKind::space_form: {
      const double r = model.radius();
      const double a = speed * time / r;
      return std::cosh(a) * p + (r * std::sinh(a) / speed) * v;
    }
    case ModelKind::round_sphere: {
      const double a = speed * time;
      return std::cos(a) * p + (std::sin(a) / speed) * v;
    }
    case ModelKind::warped_surface:
      return detail::warped_exp(model, p, v, time);
  }
  return p;
}

/// Minimizing initial velocity v at p with exp_map(p, v, 1) = q. The torus
/// uses the lift, i.e. v = q - p.
inline Vec log_map(const MetricModel& model, const Vec& p, const Vec& q);

/// Geodesic distance. On the flat torus this is the quotient distance; see
/// lifted_distance for the universal-cover distance.
inline double distance(const MetricModel& model, const Vec& p, const Vec& q) {
  switch (model.kind()) {
    case ModelKind::euclidean: return (p - q).norm();
    case ModelKind::flat_torus: {
      Vec d = q - p;
      for (Eigen::Index i = 0; i < d.size(); ++i)
        d(i) = std::remainder(d(i), two_pi);
      return d.norm();
    }
    case ModelKind::space_form:
      return detail::hyperboloid_distance(model.radius(), p, q);
    case ModelKind::round_sphere: {
      const double chord = std::min(1.0, 0.5 * (p - q).norm());
      return 2.0 * std::asin(chord);
    }
    case ModelKind::warped_surface: {
      if ((p - q).norm() == 0.0) return 0.0;
      const Vec v = log_map(model, p, q);
      return model.norm(p, v);
    }
  }
  return 0.0;
}

/// Universal-cover distance; differs from distance() only on the torus.
inline double lifted_distance(const MetricModel& model, const Vec& p,
                              const Vec& q) {
  if (model.kind() == ModelKind::flat_torus) return (p - q).norm();
  return distance(model, p, q);
}

inline Vec log_map(const MetricModel& model, const Vec& p, const Vec& q) {
  switch (model.kind()) {
    case ModelKind::euclidean:
    case ModelKind::flat_torus: return q - p;
    case ModelKind::space_form: {
      const double d = detail::hyperboloid_distance(model.radius(), p, q);
      if (d == 0.0) return Vec::Zero(p.size());
      // |proj q| = R sinh(d / R) exactly; avoids cancellation in the norm.
      const double R = model.radius();
      const Vec w = model.tangent_project(p, q);
      return (d / (R * std::sinh(d / R))) * w;
    }
    case ModelKind::round_sphere: {
      const double d = distance(model, p, q);
      if (d == 0.0) return Vec::Zero(p.size());
      const Vec w = q - q.dot(p) * p;
      if (w.norm() < 1e-12) throw InvalidInput("log_map: antipodal points");
      return (d / w.norm()) * w;
    }
    case ModelKind::warped_surface: {
      // Newton iteration on the initial velocity; geodesics are unique in
      // nonpositive curvature on the (simply connected) chart.
      Vec v = q - p;
      const double scale = std::max(1.0, v.norm());
      for (int it = 0; it < 60; ++it) {
        const Vec miss = detail::warped_exp(model, p, v, 1.0) - q;
        if (miss.norm() < 1e-12 * scale) return v;
        Mat jac(2, 2);
        for (int k = 0; k < 2; ++k) {
          const double h = 1e-6 * std::max(1.0, std::abs(v(k)));
          Vec vp = v, vm = v;
          vp(k) += h;
          vm(k) -= h;
          jac.col(k) = (detail::warped_exp(model, p, vp, 1.0) -
                        detail::warped_exp(model, p, vm, 1.0)) /
                       (2 * h);
        }
        Vec step = jac.fullPivLu().solve(miss);
        double damp = 1.0;
        while (damp * step.norm() > 2.0 * std::max(1.0, v.norm())) damp *= 0.5;
        v -= damp * step;
      }
      throw NumericalError("geodesic integration failed: distance solve");
    }
  }
  return q - p;
}

/// Leading Hadamard coefficient |g(x)|^{-1/4}, with the metric determinant
/// taken in geodesic normal coordinates about `center`.
inline double hadamard_alpha0(const MetricModel& model, const Vec& center,
                              const Vec& target) {
  const int n = model.dim();
  switch (model.kind()) {
    case ModelKind::euclidean:
    case ModelKind::flat_torus: return 1.0;
    case ModelKind::space_form: {
      const double b = 1.0 / model.radius();
      const double r = distance(model, center, target);
      return std::exp(-0.5 * (n - 1) * log_sinhc(b * r));
    }
    case ModelKind::round_sphere: {
      const double r = distance(model, center, target);
      if (r >= pi - 1e-12) throw InvalidInput("normal coordinates invalid");
      const double ratio = r < 1e-4 ? 1.0 - r * r / 6.0 : std::sin(r) / r;
      return std::pow(ratio, -0.5 * (n - 1));
    }
    case ModelKind::warped_surface: {
      const Vec v = log_map(model, center, target);
      const double r = model.norm(center, v);
      if (r == 0.0) return 1.0;
      // Jacobi amplitude y'' = -K y, y(0) = 0, y'(0) = 1 along the radial
      // geodesic gives sqrt|g| = y(r) / r in 2-D normal coordinates.
      const Vec u = v / r;
      detail::WarpedGeodesic geo{model.warp()};
      auto rhs = [&](double t, const ode::State<6>& y) {
        ode::State<4> g{y[0], y[1], y[2], y[3]};
        const auto dg = geo(t, g);
        const double k = -model.warp()->d2_over_f(y[0]);
        return ode::State<6>{dg[0], dg[1], dg[2], dg[3], y[5], -k * y[4]};
      };
      ode::State<6> y0{center(0), center(1), u(0), u(1), 0.0, 1.0};
      auto res = ode::integrate<6>(rhs, 0.0, y0, r, detail::geodesic_options());
      return std::pow(res.y[4] / r, -0.5);
    }
  }
  return 1.0;
}

}  // namespace pgeom
