#pragma once

// Second fundamental forms of geodesic spheres, horospheres and
// parametrized hypersurfaces.
//
// Orientation: <II(X, Y), v> = <nabla_X Y, v>. A geodesic sphere paired with
// its inward normal has positive curvature (1/r in flat space); the
// horosphere H(v) has v pointing towards its centre at infinity, so its form
// is positive semidefinite.

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pgeom/error.hpp"
#include "pgeom/jacobi.hpp"
#include "pgeom/linalg.hpp"
#include "pgeom/manifold.hpp"

namespace pgeom {

/// Symmetric form <II(e_i, e_j), normal> in the orthonormal frame `basis`
/// (columns, chart coordinates) of the tangent space at `base`.
struct ShapeForm {
  Vec base;
  Vec normal;
  Mat matrix;
  Mat basis;
};

enum class ChartKind {
  geodesic_sphere,
  geodesic_sheet,
  horosphere,
  sheet_graph,
  flat_subtorus,
  torus_graph,
  warped_level,
  warped_ray,
  custom,
};

inline const char* to_string(ChartKind k) {
  switch (k) {
    case ChartKind::geodesic_sphere: return "geodesic_sphere";
    case ChartKind::geodesic_sheet: return "geodesic_sheet";
    case ChartKind::horosphere: return "horosphere";
    case ChartKind::sheet_graph: return "sheet_graph";
    case ChartKind::flat_subtorus: return "flat_subtorus";
    case ChartKind::torus_graph: return "torus_graph";
    case ChartKind::warped_level: return "warped_level";
    case ChartKind::warped_ray: return "warped_ray";
    case ChartKind::custom: return "custom";
  }
  return "?";
}

/// Parametrized submanifold F: box in R^d -> model. `normal_hint(u)` is a
/// chart vector at F(u) on the side that hypersurface_shape calls +1.
class HypersurfaceChart {
 public:
  using Map = std::function<Vec(const Vec&)>;

  HypersurfaceChart(MetricModel model, ChartKind kind, int dim, Map map,
                    Map normal_hint, Vec lower, Vec upper)
      : model_(std::move(model)),
        kind_(kind),
        dim_(dim),
        map_(std::move(map)),
        hint_(std::move(normal_hint)),
        lower_(std::move(lower)),
        upper_(std::move(upper)) {
    if (dim_ < 1 || dim_ >= model_.dim())
      throw InvalidInput("chart dimension must lie in [1, n-1]");
    if (lower_.size() != dim_ || upper_.size() != dim_)
      throw InvalidInput("chart bounds have wrong dimension");
  }

  const MetricModel& model() const noexcept { return model_; }
  ChartKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  bool is_hypersurface() const noexcept { return dim_ == model_.dim() - 1; }
  const Vec& lower() const noexcept { return lower_; }
  const Vec& upper() const noexcept { return upper_; }

  Vec operator()(const Vec& u) const {
    if (u.size() != dim_) throw InvalidInput("chart parameter has wrong dimension");
    return map_(u);
  }
  Vec normal_hint(const Vec& u) const { return hint_(u); }

  /// Radius of a geodesic-sphere chart.
  double radius() const noexcept { return radius_; }
  /// Constant area element when known exactly (flat subtori).
  std::optional<double> exact_area_element() const { return exact_area_; }
  /// Integer direction matrix of a flat subtorus chart.
  const Eigen::MatrixXi& lattice_directions() const noexcept { return lattice_; }
  const Vec& offset() const noexcept { return offset_; }
  /// Torus graph x2 = amplitude sin(frequency x1 + phase) + offset.
  std::array<double, 4> graph_parameters() const noexcept { return graph_; }

  HypersurfaceChart& set_radius(double r) {
    radius_ = r;
    return *this;
  }
  HypersurfaceChart& set_lattice(Eigen::MatrixXi a, Vec x0, double area) {
    lattice_ = std::move(a);
    offset_ = std::move(x0);
    exact_area_ = area;
    return *this;
  }
  HypersurfaceChart& set_graph(std::array<double, 4> g) {
    graph_ = g;
    return *this;
  }

 private:
  MetricModel model_;
  ChartKind kind_;
  int dim_;
  Map map_;
  Map hint_;
  Vec lower_;
  Vec upper_;
  double radius_ = 0.0;
  std::optional<double> exact_area_;
  Eigen::MatrixXi lattice_;
  Vec offset_;
  std::array<double, 4> graph_{0, 0, 0, 0};
};

/// First and covariant second derivatives of a chart at a parameter.
struct ChartJet {
  Vec point;
  Mat d1;                     // columns dF/du_i
  std::vector<Vec> d2;        // nabla_{d_i} d_j F, row-major d x d
  Mat gram;                   // induced metric in coordinates
  Mat to_frame;               // T with frame = d1 * T orthonormal
  Mat frame;                  // orthonormal tangent frame
  double area_element = 0.0;  // sqrt(det gram)

  const Vec& second(int i, int j) const {
    return d2[static_cast<std::size_t>(i * d1.cols() + j)];
  }
};

inline constexpr double chart_fd_step = 2e-3;

/// Derivatives by central differences with one Richardson step.
inline ChartJet chart_jet(const HypersurfaceChart& chart, const Vec& u,
                          double step = chart_fd_step) {
  const MetricModel& m = chart.model();
  const int d = chart.dim();
  ChartJet jet;
  jet.point = chart(u);
  const Vec& x = jet.point;
  auto at = [&](int i, double hi, int j, double hj) {
    Vec w = u;
    if (i >= 0) w(i) += hi;
    if (j >= 0) w(j) += hj;
    return chart(w);
  };
  jet.d1 = Mat(x.size(), d);
  jet.d2.assign(static_cast<std::size_t>(d * d), Vec());
  std::vector<Vec> plus_h(d), minus_h(d), plus_h2(d), minus_h2(d);
  const double h = step, h2 = step / 2;
  for (int i = 0; i < d; ++i) {
    plus_h[i] = at(i, h, -1, 0);
    minus_h[i] = at(i, -h, -1, 0);
    plus_h2[i] = at(i, h2, -1, 0);
    minus_h2[i] = at(i, -h2, -1, 0);
    const Vec coarse = (plus_h[i] - minus_h[i]) / (2 * h);
    const Vec fine = (plus_h2[i] - minus_h2[i]) / (2 * h2);
    jet.d1.col(i) = m.tangent_project(x, (4 * fine - coarse) / 3);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      Vec raw;
      if (i == j) {
        const Vec coarse = (plus_h[i] - 2 * x + minus_h[i]) / (h * h);
        const Vec fine = (plus_h2[i] - 2 * x + minus_h2[i]) / (h2 * h2);
        raw = (4 * fine - coarse) / 3;
      } else {
        auto mixed = [&](double s) -> Vec {
          return (at(i, s, j, s) - at(i, s, j, -s) - at(i, -s, j, s) +
                  at(i, -s, j, -s)) /
                 (4 * s * s);
        };
        raw = (4 * mixed(h2) - mixed(h)) / 3;
      }
      Vec cov = m.tangent_project(x, raw) +
                m.christoffel(x, jet.d1.col(i), jet.d1.col(j));
      jet.d2[static_cast<std::size_t>(i * d + j)] = cov;
      jet.d2[static_cast<std::size_t>(j * d + i)] = cov;
    }
  }
  jet.gram = Mat(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      jet.gram(i, j) = m.inner(x, jet.d1.col(i), jet.d1.col(j));
  const double det = jet.gram.determinant();
  if (!(det > 1e-10)) throw InvalidInput("degenerate parametrization");
  jet.area_element = std::sqrt(det);
  Eigen::LLT<Mat> llt(jet.gram);
  if (llt.info() != Eigen::Success) throw InvalidInput("degenerate parametrization");
  const Mat L = llt.matrixL();
  jet.to_frame = L.transpose().triangularView<Eigen::Upper>().solve(
      Mat::Identity(d, d));
  jet.frame = jet.d1 * jet.to_frame;
  return jet;
}

/// Matrix <II(e_a, e_b), w> in the jet's orthonormal frame; the tangential
/// part of w is discarded.
inline Mat second_fundamental_along(const HypersurfaceChart& chart,
                                    const ChartJet& jet, const Vec& w) {
  const MetricModel& m = chart.model();
  const int d = chart.dim();
  Vec wn = m.tangent_project(jet.point, w);
  for (int a = 0; a < d; ++a)
    wn -= m.inner(jet.point, wn, jet.frame.col(a)) * jet.frame.col(a);
  Mat coords(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      coords(i, j) = m.inner(jet.point, jet.second(i, j), wn);
  Mat out = jet.to_frame.transpose() * coords * jet.to_frame;
  return 0.5 * (out + out.transpose());
}

/// Unit normal of a hypersurface chart on the side of normal_hint.
inline Vec chart_normal(const HypersurfaceChart& chart, const ChartJet& jet,
                        const Vec& u) {
  const MetricModel& m = chart.model();
  std::vector<Vec> tangent;
  for (int a = 0; a < chart.dim(); ++a) tangent.push_back(jet.frame.col(a));
  Vec nu = m.complete_basis(jet.point, tangent, m.dim()).col(0);
  if (m.inner(jet.point, nu, chart.normal_hint(u)) < 0) nu = -nu;
  return nu;
}

/// <II_Sigma(e_i, e_j), v> with v the unit normal on the requested side
/// (+1 is the chart's hinted side).
inline ShapeForm hypersurface_shape(const HypersurfaceChart& chart,
                                    const Vec& param, int side = 1) {
  if (!chart.is_hypersurface()) throw InvalidInput("chart is not a hypersurface");
  const ChartJet jet = chart_jet(chart, param);
  ShapeForm out;
  out.base = jet.point;
  out.normal = chart_normal(chart, jet, param) * (side >= 0 ? 1.0 : -1.0);
  out.matrix = second_fundamental_along(chart, jet, out.normal);
  out.basis = jet.frame;
  return out;
}

namespace detail {

// y2'/y2 at r for the solution with y2(0) = 0, y2'(0) = 1.
inline double sphere_value(const GeodesicPath& path, double r) {
  const MetricModel& m = path.model();
  if (m.constant_curvature()) {
    const double k = m.curvature_constant();
    if (k == 0) return 1.0 / r;
    const double b = std::sqrt(std::abs(k));
    if (k < 0) return b / std::tanh(b * r);
    return b / std::tan(b * r);
  }
  NumericFundamental nf(path, r, r, false);
  const auto f = nf.fundamental(nf.end());
  if (nf.end() < r * (1 - 1e-14)) throw NumericalError("geodesic integration failed");
  return f[3] / f[2];
}

}  // namespace detail

/// Form of the geodesic sphere S_{gamma(0)}(r) at gamma(r), paired with the
/// inward normal -gamma'(r), in the parallel frame X_i(r).
inline ShapeForm sphere_shape(const MetricModel& model, const GeodesicPath& path,
                              double r) {
  (void)model;
  if (!(r >= 1e-8)) throw InvalidInput("radius too small");
  const int k = path.normal_count();
  const PointTangent st = path.state(r);
  ShapeForm out;
  out.base = st.point;
  out.normal = -st.vector;
  out.basis = path.normal_frame(r);
  const double v = detail::sphere_value(path, r);
  out.matrix = v * Mat::Identity(k, k);
  return out;
}

inline constexpr double default_horosphere_range = 1.0;

/// Form of the horosphere H(v) at v.point paired with v, i.e. -h'(0) for the
/// bounded Jacobi solution along gamma_v, in the parallel frame at the base.
inline ShapeForm horosphere_shape(const MetricModel& model, const PointTangent& v,
                                  double tol) {
  const GeodesicPath path(model, v, default_horosphere_range);
  const int k = path.normal_count();
  ShapeForm out;
  out.base = path.initial().point;
  out.normal = path.initial().vector;
  out.basis = path.normal_frame(0.0);
  out.matrix = Mat::Zero(k, k);
  // The horosphere error in h'(0) is bounded by 1/s as well, so r_max = 1.
  for (int i = 0; i < k; ++i) {
    if (i > 0 && model.constant_curvature()) {
      out.matrix(i, i) = out.matrix(0, 0);
      continue;
    }
    const JacobiSolution h =
        stable_jacobi(path, i, default_horosphere_range, tol);
    out.matrix(i, i) = -h.derivative(0.0);
  }
  return out;
}

struct ComparisonRow {
  double r = 0.0;
  double horosphere = 0.0;  // u at -gamma'(r)
  double sphere = 0.0;      // v(r)
  double difference = 0.0;
  double bound = 0.0;       // 1/r
  bool pass = false;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  bool pass = true;
};

inline constexpr double comparison_slack = 1e-6;

/// Checks 0 < v(r) - u(r) <= 1/r on the grid, where u is the horosphere
/// value at (gamma(r), -gamma'(r)). Rows report the first normal direction;
/// the pass flag covers all of them.
inline ComparisonReport comparison_report(const MetricModel& model,
                                          const GeodesicPath& path,
                                          const std::vector<double>& r_grid,
                                          double jacobi_tol = 1e-7) {
  ComparisonReport rep;
  double prev = 0.0;
  for (double r : r_grid) {
    if (!(r > 0) || r < prev) throw InvalidInput("r_grid must be positive and sorted");
    prev = r;
    const ShapeForm sph = sphere_shape(model, path, r);
    const PointTangent st = path.state(r);
    const ShapeForm hor =
        horosphere_shape(model, {st.point, -st.vector}, jacobi_tol);
    ComparisonRow row;
    row.r = r;
    row.bound = 1.0 / r;
    row.pass = true;
    for (int i = 0; i < sph.matrix.rows(); ++i) {
      const double diff = sph.matrix(i, i) - hor.matrix(i, i);
      if (!(diff > -comparison_slack && diff <= row.bound + comparison_slack))
        row.pass = false;
    }
    row.sphere = sph.matrix(0, 0);
    row.horosphere = hor.matrix(0, 0);
    row.difference = row.sphere - row.horosphere;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

namespace charts {

inline Vec box(int d, double value) { return Vec::Constant(d, value); }

// Normal coordinates on the unit sphere S^{d} subset T_c M about E_0.
inline Vec sphere_direction(const Mat& basis, const Vec& u) {
  const double t = u.norm();
  const double sinc = t < 1e-4 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
  Vec w = std::cos(t) * basis.col(0);
  for (int a = 0; a < u.size(); ++a) w += sinc * u(a) * basis.col(a + 1);
  return w;
}

/// Geodesic sphere of radius rho about center; hinted side is inward.
inline HypersurfaceChart geodesic_sphere(const MetricModel& model,
                                         const Vec& center, double rho) {
  if (!(rho > 0)) throw InvalidInput("sphere radius must be positive");
  if (model.kind() == ModelKind::round_sphere && rho >= pi)
    throw InvalidInput("sphere radius beyond the cut locus");
  const Mat basis = model.tangent_basis(center);
  const int d = model.dim() - 1;
  auto map = [model, center, basis, rho](const Vec& u) {
    const Vec w = sphere_direction(basis, u);
    if (model.kind() == ModelKind::warped_surface)
      return detail::warped_exp(model, center, w, rho);
    return exp_map(model, {center, w}, rho);
  };
  auto hint = [model, center, basis, rho](const Vec& u) -> Vec {
    const Vec w = sphere_direction(basis, u);
    if (model.kind() == ModelKind::warped_surface) {
      const auto y = detail::warped_exp_state(model, center, w, rho);
      Vec out(2);
      out << -y[2], -y[3];
      return out;
    }
    const Vec x = exp_map(model, {center, w}, rho);
    if (model.kind() == ModelKind::flat_torus ||
        model.kind() == ModelKind::euclidean)
      return -w;
    return model.tangent_project(x, center - x);
  };
  HypersurfaceChart c(model, ChartKind::geodesic_sphere, d, map, hint,
                      box(d, -1.5), box(d, 1.5));
  c.set_radius(rho);
  return c;
}

/// Totally geodesic hypersurface through base orthogonal to the unit
/// normal; hinted side is `normal`. Nested Fermi parametrization.
inline HypersurfaceChart geodesic_sheet(const MetricModel& model, const Vec& base,
                                        const Vec& normal) {
  const int d = model.dim() - 1;
  const Vec nu = model.tangent_project(base, normal);
  if (model.unit_defect(base, nu) > 1e-10)
    throw InvalidInput("non-unit direction");
  if (model.kind() == ModelKind::warped_surface) {
    const double f = model.warp()->f(base(0));
    Vec e(2);
    e << nu(1) * f, -nu(0) / f;
    auto path = std::make_shared<GeodesicPath>(model, PointTangent{base, e}, 3.0);
    auto map = [path](const Vec& u) { return path->point(u(0)); };
    auto hint = [path, model, nu, base](const Vec& u) -> Vec {
      Vec x = path->normal(0, u(0));
      const Vec n0 = path->normal(0, 0.0);
      return model.inner(base, n0, nu) >= 0 ? x : Vec(-x);
    };
    return HypersurfaceChart(model, ChartKind::geodesic_sheet, 1, map, hint,
                             box(1, -1), box(1, 1));
  }
  const Mat e = model.complete_basis(base, {nu}, model.dim());
  auto map = [model, base, e](const Vec& u) {
    Vec x = base;
    if (model.kind() == ModelKind::space_form) {
      const double R = model.radius();
      for (int a = 0; a < u.size(); ++a)
        x = std::cosh(u(a) / R) * x + R * std::sinh(u(a) / R) * e.col(a);
      return x;
    }
    if (model.kind() == ModelKind::round_sphere) {
      for (int a = 0; a < u.size(); ++a)
        x = std::cos(u(a)) * x + std::sin(u(a)) * e.col(a);
      return x;
    }
    return Vec(x + e * u);
  };
  auto hint = [nu](const Vec&) { return nu; };
  return HypersurfaceChart(model, ChartKind::geodesic_sheet, d, map, hint,
                           box(d, -1), box(d, 1));
}

/// Horosphere through base with inward normal v (centre at gamma_v(+inf)).
/// Flat models give the hyperplane; on warped exp profiles the level curve.
inline HypersurfaceChart horosphere(const MetricModel& model, const Vec& base,
                                    const Vec& v) {
  const int d = model.dim() - 1;
  if (model.kind() == ModelKind::euclidean || model.kind() == ModelKind::flat_torus) {
    const Mat e = model.complete_basis(base, {model.tangent_project(base, v)},
                                       model.dim());
    Vec nu = model.tangent_project(base, v);
    return HypersurfaceChart(
        model, ChartKind::horosphere, d,
        [base, e](const Vec& u) { return Vec(base + e * u); },
        [nu](const Vec&) { return nu; }, box(d, -1), box(d, 1));
  }
  if (model.kind() != ModelKind::space_form)
    throw InvalidInput("horosphere chart needs a flat or hyperbolic model");
  const Vec nu = model.tangent_project(base, v);
  if (model.unit_defect(base, nu) > 1e-10)
    throw InvalidInput("non-unit direction");
  const double R = model.radius();
  const Vec ph = base / R;
  const Mat e = model.complete_basis(base, {nu}, model.dim());
  const Vec ell = ph + nu;
  auto map = [R, ph, e, ell](const Vec& u) {
    const Vec w = u / R;
    return Vec(R * (ph + e * w + 0.5 * w.squaredNorm() * ell));
  };
  auto hint = [model, map, ell](const Vec& u) {
    return model.tangent_project(map(u), ell);
  };
  return HypersurfaceChart(model, ChartKind::horosphere, d, map, hint,
                           box(d, -1), box(d, 1));
}

/// Normal graph u -> exp_{S(u)}(g(u) nu) over a geodesic sheet S, with
/// g(u) = sum_a c_a u_a^2 / 2. Space forms and Euclidean space only.
inline HypersurfaceChart sheet_graph(const MetricModel& model, const Vec& base,
                                     const Vec& normal,
                                     std::vector<double> curvatures) {
  const int d = model.dim() - 1;
  if (static_cast<int>(curvatures.size()) != d)
    throw InvalidInput("sheet_graph needs one coefficient per direction");
  if (model.kind() != ModelKind::space_form && model.kind() != ModelKind::euclidean)
    throw InvalidInput("sheet_graph needs a Euclidean or hyperbolic model");
  const HypersurfaceChart sheet = geodesic_sheet(model, base, normal);
  const Vec nu = model.tangent_project(base, normal);
  auto height = [curvatures](const Vec& u) {
    double g = 0.0;
    for (int a = 0; a < u.size(); ++a) g += 0.5 * curvatures[a] * u(a) * u(a);
    return g;
  };
  auto map = [model, sheet, nu, height](const Vec& u) {
    const Vec s = sheet(u);
    const double g = height(u);
    if (model.kind() == ModelKind::space_form) {
      const double R = model.radius();
      return Vec(std::cosh(g / R) * s + R * std::sinh(g / R) * nu);
    }
    return Vec(s + g * nu);
  };
  auto hint = [model, map, nu](const Vec& u) {
    return model.tangent_project(map(u), nu);
  };
  return HypersurfaceChart(model, ChartKind::sheet_graph, d, map, hint,
                           box(d, -1), box(d, 1));
}

/// Rational flat subtorus x0 + A u, u in [0, 2pi)^d, A an integer n x d
/// matrix of full column rank.
inline HypersurfaceChart flat_subtorus(const MetricModel& model,
                                       const Eigen::MatrixXi& a, const Vec& x0) {
  if (model.kind() != ModelKind::flat_torus)
    throw InvalidInput("flat_subtorus needs a flat torus");
  if (a.rows() != model.dim() || a.cols() < 1 || a.cols() >= model.dim())
    throw InvalidInput("subtorus direction matrix has wrong shape");
  const Mat af = a.cast<double>();
  const double gram_det = (af.transpose() * af).determinant();
  if (!(gram_det > 0.5)) throw InvalidInput("subtorus directions are dependent");
  const int d = static_cast<int>(a.cols());
  Eigen::HouseholderQR<Mat> qr(af);
  const Mat q = qr.householderQ() * Mat::Identity(model.dim(), model.dim());
  const Vec hint_vec = q.col(model.dim() - 1);
  auto map = [af, x0](const Vec& u) { return Vec(x0 + af * u); };
  auto hint = [hint_vec](const Vec&) { return hint_vec; };
  HypersurfaceChart c(model, ChartKind::flat_subtorus, d, map, hint, box(d, 0),
                      box(d, two_pi));
  c.set_lattice(a, x0, std::sqrt(gram_det));
  return c;
}

/// Closed curve x2 = amplitude sin(frequency x1 + phase) + offset in the
/// flat 2-torus. Hinted side is +x2.
inline HypersurfaceChart torus_graph(const MetricModel& model, double amplitude,
                                     int frequency, double phase, double offset) {
  if (model.kind() != ModelKind::flat_torus || model.dim() != 2)
    throw InvalidInput("torus_graph needs the flat 2-torus");
  auto map = [=](const Vec& u) {
    Vec x(2);
    x << u(0), amplitude * std::sin(frequency * u(0) + phase) + offset;
    return x;
  };
  auto hint = [](const Vec&) {
    Vec e(2);
    e << 0.0, 1.0;
    return e;
  };
  HypersurfaceChart c(model, ChartKind::torus_graph, 1, map, hint, box(1, 0),
                      box(1, two_pi));
  c.set_graph({amplitude, static_cast<double>(frequency), phase, offset});
  return c;
}

/// Level curve r = r0 of a warped surface, theta in [-1, 1]; hinted side
/// is -d/dr.
inline HypersurfaceChart warped_level(const MetricModel& model, double r0) {
  if (model.kind() != ModelKind::warped_surface)
    throw InvalidInput("warped_level needs a warped surface");
  if (!model.in_domain((Vec(2) << r0, 0.0).finished()))
    throw InvalidInput("level outside the chart domain");
  auto map = [r0](const Vec& u) { return Vec((Vec(2) << r0, u(0)).finished()); };
  auto hint = [](const Vec&) { return Vec((Vec(2) << -1.0, 0.0).finished()); };
  return HypersurfaceChart(model, ChartKind::warped_level, 1, map, hint, box(1, -1),
                           box(1, 1));
}

/// Meridian theta = theta0 (a geodesic), r in r0 + [-1, 1]; hinted side is
/// +d/dtheta.
inline HypersurfaceChart warped_ray(const MetricModel& model, double r0,
                                    double theta0) {
  if (model.kind() != ModelKind::warped_surface)
    throw InvalidInput("warped_ray needs a warped surface");
  auto map = [r0, theta0](const Vec& u) {
    return Vec((Vec(2) << r0 + u(0), theta0).finished());
  };
  auto hint = [](const Vec&) { return Vec((Vec(2) << 0.0, 1.0).finished()); };
  return HypersurfaceChart(model, ChartKind::warped_ray, 1, map, hint, box(1, -1),
                           box(1, 1));
}

}  // namespace charts

}  // namespace pgeom
