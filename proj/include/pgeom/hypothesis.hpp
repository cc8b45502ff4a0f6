#pragma once

// Rank condition
//   rank <II_S - II_H(v), v> + rank <II_S - II_H(-v), -v> >= n
// at unit normals of a hypersurface, and the sufficient curvature criteria.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "pgeom/curvature.hpp"
#include "pgeom/error.hpp"
#include "pgeom/linalg.hpp"
#include "pgeom/parallel.hpp"

namespace pgeom {

struct RankTolerances {
  double rank_tol = 1e-6;
  double jacobi_tol = 1e-6;
};

struct RankReport {
  Vec point;          // chart parameter
  int rank_plus = 0;  // rank of <II_S - II_H(v), v>
  int rank_minus = 0; // rank of <II_S - II_H(-v), -v>
  int sum = 0;
  bool passes = false;
  double threshold_plus = 0.0;
  double threshold_minus = 0.0;
  std::vector<double> singular_plus;   // descending
  std::vector<double> singular_minus;  // descending
  /// Smallest singular value counted towards either rank (0 if none).
  double weakest_counted = 0.0;
};

namespace detail {

/// <II_H(w), w> expressed in the orthonormal frame `frame` of w^perp.
inline Mat horosphere_in_frame(const MetricModel& m, const Vec& x, const Vec& w,
                               const Mat& frame, double tol) {
  const ShapeForm h = horosphere_shape(m, {x, w}, tol);
  const int d = static_cast<int>(frame.cols());
  Mat b(h.basis.cols(), d);
  for (int i = 0; i < b.rows(); ++i)
    for (int a = 0; a < d; ++a) b(i, a) = m.inner(x, h.basis.col(i), frame.col(a));
  return b.transpose() * h.matrix * b;
}

inline int thresholded_rank(const std::vector<double>& sv, double rank_tol,
                            double floor, double* threshold) {
  const double largest = sv.empty() ? 0.0 : sv.front();
  *threshold = std::max(rank_tol * largest, floor);
  return numerical_rank(sv, rank_tol, floor);
}

}  // namespace detail

/// Evaluates both difference forms at a chart point. `side` = -1 swaps the
/// roles of v and -v.
inline RankReport rank_condition(const HypersurfaceChart& chart, const Vec& param,
                                 double rank_tol, double jacobi_tol,
                                 int side = 1) {
  if (!chart.is_hypersurface()) throw InvalidInput("chart is not a hypersurface");
  if (!(rank_tol > 0 && rank_tol < 1)) throw InvalidInput("rank_tol must lie in (0, 1)");
  if (!(jacobi_tol > 0)) throw InvalidInput("jacobi_tol must be positive");
  const MetricModel& m = chart.model();
  const ShapeForm s = hypersurface_shape(chart, param, side);
  const Vec& x = s.base;
  const double htol = 0.1 * jacobi_tol;
  const Mat plus = s.matrix - detail::horosphere_in_frame(m, x, s.normal, s.basis, htol);
  const Mat minus =
      -s.matrix - detail::horosphere_in_frame(m, x, -s.normal, s.basis, htol);
  RankReport rep;
  rep.point = param;
  rep.singular_plus = symmetric_singular_values(plus);
  rep.singular_minus = symmetric_singular_values(minus);
  rep.rank_plus =
      detail::thresholded_rank(rep.singular_plus, rank_tol, jacobi_tol, &rep.threshold_plus);
  rep.rank_minus = detail::thresholded_rank(rep.singular_minus, rank_tol, jacobi_tol,
                                            &rep.threshold_minus);
  rep.sum = rep.rank_plus + rep.rank_minus;
  rep.passes = rep.sum >= m.dim();
  double weakest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < rep.rank_plus; ++i) weakest = std::min(weakest, rep.singular_plus[i]);
  for (int i = 0; i < rep.rank_minus; ++i) weakest = std::min(weakest, rep.singular_minus[i]);
  rep.weakest_counted = std::isfinite(weakest) ? weakest : 0.0;
  return rep;
}

struct ClauseSet {
  bool principal_outside = false;  // >= n/2 principal curvatures outside [a, b]
  bool geodesic_sphere = false;
  bool totally_geodesic = false;   // K < 0 everywhere and II = 0
  std::vector<double> principal_curvatures;  // for the hinted normal

  bool any() const { return principal_outside || geodesic_sphere || totally_geodesic; }
};

inline constexpr double clause_slack = 1e-6;
inline constexpr double totally_geodesic_tol = 1e-8;

/// Sufficient criteria for the rank condition, given curvature bounds
/// -a^2 >= K >= -b^2.
inline ClauseSet corollary_screen(const HypersurfaceChart& chart, const Vec& param,
                                  double a, double b) {
  const MetricModel& m = chart.model();
  if (!(a >= 0 && a <= b)) throw InvalidInput("inconsistent curvature bounds");
  const auto [kmin, kmax] = m.curvature_range();
  if (kmax > -a * a + 1e-9 || kmin < -b * b - 1e-9)
    throw InvalidInput("inconsistent curvature bounds");
  const ShapeForm s = hypersurface_shape(chart, param, 1);
  ClauseSet out;
  out.principal_curvatures = symmetric_eigenvalues(s.matrix);
  const int n = m.dim();
  bool both = true;
  for (double sign : {1.0, -1.0}) {
    int outside = 0;
    for (double k : out.principal_curvatures) {
      const double kk = sign * k;
      if (kk < a - clause_slack || kk > b + clause_slack) ++outside;
    }
    if (2 * outside < n) both = false;
  }
  out.principal_outside = both;
  out.geodesic_sphere = chart.kind() == ChartKind::geodesic_sphere;
  double largest = 0.0;
  for (double k : out.principal_curvatures) largest = std::max(largest, std::abs(k));
  out.totally_geodesic = kmax < 0 && largest <= totally_geodesic_tol;
  return out;
}

struct SweepSummary {
  int total = 0;
  int passed = 0;
  int min_rank_sum = 0;
  double worst_singular_value = 0.0;  // smallest counted singular value
  int clause_points = 0;              // points where a criterion holds
  int clause_violations = 0;          // ... but the rank condition fails
};

struct SweepResult {
  std::vector<RankReport> reports;   // grid order
  std::vector<ClauseSet> clauses;    // empty if no curvature bounds given
  SweepSummary summary;
  bool all_pass() const { return summary.passed == summary.total; }
};

/// Cell-centred grid of density^d points over the chart box, row-major in
/// the parameter index.
inline std::vector<Vec> sweep_grid(const HypersurfaceChart& chart, int density) {
  if (density < 1) throw InvalidInput("sweep density must be positive");
  const int d = chart.dim();
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(density);
  std::vector<Vec> out;
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Vec u(d);
    std::size_t rest = idx;
    for (int a = d - 1; a >= 0; --a) {
      const std::size_t k = rest % static_cast<std::size_t>(density);
      rest /= static_cast<std::size_t>(density);
      u(a) = chart.lower()(a) +
             (chart.upper()(a) - chart.lower()(a)) * (k + 0.5) / density;
    }
    out.push_back(u);
  }
  return out;
}

struct CurvatureBounds {
  double a = 0.0;
  double b = 0.0;
};

inline SweepResult surface_sweep(const HypersurfaceChart& chart,
                                 const std::vector<Vec>& grid,
                                 const RankTolerances& tol,
                                 const std::optional<CurvatureBounds>& bounds = {},
                                 int threads = 1) {
  SweepResult res;
  res.reports.resize(grid.size());
  if (bounds) res.clauses.resize(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    res.reports[i] = rank_condition(chart, grid[i], tol.rank_tol, tol.jacobi_tol);
    if (bounds) res.clauses[i] = corollary_screen(chart, grid[i], bounds->a, bounds->b);
  });
  SweepSummary& s = res.summary;
  s.total = static_cast<int>(grid.size());
  s.min_rank_sum = grid.empty() ? 0 : std::numeric_limits<int>::max();
  s.worst_singular_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const RankReport& r = res.reports[i];
    if (r.passes) ++s.passed;
    s.min_rank_sum = std::min(s.min_rank_sum, r.sum);
    s.worst_singular_value = std::min(s.worst_singular_value, r.weakest_counted);
    if (bounds && res.clauses[i].any()) {
      ++s.clause_points;
      if (!r.passes) ++s.clause_violations;
    }
  }
  if (!std::isfinite(s.worst_singular_value)) s.worst_singular_value = 0.0;
  return res;
}

}  // namespace pgeom
