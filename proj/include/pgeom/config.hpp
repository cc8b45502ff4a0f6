#pragma once

// Run configuration read from YAML with strict key checking, and the
// builders that turn it into models, charts and problems.

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pgeom/curvature.hpp"
#include "pgeom/error.hpp"
#include "pgeom/hypothesis.hpp"
#include "pgeom/kuznecov.hpp"
#include "pgeom/manifold.hpp"
#include "pgeom/oscint.hpp"

namespace pgeom {

struct ModelSpec {
  std::string kind = "space_form";  // euclidean | space_form | flat_torus | round_sphere | warped_surface
  int dimension = 2;
  double curvature = -1.0;
  std::string warp = "cosh";        // cosh | exp | sinh | polynomial
  double warp_rate = 1.0;
  std::vector<double> polynomial;   // coefficients c_0, c_1, ...
  double r_lo = -std::numeric_limits<double>::infinity();
  double r_hi = std::numeric_limits<double>::infinity();
};

struct ChartSpec {
  // geodesic_sphere | geodesic_sheet | horosphere | sheet_graph |
  // flat_subtorus | torus_graph | warped_level | warped_ray
  std::string kind = "geodesic_sphere";
  double radius = 1.0;
  std::vector<double> curvatures;
  std::vector<std::vector<double>> directions;
  std::vector<double> offset;
  double amplitude = 0.3;
  int frequency = 1;
  double phase = 0.0;
  double r0 = 0.0;
  double theta0 = 0.0;
};

struct Tolerances {
  double jacobi_tol = 1e-6;
  double rank_tol = 1e-6;
  double node_cap = default_node_cap;
  std::optional<CurvatureBounds> curvature_bounds;
};

struct Grids {
  std::vector<double> r_grid;  // defaults to 50 log-spaced values in [0.05, 50]
  int sweep_density = 10;
};

struct OscintSpec {
  std::string phase = "quadratic";  // quadratic | saddle | linear | tilted
  int dimension = 1;
  double slope = 1.0;               // linear and tilted phases
  int lambda_min_exp = 4;
  int lambda_max_exp = 9;
  double plateau = 0.5;
  int order = 4;
};

struct KuznecovSpec {
  std::string model = "torus";       // torus | sphere
  int dimension = 2;
  std::string sigma = "axis_circle"; // axis_circle | axis_subtorus | plane | curved_graph | equator
  double cap = 100;
};

struct RunConfig {
  ModelSpec model;
  std::optional<ChartSpec> chart;
  Tolerances tolerances;
  Grids grids;
  OscintSpec oscint;
  KuznecovSpec kuznecov;
  std::string output_dir = "out";
  unsigned long long seed = 0;
  int threads = 0;  // 0: machine parallelism
};

inline std::vector<double> default_r_grid() {
  std::vector<double> g;
  for (int i = 0; i < 50; ++i) g.push_back(0.05 * std::pow(1000.0, i / 49.0));
  return g;
}

namespace detail {

inline std::string where(const YAML::Node& n) {
  const YAML::Mark m = n.Mark();
  if (m.line < 0) return "";
  return " (line " + std::to_string(m.line + 1) + ")";
}

inline void check_keys(const YAML::Node& n, const std::string& path,
                       const std::set<std::string>& allowed) {
  if (!n.IsMap()) throw ConfigError(path + ": expected a mapping" + where(n));
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key))
      throw ConfigError((path.empty() ? "" : path + ".") + key + ": unknown key" +
                        where(kv.first));
  }
}

template <class T>
T read(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key + ": malformed value" + where(n));
  }
}

template <class T>
void maybe(const YAML::Node& parent, const char* name, const std::string& path, T& out) {
  const YAML::Node n = parent[name];
  if (n) out = read<T>(n, path + "." + name);
}

inline void positive(double v, const std::string& key, const YAML::Node& n) {
  if (!(v > 0) || !std::isfinite(v)) throw ConfigError(key + ": must be positive" + where(n));
}

}  // namespace detail

inline RunConfig parse_config(const YAML::Node& root) {
  using namespace detail;
  RunConfig c;
  c.grids.r_grid = default_r_grid();
  if (!root || root.IsNull()) return c;
  check_keys(root, "", {"model", "chart", "tolerances", "grids", "oscint", "kuznecov",
                        "output", "seed", "threads"});
  if (root["seed"]) c.seed = read<unsigned long long>(root["seed"], "seed");
  if (root["threads"]) {
    c.threads = read<int>(root["threads"], "threads");
    if (c.threads < 0) throw ConfigError("threads: must be nonnegative" + where(root["threads"]));
  }
  if (const YAML::Node m = root["model"]) {
    check_keys(m, "model", {"kind", "dimension", "curvature", "warp", "rate", "polynomial",
                            "r_range"});
    maybe(m, "kind", "model", c.model.kind);
    maybe(m, "dimension", "model", c.model.dimension);
    maybe(m, "curvature", "model", c.model.curvature);
    maybe(m, "warp", "model", c.model.warp);
    maybe(m, "rate", "model", c.model.warp_rate);
    if (m["polynomial"]) {
      c.model.polynomial = read<std::vector<double>>(m["polynomial"], "model.polynomial");
      c.model.warp = "polynomial";
    }
    if (m["r_range"]) {
      const auto r = read<std::vector<double>>(m["r_range"], "model.r_range");
      if (r.size() != 2 || !(r[0] < r[1]))
        throw ConfigError("model.r_range: expected [lo, hi] with lo < hi" + where(m["r_range"]));
      c.model.r_lo = r[0];
      c.model.r_hi = r[1];
    }
  }
  if (const YAML::Node ch = root["chart"]) {
    check_keys(ch, "chart", {"kind", "radius", "curvatures", "directions", "offset", "amplitude",
                             "frequency", "phase", "r0", "theta0"});
    ChartSpec s;
    maybe(ch, "kind", "chart", s.kind);
    maybe(ch, "radius", "chart", s.radius);
    maybe(ch, "curvatures", "chart", s.curvatures);
    maybe(ch, "directions", "chart", s.directions);
    maybe(ch, "offset", "chart", s.offset);
    maybe(ch, "amplitude", "chart", s.amplitude);
    maybe(ch, "frequency", "chart", s.frequency);
    maybe(ch, "phase", "chart", s.phase);
    maybe(ch, "r0", "chart", s.r0);
    maybe(ch, "theta0", "chart", s.theta0);
    if (ch["radius"]) positive(s.radius, "chart.radius", ch["radius"]);
    c.chart = s;
  }
  if (const YAML::Node t = root["tolerances"]) {
    check_keys(t, "tolerances", {"jacobi_tol", "rank_tol", "node_cap", "curvature_bounds"});
    maybe(t, "jacobi_tol", "tolerances", c.tolerances.jacobi_tol);
    maybe(t, "rank_tol", "tolerances", c.tolerances.rank_tol);
    maybe(t, "node_cap", "tolerances", c.tolerances.node_cap);
    if (t["jacobi_tol"]) positive(c.tolerances.jacobi_tol, "tolerances.jacobi_tol", t["jacobi_tol"]);
    if (t["rank_tol"]) {
      positive(c.tolerances.rank_tol, "tolerances.rank_tol", t["rank_tol"]);
      if (!(c.tolerances.rank_tol < 1))
        throw ConfigError("tolerances.rank_tol: must be below 1" + where(t["rank_tol"]));
    }
    if (t["node_cap"]) positive(c.tolerances.node_cap, "tolerances.node_cap", t["node_cap"]);
    if (t["curvature_bounds"]) {
      const auto ab = read<std::vector<double>>(t["curvature_bounds"], "tolerances.curvature_bounds");
      if (ab.size() != 2 || !(ab[0] >= 0 && ab[0] <= ab[1]))
        throw ConfigError("tolerances.curvature_bounds: expected [a, b] with 0 <= a <= b" +
                          where(t["curvature_bounds"]));
      c.tolerances.curvature_bounds = CurvatureBounds{ab[0], ab[1]};
    }
  }
  if (const YAML::Node g = root["grids"]) {
    check_keys(g, "grids", {"r_grid", "sweep_density"});
    if (g["r_grid"]) {
      c.grids.r_grid = read<std::vector<double>>(g["r_grid"], "grids.r_grid");
      if (c.grids.r_grid.empty()) throw ConfigError("grids.r_grid: must be nonempty" + where(g["r_grid"]));
      for (std::size_t i = 0; i < c.grids.r_grid.size(); ++i) {
        if (!(c.grids.r_grid[i] > 0)) throw ConfigError("grids.r_grid: values must be positive" + where(g["r_grid"]));
        if (i > 0 && !(c.grids.r_grid[i] > c.grids.r_grid[i - 1]))
          throw ConfigError("grids.r_grid: values must be increasing" + where(g["r_grid"]));
      }
    }
    maybe(g, "sweep_density", "grids", c.grids.sweep_density);
    if (c.grids.sweep_density < 1)
      throw ConfigError("grids.sweep_density: must be positive" + where(g["sweep_density"]));
  }
  if (const YAML::Node o = root["oscint"]) {
    check_keys(o, "oscint", {"phase", "dimension", "slope", "lambda_min_exp", "lambda_max_exp",
                             "plateau", "order"});
    maybe(o, "phase", "oscint", c.oscint.phase);
    maybe(o, "dimension", "oscint", c.oscint.dimension);
    maybe(o, "slope", "oscint", c.oscint.slope);
    maybe(o, "lambda_min_exp", "oscint", c.oscint.lambda_min_exp);
    maybe(o, "lambda_max_exp", "oscint", c.oscint.lambda_max_exp);
    maybe(o, "plateau", "oscint", c.oscint.plateau);
    maybe(o, "order", "oscint", c.oscint.order);
    if (c.oscint.lambda_max_exp < c.oscint.lambda_min_exp)
      throw ConfigError("oscint.lambda_max_exp: must not be below lambda_min_exp" + where(o));
  }
  if (const YAML::Node k = root["kuznecov"]) {
    check_keys(k, "kuznecov", {"model", "dimension", "sigma", "cap"});
    maybe(k, "model", "kuznecov", c.kuznecov.model);
    maybe(k, "dimension", "kuznecov", c.kuznecov.dimension);
    maybe(k, "sigma", "kuznecov", c.kuznecov.sigma);
    maybe(k, "cap", "kuznecov", c.kuznecov.cap);
    if (k["cap"]) positive(c.kuznecov.cap, "kuznecov.cap", k["cap"]);
  }
  if (const YAML::Node out = root["output"]) {
    check_keys(out, "output", {"dir"});
    maybe(out, "dir", "output", c.output_dir);
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError("cannot read config file " + path);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("config parse error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  return parse_config(root);
}

inline RunConfig parse_config_string(const std::string& text) {
  try {
    return parse_config(YAML::Load(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("config parse error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
}

inline MetricModel build_model(const ModelSpec& s) {
  if (s.kind == "euclidean") return MetricModel::euclidean(s.dimension);
  if (s.kind == "space_form") return MetricModel::space_form(s.dimension, s.curvature);
  if (s.kind == "flat_torus") return MetricModel::flat_torus(s.dimension);
  if (s.kind == "round_sphere") return MetricModel::round_sphere(s.dimension);
  if (s.kind == "warped_surface") {
    if (s.dimension != 2) throw ConfigError("model.dimension: warped surfaces are 2-dimensional");
    WarpProfile p = WarpProfile::cosh(s.warp_rate);
    if (s.warp == "exp") p = WarpProfile::exp(s.warp_rate);
    else if (s.warp == "sinh") p = WarpProfile::sinh(s.warp_rate);
    else if (s.warp == "polynomial") {
      if (s.polynomial.empty()) throw ConfigError("model.polynomial: must be nonempty");
      p = WarpProfile::polynomial(s.polynomial);
    } else if (s.warp != "cosh") {
      throw ConfigError("model.warp: unknown profile '" + s.warp + "'");
    }
    double lo = s.r_lo, hi = s.r_hi;
    if (s.warp == "sinh" && !(lo > 0)) lo = 1e-3;
    return MetricModel::warped_surface(p, lo, hi);
  }
  throw ConfigError("model.kind: unknown model '" + s.kind + "'");
}

inline Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

/// Integer direction matrix for a torus chart; real rows must be rational.
inline Eigen::MatrixXi lattice_matrix(const std::vector<std::vector<double>>& dirs, int n) {
  Eigen::MatrixXi a(n, static_cast<int>(dirs.size()));
  for (std::size_t c = 0; c < dirs.size(); ++c) {
    if (static_cast<int>(dirs[c].size()) != n)
      throw ConfigError("chart.directions: each direction needs " + std::to_string(n) + " entries");
    a.col(static_cast<int>(c)) = rational_direction(to_vec(dirs[c]));
  }
  return a;
}

/// Builds the configured chart. Base points sit at the model origin; the
/// sheet and horosphere normals are the last origin basis vector.
inline HypersurfaceChart build_chart(const MetricModel& m, const ChartSpec& s) {
  const Vec o = m.origin();
  const Mat basis = m.tangent_basis(o);
  const Vec nu = basis.col(m.dim() - 1);
  if (s.kind == "geodesic_sphere") return charts::geodesic_sphere(m, o, s.radius);
  if (s.kind == "geodesic_sheet") return charts::geodesic_sheet(m, o, nu);
  if (s.kind == "horosphere") return charts::horosphere(m, o, nu);
  if (s.kind == "sheet_graph") {
    std::vector<double> k = s.curvatures;
    if (k.empty()) k.assign(static_cast<std::size_t>(m.dim() - 1), 0.5);
    return charts::sheet_graph(m, o, nu, k);
  }
  if (s.kind == "flat_subtorus") {
    std::vector<std::vector<double>> dirs = s.directions;
    if (dirs.empty())
      for (int c = 0; c < m.dim() - 1; ++c) {
        std::vector<double> e(static_cast<std::size_t>(m.dim()), 0.0);
        e[static_cast<std::size_t>(c)] = 1.0;
        dirs.push_back(e);
      }
    Vec x0 = s.offset.empty() ? Vec(Vec::Zero(m.dim())) : to_vec(s.offset);
    if (x0.size() != m.dim()) throw ConfigError("chart.offset: wrong dimension");
    return charts::flat_subtorus(m, lattice_matrix(dirs, m.dim()), x0);
  }
  if (s.kind == "torus_graph") return charts::torus_graph(m, s.amplitude, s.frequency, s.phase, 0.0);
  if (s.kind == "warped_level") return charts::warped_level(m, s.r0);
  if (s.kind == "warped_ray") return charts::warped_ray(m, s.r0, s.theta0);
  throw ConfigError("chart.kind: unknown chart '" + s.kind + "'");
}

inline OscillatoryProblem build_oscint(const OscintSpec& s) {
  if (s.dimension < 1 || s.dimension > 3) throw ConfigError("oscint.dimension: must be 1, 2 or 3");
  if (s.lambda_min_exp < 0 || s.lambda_max_exp - s.lambda_min_exp < 5)
    throw ConfigError("oscint.lambda_max_exp: fits need at least 6 dyadic frequencies");
  const int n = s.dimension;
  OscillatoryProblem p;
  p.dimension = n;
  p.amplitude = RadialBump(s.plateau);
  p.lambda_grid = dyadic_grid(s.lambda_min_exp, s.lambda_max_exp);
  if (s.phase == "quadratic") {
    p.phase = Phase::affine_quadratic("quadratic", Vec::Zero(n), Mat::Identity(n, n));
  } else if (s.phase == "saddle") {
    if (n != 2) throw ConfigError("oscint.phase: saddle needs dimension 2");
    Mat q = Mat::Identity(2, 2);
    q(1, 1) = -1;
    p.phase = Phase::affine_quadratic("saddle", Vec::Zero(2), q);
  } else if (s.phase == "linear") {
    p.phase = Phase::affine_quadratic("linear", s.slope * unit_vector(n, 0), Mat::Zero(n, n));
  } else if (s.phase == "tilted") {
    if (n < 2) throw ConfigError("oscint.phase: tilted needs dimension >= 2");
    Mat q = Mat::Zero(n, n);
    for (int i = 1; i < n; ++i) q(i, i) = 2.0;
    p.phase = Phase::affine_quadratic("tilted", s.slope * unit_vector(n, 0), q);
  } else {
    throw ConfigError("oscint.phase: unknown phase '" + s.phase + "'");
  }
  return p;
}

}  // namespace pgeom
