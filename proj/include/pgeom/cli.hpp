#pragma once

// Subcommand drivers behind the `pgeom` executable. Each writes CSV plus a
// summary file into the output directory and returns the process exit code:
// 0 pass, 1 mathematical hypothesis failure, 2 usage or config error,
// 3 numerical failure.

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pgeom/config.hpp"
#include "pgeom/curvature.hpp"
#include "pgeom/error.hpp"
#include "pgeom/hypothesis.hpp"
#include "pgeom/kuznecov.hpp"
#include "pgeom/oscint.hpp"
#include "pgeom/parallel.hpp"
#include "pgeom/verify.hpp"

namespace pgeom::cli {

enum ExitCode : int { pass = 0, hypothesis_failure = 1, usage_error = 2, numerical_failure = 3 };

struct Options {
  std::string out_dir;  // overrides the config when nonempty
  bool quiet = false;
};

inline std::string num(double v) { return fmt(v); }

class Output {
 public:
  Output(const RunConfig& cfg, const Options& opt)
      : dir_(opt.out_dir.empty() ? cfg.output_dir : opt.out_dir), quiet_(opt.quiet) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("output.dir: cannot create " + dir_.string());
  }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw ConfigError("output.dir: cannot write " + (dir_ / name).string());
    f << text;
  }

  void say(const std::string& text) const {
    if (!quiet_) std::cout << text;
  }

 private:
  std::filesystem::path dir_;
  bool quiet_;
};

inline int threads_of(const RunConfig& cfg) {
  return cfg.threads > 0 ? cfg.threads : default_threads();
}

/// Columns: r, horosphere, sphere, difference, bound, pass.
inline int run_curvature(const RunConfig& cfg, const Options& opt) {
  const MetricModel m = build_model(cfg.model);
  const Vec o = m.origin();
  Vec v = m.tangent_basis(o).col(0);
  const double r_top = cfg.grids.r_grid.back();
  const GeodesicPath path(m, {o, v}, r_top);
  const ComparisonReport rep =
      comparison_report(m, path, cfg.grids.r_grid, 0.1 * cfg.tolerances.jacobi_tol);
  std::ostringstream csv;
  csv << "r,horosphere,sphere,difference,bound,pass\n";
  int ok = 0;
  for (const auto& row : rep.rows) {
    csv << num(row.r) << ',' << num(row.horosphere) << ',' << num(row.sphere) << ','
        << num(row.difference) << ',' << num(row.bound) << ',' << (row.pass ? 1 : 0) << '\n';
    ok += row.pass;
  }
  std::ostringstream sum;
  sum << "subcommand: curvature\nmodel: " << m.describe() << "\nrows: " << rep.rows.size()
      << "\npassing_rows: " << ok << "\nresult: " << (rep.pass ? "pass" : "fail") << '\n';
  Output out(cfg, opt);
  out.write("curvature.csv", csv.str());
  out.write("curvature_summary.txt", sum.str());
  out.say(sum.str());
  return rep.pass ? pass : hypothesis_failure;
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + num(v[i]);
  return s;
}

/// Per-point CSV and summary.json with total, passed, min_rank_sum,
/// worst_singular_value.
inline int run_check_hypersurface(const RunConfig& cfg, const Options& opt) {
  if (!cfg.chart) throw ConfigError("chart: required by check-hypersurface");
  const MetricModel m = build_model(cfg.model);
  const HypersurfaceChart chart = build_chart(m, *cfg.chart);
  const RankTolerances tol{cfg.tolerances.rank_tol, cfg.tolerances.jacobi_tol};
  const auto grid = sweep_grid(chart, cfg.grids.sweep_density);
  const SweepResult res =
      surface_sweep(chart, grid, tol, cfg.tolerances.curvature_bounds, threads_of(cfg));
  std::ostringstream csv;
  csv << "index";
  for (int a = 0; a < chart.dim(); ++a) csv << ",u" << a + 1;
  csv << ",rank_plus,rank_minus,rank_sum,pass,singular_plus,singular_minus";
  if (!res.clauses.empty()) csv << ",clause_outside,clause_sphere,clause_totally_geodesic";
  csv << '\n';
  for (std::size_t i = 0; i < res.reports.size(); ++i) {
    const RankReport& r = res.reports[i];
    csv << i;
    for (int a = 0; a < chart.dim(); ++a) csv << ',' << num(r.point(a));
    csv << ',' << r.rank_plus << ',' << r.rank_minus << ',' << r.sum << ',' << (r.passes ? 1 : 0)
        << ',' << join(r.singular_plus) << ',' << join(r.singular_minus);
    if (!res.clauses.empty()) {
      const ClauseSet& c = res.clauses[i];
      csv << ',' << c.principal_outside << ',' << c.geodesic_sphere << ',' << c.totally_geodesic;
    }
    csv << '\n';
  }
  const SweepSummary& s = res.summary;
  nlohmann::ordered_json j;
  j["total"] = s.total;
  j["passed"] = s.passed;
  j["min_rank_sum"] = s.min_rank_sum;
  j["worst_singular_value"] = s.worst_singular_value;
  j["dimension"] = m.dim();
  j["chart"] = to_string(chart.kind());
  if (!res.clauses.empty()) {
    j["clause_points"] = s.clause_points;
    j["clause_violations"] = s.clause_violations;
  }
  std::ostringstream txt;
  txt << "subcommand: check-hypersurface\nmodel: " << m.describe()
      << "\nchart: " << to_string(chart.kind()) << "\npoints: " << s.total
      << "\npassed: " << s.passed << "\nmin_rank_sum: " << s.min_rank_sum
      << "\nworst_singular_value: " << num(s.worst_singular_value)
      << "\nresult: " << (res.all_pass() ? "pass" : "fail") << '\n';
  Output out(cfg, opt);
  out.write("hypersurface.csv", csv.str());
  out.write("summary.json", j.dump(2) + "\n");
  out.write("hypersurface_summary.txt", txt.str());
  out.say(txt.str());
  return res.all_pass() ? pass : hypothesis_failure;
}

/// Columns: lambda, re, im, abs, nodes, err_est; the summary carries the fit.
inline int run_oscint(const RunConfig& cfg, const Options& opt) {
  const OscillatoryProblem p = build_oscint(cfg.oscint);
  const bool stationary = p.phase.hessian_lower_bound() > 0;
  BoundCheck b;
  if (stationary) {
    b = verify_nondegenerate_bound(p, p.phase.hessian_lower_bound(), cfg.tolerances.node_cap,
                                   threads_of(cfg));
  } else {
    const double c = p.phase.gradient_lower_bound();
    if (!(c > 0)) throw InvalidInput("oscint.phase: phase is neither nondegenerate nor nonstationary");
    b = verify_nonstationary_bound(p, c, cfg.oscint.order, cfg.tolerances.node_cap, threads_of(cfg));
  }
  std::ostringstream csv;
  csv << "lambda,re,im,abs,nodes,err_est\n";
  for (const auto& q : b.samples)
    csv << num(q.lambda) << ',' << num(q.value.real()) << ',' << num(q.value.imag()) << ','
        << num(std::abs(q.value)) << ',' << q.nodes << ',' << num(q.error_estimate) << '\n';
  std::ostringstream sum;
  sum << "subcommand: oscint\nphase: " << p.phase.name << "\ndimension: " << p.dimension
      << "\nbound: " << (stationary ? "nondegenerate" : "nonstationary")
      << "\ntarget_exponent: "
      << num(stationary ? -0.5 * p.dimension : -static_cast<double>(cfg.oscint.order))
      << "\nfit: exponent " << num(b.fit.exponent) << " constant " << num(std::exp(b.fit.constant))
      << " residual " << num(b.fit.residual) << " points " << b.fit.points
      << "\nsup_scaled_magnitude: " << num(b.constant) << "\ncertified_c: " << num(b.certified_c)
      << "\nresult: " << (b.pass ? "pass" : "fail") << '\n';
  Output out(cfg, opt);
  out.write("oscint.csv", csv.str());
  out.write("oscint_summary.txt", sum.str());
  out.say(sum.str());
  return b.pass ? pass : hypothesis_failure;
}

inline HypersurfaceChart kuznecov_sigma(const KuznecovSpec& k) {
  const int n = k.dimension;
  if (n < 2 || n > 4) throw ConfigError("kuznecov.dimension: torus dimension must lie in [2, 4]");
  const MetricModel t = MetricModel::flat_torus(n);
  auto axes = [&](int d) {
    Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n, d);
    for (int c = 0; c < d; ++c) a(c, c) = 1;
    return a;
  };
  if (k.sigma == "axis_circle") return charts::flat_subtorus(t, axes(1), Vec::Zero(n));
  if (k.sigma == "axis_subtorus") return charts::flat_subtorus(t, axes(n - 1), Vec::Zero(n));
  if (k.sigma == "tilted_circle") {
    Eigen::MatrixXi a = axes(1);
    a(1, 0) = 2;
    return charts::flat_subtorus(t, a, Vec::Zero(n));
  }
  if (k.sigma == "curved_graph") {
    if (n != 2) throw ConfigError("kuznecov.sigma: curved_graph needs dimension 2");
    return charts::torus_graph(t, 0.3, 1, 0.0, 0.0);
  }
  throw ConfigError("kuznecov.sigma: unknown torus submanifold '" + k.sigma + "'");
}

/// Columns: eigenvalue, period_re, period_im, abs2, cumulative.
inline int run_kuznecov(const RunConfig& cfg, const Options& opt) {
  const KuznecovSpec& k = cfg.kuznecov;
  KuznecovSeries s;
  std::string sigma_name;
  if (k.model == "torus") {
    s = torus_kuznecov(kuznecov_sigma(k), k.cap);
    sigma_name = k.sigma;
  } else if (k.model == "sphere") {
    if (k.sigma != "equator" && k.sigma != "axis_circle")
      throw ConfigError("kuznecov.sigma: the sphere harness uses the equator");
    if (k.cap != std::floor(k.cap)) throw ConfigError("kuznecov.cap: sphere degree cap must be an integer");
    s = sphere_kuznecov(static_cast<int>(k.cap));
    sigma_name = "equator";
  } else {
    throw ConfigError("kuznecov.model: expected torus or sphere");
  }
  std::ostringstream csv;
  csv << "eigenvalue,period_re,period_im,abs2,cumulative\n";
  for (const auto& e : s.entries)
    csv << num(e.eigenvalue) << ',' << num(e.period.real()) << ',' << num(e.period.imag()) << ','
        << num(e.abs2) << ',' << num(e.cumulative) << '\n';
  const bool ok = std::abs(s.fit.exponent - s.predicted_exponent) <= 0.1;
  std::ostringstream sum;
  sum << "subcommand: kuznecov\nmodel: " << k.model << "\nsigma: " << sigma_name
      << "\ncap: " << num(k.cap) << "\nentries: " << s.entries.size()
      << "\ncumulative_at_cap: " << num(s.entries.empty() ? 0.0 : s.entries.back().cumulative)
      << "\nfit: exponent " << num(s.fit.exponent) << " constant " << num(std::exp(s.fit.constant))
      << " residual " << num(s.fit.residual) << " points " << s.fit.points
      << "\npredicted_exponent: " << num(s.predicted_exponent)
      << "\nsup_period: " << num(s.sup_period) << "\nresult: " << (ok ? "pass" : "fail") << '\n';
  Output out(cfg, opt);
  out.write("kuznecov.csv", csv.str());
  out.write("kuznecov_summary.txt", sum.str());
  out.say(sum.str());
  return ok ? pass : hypothesis_failure;
}

inline std::string csv_field(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// The acceptance criteria and module invariants; every check must pass.
inline int run_verify_all(const RunConfig& cfg, const Options& opt) {
  const auto checks = full_suite({cfg.seed, threads_of(cfg)});
  std::ostringstream csv, sum;
  csv << "id,pass,detail\n";
  int ok = 0;
  for (const auto& c : checks) {
    csv << c.id << ',' << (c.pass ? 1 : 0) << ',' << csv_field(c.detail) << '\n';
    sum << (c.pass ? "pass " : "FAIL ") << c.id << ": " << c.description << " [" << c.detail << "]\n";
    ok += c.pass;
  }
  sum << "checks: " << checks.size() << "\npassed: " << ok << "\nseed: " << cfg.seed
      << "\nresult: " << (ok == static_cast<int>(checks.size()) ? "pass" : "fail") << '\n';
  Output out(cfg, opt);
  out.write("verify_all.csv", csv.str());
  out.write("verify_all_summary.txt", sum.str());
  out.say(sum.str());
  return ok == static_cast<int>(checks.size()) ? pass : hypothesis_failure;
}

inline int run(const std::string& subcommand, const RunConfig& cfg, const Options& opt) {
  if (subcommand == "curvature") return run_curvature(cfg, opt);
  if (subcommand == "check-hypersurface") return run_check_hypersurface(cfg, opt);
  if (subcommand == "oscint") return run_oscint(cfg, opt);
  if (subcommand == "kuznecov") return run_kuznecov(cfg, opt);
  if (subcommand == "verify-all") return run_verify_all(cfg, opt);
  throw ConfigError("unknown subcommand '" + subcommand + "'");
}

/// Runs a subcommand and maps errors to exit codes, reporting on stderr.
inline int run_guarded(const std::string& subcommand, const RunConfig& cfg, const Options& opt) {
  try {
    return run(subcommand, cfg, opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return usage_error;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return usage_error;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return numerical_failure;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return numerical_failure;
  }
}

}  // namespace pgeom::cli
