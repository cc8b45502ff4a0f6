#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "pgeom/cli.hpp"
#include "pgeom/config.hpp"

int main(int argc, char** argv) {
  using namespace pgeom;
  CLI::App app{"pgeom: curvature comparison, rank-condition and period-integral harness"};
  app.fallthrough();
  app.require_subcommand(1, 1);

  std::string config_path;
  cli::Options opt;
  std::optional<unsigned long long> seed;
  std::optional<int> threads;
  app.add_option("--config", config_path, "YAML run configuration")->check(CLI::ExistingFile);
  app.add_option("--out-dir", opt.out_dir, "directory for CSV and summary files");
  app.add_option("--seed", seed, "seed for randomized checks (default 0)");
  app.add_option("--threads", threads, "worker threads (0: machine parallelism)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", opt.quiet, "suppress the summary on stdout");

  app.add_subcommand("curvature", "horosphere vs geodesic sphere comparison along a geodesic");
  app.add_subcommand("check-hypersurface", "rank condition sweep over the configured chart");

  auto* osc = app.add_subcommand("oscint", "oscillatory integral decay rates");
  std::optional<std::string> phase;
  std::optional<int> osc_dim, lmin, lmax, order;
  std::optional<double> node_cap;
  osc->add_option("--phase", phase, "quadratic | saddle | linear | tilted");
  osc->add_option("--dimension", osc_dim, "1, 2 or 3");
  osc->add_option("--lambda-min-exp", lmin, "smallest frequency 2^k");
  osc->add_option("--lambda-max-exp", lmax, "largest frequency 2^k");
  osc->add_option("--order", order, "decay order for nonstationary phases");
  osc->add_option("--node-cap", node_cap, "total quadrature node cap");

  auto* kuz = app.add_subcommand("kuznecov", "Kuznecov sums of eigenfunction periods");
  std::optional<std::string> kmodel, sigma;
  std::optional<int> kdim;
  std::optional<double> cap;
  kuz->add_option("--model", kmodel, "torus | sphere");
  kuz->add_option("--sigma", sigma, "axis_circle | axis_subtorus | tilted_circle | curved_graph | equator");
  kuz->add_option("--dimension", kdim, "torus dimension");
  kuz->add_option("--cap", cap, "lattice cap Lambda or sphere degree cap L");

  app.add_subcommand("verify-all", "full invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::usage_error;
  }

  RunConfig cfg;
  try {
    cfg = config_path.empty() ? parse_config(YAML::Node()) : load_config(config_path);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::usage_error;
  }
  if (seed) cfg.seed = *seed;
  if (threads) cfg.threads = *threads;
  if (phase) cfg.oscint.phase = *phase;
  if (osc_dim) cfg.oscint.dimension = *osc_dim;
  if (lmin) cfg.oscint.lambda_min_exp = *lmin;
  if (lmax) cfg.oscint.lambda_max_exp = *lmax;
  if (order) cfg.oscint.order = *order;
  if (node_cap) {
    if (!(*node_cap > 0)) {
      std::cerr << "config error: --node-cap: must be positive\n";
      return cli::usage_error;
    }
    cfg.tolerances.node_cap = *node_cap;
  }
  if (kmodel) {
    cfg.kuznecov.model = *kmodel;
    if (*kmodel == "sphere" && !sigma) cfg.kuznecov.sigma = "equator";
  }
  if (sigma) cfg.kuznecov.sigma = *sigma;
  if (kdim) cfg.kuznecov.dimension = *kdim;
  if (cap) {
    if (!(*cap > 0)) {
      std::cerr << "config error: --cap: must be positive\n";
      return cli::usage_error;
    }
    cfg.kuznecov.cap = *cap;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  return cli::run_guarded(sub, cfg, opt);
}
