#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "honest_forest/driver.hpp"
#include "honest_forest/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"honest decision trees and double-bootstrap forests: simulation and diagnostics"};
  app.require_subcommand(1);

  // simulate
  std::string config_path, out_dir = ".";
  auto* simulate = app.add_subcommand("simulate", "run the experiment described by a JSON config");
  simulate->add_option("--config", config_path, "path to the experiment config")->required();
  simulate->add_option("--out", out_dir, "output directory");

  // moments
  honest_forest::MomentsOptions moments;
  long moments_m = -1;
  auto* cmd_moments = app.add_subcommand("moments", "analytic and empirical bootstrap weight moments");
  cmd_moments
      ->add_option("--scheme", moments.scheme,
                   "multinomial | without-replacement | wild-poisson | wild-lognormal")
      ->required();
  cmd_moments->add_option("--m", moments_m, "sample count for the resampling schemes");
  cmd_moments->add_option("--n", moments.n, "weight vector length")->required();
  cmd_moments->add_option("--reps", moments.reps, "Monte Carlo replications (0 = analytic only)");
  cmd_moments->add_option("--seed", moments.seed, "Monte Carlo seed");
  cmd_moments->add_option("--sigma", moments.sigma, "wild-lognormal sigma");

  // recursion
  honest_forest::RecursionOptions recursion;
  auto* cmd_recursion = app.add_subcommand("recursion", "minimum-split recursion diagnostics");
  cmd_recursion->add_option("--p", recursion.p, "tracked-feature split probability")->required();
  cmd_recursion->add_option("--depth", recursion.depth, "tree depth")->required();

  // probe
  honest_forest::ProbeOptions probe;
  auto* cmd_probe = app.add_subcommand("probe", "node-size schedule summability probes");
  cmd_probe->add_option("--schedule", probe.schedule, "schedule spec, e.g. poly:0.6")->required();
  cmd_probe->add_option("--d", probe.d, "covariate dimension");
  cmd_probe->add_option("--n-max", probe.n_max, "largest sample size");
  cmd_probe->add_option("--mode", probe.mode, "weak | strong-sum | bootstrap-sum");
  cmd_probe->add_option("--subsample", probe.subsample, "subsample schedule for bootstrap-sum");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return honest_forest::kExitUsage;
  }

  if (simulate->parsed()) {
    return honest_forest::cmd_simulate(config_path, out_dir, 0, std::cout, std::cerr);
  }
  if (cmd_moments->parsed()) {
    if (moments_m >= 0) moments.m = moments_m;
    return honest_forest::cmd_moments(moments, std::cout, std::cerr);
  }
  if (cmd_recursion->parsed()) {
    return honest_forest::cmd_recursion(recursion, std::cout, std::cerr);
  }
  if (cmd_probe->parsed()) {
    return honest_forest::cmd_probe(probe, std::cout, std::cerr);
  }
  return honest_forest::kExitUsage;
}
