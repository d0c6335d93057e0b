#include <iostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace phm::cli;

  CLI::App app{"Photon decay Mpemba-effect simulator"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  OutputOptions opts;
  opts.out_dir = default_out_dir();
  bool seedless = false;
  app.add_option("--out-dir", opts.out_dir, "Output directory (default: $PHM_OUT_DIR or ./out)");
  app.add_flag("--plot,!--no-plot", opts.plot, "Write SVG plots (compare only)");
  app.add_flag("--seedless", seedless, "Reserved; the tool is fully deterministic");

  std::string config;
  auto* compare = app.add_subcommand("compare", "Compare two states and detect crossings");
  compare->add_option("config", config, "Experiment config file")->required();

  std::string snap_config;
  std::vector<double> times;
  auto* snapshot = app.add_subcommand("snapshot", "Write |rho_nm| matrices at chosen times");
  snapshot->add_option("config", snap_config, "Experiment config file")->required();
  snapshot->add_option("--times", times, "Times in units of tau_c")->required()->delimiter(',');

  DecayArgs decay;
  std::string kernel_file;
  auto* dec = app.add_subcommand("decay", "Tabulate the survival amplitude A(t)");
  dec->add_option("--kernel", decay.kernel, "exponential | flat | lorentzian | lattice | custom")->capture_default_str();
  dec->add_option("--tau-c", decay.tau_c, "Photon lifetime (exponential, flat)");
  dec->add_option("--gamma", decay.gamma, "Lorentzian coupling");
  dec->add_option("--kappa-m", decay.kappa_m, "Lorentzian memory rate");
  dec->add_option("--kappa0", decay.kappa0, "Lattice side coupling");
  dec->add_option("--kappa", decay.kappa, "Lattice hopping");
  dec->add_option("--kernel-file", kernel_file, "Tabulated kernel: tau, Re G, Im G");
  dec->add_option("--tmax", decay.t_max, "End time")->capture_default_str();
  dec->add_option("--points", decay.points, "Number of grid points")->capture_default_str();
  bool no_order_check = false;
  dec->add_flag("--no-order-check", no_order_check, "Skip the self-convergence check");

  // Global flags are accepted after the subcommand too.
  for (auto* sub : {compare, snapshot, dec}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  (void)seedless;

  if (*compare) return cmd_compare(config, opts, std::cout, std::cerr);
  if (*snapshot) return cmd_snapshot(snap_config, times, opts, std::cout, std::cerr);
  if (!kernel_file.empty()) decay.kernel_file = kernel_file;
  decay.order_check = !no_order_check;
  return cmd_decay(decay, opts, std::cout, std::cerr);
}
