#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace phm::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericError = 3 };

struct OutputOptions {
  std::filesystem::path out_dir = "out";
  bool plot = true;
};

/// $PHM_OUT_DIR if set and non-empty, otherwise "out".
std::filesystem::path default_out_dir();

/// Runs the experiment and writes distances.csv, crossings.txt,
/// crossings.json, manifest.json and (with plotting) plot_<metric>.svg.
int cmd_compare(const std::filesystem::path& config, const OutputOptions& opts, std::ostream& out, std::ostream& err);

/// Writes snapshot_<state>_t<time>.csv holding |rho_nm| at each t / tau_c.
int cmd_snapshot(const std::filesystem::path& config, const std::vector<double>& times, const OutputOptions& opts,
                 std::ostream& out, std::ostream& err);

struct DecayArgs {
  std::string kernel = "exponential";  // exponential | flat | lorentzian | lattice | custom
  std::optional<double> tau_c;
  std::optional<double> gamma;
  std::optional<double> kappa_m;
  std::optional<double> kappa0;
  std::optional<double> kappa;
  std::optional<std::filesystem::path> kernel_file;
  double t_max = 5.0;
  int points = 4097;
  bool order_check = true;
};

/// Writes decay.csv with columns t,re_A,im_A,abs_A2 on a uniform grid.
int cmd_decay(const DecayArgs& args, const OutputOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace phm::cli
