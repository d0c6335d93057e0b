#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "phm/fock_core.hpp"

namespace phm {

/// Classical survival amplitude t -> A(t) of the cavity field, in the frame
/// rotating at the cavity frequency. A(0) = 1.
///
/// Copies share the same immutable data, so a DecayLaw is cheap to pass around
/// and safe to evaluate from several threads.
class DecayLaw {
 public:
  using Params = std::map<std::string, double>;

  /// Empty law; evaluating it throws std::logic_error.
  DecayLaw() = default;

  static DecayLaw analytic(std::string kind, Params params, std::function<Complex(double)> law);
  /// Piecewise-linear interpolation of complex samples; t must start at 0 and increase.
  static DecayLaw tabulated(std::string kind, Params params, std::vector<double> t, std::vector<Complex> a);

  Complex operator()(double t) const;
  /// |A(t)|^2
  double survival(double t) const { return std::norm((*this)(t)); }

  const std::string& kind() const;
  const Params& params() const;

  bool is_tabulated() const;
  /// Node times of a tabulated law; empty for analytic laws.
  const std::vector<double>& nodes() const;
  const std::vector<Complex>& node_values() const;
  /// Largest time at which the law can be evaluated (infinity for analytic laws).
  double t_max() const;

 private:
  struct Impl;
  explicit DecayLaw(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Samples of a complex function on increasing abscissae, linearly interpolated.
struct ComplexTable {
  std::vector<double> x;
  std::vector<Complex> y;

  Complex operator()(double at) const;
  bool operator==(const ComplexTable&) const = default;
};

// Memory kernels G(tau) of dA/dt = -int_0^t G(tau) A(t - tau) dtau.

/// Flat reservoir spectrum: G(tau) = delta(tau)/tau_c, i.e. exponential decay
/// with |A|^2 = exp(-t/tau_c).
struct FlatKernel {
  double tau_c = 1.0;
  bool operator==(const FlatKernel&) const = default;
};

/// Lorentzian reservoir: G(tau) = (gamma kappa_m / 2) exp(-kappa_m tau).
/// The Markovian limit kappa_m >> gamma gives |A|^2 = exp(-gamma t).
struct LorentzianKernel {
  double gamma = 1.0;
  double kappa_m = 1.0;
  bool operator==(const LorentzianKernel&) const = default;
};

/// Waveguide side-coupled to a semi-infinite lattice. The kernel itself is
/// user-supplied; kappa0/kappa are used to check its Markovian rate.
struct LatticeKernel {
  double kappa0 = 0.0;
  double kappa = 1.0;
  ComplexTable table;
  bool operator==(const LatticeKernel&) const = default;
};

struct CustomKernel {
  ComplexTable table;
  bool operator==(const CustomKernel&) const = default;
};

using KernelSpec = std::variant<FlatKernel, LorentzianKernel, LatticeKernel, CustomKernel>;

/// Throws std::invalid_argument if a rate or coupling is not strictly positive
/// or a table is malformed.
void check_kernel(const KernelSpec& kernel);

/// G(tau). Not defined for FlatKernel (a delta function).
Complex kernel_value(const KernelSpec& kernel, double tau);

/// Rate 1/tau_c of the equivalent exponential decay: 2 Re int_0^inf G(tau) dtau
/// for tabulated kernels, the closed-form rate otherwise.
double markovian_rate(const KernelSpec& kernel);

/// A(t) = exp(-t / (2 tau_c)).
DecayLaw exponential_decay(double tau_c);

/// 1/tau_c = (kappa0^2/kappa) / sqrt(1 - (kappa0/kappa)^2), for 0 < kappa0 < kappa.
double lattice_rate(double kappa0, double kappa);

/// Closed-form A(t) for the Lorentzian kernel:
/// exp(-kappa_m t/2) [cosh(W t) + (kappa_m / 2W) sinh(W t)], W^2 = kappa_m^2/4 - gamma kappa_m/2.
DecayLaw lorentzian_decay(double gamma, double kappa_m);

struct LatticeCheck {
  double expected_rate = 0.0;  // lattice_rate(kappa0, kappa)
  double kernel_rate = 0.0;    // 2 Re int G over the table
  double relative_deviation = 0.0;
  bool ok = false;
};

/// Compares the tabulated lattice kernel against the lattice rate formula.
LatticeCheck check_lattice_kernel(const LatticeKernel& kernel, double rel_tol = 0.05);

struct VolterraOptions {
  bool check_order = true;  // self-convergence test on 2h and 4h sub-grids
  double min_order = 1.5;
  double amplitude_slack = 1e-9;  // |A| <= 1 + slack
};

/// Integrates dA/dt = -int_0^t G(tau) A(t - tau) dtau, A(0) = 1, on a uniform
/// grid starting at 0. Uses the trapezoidal rule in time and for the
/// convolution, solving the scalar implicit equation for the newest node.
/// Second-order accurate for continuous kernels.
///
/// Throws std::invalid_argument for a malformed grid, NumericError when the
/// kernel cannot be evaluated, the self-convergence order is below
/// `min_order`, or |A| exceeds 1.
DecayLaw solve_volterra(const KernelSpec& kernel, const std::vector<double>& t_grid, const VolterraOptions& opts = {});

/// Uniform grid {0, h, ..., t_max} with `steps` intervals.
std::vector<double> uniform_grid(double t_max, int steps);

/// Observed convergence order log2(|A_4h - A_2h| / |A_2h - A_h|) at the
/// common nodes. Returns +inf when the finer differences are at round-off.
double self_convergence_order(const KernelSpec& kernel, double t_max, int steps);

/// Interpolating law through user samples. Requires t[0] = 0, A(0) = 1,
/// |A| <= 1 and A != 0; throws std::invalid_argument otherwise.
DecayLaw decay_from_samples(std::vector<double> t, std::vector<Complex> a, double tolerance = 1e-12);

}  // namespace phm
