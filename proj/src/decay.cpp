#include "phm/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "phm/detail/overloaded.hpp"
#include "phm/errors.hpp"

namespace phm {

using detail::overloaded;

namespace {

Complex interpolate(const std::vector<double>& x, const std::vector<Complex>& y, double at) {
  if (x.empty()) throw std::out_of_range("interpolate: empty table");
  const double span = x.back() - x.front();
  const double slack = 1e-12 * std::max(1.0, std::abs(span));
  if (at < x.front() - slack || at > x.back() + slack) {
    std::ostringstream os;
    os << "interpolate: " << at << " outside table range [" << x.front() << ", " << x.back() << "]";
    throw std::out_of_range(os.str());
  }
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), at) - x.begin());
  const std::size_t lo = hi - 1;
  const double w = (at - x[lo]) / (x[hi] - x[lo]);
  return y[lo] + w * (y[hi] - y[lo]);
}

void check_table(const ComplexTable& t, const char* what) {
  if (t.x.size() < 2 || t.x.size() != t.y.size()) {
    throw std::invalid_argument(std::string(what) + ": table needs at least two rows of matching length");
  }
  if (t.x.front() != 0.0) throw std::invalid_argument(std::string(what) + ": table must start at tau = 0");
  for (std::size_t i = 1; i < t.x.size(); ++i) {
    if (!(t.x[i] > t.x[i - 1])) throw std::invalid_argument(std::string(what) + ": abscissae must increase");
  }
}

double table_integral_re(const ComplexTable& t) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.x.size(); ++i) s += 0.5 * (t.x[i] - t.x[i - 1]) * (t.y[i] + t.y[i - 1]).real();
  return s;
}

// Core march on a uniform grid with `steps` intervals of width h.
std::vector<Complex> march(const KernelSpec& kernel, double h, int steps) {
  std::vector<Complex> a(static_cast<std::size_t>(steps) + 1);
  a[0] = 1.0;

  if (const auto* flat = std::get_if<FlatKernel>(&kernel)) {
    const double q = h / (4.0 * flat->tau_c);
    const double ratio = (1.0 - q) / (1.0 + q);
    for (int k = 1; k <= steps; ++k) a[k] = a[k - 1] * ratio;
    return a;
  }

  std::vector<Complex> g(static_cast<std::size_t>(steps) + 1);
  for (int j = 0; j <= steps; ++j) {
    try {
      g[j] = kernel_value(kernel, j * h);
    } catch (const std::exception& e) {
      throw NumericError("decay", std::string("kernel evaluation failure: ") + e.what());
    }
    if (!std::isfinite(g[j].real()) || !std::isfinite(g[j].imag())) {
      throw NumericError("decay", "kernel evaluation failure: non-finite G at tau = " + std::to_string(j * h));
    }
  }

  const Complex denom = 1.0 + 0.25 * h * h * g[0];
  Complex f_prev = 0.0;  // convolution integral at the previous node
  for (int k = 1; k <= steps; ++k) {
    Complex history = 0.5 * g[k] * a[0];
    for (int j = 1; j < k; ++j) history += g[j] * a[k - j];
    history *= h;
    a[k] = (a[k - 1] - 0.5 * h * (f_prev + history)) / denom;
    f_prev = 0.5 * h * g[0] * a[k] + history;
  }
  return a;
}

double max_diff_on_coarse_nodes(const std::vector<Complex>& fine, int fine_stride, const std::vector<Complex>& coarse,
                                int coarse_stride, int count) {
  double d = 0.0;
  for (int k = 0; k <= count; ++k) d = std::max(d, std::abs(fine[k * fine_stride] - coarse[k * coarse_stride]));
  return d;
}

double observed_order(const KernelSpec& kernel, const std::vector<Complex>& fine, double h, int steps) {
  const int m = steps - steps % 4;
  if (m < 8) return std::numeric_limits<double>::infinity();
  const auto half = march(kernel, 2 * h, m / 2);
  const auto quarter = march(kernel, 4 * h, m / 4);
  const double coarse_err = max_diff_on_coarse_nodes(half, 2, quarter, 1, m / 4);
  const double fine_err = max_diff_on_coarse_nodes(fine, 4, half, 2, m / 4);
  if (fine_err <= 1e-13) return std::numeric_limits<double>::infinity();
  return std::log2(coarse_err / fine_err);
}

}  // namespace

struct DecayLaw::Impl {
  std::string kind;
  Params params;
  std::function<Complex(double)> law;
  std::vector<double> t;
  std::vector<Complex> a;
};

DecayLaw DecayLaw::analytic(std::string kind, Params params, std::function<Complex(double)> law) {
  auto impl = std::make_shared<Impl>();
  impl->kind = std::move(kind);
  impl->params = std::move(params);
  impl->law = std::move(law);
  return DecayLaw(std::move(impl));
}

DecayLaw DecayLaw::tabulated(std::string kind, Params params, std::vector<double> t, std::vector<Complex> a) {
  if (t.empty() || t.size() != a.size()) throw std::invalid_argument("DecayLaw: table size mismatch");
  if (t.front() != 0.0) throw std::invalid_argument("DecayLaw: table must start at t = 0");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("DecayLaw: times must be strictly increasing");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = std::move(kind);
  impl->params = std::move(params);
  impl->t = std::move(t);
  impl->a = std::move(a);
  return DecayLaw(std::move(impl));
}

Complex DecayLaw::operator()(double t) const {
  if (!impl_) throw std::logic_error("DecayLaw: empty law");
  if (t < 0.0) throw std::domain_error("DecayLaw: negative time");
  if (impl_->law) return impl_->law(t);
  return interpolate(impl_->t, impl_->a, t);
}

const std::string& DecayLaw::kind() const { return impl_->kind; }
const DecayLaw::Params& DecayLaw::params() const { return impl_->params; }
bool DecayLaw::is_tabulated() const { return !impl_->law; }
const std::vector<double>& DecayLaw::nodes() const { return impl_->t; }
const std::vector<Complex>& DecayLaw::node_values() const { return impl_->a; }
double DecayLaw::t_max() const {
  return impl_->law ? std::numeric_limits<double>::infinity() : impl_->t.back();
}

Complex ComplexTable::operator()(double at) const { return interpolate(x, y, at); }

void check_kernel(const KernelSpec& kernel) {
  std::visit(overloaded{
                 [](const FlatKernel& k) {
                   if (!(k.tau_c > 0.0)) throw std::invalid_argument("flat kernel: tau_c must be > 0");
                 },
                 [](const LorentzianKernel& k) {
                   if (!(k.gamma > 0.0)) throw std::invalid_argument("lorentzian kernel: gamma must be > 0");
                   if (!(k.kappa_m > 0.0)) throw std::invalid_argument("lorentzian kernel: kappa_m must be > 0");
                 },
                 [](const LatticeKernel& k) {
                   if (!(k.kappa0 > 0.0)) throw std::invalid_argument("lattice kernel: kappa0 must be > 0");
                   if (!(k.kappa > 0.0)) throw std::invalid_argument("lattice kernel: kappa must be > 0");
                   check_table(k.table, "lattice kernel");
                 },
                 [](const CustomKernel& k) { check_table(k.table, "custom kernel"); },
             },
             kernel);
}

Complex kernel_value(const KernelSpec& kernel, double tau) {
  return std::visit(overloaded{
                        [](const FlatKernel&) -> Complex {
                          throw std::logic_error("flat kernel is a delta function and has no pointwise value");
                        },
                        [tau](const LorentzianKernel& k) -> Complex {
                          return 0.5 * k.gamma * k.kappa_m * std::exp(-k.kappa_m * tau);
                        },
                        [tau](const LatticeKernel& k) -> Complex { return k.table(tau); },
                        [tau](const CustomKernel& k) -> Complex { return k.table(tau); },
                    },
                    kernel);
}

double markovian_rate(const KernelSpec& kernel) {
  check_kernel(kernel);
  return std::visit(overloaded{
                        [](const FlatKernel& k) { return 1.0 / k.tau_c; },
                        [](const LorentzianKernel& k) { return k.gamma; },
                        [](const LatticeKernel& k) { return lattice_rate(k.kappa0, k.kappa); },
                        [](const CustomKernel& k) { return 2.0 * table_integral_re(k.table); },
                    },
                    kernel);
}

DecayLaw exponential_decay(double tau_c) {
  if (!(tau_c > 0.0) || !std::isfinite(tau_c)) throw std::invalid_argument("exponential_decay: tau_c must be > 0");
  return DecayLaw::analytic("exponential", {{"tau_c", tau_c}},
                            [tau_c](double t) { return Complex(std::exp(-t / (2.0 * tau_c)), 0.0); });
}

double lattice_rate(double kappa0, double kappa) {
  if (!(kappa0 > 0.0) || !(kappa > 0.0)) throw std::invalid_argument("lattice_rate: couplings must be > 0");
  if (!(kappa0 < kappa)) throw std::invalid_argument("lattice_rate: requires kappa0 < kappa");
  const double r = kappa0 / kappa;
  return (kappa0 * kappa0 / kappa) / std::sqrt(1.0 - r * r);
}

DecayLaw lorentzian_decay(double gamma, double kappa_m) {
  check_kernel(LorentzianKernel{gamma, kappa_m});
  const Complex w = std::sqrt(Complex(0.25 * kappa_m * kappa_m - 0.5 * gamma * kappa_m));
  auto law = [kappa_m, w](double t) -> Complex {
    const Complex x = w * t;
    Complex value;
    if (std::abs(x) < 1e-3) {
      const Complex x2 = x * x;
      const Complex cosh_x = 1.0 + x2 / 2.0 + x2 * x2 / 24.0;
      const Complex sinh_over_w = t * (1.0 + x2 / 6.0 + x2 * x2 / 120.0);
      value = std::exp(-0.5 * kappa_m * t) * (cosh_x + 0.5 * kappa_m * sinh_over_w);
    } else {
      const Complex b = 0.5 * kappa_m / w;
      value = 0.5 * (1.0 + b) * std::exp((w - 0.5 * kappa_m) * t) + 0.5 * (1.0 - b) * std::exp((-w - 0.5 * kappa_m) * t);
    }
    return Complex(value.real(), 0.0);
  };
  return DecayLaw::analytic("lorentzian", {{"gamma", gamma}, {"kappa_m", kappa_m}}, law);
}

LatticeCheck check_lattice_kernel(const LatticeKernel& kernel, double rel_tol) {
  check_kernel(kernel);
  LatticeCheck c;
  c.expected_rate = lattice_rate(kernel.kappa0, kernel.kappa);
  c.kernel_rate = 2.0 * table_integral_re(kernel.table);
  c.relative_deviation = std::abs(c.kernel_rate - c.expected_rate) / c.expected_rate;
  c.ok = c.relative_deviation <= rel_tol;
  return c;
}

std::vector<double> uniform_grid(double t_max, int steps) {
  if (!(t_max > 0.0) || steps < 1) throw std::invalid_argument("uniform_grid: need t_max > 0 and steps >= 1");
  std::vector<double> t(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) t[k] = t_max * k / steps;
  return t;
}

DecayLaw solve_volterra(const KernelSpec& kernel, const std::vector<double>& t_grid, const VolterraOptions& opts) {
  check_kernel(kernel);
  if (t_grid.size() < 2) throw std::invalid_argument("solve_volterra: grid needs at least two nodes");
  if (t_grid.front() != 0.0) throw std::invalid_argument("solve_volterra: grid must start at t = 0");
  const int steps = static_cast<int>(t_grid.size()) - 1;
  const double t_max = t_grid.back();
  if (!(t_max > 0.0)) throw std::invalid_argument("solve_volterra: grid must increase");
  const double h = t_max / steps;
  for (int k = 0; k <= steps; ++k) {
    if (std::abs(t_grid[k] - k * h) > 1e-9 * t_max) {
      throw std::invalid_argument("solve_volterra: grid is not uniform at node " + std::to_string(k));
    }
  }

  auto a = march(kernel, h, steps);

  for (int k = 0; k <= steps; ++k) {
    if (!(std::abs(a[k]) <= 1.0 + opts.amplitude_slack)) {
      throw NumericError("decay", "|A| = " + std::to_string(std::abs(a[k])) + " exceeds 1 at t = " +
                                      std::to_string(k * h) + "; the kernel is not dissipative or h is too large");
    }
  }
  DecayLaw::Params params;
  std::string kind;
  std::visit(overloaded{
                 [&](const FlatKernel& k) { kind = "volterra_flat"; params = {{"tau_c", k.tau_c}}; },
                 [&](const LorentzianKernel& k) {
                   kind = "volterra_lorentzian";
                   params = {{"gamma", k.gamma}, {"kappa_m", k.kappa_m}};
                 },
                 [&](const LatticeKernel& k) {
                   kind = "volterra_lattice";
                   params = {{"kappa0", k.kappa0}, {"kappa", k.kappa}};
                 },
                 [&](const CustomKernel&) { kind = "volterra_custom"; },
             },
             kernel);
  params["steps"] = steps;
  params["t_max"] = t_max;

  if (opts.check_order) {
    const double order = observed_order(kernel, a, h, steps);
    if (order < opts.min_order) {
      throw NumericError("decay", "step too large: observed self-convergence order " + std::to_string(order) +
                                      " < " + std::to_string(opts.min_order) + " with h = " + std::to_string(h));
    }
  }

  std::vector<double> t(t_grid.size());
  for (int k = 0; k <= steps; ++k) t[k] = k * h;
  t.back() = t_max;
  return DecayLaw::tabulated(kind, std::move(params), std::move(t), std::move(a));
}

double self_convergence_order(const KernelSpec& kernel, double t_max, int steps) {
  check_kernel(kernel);
  const double h = t_max / steps;
  return observed_order(kernel, march(kernel, h, steps), h, steps);
}

DecayLaw decay_from_samples(std::vector<double> t, std::vector<Complex> a, double tolerance) {
  if (t.size() < 2 || t.size() != a.size()) {
    throw std::invalid_argument("decay_from_samples: need at least two samples of matching length");
  }
  if (t.front() != 0.0) throw std::invalid_argument("decay_from_samples: first sample must be at t = 0");
  if (std::abs(a.front() - Complex(1.0)) > tolerance) {
    std::ostringstream os;
    os << "decay_from_samples: A(0) = " << a.front() << ", expected 1";
    throw std::invalid_argument(os.str());
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double mag = std::abs(a[i]);
    if (!std::isfinite(mag) || !std::isfinite(t[i])) throw std::invalid_argument("decay_from_samples: non-finite sample");
    if (mag > 1.0 + tolerance) {
      throw std::invalid_argument("decay_from_samples: |A| = " + std::to_string(mag) + " > 1 at t = " +
                                  std::to_string(t[i]));
    }
    if (mag == 0.0) {
      throw std::invalid_argument("decay_from_samples: A vanishes at finite t = " + std::to_string(t[i]));
    }
    if (i > 0 && !(t[i] > t[i - 1])) throw std::invalid_argument("decay_from_samples: times must increase");
  }
  a.front() = 1.0;
  return DecayLaw::tabulated("table", {}, std::move(t), std::move(a));
}

}  // namespace phm
