#include "phm/mpemba.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "phm/detail/overloaded.hpp"
#include "phm/errors.hpp"
#include "phm/evolution.hpp"

namespace phm {

using detail::overloaded;

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// A real-valued tabulated law that changes sign passes through zero, which
/// makes the notion of "farther from the vacuum" ambiguous.
std::vector<std::string> decay_warnings(const DecayLaw& law, double tau_c) {
  std::vector<std::string> w;
  if (!law.is_tabulated()) return w;
  const auto& t = law.nodes();
  const auto& a = law.node_values();
  const bool real_valued = std::all_of(a.begin(), a.end(), [](Complex z) { return z.imag() == 0.0; });
  for (std::size_t k = 1; k < a.size(); ++k) {
    if (a[k] == Complex(0.0) || (real_valued && sign_of(a[k].real()) != sign_of(a[k - 1].real()))) {
      w.push_back("decay law A(t) vanishes near t/tau_c = " + fmt(t[k] / tau_c) +
                  "; distances may touch the vacuum transiently");
      break;
    }
  }
  return w;
}

}  // namespace

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  auto tol_eq = [](const Tolerances& x, const Tolerances& y) {
    return x.norm == y.norm && x.tail == y.tail && x.trace == y.trace && x.psd == y.psd && x.herm == y.herm &&
           x.eig == y.eig;
  };
  return a.state_I == b.state_I && a.state_II == b.state_II && a.decay == b.decay &&
         a.volterra_steps == b.volterra_steps && a.metrics == b.metrics && a.grid == b.grid && a.omega0 == b.omega0 &&
         tol_eq(a.tol, b.tol) && a.crossing == b.crossing;
}

double decay_time_unit(const DecaySpec& spec) {
  return std::visit(overloaded{
                        [](const ExponentialLaw& d) { return d.tau_c; },
                        [](const FlatKernel& k) { return k.tau_c; },
                        [](const LorentzianKernel& k) { return 1.0 / k.gamma; },
                        [](const LatticeKernel& k) { return 1.0 / lattice_rate(k.kappa0, k.kappa); },
                        [](const CustomKernel& k) { return 1.0 / markovian_rate(KernelSpec{k}); },
                        [](const TabulatedLaw& d) { return d.tau_c; },
                    },
                    spec);
}

DecayLaw build_decay_law(const DecaySpec& spec, double t_max, int volterra_steps) {
  auto kernel_law = [&](KernelSpec k) { return solve_volterra(k, uniform_grid(t_max, volterra_steps)); };
  return std::visit(overloaded{
                        [](const ExponentialLaw& d) { return exponential_decay(d.tau_c); },
                        [&](const FlatKernel& k) { return kernel_law(k); },
                        [&](const LorentzianKernel& k) { return kernel_law(k); },
                        [&](const LatticeKernel& k) { return kernel_law(k); },
                        [&](const CustomKernel& k) { return kernel_law(k); },
                        [&](const TabulatedLaw& d) {
                          if (d.table.x.empty() || d.table.x.back() < t_max * (1.0 - 1e-12)) {
                            throw std::invalid_argument("tabulated decay law does not cover t = " + fmt(t_max));
                          }
                          return decay_from_samples(d.table.x, d.table.y);
                        },
                    },
                    spec);
}

std::vector<double> TimeGrid::nodes() const {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("time grid: t_max must be > 0");
  std::vector<double> t(static_cast<std::size_t>(std::max(n_points, 0)));
  if (spacing == Spacing::Linear) {
    if (n_points < 2) throw std::invalid_argument("time grid: linear spacing needs n_points >= 2");
    for (int k = 0; k < n_points; ++k) t[k] = t_max * k / (n_points - 1);
    t.back() = t_max;
  } else {
    if (n_points < 3) throw std::invalid_argument("time grid: log spacing needs n_points >= 3");
    t[0] = 0.0;
    const double first = 1e-3 * t_max;
    const double ratio = std::log(t_max / first);
    for (int k = 1; k < n_points; ++k) t[k] = first * std::exp(ratio * (k - 1) / (n_points - 2));
    t.back() = t_max;
  }
  return t;
}

DistanceEvaluator::DistanceEvaluator(PhotonAmplitudes state, DecayLaw decay, double tau_c, MetricKind metric,
                                     double omega0, Tolerances tol)
    : state_(std::move(state)), decay_(std::move(decay)), tau_c_(tau_c), metric_(metric), omega0_(omega0), tol_(tol) {
  if (!(tau_c_ > 0.0)) throw std::invalid_argument("DistanceEvaluator: tau_c must be > 0");
}

DensityMatrix DistanceEvaluator::density(double t_over_tauc) const {
  const double t = t_over_tauc * tau_c_;
  return reduced_density_general(state_, decay_(t), omega0_ * t, std::nullopt, tol_);
}

double DistanceEvaluator::operator()(double t_over_tauc) const {
  return distance_to_vacuum(metric_, density(t_over_tauc), tol_);
}

DistanceSeries distance_series(const DistanceEvaluator& eval, const std::vector<double>& times, std::string label) {
  DistanceSeries s;
  s.times = times;
  s.values.reserve(times.size());
  for (double t : times) s.values.push_back(eval(t));
  s.state = std::move(label);
  s.metric = eval.metric();
  return s;
}

DistanceEvaluator ComparisonRun::evaluator(bool second, MetricKind metric) const {
  return DistanceEvaluator(second ? state_II : state_I, decay, tau_c, metric, omega0, tol);
}

ComparisonRun run_comparison(const ExperimentConfig& cfg) {
  if (cfg.metrics.empty()) throw std::invalid_argument("run_comparison: no metrics selected");
  ComparisonRun run;
  run.state_I = make_state(cfg.state_I, cfg.tol);
  run.state_II = make_state(cfg.state_II, cfg.tol);
  run.label_I = "I";
  run.label_II = "II";
  run.tau_c = decay_time_unit(cfg.decay);
  run.omega0 = cfg.omega0;
  run.tol = cfg.tol;

  const auto times = cfg.grid.nodes();
  run.decay = build_decay_law(cfg.decay, times.back() * run.tau_c, cfg.volterra_steps);
  run.warnings = decay_warnings(run.decay, run.tau_c);

  for (MetricKind metric : cfg.metrics) {
    MetricComparison mc{metric, distance_series(run.evaluator(false, metric), times, run.label_I),
                        distance_series(run.evaluator(true, metric), times, run.label_II)};
    run.comparisons.push_back(std::move(mc));
  }
  return run;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::MpembaObserved:
      return "mpemba_observed";
    case Verdict::NoCrossing:
      return "no_crossing";
    case Verdict::Ambiguous:
      return "ambiguous";
    case Verdict::DegenerateStart:
      return "degenerate_start";
  }
  return "unknown";
}

CrossingReport detect_crossings(const DistanceSeries& first, const DistanceSeries& second,
                                const DistanceFunction& eval_first, const DistanceFunction& eval_second,
                                const CrossingOptions& opts) {
  if (first.times != second.times) throw std::invalid_argument("detect_crossings: series use different time grids");
  if (first.times.size() != first.values.size() || second.times.size() != second.values.size()) {
    throw std::invalid_argument("detect_crossings: series length mismatch");
  }
  if (first.times.empty()) throw std::invalid_argument("detect_crossings: empty series");
  for (std::size_t k = 1; k < first.times.size(); ++k) {
    if (!(first.times[k] > first.times[k - 1])) throw std::invalid_argument("detect_crossings: times must increase");
  }

  CrossingReport report;
  report.metric = first.metric;
  report.start_I = first.values.front();
  report.start_II = second.values.front();

  const double start_gap = report.start_I - report.start_II;
  const bool degenerate = std::abs(start_gap) <= opts.tie;
  report.swapped = !degenerate && start_gap < 0.0;
  if (report.swapped) {
    report.warnings.push_back("state II starts farther from the vacuum (D_II(0) = " + fmt(report.start_II) +
                              " > D_I(0) = " + fmt(report.start_I) + "); roles swapped for the verdict");
  }

  auto diff_at = [&](double t) { return eval_first(t) - eval_second(t); };

  const auto& t = first.times;
  int last_sign = 0;
  std::size_t last_index = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double d = first.values[k] - second.values[k];
    const int s = (k == 0 && degenerate) ? 0 : sign_of(d);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) {
      Crossing c;
      c.grid_lo = t[last_index];
      c.grid_hi = t[k];
      double lo = c.grid_lo;
      double hi = c.grid_hi;
      bool converged = false;
      for (int it = 0; it < opts.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = diff_at(mid);
        c.t_cross = mid;
        c.residual = std::abs(fm);
        if (fm == 0.0) {
          lo = hi = mid;
        } else if (sign_of(fm) == last_sign) {
          lo = mid;
        } else {
          hi = mid;
        }
        if (hi - lo <= opts.bracket_width && c.residual <= opts.residual) {
          converged = true;
          break;
        }
      }
      if (!converged) {
        throw NumericError("mpemba", "crossing refinement did not converge in [" + fmt(c.grid_lo) + ", " +
                                         fmt(c.grid_hi) + "], residual " + fmt(c.residual));
      }
      c.t_lo = lo;
      c.t_hi = hi;
      report.crossings.push_back(c);
    }
    last_sign = s;
    last_index = k;
  }

  if (degenerate) {
    report.verdict = Verdict::DegenerateStart;
  } else if (report.crossings.empty()) {
    report.verdict = Verdict::NoCrossing;
  } else if (report.crossings.size() > 1) {
    report.verdict = Verdict::Ambiguous;
  } else {
    // One sign change: the state that started farther ends closer.
    const double end_gap = first.values.back() - second.values.back();
    const bool farther_now_closer = report.swapped ? end_gap > 0.0 : end_gap < 0.0;
    report.verdict = farther_now_closer ? Verdict::MpembaObserved : Verdict::Ambiguous;
  }
  return report;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result{run_comparison(cfg), {}};
  const auto& run = result.run;
  for (const auto& mc : run.comparisons) {
    const auto eval_first = run.evaluator(false, mc.metric);
    const auto eval_second = run.evaluator(true, mc.metric);
    auto report = detect_crossings(mc.first, mc.second, eval_first, eval_second, cfg.crossing);
    for (auto& c : report.crossings) c.survival = run.decay.survival(c.t_cross * run.tau_c);
    result.reports.push_back(std::move(report));
  }
  return result;
}

AsymptoticFit asymptotic_fit(const DistanceSeries& series, const DecayLaw& decay, double tau_c, double max_survival) {
  if (series.times.size() != series.values.size()) throw std::invalid_argument("asymptotic_fit: length mismatch");
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    const double surv = decay.survival(series.times[k] * tau_c);
    if (surv > 0.0 && surv <= max_survival && series.values[k] > 0.0) {
      xs.push_back(0.5 * std::log(surv));
      ys.push_back(std::log(series.values[k]));
    }
  }
  if (xs.size() < 3) {
    throw NumericError("mpemba", "insufficient tail samples for asymptotic fit: " + std::to_string(xs.size()) +
                                     " with |A|^2 <= " + fmt(max_survival) + " (need 3)");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw NumericError("mpemba", "asymptotic fit: tail samples share a single |A|");
  AsymptoticFit fit;
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  fit.samples = static_cast<int>(xs.size());
  return fit;
}

}  // namespace phm
