#pragma once

#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "phm/decay.hpp"
#include "phm/fock_core.hpp"
#include "phm/metrics.hpp"
#include "phm/states.hpp"

namespace phm {

/// |A(t)|^2 = exp(-t / tau_c)
struct ExponentialLaw {
  double tau_c = 1.0;
  bool operator==(const ExponentialLaw&) const = default;
};

/// User-supplied A(t) samples; tau_c sets the time unit.
struct TabulatedLaw {
  ComplexTable table;
  double tau_c = 1.0;
  bool operator==(const TabulatedLaw&) const = default;
};

/// Either an analytic/tabulated law or a memory kernel to be integrated.
using DecaySpec = std::variant<ExponentialLaw, FlatKernel, LorentzianKernel, LatticeKernel, CustomKernel, TabulatedLaw>;

/// The photon lifetime tau_c that normalizes time for this decay.
double decay_time_unit(const DecaySpec& spec);

/// Materializes the decay law on [0, t_max] (physical time). Kernels are
/// integrated with `volterra_steps` uniform steps.
DecayLaw build_decay_law(const DecaySpec& spec, double t_max, int volterra_steps = 4096);

enum class Spacing { Linear, Log };

/// Times in units of tau_c. Linear: n_points nodes on [0, t_max]. Log: 0
/// followed by n_points - 1 geometric nodes on [1e-3 t_max, t_max].
struct TimeGrid {
  double t_max = 4.0;
  int n_points = 400;
  Spacing spacing = Spacing::Linear;

  std::vector<double> nodes() const;
  bool operator==(const TimeGrid&) const = default;
};

struct CrossingOptions {
  double bracket_width = 1e-4;  // in units of tau_c
  double residual = 1e-6;       // |D_I - D_II| at the reported crossing
  double tie = 1e-9;            // |D_I(0) - D_II(0)| below this is a degenerate start
  int max_iterations = 200;
  bool operator==(const CrossingOptions&) const = default;
};

struct ExperimentConfig {
  StateSpec state_I;
  StateSpec state_II;
  DecaySpec decay = ExponentialLaw{};
  int volterra_steps = 4096;
  std::vector<MetricKind> metrics = {MetricKind::Trace, MetricKind::HilbertSchmidt};
  TimeGrid grid;
  double omega0 = 0.0;
  Tolerances tol;
  CrossingOptions crossing;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

struct DistanceSeries {
  std::vector<double> times;  // t / tau_c
  std::vector<double> values;
  std::string state;
  MetricKind metric = MetricKind::Trace;
};

/// Distance to the vacuum of one evolving state as a function of t / tau_c.
class DistanceEvaluator {
 public:
  DistanceEvaluator(PhotonAmplitudes state, DecayLaw decay, double tau_c, MetricKind metric, double omega0 = 0.0,
                    Tolerances tol = {});

  double operator()(double t_over_tauc) const;
  DensityMatrix density(double t_over_tauc) const;
  Complex amplitude(double t_over_tauc) const { return decay_(t_over_tauc * tau_c_); }
  MetricKind metric() const { return metric_; }

 private:
  PhotonAmplitudes state_;
  DecayLaw decay_;
  double tau_c_;
  MetricKind metric_;
  double omega0_;
  Tolerances tol_;
};

DistanceSeries distance_series(const DistanceEvaluator& eval, const std::vector<double>& times, std::string label);

struct MetricComparison {
  MetricKind metric;
  DistanceSeries first;   // state I
  DistanceSeries second;  // state II
};

struct ComparisonRun {
  PhotonAmplitudes state_I;
  PhotonAmplitudes state_II;
  std::string label_I;
  std::string label_II;
  DecayLaw decay;
  double tau_c = 1.0;
  double omega0 = 0.0;
  Tolerances tol;
  std::vector<MetricComparison> comparisons;
  std::vector<std::string> warnings;

  DistanceEvaluator evaluator(bool second, MetricKind metric) const;
};

/// Builds both states and the decay law and evaluates every configured metric
/// on the grid.
ComparisonRun run_comparison(const ExperimentConfig& cfg);

enum class Verdict { MpembaObserved, NoCrossing, Ambiguous, DegenerateStart };

std::string to_string(Verdict v);

struct Crossing {
  double t_cross = 0.0;  // t / tau_c
  double t_lo = 0.0;     // refined bracket
  double t_hi = 0.0;
  double grid_lo = 0.0;  // grid nodes that first bracketed the sign change
  double grid_hi = 0.0;
  double residual = 0.0;  // |D_I - D_II| at t_cross
  double survival = std::numeric_limits<double>::quiet_NaN();  // |A|^2 at t_cross, when known
};

struct CrossingReport {
  MetricKind metric = MetricKind::Trace;
  std::vector<Crossing> crossings;
  Verdict verdict = Verdict::NoCrossing;
  bool swapped = false;  // state II started farther from the vacuum
  double start_I = 0.0;
  double start_II = 0.0;
  std::vector<std::string> warnings;
};

using DistanceFunction = std::function<double(double)>;

/// Brackets every sign change of D_I - D_II between adjacent grid nodes and
/// refines it by bisection on re-evaluated distances until the bracket is
/// narrower than `opts.bracket_width` and the residual is below
/// `opts.residual`. If state II starts farther away the roles are swapped and
/// a warning is attached.
CrossingReport detect_crossings(const DistanceSeries& first, const DistanceSeries& second,
                                const DistanceFunction& eval_first, const DistanceFunction& eval_second,
                                const CrossingOptions& opts = {});

struct ExperimentResult {
  ComparisonRun run;
  std::vector<CrossingReport> reports;  // one per metric, same order
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct AsymptoticFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  int samples = 0;
};

/// Least-squares fit of log D against log |A| over the samples with
/// |A|^2 <= max_survival. Throws NumericError with fewer than 3 such samples.
AsymptoticFit asymptotic_fit(const DistanceSeries& series, const DecayLaw& decay, double tau_c,
                             double max_survival = 1e-3);

}  // namespace phm
