#include "phm/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "phm/detail/overloaded.hpp"
#include "phm/hermitian_eig.hpp"

namespace phm {

std::string to_string(MetricKind kind) { return kind == MetricKind::Trace ? "trace" : "hs"; }

MetricKind parse_metric(const std::string& name) {
  if (name == "trace") return MetricKind::Trace;
  if (name == "hs" || name == "hilbert_schmidt") return MetricKind::HilbertSchmidt;
  throw std::invalid_argument("unknown metric '" + name + "' (expected trace or hs)");
}

double trace_distance_to_vacuum(const DensityMatrix& rho, const Tolerances& tol) {
  ComplexMatrix diff = rho.entries();
  diff(0, 0) -= 1.0;
  return 0.5 * hermitian_eigenvalues(diff, tol.eig).cwiseAbs().sum();
}

double trace_distance_to_vacuum_diagonal(const DensityMatrix& rho) {
  const auto& m = rho.entries();
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != Complex(0.0)) {
        throw std::invalid_argument("trace_distance_to_vacuum_diagonal: matrix has off-diagonal entries");
      }
  double sum = std::abs(m(0, 0).real() - 1.0);
  for (Eigen::Index n = 1; n < m.rows(); ++n) sum += std::abs(m(n, n).real());
  return 0.5 * sum;
}

double hs_distance_to_vacuum(const DensityMatrix& rho) {
  ComplexMatrix diff = rho.entries();
  diff(0, 0) -= 1.0;
  return diff.squaredNorm();
}

double distance_to_vacuum(MetricKind kind, const DensityMatrix& rho, const Tolerances& tol) {
  return kind == MetricKind::Trace ? trace_distance_to_vacuum(rho, tol) : hs_distance_to_vacuum(rho);
}

double analytic_distance(MetricKind kind, const AnalyticFamily& family, Complex a) {
  return std::visit(
      detail::overloaded{
          [&](const CoherentTail& c) {
            const double dt2 = -std::expm1(-std::norm(c.alpha0 * a));
            return kind == MetricKind::Trace ? std::sqrt(dt2) : 2.0 * dt2;
          },
          [&](const FockTail& f) {
            if (f.n < 0) throw std::invalid_argument("analytic_distance: N must be >= 0");
            const double x = std::norm(a);
            const double vacuum_deficit = 1.0 - std::pow(1.0 - x, f.n);
            if (kind == MetricKind::Trace) return vacuum_deficit;
            double sum = vacuum_deficit * vacuum_deficit;
            double binom = 1.0;
            for (int n = 1; n <= f.n; ++n) {
              binom = binom * (f.n - n + 1) / n;
              const double w = binom * std::pow(x, n) * std::pow(1.0 - x, f.n - n);
              sum += w * w;
            }
            return sum;
          },
      },
      family);
}

}  // namespace phm
