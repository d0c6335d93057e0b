#pragma once

#include <string>
#include <variant>

#include "phm/fock_core.hpp"

namespace phm {

enum class MetricKind { Trace, HilbertSchmidt };

/// "trace" / "hs"
std::string to_string(MetricKind kind);
/// Accepts "trace", "hs", "hilbert_schmidt"; throws std::invalid_argument otherwise.
MetricKind parse_metric(const std::string& name);

/// D_T = (1/2) sum_i |lambda_i| over the spectrum of rho - |0><0|.
/// Always runs the Jacobi eigensolver.
double trace_distance_to_vacuum(const DensityMatrix& rho, const Tolerances& tol = {});

/// D_T for a matrix that is diagonal in the Fock basis, without
/// diagonalizing. Throws std::invalid_argument if an off-diagonal entry is non-zero.
double trace_distance_to_vacuum_diagonal(const DensityMatrix& rho);

/// D_HS = Tr[(rho - |0><0|)^2], the squared Frobenius distance (no square root).
double hs_distance_to_vacuum(const DensityMatrix& rho);

double distance_to_vacuum(MetricKind kind, const DensityMatrix& rho, const Tolerances& tol = {});

/// Initial coherent state |alpha0>; the evolved state stays the pure coherent
/// state |alpha0 A>.
struct CoherentTail {
  Complex alpha0;
};

/// Initial Fock state |N>; the evolved state is binomially mixed.
struct FockTail {
  int n = 0;
};

using AnalyticFamily = std::variant<CoherentTail, FockTail>;

/// Closed-form distance to the vacuum for the coherent and Fock families.
///   coherent: D_T = sqrt(1 - exp(-|alpha0 A|^2)),  D_HS = 2 D_T^2
///   Fock:     D_T = 1 - (1-|A|^2)^N,
///             D_HS = sum_{n>=1} [C(N,n)|A|^{2n}(1-|A|^2)^{N-n}]^2 + [1-(1-|A|^2)^N]^2
double analytic_distance(MetricKind kind, const AnalyticFamily& family, Complex a);

}  // namespace phm
