#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace phm {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Numerical tolerances shared by all modules.
struct Tolerances {
  double norm = 1e-10;   // |sum |p_n|^2 - 1|
  double tail = 1e-12;   // probability discarded by the Fock truncation
  double trace = 1e-9;   // |Tr rho - 1|
  double psd = 1e-9;     // min eigenvalue >= -psd
  double herm = 1e-12;   // max |rho - rho^dagger|
  double eig = 1e-12;    // relative off-diagonal norm at Jacobi convergence
};

/// Initial-state amplitudes p_0..p_Nmax in the truncated Fock basis.
///
/// `discarded_mass` is the probability that lies above Nmax in the untruncated
/// state. State constructors fill it in; user-supplied vectors are taken as the
/// complete state (discarded mass 0).
class PhotonAmplitudes {
 public:
  PhotonAmplitudes() = default;

  /// Throws std::invalid_argument if empty or not normalized within `norm_tol`.
  explicit PhotonAmplitudes(ComplexVector amplitudes, double discarded_mass = 0.0,
                            double norm_tol = Tolerances{}.norm);

  int n_max() const { return static_cast<int>(amplitudes_.size()) - 1; }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  Complex operator[](int n) const { return amplitudes_(n); }

  double norm_squared() const { return amplitudes_.squaredNorm(); }
  double discarded_mass() const { return discarded_mass_; }
  /// |p_Nmax|^2, a diagnostic for how close the support is to the cutoff.
  double tail_mass() const { return std::norm(amplitudes_(n_max())); }
  bool truncation_adequate(double eps_tail) const { return discarded_mass_ <= eps_tail; }

  double mean_photon_number() const;
  /// |psi><psi| of the stored amplitudes.
  ComplexMatrix projector() const;

 private:
  ComplexVector amplitudes_;
  double discarded_mass_ = 0.0;
};

/// Hermitian density matrix rho_nm in the truncated Fock basis.
class DensityMatrix {
 public:
  DensityMatrix() = default;

  /// Stores (m + m^dagger)/2; throws std::invalid_argument for non-square input.
  explicit DensityMatrix(const ComplexMatrix& entries);

  static DensityMatrix vacuum(int n_max);

  int n_max() const { return static_cast<int>(entries_.rows()) - 1; }
  int dim() const { return static_cast<int>(entries_.rows()); }
  const ComplexMatrix& entries() const { return entries_; }
  Complex operator()(int n, int m) const { return entries_(n, m); }

  double trace() const { return entries_.trace().real(); }
  double purity() const { return entries_.squaredNorm(); }

 private:
  ComplexMatrix entries_;
};

struct ValidityReport {
  double trace_deviation = 0.0;
  double hermiticity_deviation = 0.0;
  double min_eigenvalue = 0.0;
  double tail_mass = 0.0;  // rho at (Nmax, Nmax); informational

  bool trace_ok = false;
  bool hermitian_ok = false;
  bool psd_ok = false;

  bool ok() const { return trace_ok && hermitian_ok && psd_ok; }
};

ValidityReport validate_density(const ComplexMatrix& rho, const Tolerances& tol = {});
ValidityReport validate_density(const DensityMatrix& rho, const Tolerances& tol = {});

/// log(k!) for k = 0..n, accumulated by summing log(j).
std::vector<double> log_factorials(int n);

}  // namespace phm
