#include "phm/fock_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "phm/hermitian_eig.hpp"

namespace phm {

PhotonAmplitudes::PhotonAmplitudes(ComplexVector amplitudes, double discarded_mass, double norm_tol)
    : amplitudes_(std::move(amplitudes)), discarded_mass_(discarded_mass) {
  if (amplitudes_.size() == 0) throw std::invalid_argument("PhotonAmplitudes: empty amplitude vector");
  if (!amplitudes_.allFinite()) throw std::invalid_argument("PhotonAmplitudes: non-finite amplitude");
  const double deviation = std::abs(amplitudes_.squaredNorm() - 1.0);
  if (deviation > norm_tol) {
    throw std::invalid_argument("PhotonAmplitudes: sum |p_n|^2 deviates from 1 by " + std::to_string(deviation));
  }
  if (!(discarded_mass_ >= 0.0)) throw std::invalid_argument("PhotonAmplitudes: negative discarded mass");
}

double PhotonAmplitudes::mean_photon_number() const {
  double sum = 0.0;
  for (Eigen::Index n = 0; n < amplitudes_.size(); ++n) sum += static_cast<double>(n) * std::norm(amplitudes_(n));
  return sum;
}

ComplexMatrix PhotonAmplitudes::projector() const { return amplitudes_ * amplitudes_.adjoint(); }

DensityMatrix::DensityMatrix(const ComplexMatrix& entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw std::invalid_argument("DensityMatrix: expected non-empty square matrix, got " +
                                std::to_string(entries.rows()) + "x" + std::to_string(entries.cols()));
  }
  entries_ = (entries + entries.adjoint()) * 0.5;
}

DensityMatrix DensityMatrix::vacuum(int n_max) {
  ComplexMatrix m = ComplexMatrix::Zero(n_max + 1, n_max + 1);
  m(0, 0) = 1.0;
  return DensityMatrix(m);
}

ValidityReport validate_density(const ComplexMatrix& rho, const Tolerances& tol) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw std::invalid_argument("validate_density: expected non-empty square matrix");
  }
  ValidityReport r;
  r.trace_deviation = std::abs(rho.trace() - Complex(1.0));
  r.hermiticity_deviation = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  r.min_eigenvalue = hermitian_eigenvalues(rho, tol.eig)(0);
  const auto last = rho.rows() - 1;
  r.tail_mass = rho(last, last).real();

  r.trace_ok = r.trace_deviation <= tol.trace;
  r.hermitian_ok = r.hermiticity_deviation <= tol.herm;
  r.psd_ok = r.min_eigenvalue >= -tol.psd;
  return r;
}

ValidityReport validate_density(const DensityMatrix& rho, const Tolerances& tol) {
  return validate_density(rho.entries(), tol);
}

std::vector<double> log_factorials(int n) {
  std::vector<double> lf(static_cast<std::size_t>(std::max(n, 0)) + 1, 0.0);
  for (int k = 2; k <= n; ++k) lf[k] = lf[k - 1] + std::log(static_cast<double>(k));
  return lf;
}

}  // namespace phm
