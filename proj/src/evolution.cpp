#include "phm/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "phm/errors.hpp"

namespace phm {
namespace {

constexpr double kFlushBelow = 1e-300;

void require_adequate(const PhotonAmplitudes& state, const Tolerances& tol) {
  if (!state.truncation_adequate(tol.tail)) {
    throw TruncationError("evolution",
                          "state discards probability " + std::to_string(state.discarded_mass()) +
                              " above n_max=" + std::to_string(state.n_max()) + "; increase n_max",
                          state.discarded_mass());
  }
}

void require_valid_amplitude(Complex a) {
  if (!std::isfinite(a.real()) || !std::isfinite(a.imag()) || std::norm(a) > 1.0 + 1e-12) {
    throw std::domain_error("evolution: decay amplitude must satisfy |A| <= 1");
  }
}

std::vector<Complex> powers(Complex z, int n) {
  std::vector<Complex> p(static_cast<std::size_t>(n) + 1);
  p[0] = 1.0;
  for (int k = 1; k <= n; ++k) p[k] = p[k - 1] * z;
  return p;
}

}  // namespace

DensityMatrix reduced_density_general(const PhotonAmplitudes& state, Complex a, double phase,
                                      std::optional<int> l_max, const Tolerances& tol) {
  require_adequate(state, tol);
  require_valid_amplitude(a);
  if (l_max && *l_max < 0) throw std::invalid_argument("reduced_density_general: l_max must be >= 0");

  const int n_max = state.n_max();
  const auto lf = log_factorials(n_max);
  const double loss = std::max(0.0, 1.0 - std::norm(a));
  const double log_loss = loss > 0.0 ? std::log(loss) : 0.0;
  const auto a_pow = powers(a, n_max);
  const auto ac_pow = powers(std::conj(a), n_max);
  const auto& p = state.amplitudes();

  ComplexMatrix rho = ComplexMatrix::Zero(n_max + 1, n_max + 1);
  for (int m = 0; m <= n_max; ++m) {
    for (int n = m; n <= n_max; ++n) {
      int l_last = n_max - n;
      if (l_max) l_last = std::min(l_last, *l_max);
      if (loss == 0.0) l_last = std::min(l_last, 0);

      Complex sum = 0.0;
      for (int l = 0; l <= l_last; ++l) {
        const Complex pp = p(l + n) * std::conj(p(l + m));
        if (pp == Complex(0.0)) continue;
        const double log_w = 0.5 * (lf[l + n] + lf[l + m] - lf[n] - lf[m]) - lf[l] + l * log_loss;
        sum += std::exp(log_w) * pp;
      }
      Complex entry = sum * a_pow[n] * ac_pow[m];
      if (phase != 0.0) entry *= std::polar(1.0, (m - n) * phase);
      if (std::abs(entry) < kFlushBelow) entry = 0.0;
      rho(n, m) = entry;
      rho(m, n) = std::conj(entry);
    }
    rho(m, m) = rho(m, m).real();
  }
  return DensityMatrix(rho);
}

DensityMatrix reduced_density_general(const EvolutionInput& in, const Tolerances& tol) {
  if (in.t < 0.0) throw std::invalid_argument("reduced_density_general: t must be >= 0");
  return reduced_density_general(in.state, in.decay(in.t), in.omega0 * in.t, in.l_max, tol);
}

DensityMatrix reduced_density_fock(int n, Complex a) {
  if (n < 0) throw std::invalid_argument("reduced_density_fock: N must be >= 0");
  require_valid_amplitude(a);
  const double x = std::min(1.0, std::norm(a));
  ComplexMatrix rho = ComplexMatrix::Zero(n + 1, n + 1);
  double binom = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) binom = binom * (n - k + 1) / k;
    rho(k, k) = binom * std::pow(x, k) * std::pow(1.0 - x, n - k);
  }
  return DensityMatrix(rho);
}

DensityMatrix kraus_sum_reference(const PhotonAmplitudes& state, Complex a, double phase, std::optional<int> l_max,
                                  const Tolerances& tol) {
  require_adequate(state, tol);
  require_valid_amplitude(a);
  if (l_max && *l_max < 0) throw std::invalid_argument("kraus_sum_reference: l_max must be >= 0");

  const int n_max = state.n_max();
  const auto lf = log_factorials(n_max);
  const double theta = std::sqrt(std::max(0.0, 1.0 - std::norm(a)));
  const Complex alpha = a * std::polar(1.0, -phase);
  const auto& p = state.amplitudes();

  int l_last = n_max;
  if (l_max) l_last = std::min(l_last, *l_max);

  ComplexMatrix rho = ComplexMatrix::Zero(n_max + 1, n_max + 1);
  ComplexVector phi(n_max + 1);
  double theta_l = 1.0;
  for (int l = 0; l <= l_last; ++l, theta_l *= theta) {
    if (theta_l == 0.0 && l > 0) break;
    phi.setZero();
    Complex alpha_s = 1.0;
    for (int s = 0; l + s <= n_max; ++s, alpha_s *= alpha) {
      const double binom = std::exp(0.5 * (lf[l + s] - lf[l] - lf[s]));
      phi(s) = binom * p(l + s) * theta_l * alpha_s;
    }
    rho.noalias() += phi * phi.adjoint();
  }
  return DensityMatrix(rho);
}

DensityMatrix kraus_sum_reference(const EvolutionInput& in, const Tolerances& tol) {
  if (in.t < 0.0) throw std::invalid_argument("kraus_sum_reference: t must be >= 0");
  return kraus_sum_reference(in.state, in.decay(in.t), in.omega0 * in.t, in.l_max, tol);
}

double mean_photon_number(const DensityMatrix& rho) {
  double sum = 0.0;
  for (int n = 1; n <= rho.n_max(); ++n) sum += n * rho(n, n).real();
  return sum;
}

}  // namespace phm
