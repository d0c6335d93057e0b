#pragma once

#include <optional>

#include "phm/decay.hpp"
#include "phm/fock_core.hpp"

namespace phm {

struct EvolutionInput {
  PhotonAmplitudes state;
  DecayLaw decay;
  double t = 0.0;
  double omega0 = 0.0;         // cavity frequency; only enters as a phase
  std::optional<int> l_max;    // nullopt: sum over the full support (exact)
};

/// Reduced cavity density matrix after the field has leaked for a time with
/// survival amplitude A:
///
///   rho_nm = e^{i(m-n) phase} sum_l (1/l!) sqrt((l+n)!(l+m)!/(n!m!))
///            p_{l+n} p*_{l+m} A^n A*^m (1-|A|^2)^l
///
/// where `phase` = omega0 t. The sum over l stops at the support of p, so the
/// result is exact for a truncated state. Throws TruncationError when the
/// state's discarded mass exceeds `tol.tail`.
DensityMatrix reduced_density_general(const PhotonAmplitudes& state, Complex a, double phase = 0.0,
                                      std::optional<int> l_max = std::nullopt, const Tolerances& tol = {});
DensityMatrix reduced_density_general(const EvolutionInput& in, const Tolerances& tol = {});

/// Binomial diagonal matrix C(N,n)|A|^{2n}(1-|A|^2)^{N-n}, n = 0..N.
DensityMatrix reduced_density_fock(int n, Complex a);

/// Same matrix built as sum_l |phi_l><phi_l| with
/// <s|phi_l> = sqrt((l+s)!/(l! s!)) p_{l+s} theta^l alpha^s,
/// |theta|^2 = 1 - |A|^2 and alpha = A e^{-i phase}.
DensityMatrix kraus_sum_reference(const PhotonAmplitudes& state, Complex a, double phase = 0.0,
                                  std::optional<int> l_max = std::nullopt, const Tolerances& tol = {});
DensityMatrix kraus_sum_reference(const EvolutionInput& in, const Tolerances& tol = {});

/// sum_n n rho_nn
double mean_photon_number(const DensityMatrix& rho);

}  // namespace phm
