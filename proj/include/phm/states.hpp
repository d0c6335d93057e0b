#pragma once

#include <optional>
#include <string>
#include <variant>

#include "phm/fock_core.hpp"

namespace phm {

struct Coherent {
  Complex alpha;
};

struct Fock {
  int n = 0;
};

/// exp[(xi^* a^2 - xi a^dagger^2)/2] |0>, xi = r e^{i theta}.
struct SqueezedVacuum {
  Complex xi;
};

/// N (|alpha> + |-alpha>)
struct EvenCat {
  Complex alpha;
};

/// N (|alpha> - |-alpha>)
struct OddCat {
  Complex alpha;
};

struct Custom {
  ComplexVector amplitudes;
};

using StateKind = std::variant<Coherent, Fock, SqueezedVacuum, EvenCat, OddCat, Custom>;

struct StateSpec {
  StateKind kind;
  std::optional<int> n_max;  // nullopt: smallest adequate truncation
};

bool operator==(const StateKind& a, const StateKind& b);
inline bool operator==(const StateSpec& a, const StateSpec& b) { return a.kind == b.kind && a.n_max == b.n_max; }

/// Builds the truncated amplitude vector.
///
/// Throws TruncationError when the probability above n_max exceeds `tol.tail`,
/// std::invalid_argument for Fock N > n_max or malformed parameters.
PhotonAmplitudes make_state(const StateSpec& spec, const Tolerances& tol = {});

/// Smallest n_max whose discarded probability is <= eps_tail.
int adequate_n_max(const StateKind& kind, double eps_tail);

/// Short label such as "fock(N=1)" or "coherent(alpha=1)".
std::string describe(const StateKind& kind);

}  // namespace phm
