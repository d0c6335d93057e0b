#include "phm/states.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "phm/detail/overloaded.hpp"
#include "phm/errors.hpp"

namespace phm {
namespace {

constexpr int kMaxAutoNmax = 5000;

using detail::overloaded;

/// Amplitudes 0..n_last of a built-in family, generated by the ratio
/// recursion so that no factorial is ever formed explicitly.
ComplexVector family_amplitudes(const StateKind& kind, int n_last) {
  ComplexVector p = ComplexVector::Zero(n_last + 1);

  auto coherent_into = [&](Complex alpha, Complex scale, auto&& keep) {
    Complex c = scale * std::exp(-0.5 * std::norm(alpha));
    for (int n = 0; n <= n_last; ++n) {
      if (n > 0) c *= alpha / std::sqrt(static_cast<double>(n));
      if (keep(n)) p(n) = c;
    }
  };

  std::visit(overloaded{
                 [&](const Coherent& s) { coherent_into(s.alpha, 1.0, [](int) { return true; }); },
                 [&](const Fock& s) {
                   if (s.n <= n_last) p(s.n) = 1.0;
                 },
                 [&](const SqueezedVacuum& s) {
                   const double r = std::abs(s.xi);
                   const Complex e_itheta = r > 0 ? s.xi / r : Complex(1.0);
                   const Complex ratio = -e_itheta * std::tanh(r);
                   Complex c = 1.0 / std::sqrt(std::cosh(r));
                   for (int m = 0; 2 * m <= n_last; ++m) {
                     if (m > 0) {
                       const double two_m = 2.0 * m;
                       c *= ratio * std::sqrt(two_m * (two_m - 1.0)) / two_m;
                     }
                     p(2 * m) = c;
                   }
                 },
                 [&](const EvenCat& s) {
                   const double norm = 1.0 / std::sqrt(2.0 * (1.0 + std::exp(-2.0 * std::norm(s.alpha))));
                   coherent_into(s.alpha, 2.0 * norm, [](int n) { return n % 2 == 0; });
                 },
                 [&](const OddCat& s) {
                   const double norm = 1.0 / std::sqrt(2.0 * (1.0 - std::exp(-2.0 * std::norm(s.alpha))));
                   coherent_into(s.alpha, 2.0 * norm, [](int n) { return n % 2 == 1; });
                 },
                 [&](const Custom&) {},
             },
             kind);
  return p;
}

void check_parameters(const StateKind& kind) {
  std::visit(overloaded{
                 [](const Coherent& s) {
                   if (!std::isfinite(std::abs(s.alpha))) throw std::invalid_argument("coherent: non-finite alpha");
                 },
                 [](const Fock& s) {
                   if (s.n < 0) throw std::invalid_argument("fock: negative photon number");
                 },
                 [](const SqueezedVacuum& s) {
                   if (!std::isfinite(std::abs(s.xi))) throw std::invalid_argument("squeezed vacuum: non-finite xi");
                 },
                 [](const EvenCat& s) {
                   if (!std::isfinite(std::abs(s.alpha))) throw std::invalid_argument("even cat: non-finite alpha");
                 },
                 [](const OddCat& s) {
                   if (!std::isfinite(std::abs(s.alpha)) || std::abs(s.alpha) == 0.0)
                     throw std::invalid_argument("odd cat: alpha must be finite and non-zero");
                 },
                 [](const Custom& s) {
                   if (s.amplitudes.size() == 0) throw std::invalid_argument("custom: empty amplitude vector");
                 },
             },
             kind);
}

double discarded_beyond(const ComplexVector& kept) { return std::max(0.0, 1.0 - kept.squaredNorm()); }

}  // namespace

bool operator==(const StateKind& a, const StateKind& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      overloaded{
          [&](const Coherent& x) { return x.alpha == std::get<Coherent>(b).alpha; },
          [&](const Fock& x) { return x.n == std::get<Fock>(b).n; },
          [&](const SqueezedVacuum& x) { return x.xi == std::get<SqueezedVacuum>(b).xi; },
          [&](const EvenCat& x) { return x.alpha == std::get<EvenCat>(b).alpha; },
          [&](const OddCat& x) { return x.alpha == std::get<OddCat>(b).alpha; },
          [&](const Custom& x) {
            const auto& y = std::get<Custom>(b).amplitudes;
            return x.amplitudes.size() == y.size() && x.amplitudes == y;
          },
      },
      a);
}

int adequate_n_max(const StateKind& kind, double eps_tail) {
  check_parameters(kind);
  if (const auto* f = std::get_if<Fock>(&kind)) return f->n;
  if (const auto* c = std::get_if<Custom>(&kind)) return static_cast<int>(c->amplitudes.size()) - 1;

  // Grow geometrically, then locate the smallest adequate cutoff in the final vector.
  int n_last = 16;
  ComplexVector p = family_amplitudes(kind, n_last);
  while (discarded_beyond(p) > eps_tail) {
    if (n_last >= kMaxAutoNmax) {
      throw TruncationError("states", describe(kind) + ": no truncation up to n_max=" +
                                          std::to_string(kMaxAutoNmax) + " meets the tail tolerance",
                            discarded_beyond(p));
    }
    n_last = std::min(2 * n_last, kMaxAutoNmax);
    p = family_amplitudes(kind, n_last);
  }
  double kept = 0.0;
  for (int n = 0; n <= n_last; ++n) {
    kept += std::norm(p(n));
    if (1.0 - kept <= eps_tail) return n;
  }
  return n_last;
}

PhotonAmplitudes make_state(const StateSpec& spec, const Tolerances& tol) {
  check_parameters(spec.kind);

  if (const auto* c = std::get_if<Custom>(&spec.kind)) {
    const int own = static_cast<int>(c->amplitudes.size()) - 1;
    const int n_max = spec.n_max.value_or(own);
    if (n_max < own) {
      throw std::invalid_argument("custom: n_max " + std::to_string(n_max) + " is smaller than the " +
                                  std::to_string(own + 1) + " supplied amplitudes");
    }
    ComplexVector p = ComplexVector::Zero(n_max + 1);
    p.head(own + 1) = c->amplitudes;
    return PhotonAmplitudes(std::move(p), 0.0, tol.norm);
  }

  if (const auto* f = std::get_if<Fock>(&spec.kind); f && spec.n_max && f->n > *spec.n_max) {
    throw std::invalid_argument("fock: N=" + std::to_string(f->n) + " exceeds n_max=" + std::to_string(*spec.n_max));
  }

  const int n_max = spec.n_max ? *spec.n_max : adequate_n_max(spec.kind, tol.tail);
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");

  ComplexVector p = family_amplitudes(spec.kind, n_max);
  const double discarded = discarded_beyond(p);
  if (discarded > tol.tail) {
    throw TruncationError("states",
                          describe(spec.kind) + ": n_max=" + std::to_string(n_max) + " discards probability " +
                              std::to_string(discarded) + " > " + std::to_string(tol.tail) +
                              "; use n_max >= " + std::to_string(adequate_n_max(spec.kind, tol.tail)),
                          discarded);
  }
  return PhotonAmplitudes(std::move(p), discarded, tol.norm);
}

std::string describe(const StateKind& kind) {
  std::ostringstream os;
  auto cplx = [&](Complex z) {
    if (z.imag() == 0.0)
      os << z.real();
    else
      os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  };
  std::visit(overloaded{
                 [&](const Coherent& s) { os << "coherent(alpha="; cplx(s.alpha); os << ")"; },
                 [&](const Fock& s) { os << "fock(N=" << s.n << ")"; },
                 [&](const SqueezedVacuum& s) { os << "squeezed_vacuum(xi="; cplx(s.xi); os << ")"; },
                 [&](const EvenCat& s) { os << "even_cat(alpha="; cplx(s.alpha); os << ")"; },
                 [&](const OddCat& s) { os << "odd_cat(alpha="; cplx(s.alpha); os << ")"; },
                 [&](const Custom& s) { os << "custom(n_max=" << s.amplitudes.size() - 1 << ")"; },
             },
             kind);
  return os.str();
}

}  // namespace phm
