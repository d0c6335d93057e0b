#include <doctest.h>

#include <cmath>

#include "phm/errors.hpp"
#include "phm/states.hpp"

using namespace phm;

namespace {

double factorial_moment(const PhotonAmplitudes& p, int k) {
  double s = 0.0;
  for (int n = k; n <= p.n_max(); ++n) {
    double falling = 1.0;
    for (int j = 0; j < k; ++j) falling *= n - j;
    s += falling * std::norm(p[n]);
  }
  return s;
}

}  // namespace

TEST_CASE("Fock state is a unit vector") {
  const auto p = make_state({Fock{1}, 40});
  CHECK(p.n_max() == 40);
  CHECK(p[1] == Complex(1.0, 0.0));
  for (int n = 0; n <= 40; ++n)
    if (n != 1) CHECK(p[n] == Complex(0.0, 0.0));

  const auto tight = make_state({Fock{3}, std::nullopt});
  CHECK(tight.n_max() == 3);
}

TEST_CASE("coherent amplitudes") {
  const auto p = make_state({Coherent{1.0}, 40});
  CHECK(p[0].real() == doctest::Approx(0.606531).epsilon(1e-6));
  CHECK(p[1].real() == doctest::Approx(0.606531).epsilon(1e-6));
  CHECK(p[2].real() == doctest::Approx(0.428882).epsilon(1e-6));
  // independent formula alpha^n e^{-|alpha|^2/2} / sqrt(n!)
  const Complex alpha(0.8, -0.5);
  const auto q = make_state({Coherent{alpha}, 40});
  for (int n = 0; n <= 12; ++n) {
    const Complex ref = std::pow(alpha, n) * std::exp(-std::norm(alpha) / 2) / std::sqrt(std::tgamma(n + 1.0));
    CHECK(std::abs(q[n] - ref) < 1e-15);
  }
  // Poisson factorial moments <n(n-1)...(n-k+1)> = |alpha|^{2k}
  for (int k = 1; k <= 4; ++k) CHECK(factorial_moment(q, k) == doctest::Approx(std::pow(std::norm(alpha), k)).epsilon(1e-12));
}

TEST_CASE("even cat has only even levels and mean |a|^2 tanh |a|^2") {
  const auto p = make_state({EvenCat{1.5}, 40});
  for (int n = 1; n <= 40; n += 2) CHECK(p[n] == Complex(0.0, 0.0));
  CHECK(p.mean_photon_number() == doctest::Approx(2.20056).epsilon(1e-5));
  CHECK(p.mean_photon_number() == doctest::Approx(2.25 * std::tanh(2.25)).epsilon(1e-12));
}

TEST_CASE("odd cat has only odd levels and mean |a|^2 coth |a|^2") {
  const Complex alpha(0.3, 0.9);
  const auto p = make_state({OddCat{alpha}, 40});
  for (int n = 0; n <= 40; n += 2) CHECK(p[n] == Complex(0.0, 0.0));
  const double a2 = std::norm(alpha);
  CHECK(p.mean_photon_number() == doctest::Approx(a2 / std::tanh(a2)).epsilon(1e-12));
  CHECK_THROWS_AS(make_state({OddCat{0.0}, 10}), std::invalid_argument);
}

TEST_CASE("squeezed vacuum") {
  const auto p = make_state({SqueezedVacuum{1.0}, std::nullopt});
  for (int n = 1; n <= p.n_max(); n += 2) CHECK(p[n] == Complex(0.0, 0.0));
  CHECK(p.discarded_mass() <= 1e-12);
  CHECK(p.mean_photon_number() == doctest::Approx(std::pow(std::sinh(1.0), 2)).epsilon(1e-10));
  CHECK(p.mean_photon_number() == doctest::Approx(1.38110).epsilon(1e-5));
  // p_0 = 1/sqrt(cosh r), p_2 = -e^{i theta} tanh r / sqrt(2 cosh r)
  const Complex xi = std::polar(0.6, 0.7);
  const auto q = make_state({SqueezedVacuum{xi}, std::nullopt});
  CHECK(std::abs(q[0] - 1.0 / std::sqrt(std::cosh(0.6))) < 1e-15);
  CHECK(std::abs(q[2] + std::polar(1.0, 0.7) * std::tanh(0.6) / std::sqrt(2.0 * std::cosh(0.6))) < 1e-15);
}

TEST_CASE("squeezed vacuum at n_max 40 is rejected with a suggestion") {
  try {
    make_state({SqueezedVacuum{1.0}, 40});
    FAIL("expected TruncationError");
  } catch (const TruncationError& e) {
    CHECK(e.discarded_mass() > 1e-12);
    CHECK(std::string(e.what()).find("n_max") != std::string::npos);
  }
  CHECK(adequate_n_max(SqueezedVacuum{1.0}, 1e-12) > 40);
  CHECK(adequate_n_max(Coherent{1.0}, 1e-12) <= 40);
  CHECK(adequate_n_max(EvenCat{1.5}, 1e-12) <= 40);
}

TEST_CASE("custom amplitudes") {
  ComplexVector v(3);
  v << 0.6, 0.0, Complex(0.0, 0.8);
  const auto p = make_state({Custom{v}, 5});
  CHECK(p.n_max() == 5);
  CHECK(p[2] == Complex(0.0, 0.8));
  CHECK(p[5] == Complex(0.0, 0.0));
  CHECK_THROWS_AS(make_state({Custom{v}, 1}), std::invalid_argument);
  v(0) = 0.9;
  CHECK_THROWS_AS(make_state({Custom{v}, std::nullopt}), std::invalid_argument);
}

TEST_CASE("errors and labels") {
  CHECK_THROWS_AS(make_state({Fock{5}, 3}), std::invalid_argument);
  CHECK_THROWS_AS(make_state({Fock{-1}, 3}), std::invalid_argument);
  CHECK(describe(Fock{1}) == "fock(N=1)");
  CHECK(describe(Coherent{1.0}) == "coherent(alpha=1)");
  CHECK(StateSpec{Coherent{1.0}, 40} == StateSpec{Coherent{1.0}, 40});
  CHECK_FALSE(StateSpec{Coherent{1.0}, 40} == StateSpec{Coherent{1.0}, std::nullopt});
}
