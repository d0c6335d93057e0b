#include <doctest.h>

#include <algorithm>
#include <Eigen/Eigenvalues>

#include "phm/errors.hpp"
#include "phm/fock_core.hpp"
#include "phm/hermitian_eig.hpp"
#include "support.hpp"

using namespace phm;

namespace {

// Classical two-sided Jacobi on the real symmetric embedding [[A, -B], [B, A]]
// of H = A + iB. Every eigenvalue of H appears twice.
std::vector<double> embedded_jacobi_eigenvalues(const ComplexMatrix& h) {
  const Eigen::Index n = h.rows();
  Eigen::MatrixXd s(2 * n, 2 * n);
  s << h.real(), -h.imag(), h.imag(), h.real();
  const Eigen::Index m = 2 * n;
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < m; ++p)
      for (Eigen::Index q = p + 1; q < m; ++q) off += s(p, q) * s(p, q);
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < m; ++p) {
      for (Eigen::Index q = p + 1; q < m; ++q) {
        if (s(p, q) == 0.0) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
        for (Eigen::Index k = 0; k < m; ++k) {
          const double a = s(k, p), b = s(k, q);
          s(k, p) = c * a - sn * b;
          s(k, q) = sn * a + c * b;
        }
        for (Eigen::Index k = 0; k < m; ++k) {
          const double a = s(p, k), b = s(q, k);
          s(p, k) = c * a - sn * b;
          s(q, k) = sn * a + c * b;
        }
      }
    }
  }
  std::vector<double> all(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) all[static_cast<std::size_t>(i)] = s(i, i);
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (std::size_t i = 0; i < all.size(); i += 2) out.push_back(0.5 * (all[i] + all[i + 1]));
  return out;
}

// Roots of the characteristic cubic of a real symmetric 3x3 matrix.
std::vector<double> cardano_symmetric3(const Eigen::Matrix3d& a) {
  const double q = a.trace() / 3.0;
  const Eigen::Matrix3d b = a - q * Eigen::Matrix3d::Identity();
  const double p = std::sqrt((b * b).trace() / 6.0);
  if (p == 0.0) return {q, q, q};
  const double r = std::clamp((b / p).determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2 * p * std::cos(phi);
  const double e3 = q + 2 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  std::vector<double> out{e1, 3 * q - e1 - e3, e3};
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> quadratic_hermitian2(Complex h00, Complex h01, Complex h11) {
  const double m = 0.5 * (h00.real() + h11.real());
  const double d = std::sqrt(0.25 * std::pow(h00.real() - h11.real(), 2) + std::norm(h01));
  return {m - d, m + d};
}

ComplexMatrix random_hermitian(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return (m + m.adjoint()) / 2.0;
}

}  // namespace

TEST_CASE("hermitian_eig: Pauli X") {
  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  const auto e = hermitian_eig(x);
  CHECK(e.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(e.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(test::max_abs_diff(e.reconstruct(), x) < 1e-14);
}

TEST_CASE("hermitian_eig: block diagonal matrix against closed-form roots") {
  // 8x8 = 2x2 complex block + 3x3 real block + 3x3 real block
  ComplexMatrix h = ComplexMatrix::Zero(8, 8);
  h(0, 0) = 0.7;
  h(1, 1) = -0.4;
  h(0, 1) = Complex(0.3, -0.5);
  h(1, 0) = std::conj(h(0, 1));
  Eigen::Matrix3d b1, b2;
  b1 << 2.0, 0.5, -0.1, 0.5, 1.0, 0.3, -0.1, 0.3, -1.5;
  b2 << 0.2, 0.9, 0.9, 0.9, 0.2, 0.9, 0.9, 0.9, 0.2;
  h.block(2, 2, 3, 3) = b1.cast<Complex>();
  h.block(5, 5, 3, 3) = b2.cast<Complex>();

  std::vector<double> expect = quadratic_hermitian2(h(0, 0), h(0, 1), h(1, 1));
  for (double v : cardano_symmetric3(b1)) expect.push_back(v);
  for (double v : cardano_symmetric3(b2)) expect.push_back(v);
  std::sort(expect.begin(), expect.end());

  const auto e = hermitian_eig(h);
  for (int i = 0; i < 8; ++i) CHECK(e.eigenvalues(i) == doctest::Approx(expect[static_cast<std::size_t>(i)]).epsilon(1e-13));
}

TEST_CASE("hermitian_eig: random matrices against two independent solvers") {
  std::mt19937_64 rng(17);
  for (int n : {1, 2, 5, 12, 24, 41}) {
    const ComplexMatrix h = random_hermitian(rng, n);
    const auto e = hermitian_eig(h);
    const auto naive = embedded_jacobi_eigenvalues(h);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> ref(h);
    const double scale = std::max(1.0, h.norm());
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(e.eigenvalues(i) - naive[static_cast<std::size_t>(i)]) < 1e-11 * scale);
      CHECK(std::abs(e.eigenvalues(i) - ref.eigenvalues()(i)) < 1e-11 * scale);
    }
    // residual, unitarity, trace
    CHECK((h * e.eigenvectors - e.eigenvectors * e.eigenvalues.cast<Complex>().asDiagonal()).norm() < 1e-11 * scale);
    CHECK((e.eigenvectors.adjoint() * e.eigenvectors - ComplexMatrix::Identity(n, n)).norm() < 1e-12 * n);
    CHECK(std::abs(e.eigenvalues.sum() - h.trace().real()) < 1e-11 * scale);
    CHECK(e.sweeps <= 100);
  }
}

TEST_CASE("hermitian_eig: projector is idempotent with eigenvalues 0 and 1") {
  std::mt19937_64 rng(3);
  const auto state = test::random_state(rng, 9);
  const auto e = hermitian_eig(state.projector());
  for (int i = 0; i < 9; ++i) CHECK(std::abs(e.eigenvalues(i)) < 1e-13);
  CHECK(e.eigenvalues(9) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("hermitian_eig: eigenvalues only and bad input") {
  std::mt19937_64 rng(5);
  const ComplexMatrix h = random_hermitian(rng, 6);
  CHECK((hermitian_eigenvalues(h) - hermitian_eig(h).eigenvalues).cwiseAbs().maxCoeff() < 1e-13);
  CHECK_THROWS_AS(hermitian_eig(ComplexMatrix(2, 3)), std::invalid_argument);
  EigOptions tight;
  tight.max_sweeps = 0;
  CHECK_THROWS_AS(hermitian_eig(h, tight), NumericError);
}

TEST_CASE("PhotonAmplitudes invariants") {
  ComplexVector p(3);
  p << 0.6, Complex(0, 0.8), 0.0;
  const PhotonAmplitudes a(p);
  CHECK(a.n_max() == 2);
  CHECK(a.mean_photon_number() == doctest::Approx(0.64));
  CHECK(a.tail_mass() == 0.0);
  CHECK(a.truncation_adequate(1e-12));
  CHECK(std::abs(a.projector().trace() - 1.0) < 1e-15);

  ComplexVector bad(2);
  bad << 1.0, 1.0;
  CHECK_THROWS_AS(PhotonAmplitudes{bad}, std::invalid_argument);
  CHECK_THROWS_AS(PhotonAmplitudes{ComplexVector()}, std::invalid_argument);
  bad << 1.0, std::nan("");
  CHECK_THROWS_AS(PhotonAmplitudes{bad}, std::invalid_argument);
}

TEST_CASE("validate_density flags each defect") {
  const auto vac = DensityMatrix::vacuum(3);
  CHECK(validate_density(vac).ok());
  CHECK(vac.purity() == doctest::Approx(1.0));

  ComplexMatrix trace_off = vac.entries() * 1.01;
  auto r = validate_density(trace_off);
  CHECK_FALSE(r.trace_ok);
  CHECK(r.hermitian_ok);

  ComplexMatrix non_herm = vac.entries();
  non_herm(0, 1) = Complex(0.0, 1e-6);
  r = validate_density(non_herm);
  CHECK_FALSE(r.hermitian_ok);

  ComplexMatrix not_psd = ComplexMatrix::Zero(2, 2);
  not_psd(0, 0) = 1.2;
  not_psd(1, 1) = -0.2;
  r = validate_density(not_psd);
  CHECK(r.trace_ok);
  CHECK_FALSE(r.psd_ok);
  CHECK(r.min_eigenvalue == doctest::Approx(-0.2));

  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("log_factorials") {
  const auto lf = log_factorials(20);
  CHECK(lf[0] == 0.0);
  CHECK(lf[5] == doctest::Approx(std::log(120.0)).epsilon(1e-14));
  CHECK(lf[20] == doctest::Approx(std::lgamma(21.0)).epsilon(1e-13));
}
