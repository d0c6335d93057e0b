#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phm/errors.hpp"

namespace phm {

template <typename RealScalar>
struct EigenDecomposition {
  using Complex = std::complex<RealScalar>;
  using RealVector = Eigen::Matrix<RealScalar, Eigen::Dynamic, 1>;
  using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // columns; empty if not requested
  int sweeps = 0;
  RealScalar off_norm = 0;     // Frobenius norm of the off-diagonal part at exit

  ComplexMatrix reconstruct() const {
    return eigenvectors * eigenvalues.template cast<Complex>().asDiagonal() * eigenvectors.adjoint();
  }
};

struct EigOptions {
  double tolerance = 1e-12;  // stop when off-norm <= tolerance * ||H||_F
  int max_sweeps = 100;
  bool compute_vectors = true;
};

/// Eigen-decomposition of a complex Hermitian matrix by cyclic Jacobi rotations.
///
/// The input is symmetrized as (H + H^dagger)/2 before iterating. Each rotation
/// is the complex Givens rotation D J D^dagger, where D removes the phase of the
/// pivot and J is the real symmetric Schur rotation. Eigenvalues are returned
/// in ascending order; ties keep their diagonal order, so output is a pure
/// function of the input.
template <typename Derived>
EigenDecomposition<typename Derived::RealScalar> hermitian_eig(const Eigen::MatrixBase<Derived>& input,
                                                              const EigOptions& opts = {}) {
  using Real = typename Derived::RealScalar;
  using Cplx = std::complex<Real>;
  using Matrix = Eigen::Matrix<Cplx, Eigen::Dynamic, Eigen::Dynamic>;

  if (input.rows() != input.cols()) {
    throw std::invalid_argument("hermitian_eig: matrix is " + std::to_string(input.rows()) + "x" +
                                std::to_string(input.cols()) + ", expected square");
  }
  const Eigen::Index n = input.rows();

  Matrix a = input.template cast<Cplx>();
  a = (a + a.adjoint()).eval() * Real(0.5);
  for (Eigen::Index i = 0; i < n; ++i) a(i, i) = Cplx(a(i, i).real(), 0);

  Matrix v;
  if (opts.compute_vectors) v = Matrix::Identity(n, n);

  const Real frob = a.norm();
  const Real target = Real(opts.tolerance) * frob;
  // Entries this small cannot lift the off-norm above `target` even all together.
  const Real skip = n > 1 ? Real(0.1) * target / Real(n) : Real(0);

  auto off_norm = [&] {
    Real s = 0;
    for (Eigen::Index q = 1; q < n; ++q)
      for (Eigen::Index p = 0; p < q; ++p) s += std::norm(a(p, q));
    return std::sqrt(Real(2) * s);
  };

  EigenDecomposition<Real> out;
  Real off = off_norm();
  int sweep = 0;
  while (off > target) {
    if (sweep == opts.max_sweeps) {
      throw NumericError("fock-core", "Jacobi eigensolver did not converge after " + std::to_string(sweep) +
                                          " sweeps (off-diagonal norm " + std::to_string(off) + ", target " +
                                          std::to_string(target) + ")");
    }
    ++sweep;
    for (Eigen::Index q = 1; q < n; ++q) {
      for (Eigen::Index p = 0; p < q; ++p) {
        const Cplx apq = a(p, q);
        const Real mag = std::abs(apq);
        if (mag <= skip) continue;

        const Real app = a(p, p).real();
        const Real aqq = a(q, q).real();
        const Real theta = (aqq - app) / (Real(2) * mag);
        const Real t = (theta >= 0 ? Real(1) : Real(-1)) / (std::abs(theta) + std::sqrt(Real(1) + theta * theta));
        const Real c = Real(1) / std::sqrt(Real(1) + t * t);
        const Real s = t * c;
        const Cplx phase = apq / mag;
        // U = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on columns (p, q).
        const Cplx u_pq = s * phase;
        const Cplx u_qp = -s * std::conj(phase);

        Cplx* col_p = a.col(p).data();
        Cplx* col_q = a.col(q).data();
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const Cplx akp = col_p[k];
          const Cplx akq = col_q[k];
          const Cplx new_p = c * akp + akq * u_qp;
          const Cplx new_q = akp * u_pq + c * akq;
          col_p[k] = new_p;
          col_q[k] = new_q;
          a(p, k) = std::conj(new_p);
          a(q, k) = std::conj(new_q);
        }
        a(p, p) = Cplx(app - t * mag, 0);
        a(q, q) = Cplx(aqq + t * mag, 0);
        a(p, q) = Cplx(0);
        a(q, p) = Cplx(0);

        if (opts.compute_vectors) {
          Cplx* vp = v.col(p).data();
          Cplx* vq = v.col(q).data();
          for (Eigen::Index k = 0; k < n; ++k) {
            const Cplx x = vp[k];
            const Cplx y = vq[k];
            vp[k] = c * x + y * u_qp;
            vq[k] = x * u_pq + c * y;
          }
        }
      }
    }
    off = off_norm();
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() < a(j, j).real(); });

  out.eigenvalues.resize(n);
  if (opts.compute_vectors) out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = a(order[k], order[k]).real();
    if (opts.compute_vectors) out.eigenvectors.col(k) = v.col(order[k]);
  }
  out.sweeps = sweep;
  out.off_norm = off;
  return out;
}

/// Eigenvalues only; skips accumulation of the rotation matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::RealScalar, Eigen::Dynamic, 1> hermitian_eigenvalues(
    const Eigen::MatrixBase<Derived>& input, double tolerance = 1e-12) {
  EigOptions opts;
  opts.tolerance = tolerance;
  opts.compute_vectors = false;
  return hermitian_eig(input, opts).eigenvalues;
}

}  // namespace phm
