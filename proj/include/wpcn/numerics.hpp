#pragma once

// Dense scalar and matrix kernels shared by the solvers: special functions,
// Hermitian eigen-decomposition, PSD square roots and bracketing root search.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "wpcn/errors.hpp"

namespace wpcn {

template <typename Scalar>
using MatrixXc = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorXc = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using VectorXr = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Hermitian matrices are stored densely; conjugate symmetry is checked by
/// the routines that rely on it.
template <typename Scalar>
using HermitianMatrix = MatrixXc<Scalar>;

// ---------------------------------------------------------------------------
// Lambert W, principal branch.
// ---------------------------------------------------------------------------

/// Principal branch W0(x) for x >= -1/e, computed by Halley iteration.
template <typename Scalar>
Scalar lambert_w0(Scalar x) {
  using std::abs;
  using std::exp;
  using std::log;
  using std::sqrt;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar e = std::numbers::e_v<Scalar>;
  const Scalar branch = -1 / e;
  if (!(x >= branch - eps))
    throw DomainError("lambert_w0: argument below -1/e");
  if (x <= branch) return Scalar(-1);
  if (x == 0) return Scalar(0);
  if (std::isinf(x)) return x;

  Scalar w;
  if (x < Scalar(-0.32)) {
    // series about the branch point
    const Scalar p = sqrt(2 * (e * x + 1));
    w = -1 + p - p * p / 3 + Scalar(11) / 72 * p * p * p;
  } else if (x < Scalar(3)) {
    w = log1p(x) * (Scalar(1) - log1p(log1p(x)) / (2 + log1p(x)));
  } else {
    const Scalar l1 = log(x);
    const Scalar l2 = log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int it = 0; it < 64; ++it) {
    const Scalar ew = exp(w);
    const Scalar f = w * ew - x;
    const Scalar wp1 = w + 1;
    if (wp1 == 0) break;
    const Scalar denom = ew * wp1 - (w + 2) * f / (2 * wp1);
    if (denom == 0) break;
    const Scalar dw = f / denom;
    w -= dw;
    if (abs(dw) <= 4 * eps * (1 + abs(w))) break;
  }
  return w;
}

/// W0(exp(log_x)); stays finite when exp(log_x) would overflow.
template <typename Scalar>
Scalar lambert_w0_exp(Scalar log_x) {
  using std::abs;
  using std::log;
  if (log_x < Scalar(600)) return lambert_w0(std::exp(log_x));
  // Solve w + log(w) = log_x by Newton; converges from w = L - log(L).
  Scalar w = log_x - log(log_x);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (int it = 0; it < 64; ++it) {
    const Scalar g = w + log(w) - log_x;
    const Scalar dw = g / (1 + 1 / w);
    w -= dw;
    if (abs(dw) <= 4 * eps * w) break;
  }
  return w;
}

// ---------------------------------------------------------------------------
// Modified Bessel function of the first kind, order zero.
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr double kBesselSeriesLimit = 15.0;

template <typename Scalar>
Scalar bessel_i0_series(Scalar x) {
  const Scalar q = x * x / 4;
  Scalar term = 1;
  Scalar sum = 1;
  for (int m = 1; m < 500; ++m) {
    term *= q / (Scalar(m) * Scalar(m));
    sum += term;
    if (term <= std::numeric_limits<Scalar>::epsilon() * sum) break;
  }
  return sum;
}

// sum_k prod_{i<=k} (2i-1)^2 / (8 i x), truncated at its smallest term
template <typename Scalar>
Scalar bessel_i0_asymptotic_sum(Scalar x) {
  Scalar term = 1;
  Scalar sum = 1;
  for (int k = 1; k < 200; ++k) {
    const Scalar next = term * Scalar((2 * k - 1) * (2 * k - 1)) / (8 * Scalar(k) * x);
    if (next >= term) break;
    term = next;
    sum += term;
    if (term <= std::numeric_limits<Scalar>::epsilon() * sum) break;
  }
  return sum;
}

}  // namespace detail

/// I0(x). Returns +infinity once the result overflows; callers that need the
/// large-argument regime should use log_bessel_i0.
template <typename Scalar>
Scalar bessel_i0(Scalar x) {
  using std::abs;
  x = abs(x);
  if (x < Scalar(detail::kBesselSeriesLimit)) return detail::bessel_i0_series(x);
  const Scalar pref = std::exp(x) / std::sqrt(2 * std::numbers::pi_v<Scalar> * x);
  return pref * detail::bessel_i0_asymptotic_sum(x);
}

/// log(I0(x)), finite for every finite x.
template <typename Scalar>
Scalar log_bessel_i0(Scalar x) {
  using std::abs;
  using std::log;
  x = abs(x);
  if (x < Scalar(detail::kBesselSeriesLimit)) return log(detail::bessel_i0_series(x));
  return x - log(2 * std::numbers::pi_v<Scalar> * x) / 2 +
         log(detail::bessel_i0_asymptotic_sum(x));
}

// ---------------------------------------------------------------------------
// Hermitian eigen-decomposition and PSD square root.
// ---------------------------------------------------------------------------

template <typename Scalar>
struct HermitianEigen {
  VectorXr<Scalar> values;   // descending
  MatrixXc<Scalar> vectors;  // orthonormal columns, matching `values`
};

template <typename Scalar>
Scalar hermitian_asymmetry(const HermitianMatrix<Scalar>& m) {
  return (m - m.adjoint()).norm();
}

/// Eigenpairs of a Hermitian matrix, sorted by descending eigenvalue.
template <typename Scalar>
HermitianEigen<Scalar> hermitian_eig(const HermitianMatrix<Scalar>& m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw DomainError("hermitian_eig: matrix must be square and non-empty");
  const Scalar scale = std::max(Scalar(1), m.norm());
  if (hermitian_asymmetry(m) > Scalar(1e-10) * scale)
    throw DomainError("hermitian_eig: matrix is not Hermitian");

  Eigen::SelfAdjointEigenSolver<MatrixXc<Scalar>> solver(m);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("hermitian_eig: eigen-decomposition did not converge");

  const Eigen::Index n = m.rows();
  HermitianEigen<Scalar> out{VectorXr<Scalar>(n), MatrixXc<Scalar>(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

/// Largest eigenvalue and its unit eigenvector.
template <typename Scalar>
std::pair<Scalar, VectorXc<Scalar>> top_eigenpair(const HermitianMatrix<Scalar>& m) {
  auto eig = hermitian_eig(m);
  return {eig.values(0), eig.vectors.col(0)};
}

/// Principal square root of a Hermitian PSD matrix. Eigenvalues down to
/// -1e-8 ||M|| are treated as round-off and clamped to zero.
template <typename Scalar>
HermitianMatrix<Scalar> psd_sqrt(const HermitianMatrix<Scalar>& m) {
  const auto eig = hermitian_eig(m);
  const Scalar norm = eig.values.cwiseAbs().maxCoeff();
  const Scalar min_eig = eig.values.minCoeff();
  if (min_eig < -Scalar(1e-8) * norm)
    throw NotPsdError("psd_sqrt: matrix has a significantly negative eigenvalue");
  const VectorXr<Scalar> roots = eig.values.cwiseMax(Scalar(0)).cwiseSqrt();
  HermitianMatrix<Scalar> out =
      eig.vectors * roots.template cast<std::complex<Scalar>>().asDiagonal() *
      eig.vectors.adjoint();
  // exact conjugate symmetry
  return (out + out.adjoint()) / Scalar(2);
}

// ---------------------------------------------------------------------------
// Scalar root finding.
// ---------------------------------------------------------------------------

/// Smallest x in [a, b] at which f crosses from negative to non-negative.
/// f is sampled on `scan_points` uniform points and the first sign change is
/// refined by bisection. The returned point always satisfies f(x) >= 0;
/// bisection stops early once |f(x)| <= tol.
template <typename Scalar, typename F>
Scalar find_min_root(F&& f, Scalar a, Scalar b, Scalar tol, int scan_points = 10001) {
  if (!(b >= a)) throw DomainError("find_min_root: empty interval");
  if (scan_points < 2) scan_points = 2;
  if (f(a) >= 0) return a;

  Scalar lo = a;
  Scalar hi = a;
  bool found = false;
  for (int i = 1; i < scan_points; ++i) {
    const Scalar x = a + (b - a) * Scalar(i) / Scalar(scan_points - 1);
    if (f(x) >= 0) {
      hi = x;
      found = true;
      break;
    }
    lo = x;
  }
  if (!found) throw NoRootError("find_min_root: f is negative on the whole interval");

  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (int it = 0; it < 4000; ++it) {
    if (hi - lo <= 2 * eps * std::abs(hi)) break;
    const Scalar mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    const Scalar fm = f(mid);
    if (fm >= 0) {
      hi = mid;
      if (fm <= tol) break;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace wpcn
