#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uselfa/errors.hpp"

namespace uselfa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Eigenpairs of a real symmetric matrix, eigenvalues in descending order,
// eigenvectors as unit-norm columns.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
  int sweeps = 0;
};

// Cyclic Jacobi with threshold skipping. Runs strictly serially, so results
// are bit-reproducible for identical input.
inline SymmetricEigen symmetric_eigen(const Matrix& input, int max_sweeps = 100) {
  const Eigen::Index n = input.rows();
  if (input.cols() != n) throw DimensionMismatchError("symmetric_eigen: matrix is not square");
  Matrix a = 0.5 * (input + input.transpose());
  Matrix v = Matrix::Identity(n, n);

  SymmetricEigen out;
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-15 * scale) break;
    out.sweeps = sweep + 1;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src);
    out.vectors.col(k) = v.col(src);
  }
  return out;
}

// Flips each column so its entry of largest magnitude is positive (first
// such entry on ties). Returns the applied signs.
inline std::vector<int> canonical_column_signs(const Matrix& m) {
  std::vector<int> signs(static_cast<std::size_t>(m.cols()), 1);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = -1;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (std::abs(m(r, c)) > best_abs) {
        best_abs = std::abs(m(r, c));
        best = r;
      }
    }
    if (m.rows() > 0 && m(best, c) < 0) signs[static_cast<std::size_t>(c)] = -1;
  }
  return signs;
}

struct InverseOptions {
  double condition_limit = 1e12;
  bool ridge_fallback = false;
  double ridge_delta = 1e-8;
};

struct SymmetricInverse {
  Matrix inverse;
  double condition_number = 0;
  bool ridge_applied = false;
};

// Inverse of a symmetric positive-definite matrix. When the spectral
// condition number exceeds the limit the matrix is either rejected or, with
// ridge_fallback, inverted as (m + delta * I).
inline SymmetricInverse spd_inverse(const Matrix& m, const InverseOptions& opt = {}, const std::string& what = "matrix") {
  const auto eig = symmetric_eigen(m);
  const double lmax = eig.values.size() ? eig.values(0) : 0.0;
  const double lmin = eig.values.size() ? eig.values(eig.values.size() - 1) : 0.0;
  SymmetricInverse out;
  out.condition_number = lmin > 0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  Matrix work = m;
  if (!(out.condition_number <= opt.condition_limit)) {
    if (!opt.ridge_fallback)
      throw SingularCorrelationError(what + " is singular or ill-conditioned (condition number " +
                                     std::to_string(out.condition_number) + ")");
    work.diagonal().array() += opt.ridge_delta;
    out.ridge_applied = true;
    if (lmin + opt.ridge_delta <= 0)
      throw SingularCorrelationError(what + " is not positive definite even after ridge");
  }
  Eigen::LDLT<Matrix> ldlt(work);
  if (ldlt.info() != Eigen::Success) throw SingularCorrelationError(what + ": factorization failed");
  out.inverse = ldlt.solve(Matrix::Identity(m.rows(), m.cols()));
  out.inverse = 0.5 * (out.inverse + out.inverse.transpose()).eval();
  return out;
}

}  // namespace uselfa
