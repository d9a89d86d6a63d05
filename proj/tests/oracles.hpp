#pragma once

// Reference computations used only by tests. None of these share code with
// the library paths they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "specrad/matrix.hpp"

namespace specrad::testing {

using cplx = std::complex<double>;

// Characteristic polynomial coefficients c_0..c_n of det(lambda I - M),
// monic (c_n = 1), via the Faddeev-LeVerrier recursion.
inline std::vector<double> characteristic_polynomial(const Matrix& m) {
  const std::size_t n = m.rows();
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  Matrix mk(n, n);  // M_0 = 0
  for (std::size_t k = 1; k <= n; ++k) {
    Matrix next = m * mk;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    mk = next;
    const Matrix am = m * mk;
    c[n - k] = -am.trace() / static_cast<double>(k);
  }
  return c;
}

inline cplx eval_poly(const std::vector<double>& c, cplx z) {
  cplx v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * z + c[k];
  return v;
}

inline cplx eval_dpoly(const std::vector<double>& c, cplx z) {
  cplx v = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) v = v * z + static_cast<double>(k) * c[k];
  return v;
}

// Roots of a monic polynomial by Durand-Kerner iteration, then Newton polish.
inline std::vector<cplx> polynomial_roots(const std::vector<double>& c) {
  const std::size_t n = c.size() - 1;
  double radius = 0.0;
  for (std::size_t k = 0; k < n; ++k) radius = std::max(radius, std::abs(c[k]));
  radius += 1.0;
  std::vector<cplx> z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = std::polar(radius, 0.4 + 2.0 * M_PI * static_cast<double>(k) / n);
  for (int it = 0; it < 5000; ++it) {
    double change = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      cplx denom = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) denom *= (z[k] - z[j]);
      const cplx step = eval_poly(c, z[k]) / denom;
      z[k] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15) break;
  }
  for (auto& r : z) {
    for (int it = 0; it < 5; ++it) {
      const cplx d = eval_dpoly(c, r);
      if (std::abs(d) == 0.0) break;
      r -= eval_poly(c, r) / d;
    }
  }
  return z;
}

// Smallest worst-case distance over all pairings of two equal-size multisets
// (brute force over permutations; fine for n <= 7).
inline double multiset_distance(std::vector<cplx> a, const std::vector<cplx>& b) {
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[perm[i]] - b[i]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline Matrix random_matrix(std::mt19937_64& gen, std::size_t r, std::size_t c, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = dist(gen);
  return m;
}

inline Matrix random_symmetric(std::mt19937_64& gen, std::size_t n) {
  Matrix m = random_matrix(gen, n, n);
  return 0.5 * (m + m.transpose());
}

// Determinant by Gaussian elimination with partial pivoting.
inline double determinant(Matrix m) {
  const std::size_t n = m.rows();
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (m(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      det = -det;
    }
    det *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

// Largest singular value by power iteration on M^T M.
inline double power_iteration_norm(const Matrix& m, int iters = 5000) {
  const Matrix g = m.transpose() * m;
  Vector v(g.rows(), 1.0);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += 0.1 * static_cast<double>(i);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector w = g * v;
    double nrm = 0.0;
    for (double x : w) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) return 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / nrm;
    lambda = nrm;
  }
  return std::sqrt(lambda);
}

// Binomial standard error sqrt(p(1-p)/R).
inline double binomial_se(double p, std::size_t runs) { return std::sqrt(p * (1.0 - p) / static_cast<double>(runs)); }

}  // namespace specrad::testing
