#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "specrad/errors.hpp"
#include "specrad/matrix.hpp"
#include "specrad/system.hpp"

namespace specrad {

using Complex = std::complex<double>;

// Eigenvalues of a square real matrix with algebraic multiplicity, unordered.
struct ComplexSpectrum {
  std::vector<Complex> values;

  std::size_t size() const { return values.size(); }
};

namespace detail {

// 1-based scratch square matrix; keeps the Hessenberg/QR kernels close to
// their classical EISPACK formulation.
class Work {
 public:
  explicit Work(const Matrix& m) : n_(m.rows()), a_((n_ + 1) * (n_ + 1), 0.0) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) at(i + 1, j + 1) = m(i, j);
  }
  double& at(std::size_t i, std::size_t j) { return a_[i * (n_ + 1) + j]; }
  std::size_t n() const { return n_; }

 private:
  std::size_t n_;
  std::vector<double> a_;
};

// Diagonal similarity scaling by powers of two so row and column norms are comparable.
inline void balance(Work& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const std::size_t n = a.n();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 1; i <= n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (j == i) continue;
        c += std::abs(a.at(j, i));
        r += std::abs(a.at(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 1; j <= n; ++j) a.at(i, j) *= g;
        for (std::size_t j = 1; j <= n; ++j) a.at(j, i) *= f;
      }
    }
  }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity transforms.
inline void to_hessenberg(Work& a) {
  const std::size_t n = a.n();
  for (std::size_t m = 2; m < n; ++m) {
    double x = 0.0;
    std::size_t piv = m;
    for (std::size_t j = m; j <= n; ++j) {
      if (std::abs(a.at(j, m - 1)) > std::abs(x)) {
        x = a.at(j, m - 1);
        piv = j;
      }
    }
    if (piv != m) {
      for (std::size_t j = m - 1; j <= n; ++j) std::swap(a.at(piv, j), a.at(m, j));
      for (std::size_t j = 1; j <= n; ++j) std::swap(a.at(j, piv), a.at(j, m));
    }
    if (x != 0.0) {
      for (std::size_t i = m + 1; i <= n; ++i) {
        double y = a.at(i, m - 1);
        if (y == 0.0) continue;
        y /= x;
        a.at(i, m - 1) = y;
        for (std::size_t j = m; j <= n; ++j) a.at(i, j) -= y * a.at(m, j);
        for (std::size_t j = 1; j <= n; ++j) a.at(j, m) += y * a.at(j, i);
      }
    }
  }
  for (std::size_t i = 3; i <= n; ++i)
    for (std::size_t j = 1; j + 1 < i; ++j) a.at(i, j) = 0.0;
}

inline double sign_of(double magnitude, double s) { return s >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude); }

// Francis double-shift QR on an upper Hessenberg matrix. Total sweeps are
// capped at max_sweeps.
inline std::vector<Complex> hessenberg_qr(Work& a, std::size_t max_sweeps) {
  const std::size_t n = a.n();
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<double> wr(n + 1, 0.0), wi(n + 1, 0.0);

  double anorm = 0.0;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = std::max<std::size_t>(i - 1, 1); j <= n; ++j) anorm += std::abs(a.at(i, j));

  std::size_t sweeps = 0;
  std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n);
  double t = 0.0;
  auto A = [&a](std::ptrdiff_t i, std::ptrdiff_t j) -> double& {
    return a.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  };

  while (nn >= 1) {
    int its = 0;
    std::ptrdiff_t l = 0;
    do {
      // Look for a single small subdiagonal element.
      for (l = nn; l >= 2; --l) {
        double s = std::abs(A(l - 1, l - 1)) + std::abs(A(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(A(l, l - 1)) <= eps * s) {
          A(l, l - 1) = 0.0;
          break;
        }
      }
      if (l < 1) l = 1;
      double x = A(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn] = 0.0;
        --nn;
      } else {
        double y = A(nn - 1, nn - 1);
        double w = A(nn, nn - 1) * A(nn - 1, nn);
        if (l == nn - 1) {
          double p = 0.5 * (y - x);
          double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = -(wi[nn] = z);
          }
          nn -= 2;
        } else {
          if (++sweeps > max_sweeps) {
            throw ConvergenceError("eigenvalues: QR iteration did not converge within " +
                                   std::to_string(max_sweeps) + " sweeps");
          }
          if (its == 10 || its == 20) {
            // Exceptional shift.
            t += x;
            for (std::ptrdiff_t i = 1; i <= nn; ++i) A(i, i) -= x;
            double s = std::abs(A(nn, nn - 1)) + std::abs(A(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          std::ptrdiff_t m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (; m >= l; --m) {
            z = A(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / A(m + 1, m) + A(m, m + 1);
            q = A(m + 1, m + 1) - z - r - s;
            r = A(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            double u = std::abs(A(m, m - 1)) * (std::abs(q) + std::abs(r));
            double v = std::abs(p) * (std::abs(A(m - 1, m - 1)) + std::abs(z) + std::abs(A(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (std::ptrdiff_t i = m + 2; i <= nn; ++i) {
            A(i, i - 2) = 0.0;
            if (i != m + 2) A(i, i - 3) = 0.0;
          }
          for (std::ptrdiff_t k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = A(k, k - 1);
              q = A(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = A(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) A(k, k - 1) = -A(k, k - 1);
            } else {
              A(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (std::ptrdiff_t j = k; j <= nn; ++j) {
              p = A(k, j) + q * A(k + 1, j);
              if (k != nn - 1) {
                p += r * A(k + 2, j);
                A(k + 2, j) -= p * z;
              }
              A(k + 1, j) -= p * y;
              A(k, j) -= p * x;
            }
            const std::ptrdiff_t mmin = nn < k + 3 ? nn : k + 3;
            for (std::ptrdiff_t i = l; i <= mmin; ++i) {
              p = x * A(i, k) + y * A(i, k + 1);
              if (k != nn - 1) {
                p += z * A(i, k + 2);
                A(i, k + 2) -= p * r;
              }
              A(i, k + 1) -= p * q;
              A(i, k) -= p;
            }
          }
        }
      }
    } while (l < nn - 1);
  }

  std::vector<Complex> out;
  out.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) out.emplace_back(wr[i], wi[i]);
  return out;
}

// Real power with 0^0 = 1 and 0^e = 0 for e > 0.
inline double real_pow(double base, double exponent) {
  if (exponent == 0.0) return 1.0;
  if (base == 0.0) return 0.0;
  if (std::isinf(base)) return std::numeric_limits<double>::infinity();
  return std::exp(exponent * std::log(base));
}

}  // namespace detail

/// All eigenvalues of a square matrix (balancing, Hessenberg reduction,
/// shifted double-step QR). Throws DimensionError for non-square input and
/// ConvergenceError after 100*n sweeps.
inline ComplexSpectrum eigenvalues(const Matrix& m) {
  m.require_square("eigenvalues");
  if (m.rows() == 0) throw DimensionError("eigenvalues: empty matrix");
  if (!m.all_finite()) throw DomainError("eigenvalues: non-finite entry");
  detail::Work work(m);
  detail::balance(work);
  detail::to_hessenberg(work);
  return {detail::hessenberg_qr(work, 100 * m.rows())};
}

inline double spectral_radius(const Matrix& m) {
  double r = 0.0;
  for (const Complex& z : eigenvalues(m).values) r = std::max(r, std::abs(z));
  return r;
}

/// Eigenvalues of a symmetric matrix, ascending (cyclic Jacobi). The input is
/// symmetrized first; asymmetry beyond 1e-12 (relative to the largest entry,
/// absolute for small matrices) is rejected.
inline std::vector<double> sym_eigenvalues(const Matrix& s) {
  s.require_square("sym_eigenvalues");
  const std::size_t n = s.rows();
  if (n == 0) throw DimensionError("sym_eigenvalues: empty matrix");
  double scale = 1.0;
  for (double v : s.data()) scale = std::max(scale, std::abs(v));
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(s(i, j) - s(j, i)) > 1e-12 * scale) {
        throw DomainError("sym_eigenvalues: matrix is not symmetric");
      }
      a(i, j) = 0.5 * (s(i, j) + s(j, i));
    }

  constexpr int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diag += a(i, i) * a(i, i);
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    }
    if (off <= 1e-32 * diag || off == 0.0) break;
    if (sweep == max_sweeps - 1) throw ConvergenceError("sym_eigenvalues: Jacobi sweeps exhausted");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

struct EigExtremes {
  double min;
  double max;
};

inline EigExtremes sym_eig_extremes(const Matrix& s) {
  const auto ev = sym_eigenvalues(s);
  return {ev.front(), ev.back()};
}

/// Largest singular value, via the symmetric eigenproblem of M^T M.
inline double spectral_norm(const Matrix& m) {
  if (m.empty()) return 0.0;
  const Matrix gram = m.cols() <= m.rows() ? m.transpose() * m : m * m.transpose();
  return std::sqrt(std::max(0.0, sym_eig_extremes(gram).max));
}

/// Inverse of a symmetric positive-definite matrix by Cholesky factorization.
inline Matrix spd_inverse(const Matrix& s) {
  s.require_square("spd_inverse");
  const std::size_t n = s.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw DomainError("spd_inverse: matrix is not positive definite");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  // Solve L L^T X = I column by column.
  Matrix inv(n, n);
  Vector y(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double v = i == c ? 1.0 : 0.0;
      for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * y[k];
      y[i] = v / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double v = y[ii];
      for (std::size_t k = ii + 1; k < n; ++k) v -= l(k, ii) * inv(k, c);
      inv(ii, c) = v / l(ii, ii);
    }
  }
  // Exact symmetry.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) inv(i, j) = inv(j, i) = 0.5 * (inv(i, j) + inv(j, i));
  return inv;
}

struct SpectralVariation {
  double lhs;  // max_j min_i |alpha_i - beta_j|
  double rhs;  // (||P|| + ||Q||)^(1-1/n) ||P - Q||^(1/n)
};

/**
 * Both sides of the spectral-variation inequality for square P and Q.
 *
 * The left side matches every eigenvalue beta_j of Q to its nearest
 * eigenvalue of P and takes the worst such distance. The right side uses
 * spectral norms; 0^0 is taken as 1 so that P == Q gives 0 on both sides.
 */
inline SpectralVariation spectral_variation_bound(const Matrix& p, const Matrix& q) {
  p.require_square("spectral_variation_bound");
  q.require_square("spectral_variation_bound");
  if (p.rows() != q.rows()) {
    throw DimensionError("spectral_variation_bound: " + p.shape() + " vs " + q.shape());
  }
  const double n = static_cast<double>(p.rows());
  const auto alpha = eigenvalues(p).values;
  const auto beta = eigenvalues(q).values;

  double lhs = 0.0;
  for (const Complex& b : beta) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const Complex& a : alpha) nearest = std::min(nearest, std::abs(a - b));
    lhs = std::max(lhs, nearest);
  }
  const double rhs = detail::real_pow(spectral_norm(p) + spectral_norm(q), 1.0 - 1.0 / n) *
                     detail::real_pow(spectral_norm(p - q), 1.0 / n);
  return {lhs, rhs};
}

/// Excitation Gramian sum_{t=0}^{T} sigma_u^2 A^t B B^T (A^T)^t + sigma_w^2 A^t (A^T)^t.
inline Matrix gramian_sigma(const LtiSystem& sys, std::size_t horizon) {
  const std::size_t n = sys.state_dim();
  const Matrix& a = sys.A();
  const Matrix drive = sys.sigma_u() * sys.sigma_u() * (sys.B() * sys.B().transpose()) +
                       sys.sigma_w() * sys.sigma_w() * Matrix::identity(n);
  Matrix sum(n, n);
  Matrix power = Matrix::identity(n);
  for (std::size_t t = 0; t <= horizon; ++t) {
    sum += power * drive * power.transpose();
    if (t < horizon) power = a * power;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sum(i, j) = sum(j, i) = 0.5 * (sum(i, j) + sum(j, i));
  return sum;
}

}  // namespace specrad
