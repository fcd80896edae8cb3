#include "lsqflow/eigen_qr.hpp"

#include "lsqflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lsqflow::linalg {

namespace {

// Scales rows and columns by powers of two until their norms are comparable.
void balance(Eigen::MatrixXd& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const Eigen::Index n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
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
        a.row(i) *= g;
        a.col(i) *= f;
      }
    }
  }
}

}  // namespace

void reduce_to_hessenberg(Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index len = n - k - 1;
    auto x = a.col(k).segment(k + 1, len);
    const double alpha_norm = x.norm();
    if (alpha_norm == 0.0) continue;
    const double alpha = x(0) > 0 ? -alpha_norm : alpha_norm;
    auto u = v.head(len);
    u = x;
    u(0) -= alpha;
    const double unorm = u.norm();
    if (unorm == 0.0) continue;
    u /= unorm;
    // A <- (I - 2uu^T) A (I - 2uu^T) on the trailing block.
    auto rows = a.bottomRows(len);
    rows -= 2.0 * u * (u.transpose() * rows);
    auto cols = a.rightCols(len);
    cols -= 2.0 * (cols * u) * u.transpose();
    a.col(k).segment(k + 2, len - 1).setZero();
    a(k + 1, k) = alpha;
  }
}

std::vector<std::complex<double>> nonsymmetric_eigenvalues(const Eigen::MatrixXd& input) {
  if (input.rows() != input.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "eigenvalues need a square matrix");
  }
  if (!input.allFinite()) throw Error(ErrorKind::NumericalFailure, "matrix has non-finite entries");

  const int nn = static_cast<int>(input.rows());
  std::vector<double> wr(nn, 0.0);
  std::vector<double> wi(nn, 0.0);
  if (nn == 0) return {};

  Eigen::MatrixXd h = input;
  balance(h);
  reduce_to_hessenberg(h);

  const double eps = std::numeric_limits<double>::epsilon();
  double norm = 0.0;
  for (int i = 0; i < nn; ++i)
    for (int j = std::max(i - 1, 0); j < nn; ++j) norm += std::abs(h(i, j));

  int n = nn - 1;
  const int low = 0;
  double exshift = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, z = 0.0, w = 0.0, x = 0.0, y = 0.0;
  int iter = 0;
  int total_iter = 0;
  const int max_total = 60 * nn;

  while (n >= low) {
    // Deflate at the last negligible subdiagonal entry.
    int l = n;
    while (l > low) {
      s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
      if (s == 0.0) s = norm;
      if (std::abs(h(l, l - 1)) <= eps * s) break;  // <= so an exactly zero block deflates
      --l;
    }

    if (l == n) {
      wr[n] = h(n, n) + exshift;
      wi[n] = 0.0;
      --n;
      iter = 0;
    } else if (l == n - 1) {
      w = h(n, n - 1) * h(n - 1, n);
      p = (h(n - 1, n - 1) - h(n, n)) / 2.0;
      q = p * p + w;
      z = std::sqrt(std::abs(q));
      x = h(n, n) + exshift;
      if (q >= 0.0) {
        z = p >= 0.0 ? p + z : p - z;
        wr[n - 1] = x + z;
        wr[n] = z != 0.0 ? x - w / z : x + z;
        wi[n - 1] = 0.0;
        wi[n] = 0.0;
      } else {
        wr[n - 1] = x + p;
        wr[n] = x + p;
        wi[n - 1] = z;
        wi[n] = -z;
      }
      n -= 2;
      iter = 0;
    } else {
      x = h(n, n);
      y = h(n - 1, n - 1);
      w = h(n, n - 1) * h(n - 1, n);

      // Exceptional shifts break cycles that the standard shift can enter.
      if (iter == 10) {
        exshift += x;
        for (int i = low; i <= n; ++i) h(i, i) -= x;
        s = std::abs(h(n, n - 1)) + std::abs(h(n - 1, n - 2));
        x = y = 0.75 * s;
        w = -0.4375 * s * s;
      }
      if (iter == 30) {
        s = (y - x) / 2.0;
        s = s * s + w;
        if (s > 0.0) {
          s = std::sqrt(s);
          if (y < x) s = -s;
          s = x - w / ((y - x) / 2.0 + s);
          for (int i = low; i <= n; ++i) h(i, i) -= s;
          exshift += s;
          x = y = w = 0.964;
        }
      }
      ++iter;
      if (++total_iter > max_total) {
        throw Error(ErrorKind::NumericalFailure, "Hessenberg QR iteration did not converge");
      }

      // Find two consecutive small subdiagonal entries.
      int m = n - 2;
      while (m >= l) {
        z = h(m, m);
        r = x - z;
        s = y - z;
        p = (r * s - w) / h(m + 1, m) + h(m, m + 1);
        q = h(m + 1, m + 1) - z - r - s;
        r = h(m + 2, m + 1);
        s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        if (std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r)) <
            eps * (std::abs(p) * (std::abs(h(m - 1, m - 1)) + std::abs(z) + std::abs(h(m + 1, m + 1))))) {
          break;
        }
        --m;
      }
      for (int i = m + 2; i <= n; ++i) {
        h(i, i - 2) = 0.0;
        if (i > m + 2) h(i, i - 3) = 0.0;
      }

      // Double-shift QR sweep on rows l..n and columns m..n.
      for (int k = m; k <= n - 1; ++k) {
        const bool notlast = k != n - 1;
        if (k != m) {
          p = h(k, k - 1);
          q = h(k + 1, k - 1);
          r = notlast ? h(k + 2, k - 1) : 0.0;
          x = std::abs(p) + std::abs(q) + std::abs(r);
          if (x == 0.0) continue;
          p /= x;
          q /= x;
          r /= x;
        }
        s = std::sqrt(p * p + q * q + r * r);
        if (p < 0.0) s = -s;
        if (s == 0.0) continue;
        if (k != m) {
          h(k, k - 1) = -s * x;
        } else if (l != m) {
          h(k, k - 1) = -h(k, k - 1);
        }
        p += s;
        x = p / s;
        y = q / s;
        z = r / s;
        q /= p;
        r /= p;
        for (int j = k; j <= n; ++j) {
          p = h(k, j) + q * h(k + 1, j);
          if (notlast) {
            p += r * h(k + 2, j);
            h(k + 2, j) -= p * z;
          }
          h(k, j) -= p * x;
          h(k + 1, j) -= p * y;
        }
        const int imax = std::min(n, k + 3);
        for (int i = l; i <= imax; ++i) {
          p = x * h(i, k) + y * h(i, k + 1);
          if (notlast) {
            p += z * h(i, k + 2);
            h(i, k + 2) -= p * r;
          }
          h(i, k) -= p;
          h(i, k + 1) -= p * q;
        }
      }
    }
  }

  std::vector<std::complex<double>> out;
  out.reserve(nn);
  for (int i = 0; i < nn; ++i) out.emplace_back(wr[i], wi[i]);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

}  // namespace lsqflow::linalg
