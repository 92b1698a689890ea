#include "msdc/eigenvalues.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

#include <fmt/format.h>

#include "msdc/error.hpp"

namespace msdc {
namespace {

constexpr int kMaxIterationsPerEigenvalue = 60;

// Parlett-Reinsch balancing by powers of two (exact in floating point).
void balance(Eigen::MatrixXd& a) {
  constexpr double kRadix = 2.0;
  constexpr double kRadix2 = kRadix * kRadix;
  const Eigen::Index n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      double g = r / kRadix;
      while (c < g) {
        f *= kRadix;
        c *= kRadix2;
      }
      g = r * kRadix;
      while (c > g) {
        f /= kRadix;
        c /= kRadix2;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

// Householder similarity reduction to upper Hessenberg form.
void reduce_to_hessenberg(Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index len = n - k - 1;
    Eigen::VectorXd v = a.col(k).segment(k + 1, len);
    const double alpha = v.norm();
    if (alpha == 0.0) continue;
    const double beta = v(0) >= 0.0 ? -alpha : alpha;
    v(0) -= beta;
    const double vnorm2 = v.squaredNorm();
    if (vnorm2 == 0.0) continue;
    // H = I - 2 v v^T / (v^T v), applied on both sides.
    const Eigen::RowVectorXd left = (2.0 / vnorm2) * (v.transpose() * a.bottomRows(len));
    a.bottomRows(len).noalias() -= v * left;
    const Eigen::VectorXd right = (2.0 / vnorm2) * (a.rightCols(len) * v);
    a.rightCols(len).noalias() -= right * v.transpose();
    a.col(k).segment(k + 2, len - 1).setZero();
    a(k + 1, k) = beta;
  }
}

// Eigenvalues of an upper Hessenberg matrix, destroying it.
std::vector<std::complex<double>> hessenberg_qr(Eigen::MatrixXd& a, std::uint64_t hash) {
  const int n = static_cast<int>(a.rows());
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<std::complex<double>> eig(static_cast<std::size_t>(n));

  double anorm = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
  }

  int hi = n - 1;
  int its = 0;
  double t = 0.0;  // accumulated exceptional shifts
  while (hi >= 0) {
    int l = hi;
    for (; l > 0; --l) {
      double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
      if (s == 0.0) s = anorm;
      if (std::abs(a(l, l - 1)) <= eps * s) {
        a(l, l - 1) = 0.0;
        break;
      }
    }

    double x = a(hi, hi);
    if (l == hi) {
      eig[static_cast<std::size_t>(hi)] = x + t;
      --hi;
      its = 0;
      continue;
    }
    double y = a(hi - 1, hi - 1);
    double w = a(hi, hi - 1) * a(hi - 1, hi);
    if (l == hi - 1) {
      const double p = 0.5 * (y - x);
      const double q = p * p + w;
      double z = std::sqrt(std::abs(q));
      x += t;
      if (q >= 0.0) {
        z = p + std::copysign(z, p);
        eig[static_cast<std::size_t>(hi - 1)] = x + z;
        eig[static_cast<std::size_t>(hi)] = z != 0.0 ? x - w / z : x + z;
      } else {
        eig[static_cast<std::size_t>(hi)] = {x + p, -z};
        eig[static_cast<std::size_t>(hi - 1)] = {x + p, z};
      }
      hi -= 2;
      its = 0;
      continue;
    }

    if (its == kMaxIterationsPerEigenvalue) {
      throw NumericError(fmt::format(
          "eigenvalue QR iteration did not converge (n = {}, matrix hash {:016x})", n, hash));
    }
    if (its > 0 && its % 10 == 0) {
      // Exceptional shift.
      t += x;
      for (int i = 0; i <= hi; ++i) a(i, i) -= x;
      const double s = std::abs(a(hi, hi - 1)) + std::abs(a(hi - 1, hi - 2));
      x = y = 0.75 * s;
      w = -0.4375 * s * s;
    }
    ++its;

    // Look for two consecutive small subdiagonal elements.
    int m = hi - 2;
    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
    for (; m >= l; --m) {
      z = a(m, m);
      r = x - z;
      double s = y - z;
      p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
      q = a(m + 1, m + 1) - z - r - s;
      r = a(m + 2, m + 1);
      s = std::abs(p) + std::abs(q) + std::abs(r);
      p /= s;
      q /= s;
      r /= s;
      if (m == l) break;
      const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
      const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
      if (u <= eps * v) break;
    }
    for (int i = m; i < hi - 1; ++i) {
      a(i + 2, i) = 0.0;
      if (i != m) a(i + 2, i - 1) = 0.0;
    }

    // Double-shift QR sweep on rows/columns l..hi.
    for (int k = m; k < hi; ++k) {
      if (k != m) {
        p = a(k, k - 1);
        q = a(k + 1, k - 1);
        r = k + 1 != hi ? a(k + 2, k - 1) : 0.0;
        x = std::abs(p) + std::abs(q) + std::abs(r);
        if (x != 0.0) {
          p /= x;
          q /= x;
          r /= x;
        }
      }
      const double s = std::copysign(std::sqrt(p * p + q * q + r * r), p);
      if (s == 0.0) continue;
      if (k == m) {
        if (l != m) a(k, k - 1) = -a(k, k - 1);
      } else {
        a(k, k - 1) = -s * x;
      }
      p += s;
      x = p / s;
      y = q / s;
      z = r / s;
      q /= p;
      r /= p;
      for (int j = k; j <= hi; ++j) {
        double pp = a(k, j) + q * a(k + 1, j);
        if (k + 1 != hi) {
          pp += r * a(k + 2, j);
          a(k + 2, j) -= pp * z;
        }
        a(k + 1, j) -= pp * y;
        a(k, j) -= pp * x;
      }
      const int mmin = hi < k + 3 ? hi : k + 3;
      for (int i = l; i <= mmin; ++i) {
        double pp = x * a(i, k) + y * a(i, k + 1);
        if (k + 1 != hi) {
          pp += z * a(i, k + 2);
          a(i, k + 2) -= pp * r;
        }
        a(i, k + 1) -= pp * q;
        a(i, k) -= pp;
      }
    }
  }
  return eig;
}

}  // namespace

std::uint64_t matrix_hash(const Eigen::MatrixXd& m) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  const auto rows = static_cast<std::int64_t>(m.rows());
  const auto cols = static_cast<std::int64_t>(m.cols());
  mix(&rows, sizeof rows);
  mix(&cols, sizeof cols);
  mix(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
  return h;
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw NumericError("eigenvalues: matrix must be square");
  if (!m.allFinite()) {
    throw NumericError(fmt::format("eigenvalues: non-finite entries (matrix hash {:016x})", matrix_hash(m)));
  }
  if (m.rows() == 0) return {};
  Eigen::MatrixXd a = m;
  balance(a);
  reduce_to_hessenberg(a);
  return hessenberg_qr(a, matrix_hash(m));
}

double spectral_radius(const Eigen::MatrixXd& m) {
  double rho = 0.0;
  for (const auto& z : eigenvalues(m)) rho = std::max(rho, std::abs(z));
  return rho;
}

}  // namespace msdc
