#ifndef QPLAB_NUMERICS_HPP
#define QPLAB_NUMERICS_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace qplab {

using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/// Absolute/relative tolerance pair used by the verification suites.
struct Tolerances {
  double abs = 1e-10;
  double rel = 1e-10;
};

/// FNV-1a, used to derive per-check-family RNG streams from one user seed.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Deterministic RNG. mt19937_64 has a pinned sequence across platforms;
/// the [-1,1] mapping avoids std::uniform_real_distribution, whose output
/// is implementation-defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [-1, 1].
  double uniform() {
    const std::uint64_t u = eng_() >> 11;  // 53 bits
    const double x = static_cast<double>(u) * (1.0 / 9007199254740992.0);
    return 2.0 * x - 1.0;
  }

  /// Uniform in [lo, hi].
  double uniform(double lo, double hi) {
    return lo + (uniform() + 1.0) * 0.5 * (hi - lo);
  }

private:
  std::mt19937_64 eng_;
};

/// Fixed 17-significant-digit formatting; reports and traces are byte-stable
/// because every floating-point number goes through this one function.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

/// |a-b| scaled by max(|a|,|b|) when that is meaningfully nonzero,
/// otherwise the plain absolute difference.
inline double rel_residual(double a, double b, double floor = 1e-8) {
  const double m = std::max(std::abs(a), std::abs(b));
  if (m < floor) return std::abs(a - b);
  return std::abs(a - b) / m;
}

/// Rank by Gaussian elimination with partial pivoting; a column is counted
/// only while its pivot exceeds `pivot_tol`.
inline int pivot_rank(RMat m, double pivot_tol = 1e-8) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  int rank = 0;
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int piv = row;
    double best = std::abs(m(row, col));
    for (int r = row + 1; r < rows; ++r) {
      if (std::abs(m(r, col)) > best) {
        best = std::abs(m(r, col));
        piv = r;
      }
    }
    if (best <= pivot_tol) continue;
    m.row(piv).swap(m.row(row));
    for (int r = row + 1; r < rows; ++r) {
      const double f = m(r, col) / m(row, col);
      m.row(r) -= f * m.row(row);
    }
    ++rank;
    ++row;
  }
  return rank;
}

/// n evenly spaced samples covering [lo, hi] inclusive; a single sample sits
/// at the midpoint.
inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    out.push_back(0.5 * (lo + hi));
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) out.push_back(lo + step * i);
  return out;
}

inline double max_abs(const RMat& m) { return m.cwiseAbs().maxCoeff(); }

inline double max_abs(const Mat& m) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      best = std::max(best, std::abs(m(i, j)));
  return best;
}

}  // namespace qplab

#endif
