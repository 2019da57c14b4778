#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tvha/errors.hpp"

namespace tvha::linalg {

std::vector<double> jacobi_eigen_sym(std::vector<double> a, std::size_t n,
                                     std::vector<double>* vectors) {
  if (a.size() != n * n) {
    throw DimensionError("jacobi_eigen_sym: matrix size mismatch");
  }
  std::vector<double> v;
  if (vectors) {
    v.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  }

  const auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
    }
    return std::sqrt(2.0 * s);
  };

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    scale = std::max(scale, std::abs(a[i * n + i]));
  }
  scale = std::max(scale, off_norm());
  const double tol = std::max(scale, 1.0) * 1e-14;

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps && off_norm() > tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) <= tol * 1e-2) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        if (vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v[k * n + p];
            const double vkq = v[k * n + q];
            v[k * n + p] = c * vkp - s * vkq;
            v[k * n + q] = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<double> eigenvalues(n);
  for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a[i * n + i];

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return eigenvalues[i] < eigenvalues[j];
  });

  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = eigenvalues[order[i]];
  if (vectors) {
    vectors->assign(n * n, 0.0);
    for (std::size_t col = 0; col < n; ++col) {
      for (std::size_t row = 0; row < n; ++row) {
        (*vectors)[row * n + col] = v[row * n + order[col]];
      }
    }
  }
  return sorted;
}

}  // namespace tvha::linalg
