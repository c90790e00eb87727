#include "sidl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sidl {

EigResult jacobi_eigh(const std::vector<double>& a, std::size_t n) {
  if (a.size() != n * n) throw std::invalid_argument("jacobi_eigh: bad size");
  std::vector<double> m = a;
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto off = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += m[i * n + j] * m[i * n + j];
    return s;
  };

  const double tol = 1e-14;
  double norm = 0.0;
  for (double x : m) norm += x * x;
  for (int sweep = 0; sweep < 100 && off() > tol * (norm + 1e-300); ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = m[p * n + q];
        if (std::abs(apq) < 1e-300) continue;
        double app = m[p * n + p], aqq = m[q * n + q];
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          double mip = m[i * n + p], miq = m[i * n + q];
          m[i * n + p] = c * mip - s * miq;
          m[i * n + q] = s * mip + c * miq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          double mpj = m[p * n + j], mqj = m[q * n + j];
          m[p * n + j] = c * mpj - s * mqj;
          m[q * n + j] = s * mpj + c * mqj;
        }
        for (std::size_t i = 0; i < n; ++i) {
          double vip = v[i * n + p], viq = v[i * n + q];
          v[i * n + p] = c * vip - s * viq;
          v[i * n + q] = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return m[i * n + i] > m[j * n + j];
  });

  EigResult r;
  r.values.resize(n);
  r.vectors.resize(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    r.values[j] = m[order[j] * n + order[j]];
    for (std::size_t i = 0; i < n; ++i)
      r.vectors[i * n + j] = v[i * n + order[j]];
  }
  return r;
}

std::vector<double> matmul_raw(const std::vector<double>& a,
                               const std::vector<double>& b, std::size_t m,
                               std::size_t k, std::size_t n) {
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      double av = a[i * k + p];
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += av * b[p * n + j];
    }
  return out;
}

void mean_cov(const std::vector<double>& rows, std::size_t n, std::size_t k,
              std::vector<double>& mean, std::vector<double>& cov) {
  if (n == 0 || rows.size() != n * k)
    throw std::invalid_argument("mean_cov: bad dimensions");
  mean.assign(k, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) mean[j] += rows[i * k + j];
  for (auto& x : mean) x /= static_cast<double>(n);
  cov.assign(k * k, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a2 = 0; a2 < k; ++a2) {
      double da = rows[i * k + a2] - mean[a2];
      for (std::size_t b2 = a2; b2 < k; ++b2)
        cov[a2 * k + b2] += da * (rows[i * k + b2] - mean[b2]);
    }
  for (std::size_t a2 = 0; a2 < k; ++a2)
    for (std::size_t b2 = a2; b2 < k; ++b2) {
      cov[a2 * k + b2] /= static_cast<double>(n);
      cov[b2 * k + a2] = cov[a2 * k + b2];
    }
}

}  // namespace sidl
