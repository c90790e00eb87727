#pragma once

#include <cstddef>
#include <vector>

namespace sidl {

// Eigendecomposition of a symmetric matrix (row-major n*n) via cyclic
// Jacobi rotations. Deterministic; eigenvalues sorted descending with
// matching eigenvector columns.
struct EigResult {
  std::vector<double> values;   // n, descending
  std::vector<double> vectors;  // n*n, column j is eigenvector j
};

EigResult jacobi_eigh(const std::vector<double>& a, std::size_t n);

// Row-major matrix product helpers for small dense problems.
std::vector<double> matmul_raw(const std::vector<double>& a,
                               const std::vector<double>& b, std::size_t m,
                               std::size_t k, std::size_t n);

// Mean vector (length k) and population covariance (k*k, divide by N)
// of rows of an n-by-k matrix.
void mean_cov(const std::vector<double>& rows, std::size_t n, std::size_t k,
              std::vector<double>& mean, std::vector<double>& cov);

}  // namespace sidl
