#pragma once

#include <cstddef>
#include <vector>

namespace tvha::linalg {

// Cyclic Jacobi eigensolver for a dense symmetric matrix (row-major n x n).
// Returns eigenvalues ascending; when `vectors` is non-null it receives the
// matching eigenvectors as columns (row-major n x n).
std::vector<double> jacobi_eigen_sym(std::vector<double> a, std::size_t n,
                                     std::vector<double>* vectors = nullptr);

}  // namespace tvha::linalg
