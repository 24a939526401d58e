#pragma once

#include <vector>

#include "ctvae/matrix.hpp"

namespace ctvae {

struct EigenDecomposition {
    std::vector<double> values;  // descending
    Matrix vectors;              // column i is the eigenvector for values[i]
};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues sorted descending; eigenvectors orthonormal columns.
/// Throws std::invalid_argument if the input is not square or not symmetric
/// within `sym_tol`.
EigenDecomposition sym_eigen(const Matrix& a, double sym_tol = 1e-9);

}  // namespace ctvae
