#pragma once

#include <vector>

#include "spherelab/matrix.hpp"

namespace spherelab {

struct EigenResult {
    std::vector<double> eigenvalues; // ascending
    Matrix eigenvectors;             // column i pairs with eigenvalues[i]
};

// Symmetric eigendecomposition by cyclic Jacobi rotations. Ascending
// eigenvalues; eigenvector columns are sign-fixed (largest-magnitude
// entry positive) so results are deterministic.
EigenResult sym_eigh(const Matrix& s);

// Solves A X = B for symmetric positive definite A via Cholesky.
// Rejects matrices whose estimated smallest eigenvalue falls at or below
// rank_tol_rel times the largest (near-singular counts as not SPD).
Matrix solve_spd(const Matrix& a, const Matrix& b, double rank_tol_rel = 1e-10);

// Modified Gram-Schmidt with a second pass; columns must be independent.
Matrix orthonormal_columns(const Matrix& a);

} // namespace spherelab
