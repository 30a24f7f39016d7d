#pragma once

#include <optional>

#include "spherelab/matrix.hpp"

namespace spherelab {

// Principal directions of a weight matrix plus the suppression strength
// used to build the sparse projector.
struct ProjectorSpec {
    Matrix basis_u;              // d0 x r, orthonormal columns, descending eigenvalue
    std::optional<double> alpha; // suppression strength in [0, 1]; unset until chosen
    double eta = 0.0;            // requested cumulative eigenvalue ratio, in (0, 1]
    std::size_t rank_r = 0;      // smallest rank reaching eta
    double eigenvalue_mass = 0.0; // achieved cumulative ratio, >= eta
};

// Eigendecomposition of (1/n) W^T W (n = row count, no centering, no row
// normalization); keeps the smallest leading set of eigenvectors whose
// cumulative eigenvalue ratio reaches eta. alpha is left unset.
ProjectorSpec principal_space(const Matrix& w, double eta);

// P_perp = I - alpha U U^T. Spectrum: (1 - alpha) with multiplicity r,
// 1 with multiplicity d0 - r.
Matrix sparse_projector(const ProjectorSpec& spec);

// W + dW P_perp: the update with its principal components suppressed.
Matrix project_update(const Matrix& w, const Matrix& dw, const Matrix& p_perp);

} // namespace spherelab
