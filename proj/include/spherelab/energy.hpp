#pragma once

#include <vector>

#include "spherelab/matrix.hpp"

namespace spherelab {

// Riesz-kernel pairwise energy over matrix rows. All sums run over
// ordered pairs i != j (the convention every bound constant here is
// derived under; the i<j form is exactly half and is not exposed).
struct EnergyParams {
    double s = 2.0;               // kernel order, >= 0; s = 0 selects the log kernel
    bool normalize = false;       // project rows to the unit sphere first
    double min_pair_dist = 1e-12; // degeneracy floor on pairwise distances
};

// One perturbation audit: exact energy change, its first-order
// linearization, and the norm-based bound the linearization must obey.
struct BoundReport {
    double delta_he_exact = 0.0;
    double delta_he_linearized = 0.0;
    double bound_K = 0.0;
    double delta_v = 0.0;    // squared Frobenius norm of the perturbation
    double bound_rhs = 0.0;  // bound_K * sqrt(delta_v)
    bool satisfied_linearized = false;
    double ratio_exact = 0.0; // |delta_he_exact| / bound_rhs (0 when rhs is 0)
};

double hyperspherical_energy(const Matrix& w, const EnergyParams& p);

// Energy drop: HE(W) - HE(W + dW). Positive when the perturbation
// lowers the energy.
double delta_he(const Matrix& w, const Matrix& dw, const EnergyParams& p);

// First-order expansion of delta_he on raw rows:
//   sum over ordered pairs of s * ||p_ij||^(-s-2) * (p_ij . dp_ij).
double delta_he_linearized(const Matrix& w, const Matrix& dw, double s,
                           double min_pair_dist = 1e-12);

// Global bound constant for the s=2 kernel:
//   K = 4 * sqrt( sum_k ( sum_{j!=k} ||w_k - w_j||^-3 )^2 ).
double bound_constant_K(const Matrix& w, double min_pair_dist = 1e-12);

// Per-row constants with |delta_he_linearized| <= sum_k C_k * ||dw_k||:
//   C_k = 2 * s * sum_{j!=k} ||w_k - w_j||^(-s-1).
// The factor 2 keeps the inequality an algebraic theorem under the
// ordered-pair convention (Cauchy-Schwarz applied to each row's terms).
std::vector<double> bound_constants_Ck(const Matrix& w, double s,
                                       double min_pair_dist = 1e-12);

// Full audit at s = 2 on raw rows; delta_v is ||dW||_F^2.
// satisfied_linearized is a theorem and must come back true.
BoundReport audit_bound(const Matrix& w, const Matrix& dw,
                        double min_pair_dist = 1e-12);

} // namespace spherelab
