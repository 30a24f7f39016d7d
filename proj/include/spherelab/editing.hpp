#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "spherelab/matrix.hpp"

namespace spherelab {

// Keys and values stacked column-wise: association j lives in column j
// of both matrices.
struct KnowledgeSet {
    Matrix keys;   // d0 x m
    Matrix values; // d1 x m
};

void validate_knowledge(const KnowledgeSet& ks, const char* what);
KnowledgeSet concat_knowledge(const KnowledgeSet& a, const KnowledgeSet& b);

struct EditSolution {
    Matrix delta_w;                 // d1 x d0
    double residual_new = 0.0;      // ||(W+dW) K1 - V1||_F
    double residual_preserved = 0.0; // ||(W+dW) K0 - V0||_F
    double gradient_norm = 0.0;     // first-order optimality residual of the
                                    // preserving least-squares objective
};

KnowledgeSet stack_knowledge(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs);

// Closed-form preserving edit:
//   dW = (V1 - W K1) K1^T (Kp Kp^T + K1 K1^T + K0 K0^T + ridge I)^(-1),
// the prior term absent when prior is empty. ridge defaults to 0: a
// rank-deficient Gram is an error, never silently regularized.
EditSolution solve_edit(const Matrix& w, const KnowledgeSet& new_ks,
                        const KnowledgeSet& preserved,
                        const std::optional<KnowledgeSet>& prior,
                        double ridge = 0.0, double rank_tol_rel = 1e-10);

// Same solve for sequential callers that maintain running accumulations:
// base_gram = K0 K0^T + sum of prior K K^T (d0 x d0), base_cross = the
// matching V0 K0^T + sum of prior V K^T (d1 x d0). Avoids rebuilding the
// prior Gram from scratch every batch.
EditSolution solve_edit_accumulated(const Matrix& w, const KnowledgeSet& new_ks,
                                    const KnowledgeSet& preserved,
                                    const Matrix& base_gram, const Matrix& base_cross,
                                    double ridge = 0.0, double rank_tol_rel = 1e-10);

// Symmetric idempotent projector onto the orthogonal complement of the
// preserved-key column space; P_null K0 vanishes to tol relative.
Matrix nullspace_projector(const Matrix& preserved_keys, double tol = 1e-9,
                           double rank_tol_rel = 1e-10);

// Descent baseline: gradient descent on ||(W+dW) K1 - V1||^2 from dW = 0
// with the update dW <- dW - lr * ((W+dW) K1 - V1) K1^T. Monotone
// residual decrease requires lr < 2 / lambda_max(K1 K1^T).
EditSolution ft_edit(const Matrix& w, const KnowledgeSet& new_ks, double lr,
                     std::size_t steps);

// Aggregate squared output shift ||dW . keys||_F^2.
double output_perturbation(const Matrix& dw, const Matrix& keys);

} // namespace spherelab
