#include "spherelab/editing.hpp"

#include <cmath>
#include <string>

#include "spherelab/linalg.hpp"

namespace spherelab {

void validate_knowledge(const KnowledgeSet& ks, const char* what) {
    if (ks.keys.cols() != ks.values.cols()) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + ": keys have " + std::to_string(ks.keys.cols()) +
                        " columns, values have " + std::to_string(ks.values.cols()));
    }
}

KnowledgeSet concat_knowledge(const KnowledgeSet& a, const KnowledgeSet& b) {
    validate_knowledge(a, "concat_knowledge");
    validate_knowledge(b, "concat_knowledge");
    return KnowledgeSet{hstack(a.keys, b.keys), hstack(a.values, b.values)};
}

KnowledgeSet stack_knowledge(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs) {
    if (pairs.empty()) {
        throw Error(ErrorCode::EmptyInput, "stack_knowledge: no pairs given");
    }
    const std::size_t d0 = pairs.front().first.size();
    const std::size_t d1 = pairs.front().second.size();
    if (d0 == 0 || d1 == 0) {
        throw Error(ErrorCode::EmptyInput, "stack_knowledge: zero-length vector");
    }
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        if (pairs[j].first.size() != d0 || pairs[j].second.size() != d1) {
            throw Error(ErrorCode::RaggedDimensions,
                        "stack_knowledge: pair " + std::to_string(j) +
                            " has mismatched dimensions");
        }
    }
    KnowledgeSet ks{Matrix(d0, pairs.size()), Matrix(d1, pairs.size())};
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        for (std::size_t i = 0; i < d0; ++i) ks.keys(i, j) = pairs[j].first[i];
        for (std::size_t i = 0; i < d1; ++i) ks.values(i, j) = pairs[j].second[i];
    }
    ks.keys.check_finite("stack_knowledge keys");
    ks.values.check_finite("stack_knowledge values");
    return ks;
}

namespace {

void check_edit_dims(const Matrix& w, const KnowledgeSet& new_ks,
                     const KnowledgeSet& preserved) {
    validate_knowledge(new_ks, "solve_edit new");
    validate_knowledge(preserved, "solve_edit preserved");
    const std::size_t d0 = w.cols();
    const std::size_t d1 = w.rows();
    if (new_ks.keys.rows() != d0 || preserved.keys.rows() != d0) {
        throw Error(ErrorCode::DimensionMismatch,
                    "solve_edit: key dimension does not match W columns");
    }
    if (new_ks.values.rows() != d1 || preserved.values.rows() != d1) {
        throw Error(ErrorCode::DimensionMismatch,
                    "solve_edit: value dimension does not match W rows");
    }
}

double residual_against(const Matrix& w_new, const KnowledgeSet& ks) {
    return frobenius_norm(subtract(multiply(w_new, ks.keys), ks.values));
}

} // namespace

EditSolution solve_edit_accumulated(const Matrix& w, const KnowledgeSet& new_ks,
                                    const KnowledgeSet& preserved,
                                    const Matrix& base_gram, const Matrix& base_cross,
                                    double ridge, double rank_tol_rel) {
    check_edit_dims(w, new_ks, preserved);
    const std::size_t d0 = w.cols();
    const std::size_t d1 = w.rows();
    if (base_gram.rows() != d0 || base_gram.cols() != d0) {
        throw Error(ErrorCode::DimensionMismatch, "solve_edit: base Gram is not d0 x d0");
    }
    if (base_cross.rows() != d1 || base_cross.cols() != d0) {
        throw Error(ErrorCode::DimensionMismatch, "solve_edit: base cross is not d1 x d0");
    }
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
        throw Error(ErrorCode::ConfigInvalid, "solve_edit: ridge must be finite and >= 0");
    }

    // Gram of the full objective; ridge only enters the solved system.
    Matrix gram_obj = base_gram;
    accumulate(gram_obj, multiply_nt(new_ks.keys, new_ks.keys));
    Matrix gram = gram_obj;
    if (ridge > 0.0) {
        for (std::size_t i = 0; i < d0; ++i) gram(i, i) += ridge;
    }

    const Matrix r = subtract(new_ks.values, multiply(w, new_ks.keys)); // V1 - W K1
    const Matrix rhs = multiply_nt(new_ks.keys, r);                     // K1 R^T, d0 x d1

    Matrix x(1, 1);
    try {
        x = solve_spd(gram, rhs, rank_tol_rel);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NotSPD) {
            throw Error(ErrorCode::SingularGram,
                        std::string("solve_edit: Gram matrix is rank-deficient at the "
                                    "requested tolerance (") +
                            e.what() + ")");
        }
        throw;
    }
    EditSolution sol{transpose(x), 0.0, 0.0, 0.0};

    const Matrix w_new = add(w, sol.delta_w);
    sol.residual_new = residual_against(w_new, new_ks);
    sol.residual_preserved = residual_against(w_new, preserved);

    // Gradient of the (unridged) objective at delta_w. The normal-equation
    // residual and the memorization drift (W base_gram - base_cross) are the
    // only surviving terms.
    Matrix grad = multiply(sol.delta_w, gram_obj);
    accumulate(grad, subtract(multiply(w, base_gram), base_cross));
    accumulate(grad, scale(multiply_nt(r, new_ks.keys), -1.0));
    sol.gradient_norm = 2.0 * frobenius_norm(grad);
    return sol;
}

EditSolution solve_edit(const Matrix& w, const KnowledgeSet& new_ks,
                        const KnowledgeSet& preserved,
                        const std::optional<KnowledgeSet>& prior, double ridge,
                        double rank_tol_rel) {
    check_edit_dims(w, new_ks, preserved);
    Matrix base_gram = multiply_nt(preserved.keys, preserved.keys);
    Matrix base_cross = multiply_nt(preserved.values, preserved.keys);
    if (prior) {
        validate_knowledge(*prior, "solve_edit prior");
        if (prior->keys.rows() != w.cols() || prior->values.rows() != w.rows()) {
            throw Error(ErrorCode::DimensionMismatch,
                        "solve_edit: prior dimensions do not match W");
        }
        accumulate(base_gram, multiply_nt(prior->keys, prior->keys));
        accumulate(base_cross, multiply_nt(prior->values, prior->keys));
    }
    return solve_edit_accumulated(w, new_ks, preserved, base_gram, base_cross, ridge,
                                  rank_tol_rel);
}

Matrix nullspace_projector(const Matrix& preserved_keys, double tol,
                           double rank_tol_rel) {
    const std::size_t d0 = preserved_keys.rows();
    const EigenResult eig = sym_eigh(multiply_nt(preserved_keys, preserved_keys));
    const double lam_max = eig.eigenvalues.back();
    const double cutoff = rank_tol_rel * std::max(lam_max, 0.0);

    Matrix p = Matrix::identity(d0);
    for (std::size_t k = 0; k < d0; ++k) {
        if (eig.eigenvalues[k] <= cutoff) continue;
        // subtract u u^T for every range direction
        for (std::size_t i = 0; i < d0; ++i) {
            const double ui = eig.eigenvectors(i, k);
            for (std::size_t j = 0; j < d0; ++j) p(i, j) -= ui * eig.eigenvectors(j, k);
        }
    }
    p.check_finite("nullspace_projector");

    const double knorm = frobenius_norm(preserved_keys);
    if (frobenius_norm(multiply(p, preserved_keys)) > tol * std::max(knorm, 1e-300)) {
        throw Error(ErrorCode::NoConvergence,
                    "nullspace_projector: residual against preserved keys exceeds "
                    "tolerance");
    }
    return p;
}

EditSolution ft_edit(const Matrix& w, const KnowledgeSet& new_ks, double lr,
                     std::size_t steps) {
    validate_knowledge(new_ks, "ft_edit");
    if (new_ks.keys.rows() != w.cols() || new_ks.values.rows() != w.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "ft_edit: dimensions do not match W");
    }
    if (!std::isfinite(lr) || lr < 0.0) {
        throw Error(ErrorCode::ConfigInvalid, "ft_edit: lr must be finite and >= 0");
    }

    Matrix delta(w.rows(), w.cols());
    Matrix err = subtract(multiply(w, new_ks.keys), new_ks.values); // (W+dW) K1 - V1
    const double r0 = frobenius_norm(err);
    for (std::size_t t = 0; t < steps && lr > 0.0; ++t) {
        accumulate(delta, scale(multiply_nt(err, new_ks.keys), -lr));
        err = subtract(multiply(add(w, delta), new_ks.keys), new_ks.values);
        if (frobenius_norm(err) > 10.0 * r0) {
            throw Error(ErrorCode::DivergenceDetected,
                        "ft_edit: residual grew past 10x initial at iteration " +
                            std::to_string(t + 1) + " (lr too large)");
        }
    }

    EditSolution sol{delta, frobenius_norm(err), 0.0, 0.0};
    sol.gradient_norm = 2.0 * frobenius_norm(multiply_nt(err, new_ks.keys));
    return sol;
}

double output_perturbation(const Matrix& dw, const Matrix& keys) {
    if (dw.cols() != keys.rows()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "output_perturbation: dW columns do not match key dimension");
    }
    const double f = frobenius_norm(multiply(dw, keys));
    return f * f;
}

} // namespace spherelab
