#include "spherelab/projector.hpp"

#include <cmath>
#include <string>

#include "spherelab/linalg.hpp"

namespace spherelab {

ProjectorSpec principal_space(const Matrix& w, double eta) {
    if (!(eta > 0.0) || !(eta <= 1.0)) {
        throw Error(ErrorCode::ConfigInvalid,
                    "principal_space: eta must lie in (0, 1]");
    }
    const std::size_t d0 = w.cols();
    const double n = static_cast<double>(w.rows());
    const EigenResult eig = sym_eigh(scale(multiply_tn(w, w), 1.0 / n));

    // eigenvalues ascending; walk from the top, clamping tiny negatives
    std::vector<double> lam(d0);
    double total = 0.0;
    for (std::size_t i = 0; i < d0; ++i) {
        lam[i] = std::max(eig.eigenvalues[d0 - 1 - i], 0.0); // descending
        total += lam[i];
    }
    if (!(total > 0.0) || !(lam[0] > 0.0)) {
        throw Error(ErrorCode::ZeroMatrix,
                    "principal_space: weight matrix has no positive spectrum");
    }

    // cum accumulates in the same order as total, so at i = d0-1 the two
    // are bit-identical and the break is guaranteed even for eta = 1.
    std::size_t r = d0;
    double cum = 0.0;
    for (std::size_t i = 0; i < d0; ++i) {
        cum += lam[i];
        if (cum >= eta * total) {
            r = i + 1;
            break;
        }
    }

    ProjectorSpec spec{Matrix(d0, r), std::nullopt, eta, r, cum / total};
    for (std::size_t k = 0; k < r; ++k) {
        const std::size_t src = d0 - 1 - k; // descending eigenvalue order
        for (std::size_t i = 0; i < d0; ++i) spec.basis_u(i, k) = eig.eigenvectors(i, src);
    }
    return spec;
}

Matrix sparse_projector(const ProjectorSpec& spec) {
    if (!spec.alpha.has_value()) {
        throw Error(ErrorCode::AlphaOutOfRange, "sparse_projector: alpha is unset");
    }
    const double alpha = *spec.alpha;
    if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0) {
        throw Error(ErrorCode::AlphaOutOfRange,
                    "sparse_projector: alpha must lie in [0, 1]");
    }
    const std::size_t d0 = spec.basis_u.rows();
    Matrix p = Matrix::identity(d0);
    if (alpha == 0.0) return p; // exact identity, no rounding residue
    for (std::size_t k = 0; k < spec.basis_u.cols(); ++k) {
        for (std::size_t i = 0; i < d0; ++i) {
            const double ui = alpha * spec.basis_u(i, k);
            for (std::size_t j = 0; j < d0; ++j) p(i, j) -= ui * spec.basis_u(j, k);
        }
    }
    p.check_finite("sparse_projector");
    return p;
}

Matrix project_update(const Matrix& w, const Matrix& dw, const Matrix& p_perp) {
    if (p_perp.rows() != p_perp.cols()) {
        throw Error(ErrorCode::NotSquare, "project_update: projector is not square");
    }
    if (dw.cols() != p_perp.rows() || w.rows() != dw.rows() || w.cols() != dw.cols()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "project_update: W is " + std::to_string(w.rows()) + "x" +
                        std::to_string(w.cols()) + ", dW is " + std::to_string(dw.rows()) +
                        "x" + std::to_string(dw.cols()) + ", projector is " +
                        std::to_string(p_perp.rows()) + "x" +
                        std::to_string(p_perp.cols()));
    }
    return add(w, multiply(dw, p_perp));
}

} // namespace spherelab
