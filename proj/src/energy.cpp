#include "spherelab/energy.hpp"

#include <cmath>
#include <string>

namespace spherelab {

namespace {

void validate_params(const EnergyParams& p) {
    if (!(p.s >= 0.0) || !std::isfinite(p.s)) {
        throw Error(ErrorCode::ConfigInvalid, "energy: kernel order s must be >= 0");
    }
    if (!(p.min_pair_dist > 0.0)) {
        throw Error(ErrorCode::ConfigInvalid, "energy: min_pair_dist must be > 0");
    }
}

void require_rows(const Matrix& w) {
    if (w.rows() < 2) {
        throw Error(ErrorCode::TooFewRows,
                    "energy: need at least 2 rows, got " + std::to_string(w.rows()));
    }
}

// Rows, optionally pushed onto the unit sphere.
Matrix prepare_rows(const Matrix& w, const EnergyParams& p) {
    if (!p.normalize) return w;
    Matrix u(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.rows(); ++i) {
        const double n = row_norm(w, i);
        if (!(n > 0.0)) {
            throw Error(ErrorCode::ZeroNormRow,
                        "energy: row " + std::to_string(i) + " has zero norm");
        }
        for (std::size_t j = 0; j < w.cols(); ++j) u(i, j) = w(i, j) / n;
    }
    u.check_finite("energy row normalization");
    return u;
}

double pair_distance_squared(const Matrix& u, std::size_t i, std::size_t j,
                             double min_pair_dist) {
    double d2 = 0.0;
    const double* ri = u.row(i);
    const double* rj = u.row(j);
    for (std::size_t k = 0; k < u.cols(); ++k) {
        const double d = ri[k] - rj[k];
        d2 += d * d;
    }
    if (std::sqrt(d2) < min_pair_dist) {
        throw Error(ErrorCode::DegeneratePair,
                    "energy: rows " + std::to_string(i) + " and " + std::to_string(j) +
                        " are closer than the degeneracy floor");
    }
    return d2;
}

} // namespace

double hyperspherical_energy(const Matrix& w, const EnergyParams& p) {
    validate_params(p);
    require_rows(w);
    const Matrix u = prepare_rows(w, p);

    double total = 0.0;
    for (std::size_t i = 0; i < u.rows(); ++i) {
        for (std::size_t j = i + 1; j < u.rows(); ++j) {
            const double d2 = pair_distance_squared(u, i, j, p.min_pair_dist);
            double term;
            if (p.s == 0.0) {
                term = -0.5 * std::log(d2); // log(1/d)
            } else if (p.s == 2.0) {
                term = 1.0 / d2;
            } else {
                term = std::pow(d2, -0.5 * p.s);
            }
            total += 2.0 * term; // both ordered pairs contribute identically
        }
    }
    if (!std::isfinite(total)) {
        throw Error(ErrorCode::NonFinite, "energy: sum overflowed");
    }
    return total;
}

double delta_he(const Matrix& w, const Matrix& dw, const EnergyParams& p) {
    if (w.rows() != dw.rows() || w.cols() != dw.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "delta_he: W and dW shapes differ");
    }
    return hyperspherical_energy(w, p) - hyperspherical_energy(add(w, dw), p);
}

double delta_he_linearized(const Matrix& w, const Matrix& dw, double s,
                           double min_pair_dist) {
    if (w.rows() != dw.rows() || w.cols() != dw.cols()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "delta_he_linearized: W and dW shapes differ");
    }
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw Error(ErrorCode::ConfigInvalid,
                    "delta_he_linearized: kernel order s must be > 0");
    }
    require_rows(w);

    double total = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t j = i + 1; j < w.rows(); ++j) {
            const double d2 = pair_distance_squared(w, i, j, min_pair_dist);
            double dot = 0.0;
            const double* wi = w.row(i);
            const double* wj = w.row(j);
            const double* di = dw.row(i);
            const double* dj = dw.row(j);
            for (std::size_t k = 0; k < w.cols(); ++k) {
                dot += (wi[k] - wj[k]) * (di[k] - dj[k]);
            }
            const double coeff =
                (s == 2.0) ? 2.0 / (d2 * d2) : s * std::pow(d2, -0.5 * (s + 2.0));
            total += 2.0 * coeff * dot; // ordered pairs: (i,j) and (j,i) terms are equal
        }
    }
    if (!std::isfinite(total)) {
        throw Error(ErrorCode::NonFinite, "delta_he_linearized: sum overflowed");
    }
    return total;
}

double bound_constant_K(const Matrix& w, double min_pair_dist) {
    require_rows(w);
    const std::size_t n = w.rows();
    double outer = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double inner = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k) continue;
            const double d2 = pair_distance_squared(w, k, j, min_pair_dist);
            inner += std::pow(d2, -1.5); // ||w_k - w_j||^-3
        }
        outer += inner * inner;
    }
    const double k_const = 4.0 * std::sqrt(outer);
    if (!std::isfinite(k_const)) {
        throw Error(ErrorCode::NonFinite, "bound_constant_K: sum overflowed");
    }
    return k_const;
}

std::vector<double> bound_constants_Ck(const Matrix& w, double s, double min_pair_dist) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
        throw Error(ErrorCode::ConfigInvalid,
                    "bound_constants_Ck: kernel order s must be >= 0");
    }
    require_rows(w);
    const std::size_t n = w.rows();
    std::vector<double> c(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double inner = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k) continue;
            const double d2 = pair_distance_squared(w, k, j, min_pair_dist);
            inner += std::pow(d2, -0.5 * (s + 1.0)); // ||w_k - w_j||^(-s-1)
        }
        // Ordered-pair convention: row k appears in both (k,j) and (j,k)
        // terms, hence the factor 2 on top of the kernel order.
        c[k] = 2.0 * s * inner;
        if (!std::isfinite(c[k])) {
            throw Error(ErrorCode::NonFinite, "bound_constants_Ck: sum overflowed");
        }
    }
    return c;
}

BoundReport audit_bound(const Matrix& w, const Matrix& dw, double min_pair_dist) {
    if (w.rows() != dw.rows() || w.cols() != dw.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "audit_bound: W and dW shapes differ");
    }
    EnergyParams raw{2.0, false, min_pair_dist};

    BoundReport r;
    r.delta_he_exact = delta_he(w, dw, raw);
    r.delta_he_linearized = delta_he_linearized(w, dw, 2.0, min_pair_dist);
    r.bound_K = bound_constant_K(w, min_pair_dist);
    const double dv = frobenius_norm(dw);
    r.delta_v = dv * dv;
    r.bound_rhs = r.bound_K * std::sqrt(r.delta_v);
    r.satisfied_linearized =
        std::fabs(r.delta_he_linearized) <= r.bound_rhs * (1.0 + 1e-9);
    r.ratio_exact = r.bound_rhs > 0.0 ? std::fabs(r.delta_he_exact) / r.bound_rhs : 0.0;
    return r;
}

} // namespace spherelab
