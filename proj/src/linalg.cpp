#include "spherelab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spherelab/csv.hpp"

namespace spherelab {

namespace {

constexpr int kMaxJacobiSweeps = 64;

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

void require_square_symmetric(const Matrix& s, const char* op) {
    if (s.rows() != s.cols()) {
        throw Error(ErrorCode::NotSquare, std::string(op) + ": matrix is " +
                                              std::to_string(s.rows()) + "x" +
                                              std::to_string(s.cols()));
    }
    double asym = 0.0;
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = i + 1; j < s.cols(); ++j)
            asym = std::max(asym, std::fabs(s(i, j) - s(j, i)));
    if (asym > 1e-10 * std::max(frobenius_norm(s), 1e-300)) {
        throw Error(ErrorCode::NotSymmetric,
                    std::string(op) + ": asymmetry " + std::to_string(asym) +
                        " exceeds tolerance");
    }
}

// Lower-triangular Cholesky factor in place; returns false when a pivot
// is non-positive or non-finite.
bool cholesky_in_place(Matrix& a) {
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) {
        double d = a(k, k);
        for (std::size_t j = 0; j < k; ++j) d -= a(k, j) * a(k, j);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double lkk = std::sqrt(d);
        a(k, k) = lkk;
        for (std::size_t i = k + 1; i < n; ++i) {
            double s = a(i, k);
            for (std::size_t j = 0; j < k; ++j) s -= a(i, j) * a(k, j);
            a(i, k) = s / lkk;
        }
    }
    // zero the unused upper triangle so the factor can be used directly
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a(i, j) = 0.0;
    return true;
}

void cholesky_solve_vector(const Matrix& l, std::vector<double>& x) {
    const std::size_t n = l.rows();
    for (std::size_t i = 0; i < n; ++i) { // L y = x
        double s = x[i];
        for (std::size_t j = 0; j < i; ++j) s -= l(i, j) * x[j];
        x[i] = s / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) { // L^T x = y
        double s = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= l(j, ii) * x[j];
        x[ii] = s / l(ii, ii);
    }
}

double rayleigh_quotient(const Matrix& a, const std::vector<double>& v) {
    const std::size_t n = a.rows();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double av = 0.0;
        for (std::size_t j = 0; j < n; ++j) av += a(i, j) * v[j];
        num += v[i] * av;
        den += v[i] * v[i];
    }
    return num / den;
}

void normalize_vector(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    if (s > 0.0)
        for (double& x : v) x /= s;
}

// Largest eigenvalue estimate by power iteration (deterministic start).
double estimate_max_eigenvalue(const Matrix& a) {
    const std::size_t n = a.rows();
    std::vector<double> v(n), w(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 1e-3 * static_cast<double>(i);
    normalize_vector(v);
    for (int it = 0; it < 24; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += a(i, j) * v[j];
            w[i] = s;
        }
        normalize_vector(w);
        v.swap(w);
    }
    return rayleigh_quotient(a, v);
}

// Smallest eigenvalue estimate by inverse iteration with the Cholesky factor.
double estimate_min_eigenvalue(const Matrix& a, const Matrix& l) {
    const std::size_t n = a.rows();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 - 1e-3 * static_cast<double>(i);
    normalize_vector(v);
    for (int it = 0; it < 24; ++it) {
        cholesky_solve_vector(l, v);
        normalize_vector(v);
        for (double x : v)
            if (!std::isfinite(x)) return 0.0;
    }
    return rayleigh_quotient(a, v);
}

} // namespace

EigenResult sym_eigh(const Matrix& s) {
    require_square_symmetric(s, "sym_eigh");
    const std::size_t n = s.rows();

    // work on a symmetrized copy so tiny input asymmetry cannot drift
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (s(i, j) + s(j, i));
    Matrix v = Matrix::identity(n);

    const double target = 1e-15 * std::max(frobenius_norm(a), 1e-300);
    bool converged = off_diagonal_norm(a) <= target;
    for (int sweep = 0; sweep < kMaxJacobiSweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                // stable tangent of the rotation angle
                const double theta = (aqq - app) / (2.0 * apq);
                double t;
                if (std::fabs(theta) > 1e154) {
                    t = 1.0 / (2.0 * theta);
                } else {
                    t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                const double tau = sn / (1.0 + c);

                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = arp - sn * (arq + tau * arp);
                    a(p, r) = a(r, p);
                    a(r, q) = arq + sn * (arp - tau * arq);
                    a(q, r) = a(r, q);
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double vrp = v(r, p);
                    const double vrq = v(r, q);
                    v(r, p) = vrp - sn * (vrq + tau * vrp);
                    v(r, q) = vrq + sn * (vrp - tau * vrq);
                }
            }
        }
        converged = off_diagonal_norm(a) <= target;
    }
    if (!converged) {
        throw Error(ErrorCode::NoConvergence,
                    "sym_eigh: Jacobi sweeps did not reduce off-diagonal mass");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    EigenResult res{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        res.eigenvalues[k] = a(src, src);
        // sign convention: largest-magnitude entry of each column positive
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double m = std::fabs(v(r, src));
            if (m > best) { best = m; arg = r; }
        }
        const double sign = v(arg, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t r = 0; r < n; ++r) res.eigenvectors(r, k) = sign * v(r, src);
    }
    return res;
}

Matrix solve_spd(const Matrix& a, const Matrix& b, double rank_tol_rel) {
    require_square_symmetric(a, "solve_spd");
    if (b.rows() != a.rows()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "solve_spd: rhs has " + std::to_string(b.rows()) +
                        " rows, matrix is " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()));
    }

    Matrix l = a;
    if (!cholesky_in_place(l)) {
        throw Error(ErrorCode::NotSPD, "solve_spd: non-positive pivot in Cholesky");
    }
    const double lam_max = estimate_max_eigenvalue(a);
    const double lam_min = estimate_min_eigenvalue(a, l);
    if (!(lam_min > rank_tol_rel * lam_max)) {
        throw Error(ErrorCode::NotSPD,
                    "solve_spd: smallest eigenvalue ~" + format_g17(lam_min) +
                        " at or below rank tolerance of largest ~" + format_g17(lam_max));
    }

    const std::size_t n = a.rows();
    Matrix x(n, b.cols());
    std::vector<double> col(n);
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
        cholesky_solve_vector(l, col);
        for (std::size_t i = 0; i < n; ++i) x(i, j) = col[i];
    }
    x.check_finite("solve_spd");
    return x;
}

Matrix orthonormal_columns(const Matrix& a) {
    Matrix q = a;
    const std::size_t m = q.rows();
    const std::size_t n = q.cols();
    if (n > m) {
        throw Error(ErrorCode::DimensionMismatch,
                    "orthonormal_columns: more columns than rows");
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < j; ++i) {
                double dot = 0.0;
                for (std::size_t r = 0; r < m; ++r) dot += q(r, i) * q(r, j);
                for (std::size_t r = 0; r < m; ++r) q(r, j) -= dot * q(r, i);
            }
        }
        double norm = 0.0;
        for (std::size_t r = 0; r < m; ++r) norm += q(r, j) * q(r, j);
        norm = std::sqrt(norm);
        if (norm < 1e-12) {
            throw Error(ErrorCode::ZeroNormRow,
                        "orthonormal_columns: column " + std::to_string(j) +
                            " is linearly dependent");
        }
        for (std::size_t r = 0; r < m; ++r) q(r, j) /= norm;
    }
    return q;
}

} // namespace spherelab
