#pragma once

// Test-side reference implementations. Everything here is written as the
// most direct possible algorithm (double loops, Householder QR, explicit
// rank counting) and shares no code with the library, so agreement is
// evidence rather than tautology.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "spherelab/matrix.hpp"

namespace oracle {

using spherelab::Matrix;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Matrix random_matrix(std::mt19937_64& g, std::size_t rows, std::size_t cols,
                            double sd = 1.0) {
    std::normal_distribution<double> n(0.0, sd);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = n(g);
    return m;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

inline double fro(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            m = std::max(m, std::fabs(a(i, j) - b(i, j)));
    return m;
}

// Least squares min ||A X - B||_F by Householder QR with back substitution.
// Requires rows >= cols and full column rank.
inline Matrix lstsq(Matrix a, Matrix b) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const std::size_t k = b.cols();
    for (std::size_t j = 0; j < n; ++j) {
        double norm2 = 0.0;
        for (std::size_t i = j; i < m; ++i) norm2 += a(i, j) * a(i, j);
        const double norm = std::sqrt(norm2);
        if (norm == 0.0) continue;
        const double alpha = a(j, j) > 0.0 ? -norm : norm;
        std::vector<double> v(m - j);
        v[0] = a(j, j) - alpha;
        for (std::size_t i = j + 1; i < m; ++i) v[i - j] = a(i, j);
        double vtv = 0.0;
        for (double x : v) vtv += x * x;
        if (vtv == 0.0) continue;
        for (std::size_t c = j; c < n; ++c) {
            double dot = 0.0;
            for (std::size_t i = j; i < m; ++i) dot += v[i - j] * a(i, c);
            const double f = 2.0 * dot / vtv;
            for (std::size_t i = j; i < m; ++i) a(i, c) -= f * v[i - j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            double dot = 0.0;
            for (std::size_t i = j; i < m; ++i) dot += v[i - j] * b(i, c);
            const double f = 2.0 * dot / vtv;
            for (std::size_t i = j; i < m; ++i) b(i, c) -= f * v[i - j];
        }
    }
    Matrix x(n, k);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t ii = n; ii-- > 0;) {
            double s = b(ii, c);
            for (std::size_t jj = ii + 1; jj < n; ++jj) s -= a(ii, jj) * x(jj, c);
            x(ii, c) = s / a(ii, ii);
        }
    }
    return x;
}

// Angular form of the pairwise energy for unit rows: for each ordered pair
// the squared distance is 2 (1 - cos), evaluated straight from dot products.
inline double angular_energy(const Matrix& w, double s) {
    const std::size_t n = w.rows();
    std::vector<double> norms(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double t = 0.0;
        for (std::size_t j = 0; j < w.cols(); ++j) t += w(i, j) * w(i, j);
        norms[i] = std::sqrt(t);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double dot = 0.0;
            for (std::size_t c = 0; c < w.cols(); ++c) dot += w(i, c) * w(j, c);
            const double cosine = dot / (norms[i] * norms[j]);
            const double d2 = 2.0 * (1.0 - cosine);
            total += s == 0.0 ? -0.5 * std::log(d2) : std::pow(d2, -0.5 * s);
        }
    }
    return total;
}

// Average ranks by direct counting: 1 + (# strictly smaller) + (# equal)/2
// where the tie count excludes the element itself.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::size_t smaller = 0;
        std::size_t equal = 0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (j == i) continue;
            if (v[j] < v[i]) ++smaller;
            if (v[j] == v[i]) ++equal;
        }
        r[i] = 1.0 + static_cast<double>(smaller) + 0.5 * static_cast<double>(equal);
    }
    return r;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

inline double spearman_ref(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(average_ranks(x), average_ranks(y));
}

} // namespace oracle
