#pragma once

#include <cstddef>
#include <vector>

#include "spherelab/error.hpp"

namespace spherelab {

// Dense row-major matrix of 64-bit floats. Construction enforces the
// two invariants everything downstream relies on: at least one row and
// one column, and every entry finite.
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    const std::vector<double>& data() const { return data_; }

    // Re-checks finiteness after in-place mutation through operator().
    void check_finite(const char* context) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

Matrix transpose(const Matrix& a);
Matrix multiply(const Matrix& a, const Matrix& b);    // A * B
Matrix multiply_nt(const Matrix& a, const Matrix& b); // A * B^T
Matrix multiply_tn(const Matrix& a, const Matrix& b); // A^T * B
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double c);
void accumulate(Matrix& a, const Matrix& b); // a += b, in place
Matrix hstack(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
double row_norm(const Matrix& a, std::size_t i);
double dot_rows(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j);

} // namespace spherelab
