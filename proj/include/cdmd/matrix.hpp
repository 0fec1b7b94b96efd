#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "cdmd/common.hpp"

namespace cdmd {

/// Dense real matrix, binary64 entries in row-major order.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}
    /// Takes ownership of `entries` (row-major); rejects NaN/Inf.
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return entries_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    std::vector<double>& entries() { return entries_; }
    const std::vector<double>& entries() const { return entries_; }

    bool all_finite() const;

    std::vector<double> column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const double> values);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
};

/// Dense complex matrix, (re, im) binary64 pairs in row-major order.
class ComplexMatrix {
public:
    using value_type = std::complex<double>;

    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, value_type(0.0, 0.0)) {}
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<value_type> entries);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix from_real(const Matrix& m);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return entries_.empty(); }

    value_type& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const value_type& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    std::vector<value_type>& entries() { return entries_; }
    const std::vector<value_type>& entries() const { return entries_; }

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<value_type> entries_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);
std::vector<double> multiply(const Matrix& m, std::span<const double> x);

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix multiply(const Matrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& m);
std::vector<std::complex<double>> multiply(const ComplexMatrix& m,
                                           std::span<const std::complex<double>> x);

double frobenius_norm(const Matrix& m);
double inf_norm(const Matrix& m);
double norm2(std::span<const double> x);
double norm2(std::span<const std::complex<double>> x);

} // namespace cdmd
