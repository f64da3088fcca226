#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eqlab/errors.hpp"

namespace eqlab {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;
using RVector = std::vector<double>;

/// Dense complex matrix, row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_)
            throw DimensionMismatch("ComplexMatrix: entry count " + std::to_string(data_.size()) +
                                    " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw DimensionMismatch("ComplexMatrix: ragged initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(std::span<const double> d) {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    /// |v><w|
    static ComplexMatrix outer(std::span<const cplx> v, std::span<const cplx> w) {
        ComplexMatrix m(v.size(), w.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = 0; j < w.size(); ++j) m(i, j) = v[i] * std::conj(w[j]);
        return m;
    }

    static ComplexMatrix projector(std::span<const cplx> v) { return outer(v, v); }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }
    bool is_square() const noexcept { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }
    std::span<const cplx> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    CVector column(std::size_t j) const {
        CVector c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& z : data_) s += std::norm(z);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& z : data_) m = std::max(m, std::abs(z));
        return m;
    }

    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(),
                           [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        check_same_shape(o, "operator+=");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        check_same_shape(o, "operator-=");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    ComplexMatrix& operator*=(cplx s) {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.cols_ != b.rows_)
            throw DimensionMismatch("matrix product: " + a.shape() + " * " + b.shape());
        ComplexMatrix r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            cplx* out = r.data_.data() + i * b.cols_;
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{}) continue;
                const cplx* brow = b.data_.data() + k * b.cols_;
                for (std::size_t j = 0; j < b.cols_; ++j) out[j] += aik * brow[j];
            }
        }
        return r;
    }

    friend CVector operator*(const ComplexMatrix& a, std::span<const cplx> v) {
        if (a.cols_ != v.size())
            throw DimensionMismatch("matrix-vector product: " + a.shape() + " * " + std::to_string(v.size()));
        CVector r(a.rows_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            cplx s = 0.0;
            const cplx* arow = a.data_.data() + i * a.cols_;
            for (std::size_t j = 0; j < a.cols_; ++j) s += arow[j] * v[j];
            r[i] = s;
        }
        return r;
    }

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

    std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

private:
    void check_same_shape(const ComplexMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw DimensionMismatch(std::string(op) + ": " + shape() + " vs " + o.shape());
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

inline CVector operator*(const ComplexMatrix& a, const CVector& v) { return a * std::span<const cplx>(v); }

/// A† v without forming A†.
inline CVector adjoint_times(const ComplexMatrix& a, std::span<const cplx> v) {
    if (a.rows() != v.size()) throw DimensionMismatch("adjoint_times: " + a.shape());
    CVector r(a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const cplx vi = v[i];
        for (std::size_t j = 0; j < a.cols(); ++j) r[j] += std::conj(a(i, j)) * vi;
    }
    return r;
}

/// Largest |M - M†| entry.
inline double hermiticity_defect(const ComplexMatrix& m) {
    if (!m.is_square()) return INFINITY;
    double d = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j) d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
    return d;
}

/// (M + M†)/2
inline ComplexMatrix hermitize(const ComplexMatrix& m) {
    ComplexMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    return r;
}

/// Largest |U†U - 1| entry.
inline double unitarity_defect(const ComplexMatrix& u) {
    const ComplexMatrix g = u.adjoint() * u;
    double d = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) d = std::max(d, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return d;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("max_abs_diff: " + a.shape() + " vs " + b.shape());
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
    return d;
}

/// tr(A B) in O(n^2).
inline cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols())
        throw DimensionMismatch("trace_of_product: " + a.shape() + " vs " + b.shape());
    cplx t = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) t += a(i, k) * b(k, i);
    return t;
}

/// (A⊗B)[(i*rB + k), (j*cB + l)] = A[i,j] * B[k,l]
inline ComplexMatrix kronecker_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.empty() || b.empty()) throw DimensionMismatch("kronecker_product: empty operand");
    const std::size_t rows = a.rows() * b.rows();
    const std::size_t cols = a.cols() * b.cols();
    require_dimension(std::max(rows, cols), "kronecker_product");
    ComplexMatrix r(rows, cols);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx{}) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return r;
}

inline CVector kronecker_product(std::span<const cplx> a, std::span<const cplx> b) {
    require_dimension(a.size() * b.size(), "kronecker_product");
    CVector r(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k) r[i * b.size() + k] = a[i] * b[k];
    return r;
}

inline double norm2(std::span<const cplx> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

inline cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) throw DimensionMismatch("inner: length mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

/// Neumaier-compensated sum; result depends only on input order.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace eqlab
