#pragma once

#include "control2/integer.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace control2 {

/// Dense row-major matrix of arbitrary-precision integers.
class IntMat {
public:
    IntMat() = default;
    IntMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static IntMat identity(std::size_t n) {
        IntMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    static IntMat from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
        IntMat m(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (std::size_t i = 0; i < m.rows_; ++i) {
            if (rows[i].size() != m.cols_) throw precondition_error("IntMat::from_rows: ragged rows");
            for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Int& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Int& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    void set_column(std::size_t j, const std::vector<std::int64_t>& v) {
        if (v.size() != rows_) throw precondition_error("IntMat::set_column: length mismatch");
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
    }

    IntMat operator*(const IntMat& o) const {
        if (cols_ != o.rows_)
            throw precondition_error("IntMat product: " + shape() + " times " + o.shape());
        IntMat out(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const Int& x = (*this)(i, k);
                if (x.is_zero()) continue;
                const Int* orow = &o.data_[k * o.cols_];
                Int* out_row = &out.data_[i * o.cols_];
                for (std::size_t j = 0; j < o.cols_; ++j)
                    if (!orow[j].is_zero()) out_row[j] += x * orow[j];
            }
        return out;
    }

    IntMat operator+(const IntMat& o) const {
        require_same_shape(o);
        IntMat out = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += o.data_[i];
        return out;
    }

    IntMat operator-(const IntMat& o) const {
        require_same_shape(o);
        IntMat out = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= o.data_[i];
        return out;
    }

    IntMat scaled(const Int& k) const {
        IntMat out = *this;
        for (Int& x : out.data_) x *= k;
        return out;
    }

    IntMat transpose() const {
        IntMat out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    bool operator==(const IntMat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    bool is_identity() const { return rows_ == cols_ && *this == identity(rows_); }
    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const Int& x) { return x.is_zero(); });
    }

    /// Order-sensitive 64-bit FNV-1a digest of shape and entries.
    std::uint64_t digest() const {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](const std::string& s) {
            for (unsigned char ch : s) {
                h ^= ch;
                h *= 1099511628211ull;
            }
            h ^= 0xff;
            h *= 1099511628211ull;
        };
        mix(std::to_string(rows_) + "x" + std::to_string(cols_));
        for (const Int& x : data_) mix(x.str());
        return h;
    }

    std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < rows_; ++i) {
            s += i ? "; " : "[";
            for (std::size_t j = 0; j < cols_; ++j) s += (j ? " " : "") + (*this)(i, j).str();
        }
        return s + "]";
    }

    // Elementary operations used by the Smith form.
    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
    }
    void swap_cols(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, i), (*this)(r, j));
    }
    /// row_dst += k * row_src
    void add_row(std::size_t dst, std::size_t src, const Int& k) {
        if (k.is_zero()) return;
        for (std::size_t c = 0; c < cols_; ++c)
            if (!(*this)(src, c).is_zero()) (*this)(dst, c) += k * (*this)(src, c);
    }
    /// col_dst += k * col_src
    void add_col(std::size_t dst, std::size_t src, const Int& k) {
        if (k.is_zero()) return;
        for (std::size_t r = 0; r < rows_; ++r)
            if (!(*this)(r, src).is_zero()) (*this)(r, dst) += k * (*this)(r, src);
    }
    void negate_row(std::size_t i) {
        for (std::size_t c = 0; c < cols_; ++c) (*this)(i, c) = -(*this)(i, c);
    }

private:
    void require_same_shape(const IntMat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw precondition_error("IntMat shape mismatch: " + shape() + " vs " + o.shape());
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Int> data_;
};

/// L * A * R = D with L, R unimodular and D diagonal, d_i | d_{i+1}, d_i >= 0.
struct SmithForm {
    IntMat D, L, R;
    std::vector<Int> divisors;  // the nonzero diagonal entries, in order
    std::size_t rank() const { return divisors.size(); }
};

/// Smith normal form over Z, re-verified by multiplication before returning.
inline SmithForm smith_normal_form(const IntMat& A) {
    const std::size_t m = A.rows(), n = A.cols();
    IntMat D = A;
    IntMat L = IntMat::identity(m);
    IntMat R = IntMat::identity(n);

    auto smallest_in = [&](std::size_t t, std::size_t& pi, std::size_t& pj) {
        bool found = false;
        Int best;
        for (std::size_t i = t; i < m; ++i)
            for (std::size_t j = t; j < n; ++j) {
                const Int& x = D(i, j);
                if (x.is_zero()) continue;
                Int ax = abs(x);
                if (!found || ax < best) {
                    best = std::move(ax);
                    pi = i;
                    pj = j;
                    found = true;
                    if (best == 1) return true;
                }
            }
        return found;
    };

    std::vector<Int> divisors;
    for (std::size_t t = 0; t < std::min(m, n); ++t) {
        std::size_t pi = t, pj = t;
        if (!smallest_in(t, pi, pj)) break;
        D.swap_rows(t, pi);
        L.swap_rows(t, pi);
        D.swap_cols(t, pj);
        R.swap_cols(t, pj);

        for (;;) {
            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (D(i, t).is_zero()) continue;
                const Int q = D(i, t) / D(t, t);
                D.add_row(i, t, -q);
                L.add_row(i, t, -q);
                if (!D(i, t).is_zero()) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (D(t, j).is_zero()) continue;
                const Int q = D(t, j) / D(t, t);
                D.add_col(j, t, -q);
                R.add_col(j, t, -q);
                if (!D(t, j).is_zero()) clean = false;
            }
            if (!clean) {
                // Move the smallest remainder in row/column t into the pivot.
                std::size_t bi = t, bj = t;
                Int best = abs(D(t, t));
                for (std::size_t i = t + 1; i < m; ++i)
                    if (!D(i, t).is_zero() && abs(D(i, t)) < best) best = abs(D(i, t)), bi = i, bj = t;
                for (std::size_t j = t + 1; j < n; ++j)
                    if (!D(t, j).is_zero() && abs(D(t, j)) < best) best = abs(D(t, j)), bi = t, bj = j;
                D.swap_rows(t, bi);
                L.swap_rows(t, bi);
                D.swap_cols(t, bj);
                R.swap_cols(t, bj);
                continue;
            }
            // Row and column are clear; enforce divisibility of the rest.
            bool divisible = true;
            for (std::size_t i = t + 1; i < m && divisible; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (!D(i, j).is_zero() && D(i, j) % D(t, t) != 0) {
                        D.add_row(t, i, 1);
                        L.add_row(t, i, 1);
                        divisible = false;
                        break;
                    }
            if (divisible) break;
        }
        if (D(t, t) < 0) {
            D.negate_row(t);
            L.negate_row(t);
        }
        divisors.push_back(D(t, t));
    }

    if (L * A * R != D) throw consistency_error("smith_normal_form: L*A*R != D");
    return {std::move(D), std::move(L), std::move(R), std::move(divisors)};
}

/// Whether v (a column with A.rows() entries) lies in the column span of A,
/// given the Smith form of A.
inline bool in_column_span(const SmithForm& snf, const std::vector<Int>& v) {
    const IntMat& L = snf.L;
    if (v.size() != L.cols()) throw precondition_error("in_column_span: length mismatch");
    for (std::size_t i = 0; i < L.rows(); ++i) {
        Int y = 0;
        for (std::size_t j = 0; j < L.cols(); ++j)
            if (!L(i, j).is_zero() && !v[j].is_zero()) y += L(i, j) * v[j];
        if (i < snf.rank()) {
            if (y % snf.divisors[i] != 0) return false;
        } else if (!y.is_zero()) {
            return false;
        }
    }
    return true;
}

}  // namespace control2
