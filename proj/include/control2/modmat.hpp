#pragma once

#include "control2/intmat.hpp"

#include <bit>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace control2 {

/// Arithmetic in Z/2^k, 1 <= k <= 64, on uint64_t. Products and sums wrap
/// modulo 2^64, so masking once at the end of a computation is exact.
class Ring2k {
public:
    explicit Ring2k(int k) : k_(k) {
        if (k < 1 || k > 64) throw precondition_error("precision k must lie in [1, 64], got " + std::to_string(k));
        mask_ = k == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
    }
    int k() const { return k_; }
    std::uint64_t mask() const { return mask_; }
    std::uint64_t reduce(std::uint64_t x) const { return x & mask_; }
    std::uint64_t reduce(const Int& x) const {
        if (x >= std::numeric_limits<std::int64_t>::min() && x <= std::numeric_limits<std::int64_t>::max())
            return static_cast<std::uint64_t>(static_cast<std::int64_t>(x)) & mask_;
        static const Int two64 = Int(1) << 64;
        Int r = x % two64;
        if (r < 0) r += two64;
        return static_cast<std::uint64_t>(r) & mask_;
    }
    /// 2-adic valuation, k for zero.
    int valuation(std::uint64_t x) const {
        x &= mask_;
        return x == 0 ? k_ : std::countr_zero(x);
    }
    /// Inverse of an odd residue.
    static std::uint64_t unit_inverse(std::uint64_t x) {
        std::uint64_t y = x;  // correct to 3 bits
        for (int i = 0; i < 5; ++i) y *= 2 - x * y;
        return y;
    }

    bool operator==(const Ring2k&) const = default;

private:
    int k_;
    std::uint64_t mask_;
};

/// Dense matrix over Z/2^k.
class ModMat {
public:
    ModMat(std::size_t rows, std::size_t cols, int k) : ring_(k), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

    static ModMat identity(std::size_t n, int k) {
        ModMat m(n, n, k);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    static ModMat from(const IntMat& a, int k) {
        ModMat m(a.rows(), a.cols(), k);
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = m.ring_.reduce(a(i, j));
        return m;
    }

    const Ring2k& ring() const { return ring_; }
    int k() const { return ring_.k(); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::uint64_t& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    std::uint64_t operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    ModMat operator*(const ModMat& o) const {
        require_ring(o);
        if (cols_ != o.rows_) throw precondition_error("ModMat product: " + shape() + " times " + o.shape());
        ModMat out(rows_, o.cols_, k());
        for (std::size_t i = 0; i < rows_; ++i) {
            std::uint64_t* orow = &out.data_[i * o.cols_];
            for (std::size_t l = 0; l < cols_; ++l) {
                const std::uint64_t x = data_[i * cols_ + l];
                if (x == 0) continue;
                const std::uint64_t* brow = &o.data_[l * o.cols_];
                for (std::size_t j = 0; j < o.cols_; ++j) orow[j] += x * brow[j];
            }
        }
        out.normalize();
        return out;
    }

    ModMat operator+(const ModMat& o) const {
        require_same(o);
        ModMat out = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += o.data_[i];
        out.normalize();
        return out;
    }

    ModMat operator-(const ModMat& o) const {
        require_same(o);
        ModMat out = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= o.data_[i];
        out.normalize();
        return out;
    }

    ModMat pow(std::uint64_t e) const {
        if (rows_ != cols_) throw precondition_error("ModMat::pow: not square");
        ModMat result = identity(rows_, k());
        ModMat base = *this;
        while (e) {
            if (e & 1) result = result * base;
            e >>= 1;
            if (e) base = base * base;
        }
        return result;
    }

    ModMat transpose() const {
        ModMat out(cols_, rows_, k());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    /// Reduction to a lower precision.
    ModMat truncated(int k) const {
        if (k > this->k()) throw precondition_error("ModMat::truncated: cannot raise precision");
        ModMat out(rows_, cols_, k);
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = out.ring_.reduce(data_[i]);
        return out;
    }

    /// Columns [first, first + count).
    ModMat columns(std::size_t first, std::size_t count) const {
        ModMat out(rows_, count, k());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
        return out;
    }

    /// Rows [first, first + count).
    ModMat row_block(std::size_t first, std::size_t count) const {
        ModMat out(count, cols_, k());
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(first + i, j);
        return out;
    }

    bool operator==(const ModMat& o) const {
        return ring_ == o.ring_ && rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    bool is_zero() const {
        for (std::uint64_t x : data_)
            if (x) return false;
        return true;
    }
    bool is_identity() const { return rows_ == cols_ && *this == identity(rows_, k()); }

    std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

    // Elementary operations.
    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
    }
    void swap_cols(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, i), (*this)(r, j));
    }
    void add_row(std::size_t dst, std::size_t src, std::uint64_t f) {
        if ((f & ring_.mask()) == 0) return;
        for (std::size_t c = 0; c < cols_; ++c) (*this)(dst, c) = ring_.reduce((*this)(dst, c) + f * (*this)(src, c));
    }
    void add_col(std::size_t dst, std::size_t src, std::uint64_t f) {
        if ((f & ring_.mask()) == 0) return;
        for (std::size_t r = 0; r < rows_; ++r) (*this)(r, dst) = ring_.reduce((*this)(r, dst) + f * (*this)(r, src));
    }
    void scale_row(std::size_t i, std::uint64_t f) {
        for (std::size_t c = 0; c < cols_; ++c) (*this)(i, c) = ring_.reduce((*this)(i, c) * f);
    }
    void scale_col(std::size_t j, std::uint64_t f) {
        for (std::size_t r = 0; r < rows_; ++r) (*this)(r, j) = ring_.reduce((*this)(r, j) * f);
    }

private:
    void normalize() {
        for (std::uint64_t& x : data_) x &= ring_.mask();
    }
    void require_ring(const ModMat& o) const {
        if (!(ring_ == o.ring_)) throw precondition_error("ModMat: precision mismatch");
    }
    void require_same(const ModMat& o) const {
        require_ring(o);
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw precondition_error("ModMat shape mismatch: " + shape() + " vs " + o.shape());
    }

    Ring2k ring_;
    std::size_t rows_, cols_;
    std::vector<std::uint64_t> data_;
};

/// Smith form over the local ring Z/2^k: L A R = D, D(i, i) = 2^valuations[i]
/// for i < rank, zero afterwards. Linv is L^-1.
struct ModSmithForm {
    ModMat D, L, Linv, R;
    std::vector<int> valuations;  // ascending, each < k
    std::size_t rank() const { return valuations.size(); }
    std::size_t unit_count() const {
        std::size_t n = 0;
        for (int v : valuations) n += (v == 0);
        return n;
    }
};

inline ModSmithForm smith_normal_form(const ModMat& A) {
    const Ring2k& ring = A.ring();
    const std::size_t m = A.rows(), n = A.cols();
    ModMat D = A;
    ModMat L = ModMat::identity(m, ring.k());
    ModMat Linv = ModMat::identity(m, ring.k());
    ModMat R = ModMat::identity(n, ring.k());
    std::vector<int> vals;

    for (std::size_t t = 0; t < std::min(m, n); ++t) {
        int best = ring.k();
        std::size_t pi = t, pj = t;
        for (std::size_t i = t; i < m && best > 0; ++i)
            for (std::size_t j = t; j < n; ++j) {
                const int v = ring.valuation(D(i, j));
                if (v < best) {
                    best = v;
                    pi = i;
                    pj = j;
                    if (v == 0) break;
                }
            }
        if (best == ring.k()) break;
        D.swap_rows(t, pi);
        L.swap_rows(t, pi);
        Linv.swap_cols(t, pi);
        D.swap_cols(t, pj);
        R.swap_cols(t, pj);

        // Make the pivot exactly 2^best.
        const std::uint64_t unit = D(t, t) >> best;
        const std::uint64_t uinv = Ring2k::unit_inverse(unit);
        D.scale_row(t, uinv);
        L.scale_row(t, uinv);
        Linv.scale_col(t, unit);

        for (std::size_t i = t + 1; i < m; ++i) {
            const std::uint64_t f = D(i, t) >> best;
            if (ring.reduce(D(i, t)) == 0) continue;
            D.add_row(i, t, -f);
            L.add_row(i, t, -f);
            Linv.add_col(t, i, f);
        }
        for (std::size_t j = t + 1; j < n; ++j) {
            if (D(t, j) == 0) continue;
            const std::uint64_t f = D(t, j) >> best;
            D.add_col(j, t, -f);
            R.add_col(j, t, -f);
        }
        vals.push_back(best);
    }

    if (!(L * A * R == D) || !(L * Linv).is_identity())
        throw consistency_error("smith_normal_form (mod 2^k): verification failed");
    return {std::move(D), std::move(L), std::move(Linv), std::move(R), std::move(vals)};
}

/// Rank of the reduction modulo 2.
inline std::size_t rank_mod2(const ModMat& A) { return smith_normal_form(A.truncated(1)).rank(); }

}  // namespace control2
