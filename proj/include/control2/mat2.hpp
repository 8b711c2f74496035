#pragma once

#include "control2/integer.hpp"

#include <array>
#include <string>

namespace control2 {

/// 2x2 integer matrix with exact entries. Group elements have determinant 1;
/// the Hecke element diag(1, 2) is the only determinant-2 value in use.
struct Mat2 {
    Int a{1}, b{0}, c{0}, d{1};

    static Mat2 identity() { return {}; }
    /// Order 4 in SL2(Z), order 2 in the projective group.
    static Mat2 sigma() { return {0, -1, 1, 0}; }
    /// Order 3.
    static Mat2 tau() { return {0, -1, 1, -1}; }
    static Mat2 tau_inverse() { return {-1, 1, -1, 0}; }
    static Mat2 translation(const Int& k) { return {1, k, 0, 1}; }
    static Mat2 hecke_t() { return {1, 0, 0, 2}; }

    Int det() const { return a * d - b * c; }

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2& operator*=(const Mat2& o) { return *this = *this * o; }

    Mat2 operator-() const { return {-a, -b, -c, -d}; }

    bool operator==(const Mat2&) const = default;

    /// Inverse of a determinant-1 matrix.
    Mat2 inverse() const {
        if (det() != 1) throw precondition_error("Mat2::inverse: determinant is not 1");
        return {d, -b, -c, a};
    }

    /// Representative of {m, -m} with c > 0, or c = 0 and a > 0.
    Mat2 canonical() const {
        if (c < 0 || (c == 0 && a < 0)) return -*this;
        return *this;
    }

    bool equal_up_to_sign(const Mat2& o) const { return canonical() == o.canonical(); }

    std::string str() const {
        return "(" + a.str() + " " + b.str() + "; " + c.str() + " " + d.str() + ")";
    }
};

/// A -> t A t^-1 = (a, b/2; 2c, d); needs b even.
inline Mat2 conjugate_by_t(const Mat2& m) {
    if (m.b % 2 != 0) throw precondition_error("conjugate_by_t: upper-right entry is odd " + m.str());
    return {m.a, m.b / 2, m.c * 2, m.d};
}

/// A -> t^-1 A t = (a, 2b; c/2, d); needs c even.
inline Mat2 conjugate_by_t_inverse(const Mat2& m) {
    if (m.c % 2 != 0) throw precondition_error("conjugate_by_t_inverse: lower-left entry is odd " + m.str());
    return {m.a, m.b * 2, m.c / 2, m.d};
}

/// Entries reduced into [0, modulus).
using Residues = std::array<std::int64_t, 4>;

inline Residues reduce(const Mat2& m, std::int64_t modulus) {
    return {floor_mod(m.a, modulus), floor_mod(m.b, modulus), floor_mod(m.c, modulus),
            floor_mod(m.d, modulus)};
}

inline Residues mul_mod(const Residues& x, const Residues& y, std::int64_t modulus) {
    return {(x[0] * y[0] + x[1] * y[2]) % modulus, (x[0] * y[1] + x[1] * y[3]) % modulus,
            (x[2] * y[0] + x[3] * y[2]) % modulus, (x[2] * y[1] + x[3] * y[3]) % modulus};
}

}  // namespace control2
