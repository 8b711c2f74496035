#pragma once

#include "control2/modmat.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace control2 {

inline constexpr int default_precision = 16;
inline constexpr std::size_t default_idempotent_iterations = 20000;

/// e = lim U^(n!) modulo 2^k. The terms X_n = U^(n!) are generated by
/// X_{n+1} = X_n^(n+1); once some X_n is idempotent every later term equals
/// it, so idempotence is the stopping test.
inline ModMat ordinary_idempotent(const ModMat& U, std::size_t max_iterations = default_idempotent_iterations) {
    if (U.rows() != U.cols()) throw precondition_error("ordinary_idempotent: U is not square");
    ModMat x = U;
    for (std::size_t n = 1;; ++n) {
        ModMat sq = x * x;
        if (sq == x) return x;
        if (n >= max_iterations)
            throw resource_limit_error("ordinary_idempotent: U^(n!) not stable after " + std::to_string(n) +
                                       " iterations");
        // x^(n+1) = sq * x^(n-1)
        x = n == 1 ? sq : sq * x.pow(n - 1);
    }
}

/// Direct summand of (Z/2^k)^n on which U acts invertibly.
struct OrdinaryModule {
    int k;
    ModMat U;       // n x n
    ModMat e;       // idempotent, commutes with U
    ModMat basis;   // n x d, columns span e (Z/2^k)^n
    ModMat coords;  // d x n, coords * x = coordinates of e x in `basis`

    std::size_t n() const { return U.rows(); }
    std::size_t ord_rank() const { return basis.cols(); }

    /// Matrix of an endomorphism commuting with e, restricted to the
    /// ordinary part.
    ModMat restrict(const ModMat& f) const { return coords * f * basis; }
};

/// Ordinary part via the Smith form of e over Z/2^k. An idempotent has only
/// unit and zero elementary divisors; anything else means the supplied
/// matrix was not computed at a consistent precision.
inline OrdinaryModule ordinary_part(const ModMat& U, std::size_t max_iterations = default_idempotent_iterations) {
    ModMat e = ordinary_idempotent(U, max_iterations);
    const int k = U.k();
    ModSmithForm snf = smith_normal_form(e);
    for (int v : snf.valuations)
        if (v != 0)
            throw precision_error("ordinary_part: non-unit elementary divisor 2^" + std::to_string(v) +
                                  " of the idempotent at k = " + std::to_string(k));
    const std::size_t d = snf.rank();
    ModMat basis = snf.Linv.columns(0, d);
    ModMat coords = snf.L.row_block(0, d) * e;
    if (!(coords * basis).is_identity() || !(e * basis == basis))
        throw consistency_error("ordinary_part: basis and coordinate maps disagree");
    return {k, U, std::move(e), std::move(basis), std::move(coords)};
}

/// Finite module over Z/2^k given as a sum of cyclic factors Z/2^e; a factor
/// with e = k is indistinguishable from a free summand at this precision.
struct PresentedModule {
    int k = 0;
    std::vector<int> exponents;  // ascending, each in [1, k]

    std::size_t free_rank() const {
        return static_cast<std::size_t>(std::count(exponents.begin(), exponents.end(), k));
    }
    bool is_free() const { return free_rank() == exponents.size(); }
    /// log2 of the cardinality.
    std::int64_t log2_order() const {
        std::int64_t s = 0;
        for (int e : exponents) s += e;
        return s;
    }
    std::string str() const {
        std::string out;
        for (int e : exponents) out += (out.empty() ? "" : " + ") + std::string("Z/2^") + std::to_string(e);
        return out.empty() ? "0" : out;
    }
    bool operator==(const PresentedModule&) const = default;
};

inline PresentedModule free_module(std::size_t rank, int k) { return {k, std::vector<int>(rank, k)}; }

/// (Z/2^k)^cols / image(A) for an m x cols matrix A, through its Smith form.
inline PresentedModule cokernel(const ModMat& A) {
    const int k = A.k();
    ModSmithForm snf = smith_normal_form(A);
    PresentedModule out{k, {}};
    for (int v : snf.valuations)
        if (v > 0) out.exponents.push_back(v);
    for (std::size_t i = snf.rank(); i < A.rows(); ++i) out.exponents.push_back(k);
    std::sort(out.exponents.begin(), out.exponents.end());
    return out;
}

/// Quotient of the ordinary part by the image of (gamma - 1).
inline PresentedModule coinvariants(const OrdinaryModule& m, const ModMat& gamma) {
    if (!(gamma * m.U == m.U * gamma)) throw precondition_error("coinvariants: gamma does not commute with U");
    if (!(gamma * m.e == m.e * gamma))
        throw precondition_error("coinvariants: gamma does not preserve the ordinary part");
    const ModMat g = m.restrict(gamma);
    return cokernel(g - ModMat::identity(g.rows(), g.k()));
}

/// Equal multisets of elementary divisors at the same precision.
inline bool isomorphic(const PresentedModule& a, const PresentedModule& b) {
    if (a.k != b.k) throw precondition_error("isomorphic: precisions differ");
    return a.exponents == b.exponents;
}

}  // namespace control2
