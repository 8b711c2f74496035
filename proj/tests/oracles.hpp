#pragma once

// Brute-force references used by several test files.

#include "control2/control2.hpp"

#include <cstdint>
#include <random>

namespace oracle {

using control2::Mat2;
using control2::SubgroupSpec;

/// Counts SL2(Z/M) and the image of G in it by running over all of (Z/M)^4.
struct Counts {
    std::int64_t sl2 = 0;
    std::int64_t image = 0;
};

inline Counts count_mod(const SubgroupSpec& g, std::int64_t M) {
    Counts out;
    auto md = [M](std::int64_t x) { return ((x % M) + M) % M; };
    const std::int64_t m1 = g.gamma1_modulus(), m0 = g.gamma0_modulus();
    for (std::int64_t a = 0; a < M; ++a)
        for (std::int64_t b = 0; b < M; ++b)
            for (std::int64_t c = 0; c < M; ++c)
                for (std::int64_t d = 0; d < M; ++d) {
                    if (md(a * d - b * c) != 1 % M) continue;
                    ++out.sl2;
                    if (a % m1 == 1 % m1 && d % m1 == 1 % m1 && c % m1 == 0 && c % m0 == 0 &&
                        (!g.upper0 || b % 2 == 0))
                        ++out.image;
                }
    return out;
}

/// [SL2(Z) : G] from the counts modulo the level of G.
inline std::int64_t brute_index(const SubgroupSpec& g) {
    const Counts c = count_mod(g, g.gamma0_modulus());
    return c.sl2 / c.image;
}

/// Random product of sigma, tau and T^{±1}.
inline Mat2 random_sl2(std::mt19937_64& rng, int length) {
    static const Mat2 pieces[] = {Mat2::sigma(), Mat2::tau(), Mat2::translation(1), Mat2::translation(-1),
                                  Mat2::tau_inverse()};
    Mat2 m;
    for (int i = 0; i < length; ++i) m *= pieces[rng() % 5];
    return m;
}

/// Random element of the group generated by a presentation's generators,
/// together with its exponent vector.
inline std::pair<Mat2, std::vector<std::int64_t>> random_member(const control2::FreePresentation& p,
                                                                std::mt19937_64& rng, int length) {
    std::vector<std::int64_t> exps(p.rank(), 0);
    Mat2 m;
    for (int i = 0; i < length; ++i) {
        const std::size_t g = rng() % p.rank();
        if (rng() % 2) {
            m *= p.gens()[g];
            ++exps[g];
        } else {
            m *= p.gens()[g].inverse();
            --exps[g];
        }
    }
    return {m, exps};
}

}  // namespace oracle
