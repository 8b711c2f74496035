#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace control2;

namespace {

IntMat random_intmat(std::mt19937_64& rng, std::size_t m, std::size_t n, std::int64_t bound) {
    std::uniform_int_distribution<std::int64_t> dist(-bound, bound);
    IntMat a(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = dist(rng);
    return a;
}

ModMat random_modmat(std::mt19937_64& rng, std::size_t n, int k) {
    ModMat a(n, n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = a.ring().reduce(rng());
    return a;
}

ModMat diag(std::vector<std::uint64_t> d, int k) {
    ModMat m(d.size(), d.size(), k);
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = m.ring().reduce(d[i]);
    return m;
}

Int det_unimodular_check(const IntMat& m) {
    // |det| of a square matrix as the product of its elementary divisors
    const SmithForm s = smith_normal_form(m);
    if (s.rank() < m.rows()) return 0;
    Int p = 1;
    for (const Int& d : s.divisors) p *= d;
    return p;
}

}  // namespace

TEST(smith_normal_form, examples) {
    const SmithForm a = smith_normal_form(IntMat::from_rows({{1, 0}, {0, 2}}));
    EXPECT_EQ(a.D, IntMat::from_rows({{1, 0}, {0, 2}}));
    const SmithForm b = smith_normal_form(IntMat::from_rows({{2, 4}, {6, 8}}));
    EXPECT_EQ(b.D, IntMat::from_rows({{2, 0}, {0, 4}}));
    const SmithForm z = smith_normal_form(IntMat(3, 2));
    EXPECT_TRUE(z.D.is_zero());
    EXPECT_EQ(z.rank(), 0u);
    const SmithForm c = smith_normal_form(IntMat::from_rows({{2, 0}, {0, 3}}));
    EXPECT_EQ(c.divisors, (std::vector<Int>{1, 6}));
}

TEST(smith_normal_form, random_reverification) {
    std::mt19937_64 rng(42);
    for (int it = 0; it < 1000; ++it) {
        const std::size_t m = 1 + rng() % 8, n = 1 + rng() % 8;
        const IntMat A = random_intmat(rng, m, n, 1000);
        const SmithForm s = smith_normal_form(A);
        ASSERT_EQ(s.L * A * s.R, s.D);
        for (std::size_t i = 0; i + 1 < s.rank(); ++i) ASSERT_EQ(s.divisors[i + 1] % s.divisors[i], 0);
        for (const Int& d : s.divisors) ASSERT_GT(d, 0);
        ASSERT_EQ(det_unimodular_check(s.L), 1);
        ASSERT_EQ(det_unimodular_check(s.R), 1);
    }
}

TEST(smith_normal_form, column_span) {
    const IntMat A = IntMat::from_rows({{2, 0}, {0, 4}, {0, 0}});
    const SmithForm s = smith_normal_form(A);
    EXPECT_TRUE(in_column_span(s, {2, 4, 0}));
    EXPECT_TRUE(in_column_span(s, {-6, 8, 0}));
    EXPECT_FALSE(in_column_span(s, {1, 0, 0}));
    EXPECT_FALSE(in_column_span(s, {0, 2, 0}));
    EXPECT_FALSE(in_column_span(s, {0, 0, 1}));
}

TEST(ring2k, unit_inverse_and_reduce) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t x = rng() | 1;
        ASSERT_EQ(x * Ring2k::unit_inverse(x), 1u);
    }
    const Ring2k r(4);
    EXPECT_EQ(r.reduce(Int(-1)), 15u);
    EXPECT_EQ(r.reduce(Int(1) << 80), 0u);
    EXPECT_EQ(r.reduce((Int(1) << 80) + 19), 3u);
    EXPECT_EQ(r.valuation(8), 3);
    EXPECT_EQ(r.valuation(16), 4);
    EXPECT_THROW(Ring2k(0), precondition_error);
    EXPECT_THROW(Ring2k(65), precondition_error);
}

TEST(mod_smith_form, random_reverification) {
    std::mt19937_64 rng(77);
    for (int it = 0; it < 500; ++it) {
        const int k = 1 + static_cast<int>(rng() % 64);
        const std::size_t n = 1 + rng() % 8;
        ModMat A = random_modmat(rng, n, k);
        // force some 2-divisibility
        if (it % 2) A = A * diag(std::vector<std::uint64_t>(n, 2 + (rng() % 3) * 2), k);
        const ModSmithForm s = smith_normal_form(A);
        ASSERT_EQ(s.L * A * s.R, s.D);
        ASSERT_TRUE((s.L * s.Linv).is_identity());
        ASSERT_TRUE(std::is_sorted(s.valuations.begin(), s.valuations.end()));
    }
}

TEST(ordinary_idempotent, examples) {
    EXPECT_TRUE(ordinary_idempotent(ModMat::identity(3, 16)).is_identity());
    EXPECT_TRUE(ordinary_idempotent(diag({2, 2, 2}, 16)).is_zero());
    EXPECT_EQ(ordinary_idempotent(diag({3, 2}, 4)), diag({1, 0}, 4));
    EXPECT_THROW(ordinary_idempotent(ModMat(2, 3, 8)), precondition_error);
}

TEST(ordinary_idempotent, random_properties) {
    std::mt19937_64 rng(99);
    for (int it = 0; it < 200; ++it) {
        const std::size_t n = 1 + rng() % 8;
        const ModMat U = random_modmat(rng, n, 32);
        const ModMat e = ordinary_idempotent(U);
        ASSERT_EQ(e * e, e);
        ASSERT_EQ(e * U, U * e);
        ASSERT_EQ(ordinary_idempotent(U.truncated(16)), e.truncated(16));
        ASSERT_EQ(ordinary_idempotent(U.truncated(8)), e.truncated(8));
        const OrdinaryModule m = ordinary_part(U);
        ASSERT_EQ(m.ord_rank(), ordinary_part(U.transpose()).ord_rank());
        ASSERT_EQ(rank_mod2(m.restrict(U)), m.ord_rank());
        ASSERT_EQ(m.basis * m.coords, e);
    }
}

TEST(ordinary_part, examples) {
    EXPECT_EQ(ordinary_part(ModMat::identity(3, 16)).ord_rank(), 3u);
    EXPECT_EQ(ordinary_part(diag({3, 2}, 16)).ord_rank(), 1u);
    EXPECT_EQ(ordinary_part(diag({2, 4}, 16)).ord_rank(), 0u);
}

TEST(ordinary_part, direct_sum) {
    std::mt19937_64 rng(5);
    for (int it = 0; it < 100; ++it) {
        const std::size_t a = 1 + rng() % 4, b = 1 + rng() % 4;
        const ModMat A = random_modmat(rng, a, 16), B = random_modmat(rng, b, 16);
        ModMat S(a + b, a + b, 16);
        for (std::size_t i = 0; i < a; ++i)
            for (std::size_t j = 0; j < a; ++j) S(i, j) = A(i, j);
        for (std::size_t i = 0; i < b; ++i)
            for (std::size_t j = 0; j < b; ++j) S(a + i, a + j) = B(i, j);
        ASSERT_EQ(ordinary_part(S).ord_rank(), ordinary_part(A).ord_rank() + ordinary_part(B).ord_rank());
    }
}

TEST(coinvariants, examples) {
    const OrdinaryModule m = ordinary_part(ModMat::identity(2, 8));
    EXPECT_TRUE(isomorphic(coinvariants(m, ModMat::identity(2, 8)), free_module(2, 8)));
    ModMat swap(2, 2, 8);
    swap(0, 1) = swap(1, 0) = 1;
    EXPECT_TRUE(isomorphic(coinvariants(m, swap), free_module(1, 8)));
    ModMat upper = ModMat::identity(2, 8);
    upper(0, 1) = 2;
    EXPECT_EQ(coinvariants(m, upper).exponents, (std::vector<int>{1, 8}));
    const OrdinaryModule u = ordinary_part(diag({3, 1}, 8));
    EXPECT_THROW(coinvariants(u, swap), precondition_error);
}

TEST(isomorphic, examples) {
    const PresentedModule z2{8, {1}}, z4{8, {2}};
    EXPECT_TRUE(isomorphic(z2, z2));
    EXPECT_FALSE(isomorphic(z2, z4));
    EXPECT_TRUE(isomorphic(free_module(3, 8), free_module(3, 8)));
    EXPECT_FALSE(isomorphic(free_module(3, 8), free_module(2, 8)));
    EXPECT_THROW(isomorphic(free_module(1, 8), free_module(1, 16)), precondition_error);
    EXPECT_EQ(z4.str(), "Z/2^2");
    EXPECT_EQ(free_module(2, 8).log2_order(), 16);
}

TEST(cokernel, capped_divisors) {
    const PresentedModule c = cokernel(diag({1, 2, 12, 0}, 4));
    EXPECT_EQ(c.exponents, (std::vector<int>{1, 2, 4}));
    EXPECT_EQ(c.free_rank(), 1u);
    EXPECT_FALSE(c.is_free());
}
