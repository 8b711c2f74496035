#pragma once

#include "control2/mat2.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace control2 {

/// Gamma1(N 2^s) ∩ Gamma0(2^r), optionally intersected with Gamma^0(2)
/// (upper-right entry even). With s = r this is Gamma1(N 2^r).
///
/// The ambient modular group itself is the special value N = 1, s = r = 0;
/// it is only meaningful for coset counting and is never torsion-free.
struct SubgroupSpec {
    std::int64_t N = 1;
    int s = 2;
    int r = 2;
    bool upper0 = false;

    static SubgroupSpec ambient() { return {1, 0, 0, false}; }
    static SubgroupSpec gamma1(std::int64_t N, int r) { return {N, r, r, false}; }
    static SubgroupSpec phi(std::int64_t N, int r, int s) { return {N, s, r, false}; }

    SubgroupSpec with_upper0() const {
        SubgroupSpec g = *this;
        g.upper0 = true;
        return g;
    }

    bool is_ambient() const { return s == 0 && r == 0; }

    void validate() const {
        if (is_ambient()) {
            if (N != 1 || upper0) throw precondition_error("ambient spec must have N = 1 and no Gamma^0(2) flag");
            return;
        }
        if (N <= 0 || N % 2 == 0) throw precondition_error("N must be a positive odd integer, got " + std::to_string(N));
        if (s < 2) throw precondition_error("s must be at least 2");
        if (r < s) throw precondition_error("r must be at least s");
        if (r > 40) throw precondition_error("r is out of the supported range");
    }

    /// Modulus of the Gamma1 condition: a ≡ d ≡ 1, c ≡ 0.
    std::int64_t gamma1_modulus() const { return is_ambient() ? 1 : N * pow2(s); }
    /// Modulus of the Gamma0 condition on c; also the level of the principal
    /// congruence subgroup contained in this one.
    std::int64_t gamma0_modulus() const { return is_ambient() ? 1 : N * pow2(r); }

    std::string name() const {
        if (is_ambient()) return "SL2(Z)";
        std::string base = (s == r) ? "Gamma1(" + std::to_string(N) + "*2^" + std::to_string(r) + ")"
                                    : "Phi(N=" + std::to_string(N) + ",r=" + std::to_string(r) +
                                          ",s=" + std::to_string(s) + ")";
        return upper0 ? base + "&Gamma^0(2)" : base;
    }

    auto operator<=>(const SubgroupSpec&) const = default;
};

/// Literal congruence test; no sign normalization.
inline bool satisfies_congruences(const Mat2& m, const SubgroupSpec& g) {
    if (g.is_ambient()) return true;
    const std::int64_t m1 = g.gamma1_modulus();
    const std::int64_t m0 = g.gamma0_modulus();
    if (floor_mod(m.a, m1) != 1 % m1 || floor_mod(m.d, m1) != 1 % m1) return false;
    if (floor_mod(m.c, m0) != 0) return false;
    if (g.upper0 && floor_mod(m.b, 2) != 0) return false;
    return true;
}

inline void require_det_one(const Mat2& m, const char* where) {
    if (m.det() != 1) throw precondition_error(std::string(where) + ": determinant of " + m.str() + " is not 1");
}

/// Membership of m in the projective image: true iff m or -m satisfies the
/// congruences. None of the non-ambient groups contains -I, so at most one
/// sign matches.
inline bool is_member(const Mat2& m, const SubgroupSpec& g) {
    require_det_one(m, "is_member");
    return satisfies_congruences(m, g) || satisfies_congruences(-m, g);
}

/// The element of {m, -m} lying in g.
inline Mat2 lift_to_member(const Mat2& m, const SubgroupSpec& g) {
    require_det_one(m, "lift_to_member");
    if (satisfies_congruences(m, g)) return m;
    Mat2 n = -m;
    if (satisfies_congruences(n, g)) return n;
    throw precondition_error(m.str() + " is not in " + g.name());
}

enum class AmbientGen : std::uint8_t { sigma = 0, tau = 1 };

inline const Mat2& ambient_matrix(AmbientGen g) {
    static const Mat2 s = Mat2::sigma();
    static const Mat2 t = Mat2::tau();
    return g == AmbientGen::sigma ? s : t;
}

namespace detail {

/// Right cosets G·x correspond to the orbit of a point under the right
/// action of SL2(Z): the bottom row of x modulo N 2^r up to units that are
/// ±1 modulo N 2^s, together with the line of the top row modulo 2 when the
/// Gamma^0(2) condition is present. The stabilizer of the base point is ±G.
class CosetKeyer {
public:
    explicit CosetKeyer(const SubgroupSpec& g)
        : m0_(g.gamma0_modulus()), upper0_(g.upper0) {
        const std::int64_t m1 = g.gamma1_modulus();
        for (std::int64_t u = 0; u < m0_; ++u) {
            if (std::gcd(u, m0_) != 1) continue;
            const std::int64_t um = u % m1;
            if (um == 1 % m1 || um == (m1 - 1) % m1) units_.push_back(u);
        }
        if (units_.empty()) units_.push_back(0);
    }

    std::int64_t modulus() const { return m0_; }

    std::uint64_t key(const Residues& x) const {
        std::int64_t best_c = m0_, best_d = m0_;
        for (std::int64_t u : units_) {
            const std::int64_t c = (u * x[2]) % m0_;
            const std::int64_t d = (u * x[3]) % m0_;
            if (c < best_c || (c == best_c && d < best_d)) {
                best_c = c;
                best_d = d;
            }
        }
        std::uint64_t k = static_cast<std::uint64_t>(best_c) * static_cast<std::uint64_t>(m0_) +
                          static_cast<std::uint64_t>(best_d);
        if (upper0_) k = k * 4 + static_cast<std::uint64_t>((x[0] & 1) * 2 + (x[1] & 1));
        return k;
    }

private:
    std::int64_t m0_;
    bool upper0_;
    std::vector<std::int64_t> units_;
};

}  // namespace detail

/// Schreier graph of a finite-index subgroup acting on its right cosets,
/// with edges for the projective generators sigma and tau.
class CosetTable {
public:
    struct TreeEdge {
        std::size_t from;
        AmbientGen gen;
    };

    const SubgroupSpec& subgroup() const { return subgroup_; }
    std::size_t size() const { return reps_.size(); }

    /// Representative x_i of the coset G·x_i; x_0 = I.
    const Mat2& rep(std::size_t i) const { return reps_[i]; }

    /// Index j with G·x_i·g = G·x_j.
    std::size_t edge(std::size_t i, AmbientGen g) const { return edges_[i][static_cast<int>(g)]; }
    std::size_t tau_inverse_edge(std::size_t i) const { return tau_inv_[i]; }

    /// BFS tree edge that discovered coset i (none for i = 0).
    std::optional<TreeEdge> parent(std::size_t i) const { return parents_[i]; }
    bool is_tree_edge(std::size_t i, AmbientGen g) const {
        const std::size_t j = edge(i, g);
        return parents_[j] && parents_[j]->from == i && parents_[j]->gen == g;
    }

    /// Coset index of G·x, for any determinant-1 x.
    std::size_t find(const Mat2& x) const {
        const std::uint64_t k = keyer_.key(reduce(x, keyer_.modulus()));
        auto it = lookup_.find(k);
        if (it == lookup_.end()) throw consistency_error("coset lookup failed for " + x.str());
        return it->second;
    }

    /// Index in the projective modular group.
    std::int64_t index_psl() const { return static_cast<std::int64_t>(size()); }
    /// Index in SL2(Z); the non-ambient groups miss -I.
    std::int64_t index_sl2() const { return subgroup_.is_ambient() ? index_psl() : 2 * index_psl(); }

    friend CosetTable coset_enumerate(const SubgroupSpec& g, std::size_t bound);

private:
    explicit CosetTable(const SubgroupSpec& g) : subgroup_(g), keyer_(g) {}

    SubgroupSpec subgroup_;
    detail::CosetKeyer keyer_;
    std::vector<Mat2> reps_;
    std::vector<std::array<std::size_t, 2>> edges_;
    std::vector<std::size_t> tau_inv_;
    std::vector<std::optional<TreeEdge>> parents_;
    std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

inline constexpr std::size_t default_coset_bound = 1'000'000;

/// Breadth-first enumeration from the identity coset; cosets are numbered
/// in discovery order, trying sigma before tau.
inline CosetTable coset_enumerate(const SubgroupSpec& g, std::size_t bound = default_coset_bound) {
    g.validate();
    CosetTable t(g);
    const std::int64_t mod = t.keyer_.modulus();
    std::vector<Residues> reduced;

    auto add = [&](Mat2 rep, const Residues& red, std::uint64_t key, std::optional<CosetTable::TreeEdge> parent) {
        if (t.reps_.size() >= bound)
            throw resource_limit_error("coset enumeration of " + g.name() + " exceeds the bound of " +
                                       std::to_string(bound) + " cosets");
        const std::size_t idx = t.reps_.size();
        t.reps_.push_back(std::move(rep));
        reduced.push_back(red);
        t.edges_.push_back({0, 0});
        t.parents_.push_back(parent);
        t.lookup_.emplace(key, idx);
        return idx;
    };

    const Residues id = reduce(Mat2::identity(), mod);
    add(Mat2::identity(), id, t.keyer_.key(id), std::nullopt);
    const std::array<Residues, 2> gens = {reduce(Mat2::sigma(), mod), reduce(Mat2::tau(), mod)};

    for (std::size_t i = 0; i < t.reps_.size(); ++i) {
        for (int gi = 0; gi < 2; ++gi) {
            const Residues y = mul_mod(reduced[i], gens[gi], mod);
            const std::uint64_t key = t.keyer_.key(y);
            auto it = t.lookup_.find(key);
            std::size_t j;
            if (it != t.lookup_.end()) {
                j = it->second;
            } else {
                const auto gen = static_cast<AmbientGen>(gi);
                j = add(t.reps_[i] * ambient_matrix(gen), y, key, CosetTable::TreeEdge{i, gen});
            }
            t.edges_[i][gi] = j;
        }
    }
    t.tau_inv_.assign(t.size(), 0);
    for (std::size_t i = 0; i < t.size(); ++i) t.tau_inv_[t.edges_[i][1]] = i;
    return t;
}

/// [SL2(Z) : G] by coset enumeration.
inline std::int64_t index(const SubgroupSpec& g, std::size_t bound = default_coset_bound) {
    return coset_enumerate(g, bound).index_sl2();
}

/// |SL2(Z/M)| = M^3 prod_{p | M} (1 - p^-2).
inline std::int64_t sl2_order(std::int64_t M) {
    if (M < 1) throw precondition_error("sl2_order: modulus must be positive");
    std::int64_t n = M * M * M, m = M;
    auto strip = [&](std::int64_t p) {
        while (m % p == 0) m /= p;
        n = n / (p * p) * (p * p - 1);
    };
    for (std::int64_t p = 2; p * p <= m; ++p)
        if (m % p == 0) strip(p);
    if (m > 1) strip(m);
    return n;
}

/// [SL2(Z) : G] as |SL2(Z/M)| / |image of G|, counting the image directly
/// modulo M = lcm(N 2^r, 2). Independent of coset enumeration.
inline std::int64_t congruence_index(const SubgroupSpec& g) {
    g.validate();
    if (g.is_ambient()) return 1;
    const std::int64_t M = g.gamma0_modulus();
    if (M > (std::int64_t{1} << 16)) throw precondition_error("congruence_index: modulus too large to count");
    const std::int64_t m1 = g.gamma1_modulus();
    std::int64_t count = 0;
    for (std::int64_t a = 1; a < M; a += m1)
        for (std::int64_t d = 1; d < M; d += m1)
            for (std::int64_t b = 0; b < M; ++b) {
                if (g.upper0 && b % 2 != 0) continue;
                // c ≡ 0 (mod M), so ad ≡ 1 is the determinant condition
                if ((a * d) % M == 1 % M) ++count;
            }
    return sl2_order(M) / count;
}

// ---------------------------------------------------------------------------
// The diagonal character onto (1 + 4Z)/(1 + 2^r Z).

/// Residues x in [1, 2^r) with x ≡ 1 mod 2^s: the quotient Gamma_s/Gamma_r.
inline std::vector<std::int64_t> gamma_classes(int s, int r) {
    if (s < 2 || r < s) throw precondition_error("gamma_classes: need 2 <= s <= r");
    std::vector<std::int64_t> out;
    const std::int64_t step = pow2(s);
    for (std::int64_t x = 1; x < pow2(r); x += step) out.push_back(x);
    return out;
}

/// Fixed topological generator 1 + 2^s of Gamma_s, reduced mod 2^r.
inline std::int64_t gamma_generator(int s, int r) { return floor_mod(1 + pow2(s), pow2(r)); }

/// d mod 2^r for m in Phi(N, r, 2), using the sign of m that lies in the group.
inline std::int64_t eta(const Mat2& m, int r, std::int64_t N = 1) {
    const SubgroupSpec phi2 = SubgroupSpec::phi(N, r, 2);
    phi2.validate();
    if (!is_member(m, phi2)) throw precondition_error("eta: " + m.str() + " is not in " + phi2.name());
    const Mat2 g = lift_to_member(m, phi2);
    return floor_mod(g.d, pow2(r));
}

/// A matrix in Phi(N, r, 2) with eta = dbar. With `neben` it also lies in
/// Phi(N, r+1, 2) ∩ Gamma^0(2). `variant` selects among infinitely many
/// lifts by shifting d by multiples of 4N 2^r.
inline Mat2 eta_lift(std::int64_t dbar, int r, std::int64_t N, bool neben, int variant = 0) {
    if (r < 2) throw precondition_error("eta_lift: r must be at least 2");
    if (N <= 0 || N % 2 == 0) throw precondition_error("eta_lift: N must be odd and positive");
    if (floor_mod(dbar, 4) != 1) throw precondition_error("eta_lift: class must be 1 mod 4");
    const Int mod_r = pow2(r);
    const Int big = Int(N) * mod_r;  // lcm(2^r, 4N) for r >= 2
    // d ≡ dbar (mod 2^r) and d ≡ 1 (mod N), least positive.
    Int d = floor_mod(Int(dbar), mod_r);
    while (floor_mod(d, Int(N)) != 1 % N) d += mod_r;
    d += Int(variant) * 4 * big;
    const Int c = neben ? Int(2) * big : big;
    Int a = inverse_mod(d, c);
    Int b = (a * d - 1) / c;
    if (neben && b % 2 != 0) {
        a += c;
        b += d;
    }
    Mat2 m{a, b, c, d};
    if (m.det() != 1) throw consistency_error("eta_lift produced " + m.str());
    return m;
}

}  // namespace control2
