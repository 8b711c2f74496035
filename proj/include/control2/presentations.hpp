#pragma once

#include "control2/intmat.hpp"
#include "control2/subgroups.hpp"
#include "control2/word.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace control2 {

// ---------------------------------------------------------------------------
// Words in the ambient generators sigma (id 0, order 2) and tau (id 1, order 3).

inline const std::vector<std::int32_t>& ambient_orders() {
    static const std::vector<std::int32_t> orders = {2, 3};
    return orders;
}

inline constexpr std::uint32_t sigma_id = 0;
inline constexpr std::uint32_t tau_id = 1;

/// Exact product of an ambient word; sigma^-1 = -sigma, tau^-1 = tau^2.
inline Mat2 evaluate_ambient(const Word& w) {
    Mat2 m;
    for (const Letter& l : w.letters()) {
        if (l.gen == sigma_id) {
            const int e = ((l.exp % 4) + 4) % 4;
            for (int i = 0; i < e; ++i) m *= Mat2::sigma();
        } else {
            const int e = ((l.exp % 3) + 3) % 3;
            for (int i = 0; i < e; ++i) m *= Mat2::tau();
        }
    }
    return m;
}

namespace detail {

/// Appends T^q, using T = tau^-1 sigma and T^-1 = sigma tau projectively.
inline void append_translation_power(Word& w, const Int& q) {
    const auto& ord = ambient_orders();
    if (q > 0) {
        for (Int i = 0; i < q; ++i) {
            w.append_torsion(tau_id, -1, ord);
            w.append_torsion(sigma_id, 1, ord);
        }
    } else {
        for (Int i = 0; i < -q; ++i) {
            w.append_torsion(sigma_id, 1, ord);
            w.append_torsion(tau_id, 1, ord);
        }
    }
}

}  // namespace detail

/// Deterministic word in sigma, tau evaluating to ±m. Euclidean reduction on
/// the first column: left-multiply by T^-q to shrink a modulo c, then by S
/// to swap; once c = 0 the remainder is ±T^b.
inline Word express_ambient(const Mat2& m) {
    require_det_one(m, "express_ambient");
    struct Step {
        bool swap;
        Int q;
    };
    std::vector<Step> steps;
    Int a = m.a, b = m.b, c = m.c, d = m.d;
    while (!c.is_zero()) {
        Int q = floor_div(a, c);
        if (!q.is_zero()) {
            a -= q * c;
            b -= q * d;
            steps.push_back({false, q});
        }
        // S * (a b; c d) = (-c -d; a b)
        Int na = -c, nb = -d;
        c = a;
        d = b;
        a = std::move(na);
        b = std::move(nb);
        steps.push_back({true, 0});
    }
    // Now (a b; 0 d) with a = d = ±1, equal to ±T^(a*b).
    const Int tail = a * b;

    // m = step_1^-1 step_2^-1 ... step_k^-1 * T^tail
    Word w;
    const auto& ord = ambient_orders();
    for (const Step& s : steps) {
        if (s.swap)
            w.append_torsion(sigma_id, 1, ord);
        else
            detail::append_translation_power(w, s.q);
    }
    detail::append_translation_power(w, tail);
    return w;
}

// ---------------------------------------------------------------------------

using AbVec = std::vector<std::int64_t>;

/// Free presentation of a torsion-free finite-index subgroup, from
/// Schreier generators on a BFS spanning tree of its coset graph.
class FreePresentation {
public:
    const SubgroupSpec& subgroup() const { return table_.subgroup(); }
    const CosetTable& table() const { return table_; }
    const std::vector<Mat2>& gens() const { return gens_; }
    std::size_t rank() const { return gens_.size(); }
    std::string name() const { return subgroup().name(); }

    /// Word in the free generators for the Schreier element
    /// x_i g x_{i·g}^-1, g in {sigma, tau}.
    const Word& schreier_word(std::size_t coset, AmbientGen g) const {
        return letter_words_[coset][static_cast<int>(g)];
    }

    friend FreePresentation reidemeister_schreier(const SubgroupSpec&, std::size_t);

private:
    explicit FreePresentation(CosetTable t) : table_(std::move(t)) {}

    CosetTable table_;
    std::vector<Mat2> gens_;
    std::vector<std::array<Word, 2>> letter_words_;
};

using PresentationPtr = std::shared_ptr<const FreePresentation>;

namespace detail {

/// Walks an ambient word through the coset graph from the identity coset,
/// calling emit(word, sign) for the subgroup word of each step. Returns the
/// final coset.
template <class Emit>
std::size_t trace_ambient(const FreePresentation& p, const Word& w, Emit&& emit) {
    const CosetTable& t = p.table();
    std::size_t cur = 0;
    for (const Letter& l : w.letters()) {
        if (l.gen == sigma_id) {
            // exponents of sigma are always 1 after torsion reduction
            emit(p.schreier_word(cur, AmbientGen::sigma), 1);
            cur = t.edge(cur, AmbientGen::sigma);
        } else if (l.exp == 1) {
            emit(p.schreier_word(cur, AmbientGen::tau), 1);
            cur = t.edge(cur, AmbientGen::tau);
        } else {
            const std::size_t prev = t.tau_inverse_edge(cur);
            emit(p.schreier_word(prev, AmbientGen::tau), -1);
            cur = prev;
        }
    }
    return cur;
}

}  // namespace detail

/// Torsion-freeness gate and Schreier generator selection. Each sigma-pair
/// and tau-triangle of the coset graph carries one relator, used to
/// eliminate one Schreier letter; what remains is a free basis of rank
/// 1 + n/6 for n projective cosets.
inline FreePresentation reidemeister_schreier(const SubgroupSpec& g, std::size_t bound = default_coset_bound) {
    g.validate();
    FreePresentation p(coset_enumerate(g, bound));
    const CosetTable& t = p.table_;
    const std::size_t n = t.size();

    for (std::size_t i = 0; i < n; ++i) {
        if (t.edge(i, AmbientGen::sigma) == i || t.edge(i, AmbientGen::tau) == i)
            throw precondition_error(g.name() + " is not torsion-free (an elliptic element fixes coset " +
                                     std::to_string(i) + ")");
    }

    p.letter_words_.assign(n, {});
    auto new_gen = [&](std::size_t coset, AmbientGen gen) {
        const Mat2 m = t.rep(coset) * ambient_matrix(gen) * t.rep(t.edge(coset, gen)).inverse();
        p.gens_.push_back(lift_to_member(m, g));
        return static_cast<std::uint32_t>(p.gens_.size() - 1);
    };

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = t.edge(i, AmbientGen::sigma);
        if (i < j && !t.is_tree_edge(i, AmbientGen::sigma) && !t.is_tree_edge(j, AmbientGen::sigma)) {
            const std::uint32_t k = new_gen(i, AmbientGen::sigma);
            p.letter_words_[i][0] = Word{{k, 1}};
            p.letter_words_[j][0] = Word{{k, -1}};
        }
        const std::size_t i1 = t.edge(i, AmbientGen::tau);
        const std::size_t i2 = t.edge(i1, AmbientGen::tau);
        if (i < i1 && i < i2) {
            const std::array<std::size_t, 3> tri = {i, i1, i2};
            std::array<bool, 3> tree{};
            int tree_count = 0;
            for (int q = 0; q < 3; ++q) tree_count += (tree[q] = t.is_tree_edge(tri[q], AmbientGen::tau));
            if (tree_count == 0) {
                const std::uint32_t k0 = new_gen(tri[0], AmbientGen::tau);
                const std::uint32_t k1 = new_gen(tri[1], AmbientGen::tau);
                p.letter_words_[tri[0]][1] = Word{{k0, 1}};
                p.letter_words_[tri[1]][1] = Word{{k1, 1}};
                p.letter_words_[tri[2]][1] = Word{{k1, -1}, {k0, -1}};
            } else if (tree_count == 1) {
                int pos = 0;
                while (!tree[pos]) ++pos;
                const std::size_t next = tri[(pos + 1) % 3], last = tri[(pos + 2) % 3];
                const std::uint32_t k = new_gen(next, AmbientGen::tau);
                p.letter_words_[next][1] = Word{{k, 1}};
                p.letter_words_[last][1] = Word{{k, -1}};
            }
            // tree_count == 2: the remaining letter is trivial.
        }
    }

    const std::size_t expected = 1 + n / 6;
    if (n % 6 != 0 || p.rank() != expected)
        throw consistency_error(g.name() + ": rank " + std::to_string(p.rank()) + " but " + std::to_string(n) +
                                " cosets predict " + std::to_string(expected));

    // Every ambient relator read from every coset must rewrite to 1.
    for (std::size_t i = 0; i < n; ++i) {
        Word s2 = p.schreier_word(i, AmbientGen::sigma) *
                  p.schreier_word(t.edge(i, AmbientGen::sigma), AmbientGen::sigma);
        std::size_t c = i;
        Word t3;
        for (int q = 0; q < 3; ++q) {
            t3.append(p.schreier_word(c, AmbientGen::tau));
            c = t.edge(c, AmbientGen::tau);
        }
        if (!s2.empty() || !t3.empty())
            throw consistency_error(g.name() + ": relator at coset " + std::to_string(i) +
                                    " rewrites to a nontrivial word");
    }
    return p;
}

/// Word in the free generators of p evaluating to ±m.
inline Word rewrite(const Mat2& m, const FreePresentation& p) {
    if (!is_member(m, p.subgroup())) throw precondition_error("rewrite: " + m.str() + " is not in " + p.name());
    Word out;
    const std::size_t end = detail::trace_ambient(p, express_ambient(m), [&](const Word& w, int sign) {
        out.append(sign > 0 ? w : w.inverse());
    });
    if (end != 0) throw consistency_error("rewrite: trace of a member did not return to the identity coset");
    return out;
}

/// Exponent sums of any word for m; same result as rewrite(m, p) followed
/// by exponent_sums, without materializing the word.
inline AbVec abelianize(const Mat2& m, const FreePresentation& p) {
    if (!is_member(m, p.subgroup())) throw precondition_error("abelianize: " + m.str() + " is not in " + p.name());
    AbVec v(p.rank(), 0);
    const std::size_t end = detail::trace_ambient(p, express_ambient(m), [&](const Word& w, int sign) {
        for (const Letter& l : w.letters()) v[l.gen] += sign * l.exp;
    });
    if (end != 0) throw consistency_error("abelianize: trace of a member did not return to the identity coset");
    return v;
}

/// Evaluate a word in the free generators of p.
inline Mat2 evaluate(const Word& w, const FreePresentation& p) {
    Mat2 m;
    for (const Letter& l : w.letters()) {
        const Mat2& g = p.gens().at(l.gen);
        const Mat2 f = l.exp > 0 ? g : g.inverse();
        for (std::int32_t i = 0; i < std::abs(l.exp); ++i) m *= f;
    }
    return m;
}

// ---------------------------------------------------------------------------

/// Homomorphism between abelianizations, Z^cols -> Z^rows, acting on
/// column vectors. Source and target carry presentation names so that
/// mismatched compositions are caught.
struct AbMap {
    IntMat matrix;
    std::string source;
    std::string target;

    std::size_t rows() const { return matrix.rows(); }
    std::size_t cols() const { return matrix.cols(); }

    static AbMap identity(const FreePresentation& p) { return {IntMat::identity(p.rank()), p.name(), p.name()}; }

    bool operator==(const AbMap&) const = default;
};

/// g ∘ f
inline AbMap compose(const AbMap& g, const AbMap& f) {
    if (f.target != g.source)
        throw precondition_error("compose: target " + f.target + " does not match source " + g.source);
    return {g.matrix * f.matrix, f.source, g.target};
}

/// Matrix whose i-th column is the abelianized image f(gens[i]) in dst.
inline AbMap induced_map(const std::function<Mat2(const Mat2&)>& f, const FreePresentation& src,
                         const FreePresentation& dst) {
    IntMat m(dst.rank(), src.rank());
    for (std::size_t i = 0; i < src.rank(); ++i) {
        const Mat2 image = f(src.gens()[i]);
        if (image.det() != 1 || !is_member(image, dst.subgroup()))
            throw precondition_error("induced_map: image of generator " + std::to_string(i) + " of " + src.name() +
                                     " is not in " + dst.name() + ": " + image.str());
        m.set_column(i, abelianize(image, dst));
    }
    return {std::move(m), src.name(), dst.name()};
}

/// Map induced by the inclusion src ⊆ dst.
inline AbMap inclusion_map(const FreePresentation& src, const FreePresentation& dst) {
    return induced_map([](const Mat2& x) { return x; }, src, dst);
}

}  // namespace control2
