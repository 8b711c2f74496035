#pragma once

#include "control2/presentations.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace control2 {

/// Right coset representatives of H in G read off H's coset table: the
/// representatives of H-cosets that lie in G.
inline std::vector<Mat2> coset_representatives(const FreePresentation& G, const FreePresentation& H) {
    std::vector<Mat2> reps;
    const CosetTable& t = H.table();
    for (std::size_t i = 0; i < t.size(); ++i)
        if (is_member(t.rep(i), G.subgroup())) reps.push_back(lift_to_member(t.rep(i), G.subgroup()));
    return reps;
}

/// Transfer G^ab -> H^ab. Column j is the sum over i of the abelianized
/// h_i = t_i g_j t_{i·g_j}^-1, where t_i·g_j lies in the coset H t_{i·g_j}.
inline AbMap transfer(const FreePresentation& G, const FreePresentation& H, const std::vector<Mat2>& reps) {
    for (std::size_t i = 0; i < H.rank(); ++i)
        if (!is_member(H.gens()[i], G.subgroup()))
            throw precondition_error("transfer: " + H.name() + " is not contained in " + G.name());
    const std::size_t idx = H.table().size() / G.table().size();
    if (H.table().size() % G.table().size() != 0 || reps.size() != idx)
        throw precondition_error("transfer: " + std::to_string(reps.size()) + " representatives for index " +
                                 std::to_string(idx));
    std::unordered_map<std::size_t, std::size_t> slot;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        if (!is_member(reps[i], G.subgroup()))
            throw precondition_error("transfer: representative " + reps[i].str() + " is not in " + G.name());
        if (!slot.emplace(H.table().find(reps[i]), i).second)
            throw precondition_error("transfer: two representatives share a coset of " + H.name());
    }

    IntMat m(H.rank(), G.rank());
    std::vector<Mat2> inverses;
    for (const Mat2& t : reps) inverses.push_back(t.inverse());
    for (std::size_t j = 0; j < G.rank(); ++j) {
        AbVec col(H.rank(), 0);
        for (const Mat2& t : reps) {
            const Mat2 y = t * G.gens()[j];
            const std::size_t target = slot.at(H.table().find(y));
            const AbVec v = abelianize(y * inverses[target], H);
            for (std::size_t q = 0; q < col.size(); ++q) col[q] += v[q];
        }
        m.set_column(j, col);
    }
    return {std::move(m), G.name(), H.name()};
}

/// Memoizes presentations and derived maps. Not thread-safe; use one per
/// concurrent task.
class Workspace {
public:
    explicit Workspace(std::size_t coset_bound = default_coset_bound) : coset_bound_(coset_bound) {}

    std::size_t coset_bound() const { return coset_bound_; }

    const FreePresentation& presentation(const SubgroupSpec& g) {
        auto it = presentations_.find(g);
        if (it == presentations_.end())
            it = presentations_.emplace(g, std::make_shared<const FreePresentation>(reidemeister_schreier(g, coset_bound_))).first;
        return *it->second;
    }

    const AbMap& inclusion(const SubgroupSpec& src, const SubgroupSpec& dst) {
        const auto key = std::make_pair(src, dst);
        auto it = inclusions_.find(key);
        if (it == inclusions_.end())
            it = inclusions_.emplace(key, inclusion_map(presentation(src), presentation(dst))).first;
        return it->second;
    }

    template <class Build>
    const AbMap& memo(const std::string& key, Build&& build) {
        auto it = maps_.find(key);
        if (it == maps_.end()) it = maps_.emplace(key, build()).first;
        return it->second;
    }

private:
    std::size_t coset_bound_;
    std::map<SubgroupSpec, PresentationPtr> presentations_;
    std::map<std::pair<SubgroupSpec, SubgroupSpec>, AbMap> inclusions_;
    std::map<std::string, AbMap> maps_;
};

struct Level {
    std::int64_t N;
    int r;
    int s;

    void validate() const {
        SubgroupSpec::phi(N, r, s).validate();
    }
    std::string str() const {
        return "N=" + std::to_string(N) + ",r=" + std::to_string(r) + ",s=" + std::to_string(s);
    }
};

/// Atkin U on Phi(N, r, s)^ab and its factors
///   Phi_r^s --V--> (Phi_r^s ∩ Gamma^0(2)) --A -> tAt^-1--> Phi_{r+1}^s --incl--> Phi_r^s.
struct AtkinOperators {
    Level level;
    SubgroupSpec phi, phi_upper0, phi_next;
    AbMap transfer;             // V
    AbMap conjugation;          // C_t
    AbMap conjugation_inverse;  // A -> t^-1 A t, inverse of C_t
    AbMap inclusion;            // Phi_{r+1}^s -> Phi_r^s
    AbMap U;                    // inclusion ∘ conjugation ∘ transfer
    AbMap Uprime;               // conjugation ∘ transfer
    AbMap U_direct;             // sum of abelianized t h_i t^-1, computed without Phi_{r+1}^s
};

/// Representatives (1 i; 0 1), i = 0, 1, of Phi ∩ Gamma^0(2) in Phi.
inline std::vector<Mat2> upper0_representatives() { return {Mat2::identity(), Mat2::translation(1)}; }

inline AtkinOperators atkin_u(Workspace& ws, const Level& lv) {
    lv.validate();
    AtkinOperators op{lv,
                      SubgroupSpec::phi(lv.N, lv.r, lv.s),
                      SubgroupSpec::phi(lv.N, lv.r, lv.s).with_upper0(),
                      SubgroupSpec::phi(lv.N, lv.r + 1, lv.s),
                      {}, {}, {}, {}, {}, {}, {}};
    const FreePresentation& phi = ws.presentation(op.phi);
    const FreePresentation& low = ws.presentation(op.phi_upper0);
    const FreePresentation& next = ws.presentation(op.phi_next);
    const std::vector<Mat2> reps = upper0_representatives();

    op.transfer = transfer(phi, low, reps);
    op.conjugation = induced_map(conjugate_by_t, low, next);
    op.conjugation_inverse = induced_map(conjugate_by_t_inverse, next, low);
    op.inclusion = ws.inclusion(op.phi_next, op.phi);
    op.Uprime = compose(op.conjugation, op.transfer);
    op.U = compose(op.inclusion, op.Uprime);

    IntMat direct(phi.rank(), phi.rank());
    const Mat2 shift_inv = Mat2::translation(-1);
    for (std::size_t j = 0; j < phi.rank(); ++j) {
        AbVec col(phi.rank(), 0);
        for (const Mat2& t : reps) {
            const Mat2 y = t * phi.gens()[j];
            // y lies in the coset of I or of (1 1; 0 1), decided by the parity of b.
            const Mat2 h = is_member(y, op.phi_upper0) ? y : y * shift_inv;
            const AbVec v = abelianize(conjugate_by_t(lift_to_member(h, op.phi_upper0)), phi);
            for (std::size_t q = 0; q < col.size(); ++q) col[q] += v[q];
        }
        direct.set_column(j, col);
    }
    op.U_direct = {std::move(direct), phi.name(), phi.name()};
    return op;
}

/// Lift of a class of Gamma/Gamma_r used for the nebentypus action.
inline Mat2 diamond_lift(std::int64_t dbar, const Level& lv, int variant = 0) {
    return eta_lift(floor_mod(dbar, pow2(lv.r)), lv.r, lv.N, true, variant);
}

/// Nebentypus action of dbar on Phi(N, r, s)^ab: conjugation x -> a x a^-1
/// by a lift a in Phi(N, r+1, 2) ∩ Gamma^0(2).
inline AbMap diamond(Workspace& ws, std::int64_t dbar, const Level& lv, int variant = 0) {
    lv.validate();
    const Mat2 a = diamond_lift(dbar, lv, variant);
    const Mat2 ainv = a.inverse();
    const FreePresentation& p = ws.presentation(SubgroupSpec::phi(lv.N, lv.r, lv.s));
    return induced_map([&](const Mat2& x) { return a * x * ainv; }, p, p);
}

/// Transfer Phi(N, r, s)^ab -> Gamma1(N 2^r)^ab with eta-lifted representatives.
inline AbMap transfer_down(Workspace& ws, const Level& lv) {
    lv.validate();
    std::vector<Mat2> reps;
    for (std::int64_t x : gamma_classes(lv.s, lv.r)) reps.push_back(diamond_lift(x, lv));
    return transfer(ws.presentation(SubgroupSpec::phi(lv.N, lv.r, lv.s)),
                    ws.presentation(SubgroupSpec::gamma1(lv.N, lv.r)), reps);
}

/// Map Gamma1(N 2^r)^ab -> Gamma1(N 2^s)^ab induced by inclusion.
inline AbMap chain_map(Workspace& ws, std::int64_t N, int r, int s) {
    if (r < s) throw precondition_error("chain_map: need r >= s");
    return ws.inclusion(SubgroupSpec::gamma1(N, r), SubgroupSpec::gamma1(N, s));
}

}  // namespace control2
