#pragma once

#include "control2/operators.hpp"
#include "control2/ordinary.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace control2 {

using json = nlohmann::json;

inline constexpr const char* tool_version = "1.0.0";

namespace check_id {
inline const std::string eta_surjective = "lemma-2.1";
inline const std::string presentation_rank = "presentation-rank";
inline const std::string factorization = "eq-5";
inline const std::string level_relations = "eq-6";
inline const std::string chain_equivariance = "lemma-3.1";
inline const std::string cokernel_action = "lemma-3.4";
inline const std::string diamond_commutation = "lemma-3.5";
inline const std::string transfer_down_commutation = "lemma-3.6";
inline const std::string transfer_norm = "transfer-norm";
inline const std::string control = "theorem-4.1";
inline const std::string control_composition = "prop-5.1";
inline const std::string rank_stability = "rank-stability";
inline const std::string lambda_rank = "lambda-rank";
inline const std::string dual_rank = "dual-rank";
}  // namespace check_id

/// Every check id, in report order within a level.
inline const std::vector<std::string>& all_checks() {
    static const std::vector<std::string> ids = {
        check_id::eta_surjective,     check_id::presentation_rank,         check_id::factorization,
        check_id::level_relations,    check_id::chain_equivariance,        check_id::cokernel_action,
        check_id::diamond_commutation, check_id::transfer_down_commutation, check_id::transfer_norm,
        check_id::control,            check_id::dual_rank,                 check_id::control_composition,
        check_id::rank_stability,     check_id::lambda_rank};
    return ids;
}

enum class Status { pass, fail, skipped };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::skipped: return "skipped";
    }
    return "?";
}

struct Params {
    std::int64_t N = 1;
    int r = 2;
    std::optional<int> s;
    std::optional<int> k;
};

struct CheckResult {
    std::string id;
    Params params;
    Status status = Status::skipped;
    json witness = json::object();
    std::int64_t ms = 0;
    bool resource_limited = false;
};

struct Config {
    std::vector<std::int64_t> N = {1, 3, 5};
    int r_min = 2;
    int r_max = 4;
    int s_min = 2;
    int precision = default_precision;
    std::vector<std::string> checks = all_checks();
    std::string out;
    unsigned jobs = 1;
    std::size_t coset_bound = default_coset_bound;

    void validate() const {
        for (std::int64_t n : N)
            if (n <= 0 || n % 2 == 0) throw precondition_error("N must be a positive odd integer, got " + std::to_string(n));
        if (r_min < 2) throw precondition_error("r-min must be at least 2");
        if (r_max < r_min) throw precondition_error("r-max must be at least r-min");
        if (s_min < 2) throw precondition_error("s-min must be at least 2");
        if (precision < 4 || precision > 64) throw precondition_error("precision must lie in [4, 64]");
        if (jobs < 1) throw precondition_error("jobs must be at least 1");
        if (coset_bound < 1) throw precondition_error("coset-bound must be positive");
        for (const std::string& c : checks)
            if (std::find(all_checks().begin(), all_checks().end(), c) == all_checks().end())
                throw precondition_error("unknown check id " + c);
    }
};

struct ControlReport {
    std::string version = tool_version;
    Config config;
    std::vector<CheckResult> checks;
    std::map<std::int64_t, std::optional<std::int64_t>> d_by_N;
    bool stable = true;

    std::size_t count(Status s) const {
        return static_cast<std::size_t>(
            std::count_if(checks.begin(), checks.end(), [s](const CheckResult& c) { return c.status == s; }));
    }
    std::size_t warnings() const {
        return static_cast<std::size_t>(
            std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return c.resource_limited; }));
    }
    bool passed() const { return count(Status::fail) == 0; }
};

// ---------------------------------------------------------------------------
// Witness helpers.

namespace detail {

inline std::string hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Records the first difference between two matrices.
inline json mismatch(const IntMat& lhs, const IntMat& rhs) {
    json w = {{"lhs_shape", lhs.shape()}, {"rhs_shape", rhs.shape()}};
    if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols()) return w;
    for (std::size_t i = 0; i < lhs.rows(); ++i)
        for (std::size_t j = 0; j < lhs.cols(); ++j)
            if (lhs(i, j) != rhs(i, j)) {
                w["entry"] = {i, j};
                w["lhs"] = lhs(i, j).str();
                w["rhs"] = rhs(i, j).str();
                w["lhs_digest"] = hex(lhs.digest());
                w["rhs_digest"] = hex(rhs.digest());
                if (lhs.rows() * lhs.cols() <= 64) {
                    w["lhs_matrix"] = lhs.str();
                    w["rhs_matrix"] = rhs.str();
                }
                return w;
            }
    return w;
}

inline json mismatch(const ModMat& lhs, const ModMat& rhs) {
    json w = {{"lhs_shape", lhs.shape()}, {"rhs_shape", rhs.shape()}, {"k", lhs.k()}};
    if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols()) return w;
    for (std::size_t i = 0; i < lhs.rows(); ++i)
        for (std::size_t j = 0; j < lhs.cols(); ++j)
            if (lhs(i, j) != rhs(i, j)) {
                w["entry"] = {i, j};
                w["lhs"] = lhs(i, j);
                w["rhs"] = rhs(i, j);
                return w;
            }
    return w;
}

/// Accumulates named boolean conditions; a failing one stores its witness.
class Conditions {
public:
    explicit Conditions(json& witness) : w_(witness) {}

    bool expect(const std::string& name, bool ok, json detail = nullptr) {
        if (!ok) {
            ok_ = false;
            json& f = w_["failures"];
            if (!f.is_array()) f = json::array();
            f.push_back({{"condition", name}, {"detail", std::move(detail)}});
        }
        return ok;
    }
    template <class M>
    bool equal(const std::string& name, const M& lhs, const M& rhs) {
        const bool ok = lhs == rhs;
        return expect(name, ok, ok ? json(nullptr) : mismatch(lhs, rhs));
    }
    bool ok() const { return ok_; }

private:
    json& w_;
    bool ok_ = true;
};

template <class Body>
CheckResult run_check(const std::string& id, Params params, Body&& body) {
    CheckResult res{id, params, Status::pass, json::object(), 0, false};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        Conditions cond(res.witness);
        body(res.witness, cond);
        res.status = cond.ok() ? Status::pass : Status::fail;
    } catch (const resource_limit_error& e) {
        res.status = Status::skipped;
        res.resource_limited = true;
        res.witness["diagnostic"] = e.what();
    } catch (const precision_error& e) {
        res.status = Status::skipped;
        res.witness["diagnostic"] = e.what();
    } catch (const error& e) {
        res.status = Status::fail;
        res.witness["error"] = e.what();
    }
    res.ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

/// Runs body(k) at k, 2k, ... up to 64 until no precision error is raised.
template <class Body>
void with_escalation(int k, json& w, Body&& body) {
    std::vector<int> tried;
    for (int kk = k;; kk = std::min(64, 2 * kk)) {
        tried.push_back(kk);
        try {
            body(kk);
            w["k_used"] = kk;
            if (tried.size() > 1) w["k_tried"] = tried;
            return;
        } catch (const precision_error& e) {
            if (kk == 64) throw precision_error(std::string("precision escalation exhausted: ") + e.what());
        }
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Memoized operators and ordinary parts for one verification task.
class Session {
public:
    explicit Session(std::size_t coset_bound = default_coset_bound) : ws_(coset_bound) {}

    Workspace& workspace() { return ws_; }
    const FreePresentation& presentation(const SubgroupSpec& g) { return ws_.presentation(g); }

    const AtkinOperators& atkin(const Level& lv) {
        const auto key = std::make_tuple(lv.N, lv.r, lv.s);
        auto it = atkin_.find(key);
        if (it == atkin_.end()) it = atkin_.emplace(key, atkin_u(ws_, lv)).first;
        return it->second;
    }

    /// U on Gamma1(N 2^r)^ab.
    const AbMap& hecke(std::int64_t N, int r) { return atkin({N, r, r}).U; }

    const AbMap& diamond(std::int64_t dbar, const Level& lv, int variant = 0) {
        const std::string key = "diamond:" + lv.str() + ":" + std::to_string(floor_mod(dbar, pow2(lv.r))) + ":" +
                                std::to_string(variant);
        return ws_.memo(key, [&] { return control2::diamond(ws_, dbar, lv, variant); });
    }

    const AbMap& transfer_down(const Level& lv) {
        return ws_.memo("transfer_down:" + lv.str(), [&] { return control2::transfer_down(ws_, lv); });
    }

    const AbMap& inclusion(const SubgroupSpec& src, const SubgroupSpec& dst) { return ws_.inclusion(src, dst); }

    /// Ordinary part of U (or of its transpose) on Phi(N, r, s)^ab modulo 2^k.
    const OrdinaryModule& ordinary(const Level& lv, int k, bool transposed = false) {
        const auto key = std::make_tuple(lv.N, lv.r, lv.s, k, transposed);
        auto it = ordinary_.find(key);
        if (it == ordinary_.end()) {
            const IntMat& U = atkin(lv).U.matrix;
            it = ordinary_.emplace(key, ordinary_part(ModMat::from(transposed ? U.transpose() : U, k))).first;
        }
        return it->second;
    }

private:
    Workspace ws_;
    std::map<std::tuple<std::int64_t, int, int>, AtkinOperators> atkin_;
    std::map<std::tuple<std::int64_t, int, int, int, bool>, OrdinaryModule> ordinary_;
};

/// Matrix of f : A -> B between ordinary parts, in their chosen bases.
inline ModMat restrict_map(const OrdinaryModule& a, const OrdinaryModule& b, const IntMat& f) {
    return b.coords * ModMat::from(f, a.k) * a.basis;
}

// ---------------------------------------------------------------------------
// Individual checks.

inline CheckResult verify_eta(std::int64_t N, int r) {
    return detail::run_check(check_id::eta_surjective, {N, r, 2, std::nullopt}, [&](json& w, detail::Conditions& cond) {
        if (r > 6) throw precondition_error("verify_eta: exhaustive range is r <= 6");
        const std::vector<std::int64_t> classes = gamma_classes(2, r);
        const SubgroupSpec phi2 = SubgroupSpec::phi(N, r, 2);
        const SubgroupSpec phi2_upper0 = phi2.with_upper0();
        const std::int64_t mod = pow2(r);
        std::vector<Mat2> lifts;
        for (std::int64_t x : classes) {
            const Mat2 a = eta_lift(x, r, N, false);
            const Mat2 b = eta_lift(x, r, N, true);
            cond.expect("lift in Phi_r^2", is_member(a, phi2), {{"class", x}, {"lift", a.str()}});
            cond.expect("eta(lift) = class", eta(a, r, N) == x, {{"class", x}, {"lift", a.str()}});
            cond.expect("nebentypus lift in Phi_{r+1}^2 and Gamma^0(2)",
                        is_member(b, SubgroupSpec::phi(N, r + 1, 2).with_upper0()) && is_member(b, phi2_upper0),
                        {{"class", x}, {"lift", b.str()}});
            cond.expect("eta(nebentypus lift) = class", eta(b, r, N) == x, {{"class", x}, {"lift", b.str()}});
            lifts.push_back(a);
        }
        for (std::size_t i = 0; i < lifts.size(); ++i)
            for (std::size_t j = 0; j < lifts.size(); ++j) {
                const std::int64_t lhs = eta(lifts[i] * lifts[j], r, N);
                const std::int64_t rhs = floor_mod(classes[i] * classes[j], mod);
                cond.expect("eta is multiplicative", lhs == rhs, {{"x", classes[i]}, {"y", classes[j]}});
            }
        // 5 generates a cyclic group of order 2^(r-2).
        std::int64_t order = 1, x = 5 % mod;
        while (x != 1 % mod) x = floor_mod(x * 5, mod), ++order;
        cond.expect("cyclic of order 2^(r-2)", order == pow2(r - 2) && std::int64_t(classes.size()) == order,
                    {{"order_of_5", order}, {"classes", classes.size()}});
        // t^-1 m t for m in Phi_{r+1}^2 lands in Phi_r^2 ∩ Gamma^0(2) with the reduced class.
        for (std::int64_t y : gamma_classes(2, r + 1)) {
            const Mat2 m = eta_lift(y, r + 1, N, false);
            const Mat2 down = conjugate_by_t_inverse(m);
            cond.expect("t^-1 m t in Phi_r^2 and Gamma^0(2)", is_member(down, phi2_upper0), {{"m", m.str()}});
            cond.expect("eta_r(t^-1 m t) = eta_{r+1}(m) mod 2^r", eta(down, r, N) == floor_mod(y, mod),
                        {{"m", m.str()}});
        }
        w["classes"] = classes.size();
    });
}

inline CheckResult verify_presentation_rank(Session& ses, std::int64_t N, int r) {
    return detail::run_check(check_id::presentation_rank, {N, r, std::nullopt, std::nullopt},
                             [&](json& w, detail::Conditions& cond) {
        const SubgroupSpec g1 = SubgroupSpec::gamma1(N, r);
        const FreePresentation& p = ses.presentation(g1);
        const std::int64_t n = p.table().index_psl();
        const std::int64_t oracle = congruence_index(g1);
        cond.expect("rank = 1 + index_psl/6", n % 6 == 0 && std::int64_t(p.rank()) == 1 + n / 6,
                    {{"rank", p.rank()}, {"index_psl", n}});
        cond.expect("coset index matches SL2(Z/M) count", p.table().index_sl2() == oracle,
                    {{"cosets", p.table().index_sl2()}, {"count", oracle}});
        const SubgroupSpec phi2 = SubgroupSpec::phi(N, r, 2);
        const std::int64_t phi_index = ses.presentation(phi2).table().index_sl2();
        cond.expect("[Phi_r^2 : Gamma1] = 2^(r-2)", p.table().index_sl2() == phi_index * pow2(r - 2),
                    {{"index_phi", phi_index}, {"index_gamma1", p.table().index_sl2()}});
        w["rank"] = p.rank();
        w["index"] = p.table().index_sl2();
    });
}

inline CheckResult verify_factorization(Session& ses, const Level& lv) {
    return detail::run_check(check_id::factorization, {lv.N, lv.r, lv.s, std::nullopt}, [&](json& w, detail::Conditions& cond) {
        const AtkinOperators& op = ses.atkin(lv);
        const AbMap composite = compose(op.inclusion, compose(op.conjugation, op.transfer));
        cond.equal("U = inc . C_t . V", op.U.matrix, composite.matrix);
        cond.equal("U = sum of t h_i t^-1", op.U.matrix, op.U_direct.matrix);
        cond.equal("U' = C_t . V", op.Uprime.matrix, compose(op.conjugation, op.transfer).matrix);
        const std::size_t n = op.conjugation.rows();
        cond.equal("C_t . C_t^-1 = I", (op.conjugation.matrix * op.conjugation_inverse.matrix), IntMat::identity(n));
        cond.equal("C_t^-1 . C_t = I", (op.conjugation_inverse.matrix * op.conjugation.matrix), IntMat::identity(n));
        const FreePresentation& low = ses.presentation(op.phi_upper0);
        for (const Mat2& A : low.gens()) {
            const Mat2 c = conjugate_by_t(A);
            cond.expect("t A t^-1 keeps the diagonal", c.a == A.a && c.d == A.d, {{"A", A.str()}});
        }
        w["rank"] = op.U.rows();
        w["U_digest"] = detail::hex(op.U.matrix.digest());
    });
}

inline CheckResult verify_level_relations(Session& ses, const Level& lv) {
    return detail::run_check(check_id::level_relations, {lv.N, lv.r, lv.s, std::nullopt}, [&](json& w, detail::Conditions& cond) {
        const AtkinOperators& op = ses.atkin(lv);
        cond.equal("pi_{r+1} . U'_r = U_r", compose(op.inclusion, op.Uprime).matrix, op.U.matrix);
        int identities = 1;
        if (lv.r > lv.s) {
            const AtkinOperators& lower = ses.atkin({lv.N, lv.r - 1, lv.s});
            const AbMap& pi = ses.inclusion(op.phi, lower.phi);
            cond.equal("U'_{r-1} . pi_r = U_r", compose(lower.Uprime, pi).matrix, op.U.matrix);
            cond.equal("pi_r . U'_{r-1} = U_{r-1}", compose(pi, lower.Uprime).matrix, lower.U.matrix);
            identities += 2;
        }
        w["identities"] = identities;
    });
}

inline CheckResult verify_chain_equivariance(Session& ses, const Level& lv) {
    return detail::run_check(check_id::chain_equivariance, {lv.N, lv.r, lv.s, std::nullopt}, [&](json& w, detail::Conditions& cond) {
        const AbMap c = chain_map(ses.workspace(), lv.N, lv.r, lv.s);
        const AbMap& Ur = ses.hecke(lv.N, lv.r);
        const AbMap& Us = ses.hecke(lv.N, lv.s);
        cond.equal("c . U_r = U_s . c", compose(c, Ur).matrix, compose(Us, c).matrix);
        const AbMap& Uphi = ses.atkin(lv).U;
        const AbMap& i1 = ses.inclusion(SubgroupSpec::gamma1(lv.N, lv.r), SubgroupSpec::phi(lv.N, lv.r, lv.s));
        const AbMap& i2 = ses.inclusion(SubgroupSpec::phi(lv.N, lv.r, lv.s), SubgroupSpec::gamma1(lv.N, lv.s));
        cond.equal("Gamma1 -> Phi commutes with U", compose(i1, Ur).matrix, compose(Uphi, i1).matrix);
        cond.equal("Phi -> Gamma1 commutes with U", compose(i2, Uphi).matrix, compose(Us, i2).matrix);
        for (std::int64_t x : gamma_classes(2, lv.r)) {
            const AbMap& Dr = ses.diamond(x, {lv.N, lv.r, lv.r});
            const AbMap& Ds = ses.diamond(floor_mod(x, pow2(lv.s)), {lv.N, lv.s, lv.s});
            cond.equal("c . <" + std::to_string(x) + ">_r = <" + std::to_string(x) + ">_s . c",
                       compose(c, Dr).matrix, compose(Ds, c).matrix);
        }
        w["shape"] = c.matrix.shape();
    });
}

inline CheckResult verify_cokernel_action(Session& ses, const Level& lv) {
    return detail::run_check(check_id::cokernel_action, {lv.N, lv.r, lv.s, std::nullopt}, [&](json& w, detail::Conditions& cond) {
        const AbMap& inc = ses.inclusion(SubgroupSpec::gamma1(lv.N, lv.r), SubgroupSpec::phi(lv.N, lv.r, lv.s));
        const SmithForm snf = smith_normal_form(inc.matrix);
        const std::size_t n = inc.rows();
        json divisors = json::array();
        for (const Int& d : snf.divisors)
            if (d != 1) divisors.push_back(d.str());
        w["cokernel"] = divisors;
        const Int expected = Int(1) << (lv.r - lv.s);
        bool cyclic = snf.rank() == n;
        for (std::size_t i = 0; cyclic && i + 1 < n; ++i) cyclic = snf.divisors[i] == 1;
        cyclic = cyclic && (n == 0 || snf.divisors[n - 1] == expected);
        if (!cond.expect("cokernel is Z/2^(r-s)", cyclic)) return;
        const IntMat T = ses.atkin(lv).U.matrix - IntMat::identity(n).scaled(2);
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<Int> col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = T(i, j);
            cond.expect("(U - 2) maps into the image", in_column_span(snf, col), {{"basis_vector", j}});
        }
    });
}

inline CheckResult verify_diamond_commutation(Session& ses, const Level& lv) {
    return detail::run_check(check_id::diamond_commutation, {lv.N, lv.r, lv.s, std::nullopt}, [&](json& w, detail::Conditions& cond) {
        const IntMat& U = ses.atkin(lv).U.matrix;
        const std::size_t n = U.rows();
        const std::int64_t mod = pow2(lv.r);
        const IntMat& g = ses.diamond(5, lv).matrix;
        for (std::int64_t x : gamma_classes(2, lv.r)) {
            const std::string tag = "<" + std::to_string(x) + ">";
            const IntMat& D = ses.diamond(x, lv).matrix;
            cond.equal("U " + tag + " = " + tag + " U", IntMat(U * D), IntMat(D * U));
            cond.equal(tag + " is lift-independent", D, ses.diamond(x, lv, 1).matrix);
            cond.equal(tag + "<5> = <5x>", IntMat(D * g), ses.diamond(floor_mod(5 * x, mod), lv).matrix);
        }
        cond.equal("<1> = I", ses.diamond(1, lv).matrix, IntMat::identity(n));
        IntMat p = IntMat::identity(n);
        for (std::int64_t i = 0; i < pow2(lv.r - 2); ++i) p = p * g;
        cond.equal("<5>^(2^(r-2)) = I", p, IntMat::identity(n));
        w["classes"] = pow2(lv.r - 2);
    });
}

inline CheckResult verify_transfer_down_commutation(Session& ses, const Level& lv) {
    return detail::run_check(check_id::transfer_down_commutation, {lv.N, lv.r, lv.s, std::nullopt}, [&](json& w, detail::Conditions& cond) {
        const AbMap& T = ses.transfer_down(lv);
        cond.equal("V . U_Phi = U_Gamma1 . V", compose(T, ses.atkin(lv).U).matrix,
                   compose(ses.hecke(lv.N, lv.r), T).matrix);
        w["shape"] = T.matrix.shape();
    });
}

inline CheckResult verify_transfer_norm(Session& ses, const Level& lv) {
    return detail::run_check(check_id::transfer_norm, {lv.N, lv.r, lv.s, std::nullopt},
                             [&](json& w, detail::Conditions& cond) {
        const AtkinOperators& op = ses.atkin(lv);
        const FreePresentation& phi = ses.presentation(op.phi);
        const FreePresentation& low = ses.presentation(op.phi_upper0);
        const std::size_t n = phi.rank();
        const AbMap& back = ses.inclusion(op.phi_upper0, op.phi);
        cond.equal("incl . V = 2", compose(back, op.transfer).matrix, IntMat::identity(n).scaled(2));
        cond.equal("V is independent of representatives", transfer(phi, low, coset_representatives(phi, low)).matrix,
                   op.transfer.matrix);
        const AbMap& down = ses.transfer_down(lv);
        const AbMap& up = ses.inclusion(SubgroupSpec::gamma1(lv.N, lv.r), op.phi);
        cond.equal("incl . V_down = 2^(r-s)", compose(up, down).matrix,
                   IntMat::identity(n).scaled(Int(1) << (lv.r - lv.s)));
        w["transfers"] = 3;
    });
}

namespace detail {

/// Control map H_r^ord -> H_s^ord and the two Phi factors, at precision k.
inline void control_at(Session& ses, const Level& lv, int k, json& w, Conditions& cond) {
    const Level top{lv.N, lv.r, lv.r}, bottom{lv.N, lv.s, lv.s};
    const OrdinaryModule& Or = ses.ordinary(top, k);
    const OrdinaryModule& Os = ses.ordinary(bottom, k);
    const OrdinaryModule& Ophi = ses.ordinary(lv, k);
    const std::size_t dr = Or.ord_rank(), ds = Os.ord_rank(), dphi = Ophi.ord_rank();
    w["d_r"] = dr;
    w["d_s"] = ds;
    w["d_phi"] = dphi;

    const ModMat G = ModMat::from(ses.diamond(gamma_generator(lv.s, lv.r), top).matrix, k);
    const PresentedModule co = coinvariants(Or, G);
    const ModMat Gm1 = Or.restrict(G) - ModMat::identity(dr, k);
    w["coinvariants"] = co.exponents;

    const AbMap c = chain_map(ses.workspace(), lv.N, lv.r, lv.s);
    const ModMat C = restrict_map(Or, Os, c.matrix);
    cond.expect("control map kills (gamma_s - 1)", (C * Gm1).is_zero());
    cond.expect("control map is onto", rank_mod2(C) == ds, {{"rank_mod2", rank_mod2(C)}});
    cond.expect("coinvariants are free of rank d_s", isomorphic(co, free_module(ds, k)), {{"found", co.str()}});

    const AbMap& i1 = ses.inclusion(SubgroupSpec::gamma1(lv.N, lv.r), SubgroupSpec::phi(lv.N, lv.r, lv.s));
    const AbMap& i2 = ses.inclusion(SubgroupSpec::phi(lv.N, lv.r, lv.s), SubgroupSpec::gamma1(lv.N, lv.s));
    const ModMat P = restrict_map(Or, Ophi, i1.matrix);
    const ModMat Q = restrict_map(Ophi, Os, i2.matrix);
    cond.expect("Gamma1 -> Phi kills (gamma_s - 1)", (P * Gm1).is_zero());
    cond.expect("Gamma1 -> Phi is onto", rank_mod2(P) == dphi, {{"rank_mod2", rank_mod2(P)}});
    cond.expect("Phi^ord and H_s^ord have equal rank", dphi == ds);
    cond.expect("Phi -> Gamma1 is invertible", Q.rows() == Q.cols() && rank_mod2(Q) == ds,
                {{"rank_mod2", rank_mod2(Q)}});
    cond.equal("composite of factors = control map", ModMat(Q * P), C);
}

}  // namespace detail

inline CheckResult verify_control(Session& ses, const Level& lv, int k) {
    return detail::run_check(check_id::control, {lv.N, lv.r, lv.s, k}, [&](json& w, detail::Conditions& cond) {
        detail::with_escalation(k, w, [&](int kk) { detail::control_at(ses, lv, kk, w, cond); });
    });
}

inline CheckResult verify_control_composition(Session& ses, const Level& lv, int k) {
    return detail::run_check(check_id::control_composition, {lv.N, lv.r, lv.s, k}, [&](json& w, detail::Conditions& cond) {
        detail::with_escalation(k, w, [&](int kk) {
            const Level top{lv.N, lv.r, lv.r}, bottom{lv.N, lv.s, lv.s};
            const OrdinaryModule& Or = ses.ordinary(top, kk);
            const OrdinaryModule& Os = ses.ordinary(bottom, kk);
            const ModMat direct = restrict_map(Or, Os, chain_map(ses.workspace(), lv.N, lv.r, lv.s).matrix);
            const ModMat Gr = Or.restrict(ModMat::from(ses.diamond(gamma_generator(lv.s, lv.r), top).matrix, kk));
            json mids = json::array();
            for (int m = lv.s + 1; m < lv.r; ++m) {
                const Level mid{lv.N, m, m};
                const OrdinaryModule& Om = ses.ordinary(mid, kk);
                const ModMat upper = restrict_map(Or, Om, chain_map(ses.workspace(), lv.N, lv.r, m).matrix);
                const ModMat lower = restrict_map(Om, Os, chain_map(ses.workspace(), lv.N, m, lv.s).matrix);
                const ModMat Gm = Om.restrict(ModMat::from(ses.diamond(gamma_generator(lv.s, m), mid).matrix, kk));
                const std::string tag = " via r'=" + std::to_string(m);
                cond.equal("(r->s) = (r'->s)(r->r')" + tag, ModMat(lower * upper), direct);
                cond.equal("(r->r') is gamma_s-equivariant" + tag, ModMat(upper * Gr), ModMat(Gm * upper));
                cond.expect("(r->r') is onto" + tag, rank_mod2(upper) == Om.ord_rank());
                mids.push_back(m);
            }
            w["intermediate"] = mids;
        });
    });
}

inline CheckResult verify_rank_stability(Session& ses, std::int64_t N, int r_min, int r_max, int k) {
    return detail::run_check(check_id::rank_stability, {N, r_max, std::nullopt, k}, [&](json& w, detail::Conditions& cond) {
        if (r_min < 2 || r_max > 6) throw precondition_error("verify_rank_stability: range must lie in [2, 6]");
        detail::with_escalation(k, w, [&](int kk) {
            json ranks = json::object();
            std::vector<std::size_t> values;
            for (int r = r_min; r <= r_max; ++r) {
                values.push_back(ses.ordinary({N, r, r}, kk).ord_rank());
                ranks[std::to_string(r)] = values.back();
            }
            const std::size_t nakayama = ses.ordinary({N, 2, 2}, 1).ord_rank();
            w["ord_rank"] = ranks;
            w["d"] = values.front();
            w["nakayama_dim"] = nakayama;
            cond.expect("ord_rank constant in r",
                        std::all_of(values.begin(), values.end(), [&](std::size_t v) { return v == values.front(); }),
                        ranks);
            cond.expect("d equals the mod-2 dimension at level 2", values.front() == nakayama);
        });
    });
}

/// ord_rank(H_r) = d 2^(r-2): H_r^ord is free over Z_2[Gamma/Gamma_r] of rank d.
inline CheckResult verify_lambda_rank(Session& ses, std::int64_t N, int r_min, int r_max, int k) {
    return detail::run_check(check_id::lambda_rank, {N, r_max, std::nullopt, k}, [&](json& w, detail::Conditions& cond) {
        detail::with_escalation(k, w, [&](int kk) {
            const std::size_t d = ses.ordinary({N, 2, 2}, kk).ord_rank();
            const std::size_t nakayama = ses.ordinary({N, 2, 2}, 1).ord_rank();
            json ranks = json::object();
            for (int r = r_min; r <= r_max; ++r) {
                const std::size_t v = ses.ordinary({N, r, r}, kk).ord_rank();
                ranks[std::to_string(r)] = v;
                cond.expect("ord_rank(H_" + std::to_string(r) + ") = d 2^(r-2)", v == d * pow2(r - 2),
                            {{"ord_rank", v}, {"d", d}});
                const PresentedModule co = coinvariants(
                    ses.ordinary({N, r, r}, kk),
                    ModMat::from(ses.diamond(gamma_generator(2, r), {N, r, r}).matrix, kk));
                cond.expect("gamma_2-coinvariants of H_" + std::to_string(r) + " free of rank d",
                            isomorphic(co, free_module(d, kk)), {{"found", co.str()}});
            }
            w["d"] = d;
            w["nakayama_dim"] = nakayama;
            w["ord_rank"] = ranks;
            cond.expect("d equals the mod-2 dimension at level 2", d == nakayama);
        });
    });
}

inline CheckResult verify_dual_rank(Session& ses, const Level& lv, int k) {
    return detail::run_check(check_id::dual_rank, {lv.N, lv.r, lv.s, k}, [&](json& w, detail::Conditions& cond) {
        detail::with_escalation(k, w, [&](int kk) {
            const Level top{lv.N, lv.r, lv.r}, bottom{lv.N, lv.s, lv.s};
            const OrdinaryModule& Or = ses.ordinary(top, kk);
            const OrdinaryModule& OrT = ses.ordinary(top, kk, true);
            const OrdinaryModule& OphiT = ses.ordinary(lv, kk, true);
            const std::size_t dr = Or.ord_rank(), ds = ses.ordinary(bottom, kk).ord_rank();
            cond.expect("ord_rank(U) = ord_rank(U^T)", dr == OrT.ord_rank(), {{"U", dr}, {"UT", OrT.ord_rank()}});

            const IntMat Vt = ses.transfer_down(lv).matrix.transpose();
            const ModMat D = restrict_map(OrT, OphiT, Vt);
            const ModSmithForm snf = smith_normal_form(D);
            const bool onto = snf.unit_count() == OphiT.ord_rank();
            cond.expect("V^T is onto on ordinary parts", onto,
                        {{"unit_divisors", snf.unit_count()}, {"target_rank", OphiT.ord_rank()}});
            const std::size_t kernel = D.cols() - snf.unit_count();
            cond.expect("kernel rank = d_r - d_s", kernel + ds == dr, {{"kernel", kernel}, {"d_r", dr}, {"d_s", ds}});

            const ModMat Gt = OrT.restrict(
                ModMat::from(ses.diamond(gamma_generator(lv.s, lv.r), top).matrix.transpose(), kk));
            const ModMat Gm1 = Gt - ModMat::identity(Gt.rows(), kk);
            cond.expect("(gamma_s - 1) lies in the kernel", (D * Gm1).is_zero());
            const PresentedModule co = cokernel(Gm1);
            cond.expect("kernel is the (gamma_s - 1) image", onto && isomorphic(co, free_module(ds, kk)),
                        {{"found", co.str()}});
            w["d_r"] = dr;
            w["d_s"] = ds;
            w["kernel_rank"] = kernel;
        });
    });
}

/// The exact operator identities at one (N, r, s).
inline std::vector<CheckResult> verify_operator_lemmas(Session& ses, const Level& lv) {
    return {verify_factorization(ses, lv),     verify_level_relations(ses, lv),     verify_chain_equivariance(ses, lv), verify_cokernel_action(ses, lv),
            verify_diamond_commutation(ses, lv), verify_transfer_down_commutation(ses, lv), verify_transfer_norm(ses, lv)};
}

// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<CheckResult> run_for_N(const Config& cfg, std::int64_t N,
                                          const std::function<void(const CheckResult&)>& emit) {
    const std::set<std::string> sel(cfg.checks.begin(), cfg.checks.end());
    auto on = [&](const std::string& id) { return sel.count(id) > 0; };
    Session ses(cfg.coset_bound);
    std::vector<CheckResult> out;
    auto push = [&](CheckResult c) {
        emit(c);
        out.push_back(std::move(c));
    };
    const int k = cfg.precision;
    for (int r = cfg.r_min; r <= cfg.r_max; ++r) {
        if (on(check_id::eta_surjective)) push(verify_eta(N, r));
        if (on(check_id::presentation_rank)) push(verify_presentation_rank(ses, N, r));
        for (int s = std::max(2, cfg.s_min); s <= r; ++s) {
            const Level lv{N, r, s};
            if (on(check_id::factorization)) push(verify_factorization(ses, lv));
            if (on(check_id::level_relations)) push(verify_level_relations(ses, lv));
            if (on(check_id::chain_equivariance)) push(verify_chain_equivariance(ses, lv));
            if (on(check_id::cokernel_action)) push(verify_cokernel_action(ses, lv));
            if (on(check_id::diamond_commutation)) push(verify_diamond_commutation(ses, lv));
            if (on(check_id::transfer_down_commutation)) push(verify_transfer_down_commutation(ses, lv));
            if (on(check_id::transfer_norm)) push(verify_transfer_norm(ses, lv));
            if (on(check_id::control)) push(verify_control(ses, lv, k));
            if (on(check_id::dual_rank)) push(verify_dual_rank(ses, lv, k));
            if (on(check_id::control_composition) && r - s >= 2) push(verify_control_composition(ses, lv, k));
        }
    }
    if (on(check_id::rank_stability)) push(verify_rank_stability(ses, N, cfg.r_min, cfg.r_max, k));
    if (on(check_id::lambda_rank)) push(verify_lambda_rank(ses, N, cfg.r_min, cfg.r_max, k));
    return out;
}

}  // namespace detail

/// Runs the selected checks over the grid. Levels with different N run on
/// up to cfg.jobs threads; results are ordered by N, then r, then s.
inline ControlReport run(const Config& cfg, const std::function<void(const CheckResult&)>& progress = {}) {
    cfg.validate();
    ControlReport rep;
    rep.config = cfg;
    std::vector<std::vector<CheckResult>> per_N(cfg.N.size());
    std::mutex mu;
    auto emit = [&](const CheckResult& c) {
        if (!progress) return;
        std::lock_guard<std::mutex> lock(mu);
        progress(c);
    };
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cfg.N.size();) per_N[i] = detail::run_for_N(cfg, cfg.N[i], emit);
    };
    const std::size_t threads = std::min<std::size_t>(cfg.jobs, cfg.N.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    for (std::size_t i = 0; i < cfg.N.size(); ++i) {
        std::optional<std::int64_t> d;
        for (CheckResult& c : per_N[i]) {
            if (c.id == check_id::rank_stability || c.id == check_id::lambda_rank) {
                if (c.status != Status::pass && c.id == check_id::rank_stability) rep.stable = false;
                if (!d && c.witness.contains("d")) d = c.witness["d"].get<std::int64_t>();
            }
            rep.checks.push_back(std::move(c));
        }
        if (!rep.d_by_N.count(cfg.N[i]) || d) rep.d_by_N[cfg.N[i]] = d;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// JSON.

inline json to_json(const Params& p) {
    return {{"N", p.N}, {"r", p.r}, {"s", p.s ? json(*p.s) : json(nullptr)}, {"k", p.k ? json(*p.k) : json(nullptr)}};
}

inline json to_json(const CheckResult& c, bool timing = true) {
    json j = {{"id", c.id}, {"params", to_json(c.params)}, {"status", to_string(c.status)}, {"witness", c.witness}};
    j["ms"] = timing ? json(c.ms) : json(0);
    return j;
}

inline json to_json(const Config& c) {
    return {{"N", c.N},
            {"r_min", c.r_min},
            {"r_max", c.r_max},
            {"s_min", c.s_min},
            {"precision", c.precision},
            {"checks", c.checks},
            {"jobs", c.jobs},
            {"coset_bound", c.coset_bound}};
}

/// The report document. With timing = false every "ms" field is zero, so
/// equal configurations give byte-identical output.
inline json to_json(const ControlReport& r, bool timing = true) {
    json checks = json::array();
    for (const CheckResult& c : r.checks) checks.push_back(to_json(c, timing));
    json d = json::object();
    for (const auto& [N, v] : r.d_by_N) d[std::to_string(N)] = v ? json(*v) : json(nullptr);
    return {{"version", r.version},
            {"config", to_json(r.config)},
            {"checks", std::move(checks)},
            {"summary",
             {{"d_by_N", std::move(d)},
              {"stable", r.stable},
              {"pass", r.count(Status::pass)},
              {"fail", r.count(Status::fail)},
              {"skipped", r.count(Status::skipped)},
              {"warnings", r.warnings()}}}};
}

}  // namespace control2
