// One line per acceptance criterion: PASS/FAIL, elapsed time, detail.

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

using namespace control2;

namespace {

const std::vector<std::int64_t> grid_N = {1, 3, 5};

struct Outcome {
    bool ok = true;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0 && s > limit_s) {
        o.ok = false;
        o.detail += (o.detail.empty() ? "" : "; ") + std::string("time limit exceeded");
    }
    if (!o.ok) ++failures;
    std::printf("%s  criterion %2d  %-58s %8.3fs%s  %s\n", o.ok ? "PASS" : "FAIL", id, title.c_str(), s,
                limit_s > 0 ? (" (limit " + std::to_string(static_cast<int>(limit_s)) + "s)").c_str() : "",
                o.detail.c_str());
    std::fflush(stdout);
}

/// Runs a level-wise check over 2 <= s <= r <= 4 for every N.
Outcome over_grid(Session& ses, const std::function<CheckResult(Session&, const Level&)>& check) {
    Outcome o;
    int n = 0;
    for (std::int64_t N : grid_N)
        for (int r = 2; r <= 4; ++r)
            for (int s = 2; s <= r; ++s) {
                const CheckResult c = check(ses, {N, r, s});
                ++n;
                if (c.status != Status::pass && o.ok) {
                    o.ok = false;
                    o.detail = c.id + " at N=" + std::to_string(N) + " r=" + std::to_string(r) +
                               " s=" + std::to_string(s) + ": " + c.witness.dump();
                }
            }
    if (o.ok) o.detail = std::to_string(n) + " levels";
    return o;
}

}  // namespace

int main() {
    Session ses;

    criterion(1, "eta_r and its Gamma^0(2) restriction are surjective", 1, [] {
        Outcome o;
        int n = 0;
        for (std::int64_t N : grid_N)
            for (int r = 2; r <= 6; ++r) {
                const CheckResult c = verify_eta(N, r);
                ++n;
                if (c.status != Status::pass) return Outcome{false, "N=" + std::to_string(N) + " r=" +
                                                                        std::to_string(r) + " " + c.witness.dump()};
            }
        o.detail = std::to_string(n) + " levels";
        return o;
    });

    criterion(2, "presentation ranks match the independent index count", 10, [&] {
        for (std::int64_t N : grid_N)
            for (int r = 2; r <= 4; ++r) {
                const SubgroupSpec g = SubgroupSpec::gamma1(N, r);
                const FreePresentation& p = ses.presentation(g);
                const std::int64_t brute = oracle::brute_index(g);
                if (p.table().index_sl2() != brute || std::int64_t(p.rank()) != 1 + brute / 12)
                    return Outcome{false, g.name() + ": rank " + std::to_string(p.rank()) + ", index " +
                                              std::to_string(brute)};
            }
        return Outcome{true, "9 levels"};
    });

    criterion(3, "U = inc C_t V and U' pi = pi' U' = U exactly", 60, [&] {
        Outcome a = over_grid(ses, verify_factorization);
        if (!a.ok) return a;
        return over_grid(ses, verify_level_relations);
    });

    criterion(4, "U acts as 2 on coker(Gamma1^ab -> Phi^ab) = Z/2^(r-s)", 0,
              [&] { return over_grid(ses, verify_cokernel_action); });

    criterion(5, "U commutes with diamonds and transfer_down; lifts agree", 0, [&] {
        Outcome a = over_grid(ses, verify_diamond_commutation);
        if (!a.ok) return a;
        return over_grid(ses, verify_transfer_down_commutation);
    });

    criterion(6, "control isomorphism at k = 16 and k = 32, same verdicts", 300, [&] {
        Outcome o;
        int n = 0;
        for (std::int64_t N : grid_N)
            for (int r = 2; r <= 4; ++r)
                for (int s = 2; s <= r; ++s) {
                    const CheckResult a = verify_control(ses, {N, r, s}, 16);
                    const CheckResult b = verify_control(ses, {N, r, s}, 32);
                    ++n;
                    if (a.status != Status::pass || b.status != Status::pass)
                        return Outcome{false, "N=" + std::to_string(N) + " r=" + std::to_string(r) + " s=" +
                                                  std::to_string(s) + " k16=" + to_string(a.status) +
                                                  " k32=" + to_string(b.status)};
                }
        o.detail = std::to_string(n) + " levels x 2 precisions";
        return o;
    });

    criterion(7, "ord_rank(H_r) constant in r over [2,4]; equals mod-2 dim", 0, [&] {
        Outcome o;
        for (std::int64_t N : grid_N) {
            const CheckResult c = verify_rank_stability(ses, N, 2, 4, 16);
            o.detail += "N=" + std::to_string(N) + " ranks " + c.witness["ord_rank"].dump() + " ";
            if (c.status != Status::pass) o.ok = false;
        }
        return o;
    });

    criterion(8, "incl . V = [G:H] for every transfer in the grid", 0,
              [&] { return over_grid(ses, verify_transfer_norm); });

    criterion(9, "SNF re-verification and ordinary idempotent properties", 30, [] {
        std::mt19937_64 rng(20240601);
        std::uniform_int_distribution<std::int64_t> entry(-1000, 1000);
        for (int it = 0; it < 1000; ++it) {
            const std::size_t m = 1 + rng() % 8, n = 1 + rng() % 8;
            IntMat A(m, n);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) A(i, j) = entry(rng);
            const SmithForm s = smith_normal_form(A);
            if (s.L * A * s.R != s.D) return Outcome{false, "L A R != D for " + A.str()};
            for (std::size_t i = 0; i + 1 < s.rank(); ++i)
                if (s.divisors[i + 1] % s.divisors[i] != 0) return Outcome{false, "divisibility for " + A.str()};
        }
        for (int it = 0; it < 200; ++it) {
            const std::size_t n = 1 + rng() % 8;
            IntMat A(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) A(i, j) = entry(rng);
            const ModMat U = ModMat::from(A, 16);
            const ModMat e = ordinary_idempotent(U);
            if (!(e * e == e) || !(e * U == U * e)) return Outcome{false, "idempotent for " + A.str()};
            if (!(ordinary_idempotent(U.truncated(8)) == e.truncated(8)))
                return Outcome{false, "precision coherence for " + A.str()};
        }
        return Outcome{true, "1000 SNF, 200 idempotents"};
    });

    criterion(10, "identical configurations give identical reports", 0, [] {
        const Config cfg;
        const std::string a = to_json(run(cfg), false).dump();
        const std::string b = to_json(run(cfg), false).dump();
        return Outcome{a == b, std::to_string(a.size()) + " bytes"};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
