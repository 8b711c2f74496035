#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace control2;

namespace {

void expect_pass(const CheckResult& c) {
    EXPECT_EQ(c.status, Status::pass) << c.id << " " << c.witness.dump();
}

}  // namespace

TEST(verify_eta, examples) {
    const CheckResult a = verify_eta(1, 3);
    expect_pass(a);
    EXPECT_EQ(a.witness["classes"], 2);
    EXPECT_EQ(verify_eta(1, 2).witness["classes"], 1);
    EXPECT_EQ(verify_eta(3, 4).witness["classes"], 4);
    EXPECT_EQ(verify_eta(5, 7).status, Status::fail);
}

TEST(verify_operator_lemmas, examples) {
    Session ses;
    for (const Level& lv : {Level{1, 3, 2}, Level{1, 2, 2}, Level{3, 4, 2}}) {
        const std::vector<CheckResult> rs = verify_operator_lemmas(ses, lv);
        EXPECT_EQ(rs.size(), 7u);
        for (const CheckResult& c : rs) expect_pass(c);
    }
    EXPECT_EQ(verify_cokernel_action(ses, {1, 2, 2}).witness["cokernel"].size(), 0u);
    EXPECT_EQ(verify_cokernel_action(ses, {1, 4, 2}).witness["cokernel"], json::array({"4"}));
}

TEST(verify_control, examples) {
    Session ses;
    for (const Level& lv : {Level{1, 3, 2}, Level{3, 4, 2}, Level{1, 2, 2}, Level{3, 3, 3}}) {
        const CheckResult c = verify_control(ses, lv, 16);
        expect_pass(c);
        EXPECT_EQ(c.witness["d_phi"], c.witness["d_s"]);
    }
    const CheckResult c = verify_control(ses, {1, 3, 2}, 32);
    expect_pass(c);
    EXPECT_EQ(c.witness["k_used"], 32);
}

TEST(verify_control, same_verdict_across_precisions) {
    Session ses;
    for (int k : {4, 8, 16, 32, 64}) {
        const CheckResult c = verify_control(ses, {3, 4, 3}, k);
        expect_pass(c);
        EXPECT_EQ(c.witness["d_r"], 16);
        EXPECT_EQ(c.witness["d_s"], 8);
    }
}

TEST(verify_control_composition, composition) {
    Session ses;
    const CheckResult c = verify_control_composition(ses, {3, 4, 2}, 16);
    expect_pass(c);
    EXPECT_EQ(c.witness["intermediate"], json::array({3}));
}

TEST(verify_rank_stability, singleton_range) {
    Session ses;
    const CheckResult c = verify_rank_stability(ses, 1, 2, 2, 16);
    expect_pass(c);
    EXPECT_EQ(c.witness["d"], 1);
    EXPECT_EQ(c.witness["nakayama_dim"], 1);
}

TEST(verify_rank_stability, growing_ranks_are_reported) {
    // The ordinary ranks grow like d 2^(r-2); the constant-rank check
    // records the counterexample.
    Session ses;
    const CheckResult c = verify_rank_stability(ses, 1, 2, 4, 16);
    EXPECT_EQ(c.status, Status::fail);
    EXPECT_EQ(c.witness["ord_rank"], (json{{"2", 1}, {"3", 2}, {"4", 4}}));
    ASSERT_TRUE(c.witness.contains("failures"));
    EXPECT_EQ(c.witness["failures"][0]["condition"], "ord_rank constant in r");
}

TEST(verify_lambda_rank, ranks_scale_with_the_group_ring) {
    Session ses;
    for (std::int64_t N : {1, 3, 5}) {
        const CheckResult c = verify_lambda_rank(ses, N, 2, N == 5 ? 3 : 4, 16);
        expect_pass(c);
    }
}

TEST(verify_dual_rank, examples) {
    Session ses;
    for (const Level& lv : {Level{1, 3, 2}, Level{3, 3, 2}, Level{3, 3, 3}}) {
        const CheckResult c = verify_dual_rank(ses, lv, 16);
        expect_pass(c);
        if (lv.r == lv.s) EXPECT_EQ(c.witness["kernel_rank"], 0);
    }
}

TEST(verify_presentation_rank, grid) {
    Session ses;
    for (std::int64_t N : {1, 3, 5})
        for (int r = 2; r <= 4; ++r) expect_pass(verify_presentation_rank(ses, N, r));
}

TEST(run, empty_check_list) {
    Config cfg;
    cfg.checks.clear();
    const ControlReport rep = run(cfg);
    EXPECT_TRUE(rep.checks.empty());
    EXPECT_TRUE(rep.passed());
    EXPECT_EQ(rep.warnings(), 0u);
}

TEST(run, resource_guard_gives_skipped_entries) {
    Config cfg;
    cfg.N = {1};
    cfg.r_min = 4;
    cfg.r_max = 4;
    cfg.coset_bound = 20;
    cfg.checks = {check_id::factorization, check_id::eta_surjective};
    const ControlReport rep = run(cfg);
    ASSERT_FALSE(rep.checks.empty());
    EXPECT_GT(rep.warnings(), 0u);
    EXPECT_GT(rep.count(Status::skipped), 0u);
    EXPECT_EQ(rep.count(Status::fail), 0u);
}

TEST(run, deterministic_and_ordered) {
    Config cfg;
    cfg.N = {3, 1};
    cfg.r_max = 3;
    cfg.checks = {check_id::factorization, check_id::control, check_id::diamond_commutation};
    const std::string a = to_json(run(cfg), false).dump();
    cfg.jobs = 2;
    const ControlReport par = run(cfg);
    cfg.jobs = 1;
    EXPECT_EQ(a, to_json(run(cfg), false).dump());
    json ja = json::parse(a), jb = to_json(par, false);
    ja.erase("config");
    jb.erase("config");
    EXPECT_EQ(ja, jb);
    EXPECT_EQ(par.checks.front().params.N, 3);
}

TEST(run, report_schema) {
    Config cfg;
    cfg.N = {1};
    cfg.r_max = 3;
    const json j = to_json(run(cfg));
    ASSERT_TRUE(j["version"].is_string());
    ASSERT_TRUE(j["config"].is_object());
    ASSERT_TRUE(j["checks"].is_array());
    for (const json& c : j["checks"]) {
        for (const char* key : {"id", "params", "status", "witness", "ms"}) ASSERT_TRUE(c.contains(key)) << key;
        for (const char* key : {"N", "r", "s", "k"}) ASSERT_TRUE(c["params"].contains(key)) << key;
        const std::string st = c["status"];
        ASSERT_TRUE(st == "pass" || st == "fail" || st == "skipped");
        if (st == "fail") ASSERT_TRUE(c["witness"].contains("failures") || c["witness"].contains("error"));
    }
    ASSERT_TRUE(j["summary"]["d_by_N"].is_object());
    ASSERT_TRUE(j["summary"]["stable"].is_boolean());
    EXPECT_EQ(j["summary"]["d_by_N"]["1"], 1);
}

TEST(run, only_eta) {
    Config cfg;
    cfg.checks = {check_id::eta_surjective};
    const ControlReport rep = run(cfg);
    EXPECT_EQ(rep.checks.size(), 9u);
    for (const CheckResult& c : rep.checks) EXPECT_EQ(c.id, check_id::eta_surjective);
    EXPECT_TRUE(rep.passed());
}
