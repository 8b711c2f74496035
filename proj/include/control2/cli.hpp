#pragma once

#include "control2/verifier.hpp"

#include <CLI11.hpp>

#include <optional>
#include <string>
#include <vector>

namespace control2::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_resource = 3;

struct ParseOutcome {
    std::optional<Config> config;  // empty on --help or error
    int exit_code = exit_ok;
    std::string message;  // usage text or a diagnostic naming the flag
};

/// Total over argv: yields either a validated Config or a named-flag error.
inline ParseOutcome parse_args(int argc, const char* const* argv) {
    Config cfg;
    std::vector<std::string> checks = {"all"};
    int jobs = 1;
    long long bound = static_cast<long long>(cfg.coset_bound);

    CLI::App app{"Verify the 2-adic control theorem at concrete levels N 2^r.", "control2"};
    app.add_option("--N", cfg.N, "odd levels N (comma list)")->delimiter(',')->capture_default_str();
    app.add_option("--r-min", cfg.r_min, "smallest r (>= 2)")->capture_default_str();
    app.add_option("--r-max", cfg.r_max, "largest r")->capture_default_str();
    app.add_option("--s-min", cfg.s_min, "smallest s (>= 2)")->capture_default_str();
    app.add_option("--precision", cfg.precision, "working precision k, modulus 2^k, in [4, 64]")->capture_default_str();
    app.add_option("--checks", checks, "check ids (comma list) or \"all\"")->delimiter(',')->capture_default_str();
    app.add_option("--out", cfg.out, "JSON report path");
    app.add_option("--jobs", jobs, "worker threads")->capture_default_str();
    app.add_option("--coset-bound", bound, "maximum number of cosets per subgroup")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        return {std::nullopt, exit_ok, app.help()};
    } catch (const CLI::ParseError& e) {
        return {std::nullopt, exit_usage, std::string(e.what()) + "\n" + app.help()};
    }

    auto fail = [&](const std::string& flag, const std::string& why) {
        return ParseOutcome{std::nullopt, exit_usage, flag + ": " + why + "\nRun with --help for usage."};
    };
    if (cfg.N.empty()) return fail("--N", "at least one level is required");
    for (std::int64_t n : cfg.N)
        if (n <= 0 || n % 2 == 0) return fail("--N", "N must be odd and positive (coprime to 2), got " + std::to_string(n));
    if (cfg.r_min < 2) return fail("--r-min", "levels start at r = 2");
    if (cfg.r_max < 2) return fail("--r-max", "levels start at r = 2");
    if (cfg.r_max < cfg.r_min) return fail("--r-max", "must be at least --r-min");
    if (cfg.r_max > 6) return fail("--r-max", "supported levels stop at r = 6");
    if (cfg.s_min < 2) return fail("--s-min", "s starts at 2");
    if (cfg.precision < 4 || cfg.precision > 64) return fail("--precision", "k must lie in [4, 64]");
    if (jobs < 1) return fail("--jobs", "must be at least 1");
    if (bound < 1) return fail("--coset-bound", "must be positive");
    cfg.jobs = static_cast<unsigned>(jobs);
    cfg.coset_bound = static_cast<std::size_t>(bound);

    if (checks.size() == 1 && checks.front() == "all") {
        cfg.checks = all_checks();
    } else {
        cfg.checks.clear();
        for (const std::string& c : checks) {
            if (c.empty()) continue;
            if (std::find(all_checks().begin(), all_checks().end(), c) == all_checks().end())
                return fail("--checks", "unknown check id \"" + c + "\"");
            if (std::find(cfg.checks.begin(), cfg.checks.end(), c) == cfg.checks.end()) cfg.checks.push_back(c);
        }
    }
    return {cfg, exit_ok, {}};
}

/// 0 if everything passed, 1 on any failure, 3 if only resource guards
/// prevented checks from running.
inline int exit_status(const ControlReport& r) {
    if (!r.passed()) return exit_failure;
    if (r.warnings() > 0) return exit_resource;
    return exit_ok;
}

/// One human-readable line per check.
inline std::string summary_line(const CheckResult& c) {
    std::string p = "N=" + std::to_string(c.params.N) + " r=" + std::to_string(c.params.r);
    if (c.params.s) p += " s=" + std::to_string(*c.params.s);
    if (c.params.k) p += " k=" + std::to_string(*c.params.k);
    std::string line = std::string(to_string(c.status)) + "  " + c.id + "  " + p;
    if (c.status != Status::pass) {
        if (c.witness.contains("failures")) line += "  " + c.witness["failures"][0]["condition"].get<std::string>();
        if (c.witness.contains("error")) line += "  " + c.witness["error"].get<std::string>();
        if (c.witness.contains("diagnostic")) line += "  " + c.witness["diagnostic"].get<std::string>();
    }
    return line;
}

}  // namespace control2::cli
