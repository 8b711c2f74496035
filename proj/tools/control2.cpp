#include "control2/cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("control2");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
    const char* env = std::getenv("CONTROL2_LOG");
    spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

}  // namespace

int main(int argc, char** argv) {
    namespace cli = control2::cli;
    configure_logging();

    const cli::ParseOutcome parsed = cli::parse_args(argc, argv);
    if (!parsed.config) {
        (parsed.exit_code == cli::exit_ok ? std::cout : std::cerr) << parsed.message << "\n";
        return parsed.exit_code;
    }
    const control2::Config& cfg = *parsed.config;

    std::ofstream out;
    if (!cfg.out.empty()) {
        out.open(cfg.out);
        if (!out) {
            std::cerr << "--out: cannot open " << cfg.out << " for writing\n";
            return cli::exit_resource;
        }
    }

    spdlog::info("running {} check kinds over {} values of N", cfg.checks.size(), cfg.N.size());
    control2::ControlReport report;
    try {
        report = control2::run(cfg, [](const control2::CheckResult& c) {
            spdlog::debug("{} ({} ms)", cli::summary_line(c), c.ms);
        });
    } catch (const control2::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_usage;
    }

    for (const control2::CheckResult& c : report.checks) std::cout << cli::summary_line(c) << "\n";
    std::cout << report.count(control2::Status::pass) << " passed, " << report.count(control2::Status::fail)
              << " failed, " << report.count(control2::Status::skipped) << " skipped\n";

    if (out.is_open()) {
        out << control2::to_json(report).dump(2) << "\n";
        out.close();
        if (!out) {
            std::cerr << "--out: write to " << cfg.out << " failed\n";
            return cli::exit_resource;
        }
        spdlog::info("report written to {}", cfg.out);
    }
    return cli::exit_status(report);
}
