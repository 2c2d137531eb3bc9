#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prsim/engine.hpp"
#include "prsim/scenario.hpp"

namespace prsim {

// Analytic per-vote reputation expectation for a strategy under the payoff
// table at the given ground-truth rates. Serves as the oracle the Monte Carlo
// means are checked against.
double expected_delta(const Strategy& strategy, double f_rej, double f_acc,
                      const ProtocolParams& params);

struct StrategyStats {
    std::string label;
    int agents = 0;
    std::int64_t samples = 0;  // submissions this strategy cast at least one vote on
    double mean_delta = 0.0;
    double std_err = 0.0;
    double expected = 0.0;

    friend bool operator==(const StrategyStats&, const StrategyStats&) = default;
};

struct RunReport {
    std::string scenario;
    std::uint64_t seed = 0;
    int n_submissions = 0;
    std::uint64_t events = 0;
    std::uint64_t log_hash = 0;
    std::uint64_t final_state_hash = 0;
    std::string log_path;     // empty unless the log was persisted
    std::string ledger_path;  // empty unless exported

    std::int64_t early_rejected = 0;
    std::int64_t accepted = 0;
    std::int64_t rejected = 0;
    std::int64_t failed = 0;
    double f_rej_estimate = 0.0;
    double f_acc_estimate = 0.0;

    Milli treasury_initial = 0;
    Milli treasury_final = 0;
    Milli treasury_intake = 0;
    Milli treasury_outflow = 0;
    bool conserved = false;
    std::int64_t vouchers_backed = 0;
    std::int64_t vouchers_unbacked = 0;

    std::vector<StrategyStats> strategies;

    friend bool operator==(const RunReport&, const RunReport&) = default;
};

std::string report_to_json(const RunReport& report);
RunReport report_from_json_file(const std::string& path);

// Drive a full scenario through the engine. Event generation runs on the
// counter-based generator, per submission, so results are identical for any
// thread count; the fold itself is single-writer. threads <= 0 uses the
// OpenMP default, threads == 1 is the serial reference path.
RunReport run_scenario(const ScenarioConfig& cfg, const std::string& out_dir = "", int threads = 0);

// Scenario run that also hands back the final engine state (for inspection).
struct RunResult {
    RunReport report;
    EngineState state;
};
RunResult run_scenario_full(const ScenarioConfig& cfg, const std::string& out_dir = "",
                            int threads = 0);

// Pilot-run bisection for the accept threshold hitting a target acceptance
// fraction (measured against all submissions) within half a percentage point.
// Throws Errc::Unreachable when the pilot's quality distribution cannot be
// split that finely.
double calibrate_threshold(const ScenarioConfig& cfg, double target_accept,
                           int pilot_submissions = 5000);

}  // namespace prsim
