// prsim: protocol engine and Monte Carlo harness for community peer review.
//
//   prsim run <scenario.json>        drive a scenario, write log + report
//   prsim replay <log.ndjson>        re-fold a log and verify determinism
//   prsim score <manifest> <beliefs> information scores per reviewer
//   prsim estimate ...               throughput / funding arithmetic
//   prsim report <report.json|dir>   pretty-print a run report

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "prsim/engine.hpp"
#include "prsim/manifest_io.hpp"
#include "prsim/sim.hpp"

using namespace prsim;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitEngine = 3;
constexpr int kExitVerify = 4;

int classify(const Error& e) {
    switch (e.code()) {
        case Errc::ConfigInvalid:
        case Errc::ParseError: return kExitConfig;
        case Errc::VerifyMismatch: return kExitVerify;
        default: return kExitEngine;
    }
}

std::string default_out_dir() {
    const char* env = std::getenv("PRSIM_OUT");
    return env && *env ? env : "runs";
}

void print_report(const RunReport& r) {
    std::cout << "scenario:        " << r.scenario << " (seed " << r.seed << ")\n";
    std::cout << "submissions:     " << r.n_submissions << "  events: " << r.events << "\n";
    std::cout << "outcomes:        early_rejected=" << r.early_rejected << " accepted=" << r.accepted
              << " rejected=" << r.rejected << " failed=" << r.failed << "\n";
    std::cout << "rate estimates:  f_rej=" << r.f_rej_estimate << " f_acc=" << r.f_acc_estimate
              << "\n";
    std::cout << "treasury:        balance $" << format_milli(r.treasury_final) << " (intake $"
              << format_milli(r.treasury_intake) << ", outflow $" << format_milli(r.treasury_outflow)
              << ", conserved " << (r.conserved ? "yes" : "NO") << ")\n";
    std::cout << "vouchers:        backed=" << r.vouchers_backed
              << " unbacked=" << r.vouchers_unbacked << "\n";
    if (!r.strategies.empty()) {
        std::cout << "strategy payoffs (mean +/- SE vs expected):\n";
        for (const StrategyStats& s : r.strategies) {
            std::cout << "  " << s.label << ": n=" << s.samples << " mean=" << s.mean_delta
                      << " se=" << s.std_err << " expected=" << s.expected << "\n";
        }
    }
    std::cout << "log hash:        " << hex64(r.log_hash) << "\n";
    std::cout << "state hash:      " << hex64(r.final_state_hash) << "\n";
    if (!r.log_path.empty()) std::cout << "event log:       " << r.log_path << "\n";
}

struct ReplayInputs {
    ProtocolParams params;
    EngineOptions options;
};

ReplayInputs load_replay_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::ConfigInvalid, "cannot open params file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::ParseError, std::string("params file: ") + e.what());
    }
    ReplayInputs out;
    if (j.contains("params"))
        for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
            set_param(out.params, it.key(), it.value().get<double>());
    if (j.contains("engine")) {
        const auto& e = j["engine"];
        if (e.contains("initial_treasury_milli"))
            out.options.initial_treasury = e["initial_treasury_milli"].get<Milli>();
        if (e.contains("default_wallet_milli"))
            out.options.default_wallet = e["default_wallet_milli"].get<Milli>();
        if (e.contains("record_history")) out.options.record_history = e["record_history"].get<bool>();
    }
    return out;
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir, std::int64_t seed,
            int threads, bool quiet) {
    ScenarioConfig cfg = ScenarioConfig::from_json_file(scenario_path);
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    auto t0 = std::chrono::steady_clock::now();
    RunReport report = run_scenario(cfg, out_dir, threads);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    if (!quiet) {
        print_report(report);
        std::cout << "wall time:       " << ms << " ms\n";
    }
    return 0;
}

int cmd_replay(const std::string& log_path, const std::string& params_path,
               const std::string& expect_hash) {
    ReplayInputs in = params_path.empty() ? ReplayInputs{} : load_replay_params(params_path);
    std::vector<Event> log = read_event_log(log_path);
    EngineState first = replay(log, in.params, in.options);
    EngineState second = replay(log, in.params, in.options);
    std::uint64_t h1 = state_hash(first);
    std::uint64_t h2 = state_hash(second);
    std::cout << "events:     " << log.size() << "\n";
    std::cout << "state hash: " << hex64(h1) << "\n";
    if (h1 != h2 || !(first == second)) {
        std::cout << "state hash mismatch between folds\n";
        return kExitVerify;
    }
    if (!expect_hash.empty() && hex64(h1) != expect_hash) {
        std::cout << "state hash mismatch against expected " << expect_hash << "\n";
        return kExitVerify;
    }
    std::cout << "state hash match\n";
    return 0;
}

int cmd_score(const std::string& manifest_path, const std::string& beliefs_path, bool lm_bits,
              double threshold, bool have_threshold) {
    ScoringConfig sc;
    sc.measurement_unit = lm_bits ? LogUnit::Bits : LogUnit::Nats;
    StatementManifest manifest = parse_manifest_file(manifest_path, 0.0);
    std::vector<NamedBeliefs> sheets = parse_beliefs_file(beliefs_path, manifest);
    if (sheets.empty()) fail(Errc::ParseError, "no reviewer blocks in " + beliefs_path);

    std::vector<WeightedScore> weighted;
    for (const NamedBeliefs& nb : sheets) {
        std::vector<double> ls = item_learnings(manifest, nb.beliefs, sc);
        double q = total_quality(manifest, nb.beliefs, sc);
        std::cout << "reviewer " << nb.name << " (V=" << nb.beliefs.importance << " \""
                  << importance_label(nb.beliefs.importance) << "\")\n";
        for (std::size_t i = 0; i < ls.size(); ++i) {
            const StatementItem& item = manifest.items[i];
            const char* unit = item.kind == StatementKind::Hypothesis ? "bits"
                               : lm_bits ? "bits"
                                         : "nats";
            std::cout << "  statement " << i + 1 << " ("
                      << (item.kind == StatementKind::Hypothesis ? "hypothesis" : "measurement")
                      << ", w=" << item.weight << "): L = " << ls[i] << " " << unit << "\n";
        }
        std::cout << "  Q = " << q << "\n";
        weighted.push_back(
            WeightedScore{q, nb.confidence, nb.fraction_read, nb.fraction_understood});
    }
    Decision d = decide(weighted, have_threshold ? threshold : 0.0,
                        static_cast<int>(weighted.size()));
    std::cout << "aggregate Q = " << d.aggregate_q << "\n";
    if (have_threshold)
        std::cout << "decision: " << (d.accepted ? "accept" : "reject") << " (threshold "
                  << threshold << ")\n";
    return 0;
}

int cmd_estimate(std::int64_t n, double early, int reviews, double cost, double accept) {
    EconomicsEstimate est = estimate_economics(
        n, early, reviews, static_cast<Milli>(std::llround(cost * kMilliPerUnit)), accept);
    std::cout << "submissions/year:   " << n << "\n";
    std::cout << "early rejected:     " << std::llround(early * 100.0) << "%\n";
    std::cout << "reviews required:   " << est.reviews << "\n";
    std::cout << "total review cost:  $" << format_milli(est.total_review_cost) << "\n";
    std::cout << "accepted papers:    " << est.accepted << "\n";
    std::cout << "breakeven fee:      $" << format_milli(est.breakeven_fee) << " per accepted paper\n";
    return 0;
}

int cmd_report(const std::string& path) {
    std::string file = path;
    if (std::filesystem::is_directory(path)) {
        file.clear();
        for (const auto& entry : std::filesystem::directory_iterator(path))
            if (entry.path().string().ends_with(".report.json")) {
                file = entry.path().string();
                break;
            }
        if (file.empty()) fail(Errc::ConfigInvalid, "no .report.json found in " + path);
    }
    print_report(report_from_json_file(file));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"community peer-review protocol engine and simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = default_out_dir();
    std::int64_t seed = -1;
    int threads = 0;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "run a scenario through the engine");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--out", out_dir, "output directory (default $PRSIM_OUT or ./runs)");
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--threads", threads, "generation threads (1 = serial reference)");
    run->add_flag("--quiet", quiet, "suppress the summary");

    std::string log_path, params_path, expect_hash;
    auto* rep = app.add_subcommand("replay", "re-fold an event log and verify determinism");
    rep->add_option("log", log_path, "event log (.ndjson)")->required();
    rep->add_option("--params", params_path, "params sidecar written by `run`");
    rep->add_option("--expect-hash", expect_hash, "fail unless the state hash equals this");

    std::string manifest_path, beliefs_path;
    bool lm_bits = false;
    double threshold = 0.0;
    auto* score = app.add_subcommand("score", "score reviewer beliefs against a manifest");
    score->add_option("manifest", manifest_path, "statement manifest")->required();
    score->add_option("beliefs", beliefs_path, "reviewer beliefs sheet")->required();
    score->add_flag("--lm-bits", lm_bits, "report measurement learning in bits instead of nats");
    auto* thr_opt = score->add_option("--threshold", threshold, "also print the accept decision");

    std::int64_t est_n = 10000;
    double est_early = 0.70, est_cost = 750.0, est_accept = 0.05;
    int est_reviews = 3;
    auto* est = app.add_subcommand("estimate", "annual throughput and funding arithmetic");
    est->add_option("--n", est_n, "submissions per year");
    est->add_option("--early", est_early, "early rejection rate");
    est->add_option("--reviews", est_reviews, "reviews per paper");
    est->add_option("--cost", est_cost, "target cost per review");
    est->add_option("--accept", est_accept, "final acceptance rate");

    std::string report_path;
    auto* repsub = app.add_subcommand("report", "pretty-print a run report");
    repsub->add_option("path", report_path, "report file or run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(scenario_path, out_dir, seed, threads, quiet);
        if (rep->parsed()) return cmd_replay(log_path, params_path, expect_hash);
        if (score->parsed())
            return cmd_score(manifest_path, beliefs_path, lm_bits, threshold, !thr_opt->empty());
        if (est->parsed()) return cmd_estimate(est_n, est_early, est_reviews, est_cost, est_accept);
        if (repsub->parsed()) return cmd_report(report_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEngine;
    }
    return 0;
}
