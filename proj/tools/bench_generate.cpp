// Compares the serial reference path against the OpenMP generation kernels on
// a mid-size scenario and checks that both produce the same log and state.

#include <chrono>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "prsim/sim.hpp"

using namespace prsim;

namespace {

ScenarioConfig bench_config(int n) {
    ScenarioConfig cfg;
    cfg.name = "bench";
    cfg.seed = 20240811;
    cfg.n_submissions = n;
    cfg.n_accounts = 7;
    cfg.strategy_mix = {
        {Strategy::parse("always_a"), 1.0 / 7}, {Strategy::parse("always_b"), 1.0 / 7},
        {Strategy::parse("always_c"), 1.0 / 7}, {Strategy::parse("always_d"), 1.0 / 7},
        {Strategy::parse("informed:0.5"), 1.0 / 7},
        {Strategy::parse("mixture:0.25,0.25,0.25,0.25"), 2.0 / 7},
    };
    cfg.iteration_round_prob = 0.1;
    cfg.voucher_payout_prob = 0.2;
    cfg.persist_log = false;
    return cfg;
}

double run_timed(const ScenarioConfig& cfg, int threads, RunReport& out) {
    auto t0 = std::chrono::steady_clock::now();
    out = run_scenario(cfg, "", threads);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    int n = argc > 1 ? std::atoi(argv[1]) : 20000;
    ScenarioConfig cfg = bench_config(n);

    RunReport serial, parallel;
    double t_serial = run_timed(cfg, 1, serial);
#ifdef _OPENMP
    int nt = omp_get_max_threads();
#else
    int nt = 1;
#endif
    double t_parallel = run_timed(cfg, 0, parallel);

    std::cout << "submissions:          " << n << " (" << serial.events << " events)\n";
    std::cout << "serial reference:     " << t_serial << " s  ("
              << double(serial.events) / t_serial / 1e3 << " kev/s)\n";
    std::cout << "openmp (" << nt << " threads):   " << t_parallel << " s  ("
              << double(parallel.events) / t_parallel / 1e3 << " kev/s)\n";
    std::cout << "speedup:              " << t_serial / t_parallel << "x\n";

    bool same = serial.log_hash == parallel.log_hash &&
                serial.final_state_hash == parallel.final_state_hash;
    std::cout << "outputs identical:    " << (same ? "yes" : "NO") << "\n";
    return same ? 0 : 1;
}
