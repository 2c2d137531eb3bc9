#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "prsim/common.hpp"
#include "prsim/params.hpp"

namespace prsim {

enum class StrategyKind {
    AlwaysA,
    AlwaysB,
    AlwaysC,
    AlwaysD,
    Mixture,
    Informed,
    HonestReviewer,
    NoisyReviewer,
};

// How a simulated voter behaves in the pre-review poll. Reviewer strategies
// always volunteer (vote d) and differ in the noise of their filed beliefs.
struct Strategy {
    StrategyKind kind = StrategyKind::AlwaysA;
    std::array<double, 4> mix{};   // Mixture: weights over options a..d
    double f_bad = 0.0;            // Informed: recall on early-rejectable papers
    double false_positive = 0.0;   // Informed: chance of crying wolf on a sound paper
    double noise = 0.0;            // NoisyReviewer: extra belief noise

    std::string label() const;
    // "always_a", "mixture:0.4,0.3,0.2,0.1", "informed:0.8",
    // "honest_reviewer", "noisy_reviewer:0.1"
    static Strategy parse(const std::string& spec);

    friend bool operator==(const Strategy&, const Strategy&) = default;
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::uint64_t seed = 1;
    int n_accounts = 0;     // strategic voters whose payoffs get measured
    int n_submissions = 0;
    double f_rej = 0.60;    // ground-truth early-rejectable fraction
    double f_acc = 0.05;    // ground-truth accepted fraction
    std::vector<std::pair<Strategy, double>> strategy_mix;  // fractions sum to 1
    ProtocolParams params;
    int rounds_cap = 2;
    double iteration_round_prob = 0.0;  // chance a review goes through a request round
    double arrivals_per_day = 20.0;     // Poisson submission arrivals
    double vote_window_days = 0.0;      // 0 means "within t_vote"
    double reviewer_noise = 0.02;       // honest belief elicitation noise
    double late_report_prob = 0.0;
    double voucher_payout_prob = 0.0;
    Milli initial_treasury = 100'000 * kMilliPerUnit;
    Milli author_funds = 100'000'000 * kMilliPerUnit;
    bool persist_log = true;
    bool record_history = true;
    bool auction_revenue = false;
    double auction_median = 13'500.0;  // stablecoin units per paper certificate
    double auction_sigma = 0.5;

    void validate() const;
    // Number of agents running each strategy (largest-remainder split).
    std::vector<int> agents_per_strategy() const;

    static ScenarioConfig from_json_text(const std::string& text);
    static ScenarioConfig from_json_file(const std::string& path);
    std::string to_json_text() const;
};

}  // namespace prsim
