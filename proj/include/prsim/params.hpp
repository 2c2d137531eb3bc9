#pragma once

#include <string>
#include <vector>

#include "prsim/common.hpp"

namespace prsim {

// All protocol constants a governance vote may retune. Times are in days,
// rates per year, money in integer milli-stablecoin, science tokens in tokens.
struct ProtocolParams {
    // Pre-review window and quorums.
    double t_vote = 3.0;   // minimum voting period (72h)
    double t_max = 30.0;   // hard deadline for the poll
    int n_votes = 10;      // vote quorum; early rejection needs strictly more
    int n_reviews = 3;     // reviewers per paper
    double alpha_select = 0.5;       // reputation exponent in reviewer selection
    double selection_rep_floor = 1.0;  // weight floor so newcomers stay reachable

    // Review phase.
    double review_due_days = 21.0;     // per-round report deadline
    double replace_window_days = 14.0; // grace past the deadline before replacement
    double delay_factor_floor = 0.25;  // payout suppression at the replacement edge
    int min_conclusion_len = 500;
    double w_min = 0.02;               // minimum statement weight
    double accept_threshold = 1.0;     // aggregate Q needed to accept

    // Reputation.
    double k_decay_per_year = 0.2;  // half-life ~3.5y; Fig-style default 1/(5y)
    double r_min = -100.0;          // hard floor after penalties
    int rating_vote_threshold = 100;
    double rating_clamp = -300.0;   // floor for the 100*log(x-1) contribution
    double rating_expiry_years = 1.0;
    double rec_reward = 10.0;       // peak recommendation reward R
    double rec_horizon_years = 3.0;
    double rec_min_rep = 50.0;

    // Governance.
    double alpha_stake = 1.0;        // science tokens per reputation for c = 1
    double t_stake_years = 4.0;
    double petition_quorum = 0.10;
    double petition_majority = 0.50;
    double interest_per_year = 0.10;  // inflationary interest on eligible stake
    double epoch_days = 7.0;          // parameter changes and interest settle per epoch

    // Fees (milli-stablecoin). Base review value x, author discount d, rejection
    // discount d_R (refunded as d_R - d), voucher penalty delta, non-refundable floor.
    Milli x_fee = 750 * kMilliPerUnit;
    Milli d = 0;
    Milli d_r = 0;
    Milli delta = 50 * kMilliPerUnit;
    Milli fee_min = 50 * kMilliPerUnit;
    double voucher_grant_floor = 0.5;  // min combined suppression factor that still earns a voucher

    // Pre-review payoff margins realizing the strict inequalities of the payoff table.
    double margin_b = 1.5;
    double margin_d = 1.5;

    friend bool operator==(const ProtocolParams&, const ProtocolParams&) = default;
    void validate() const;
};

// Governance-adjustable parameters are addressed by name in petitions and
// parameter-change events. Throws Errc::ConfigInvalid for unknown names or
// values that would violate the invariants above.
void set_param(ProtocolParams& params, const std::string& name, double value);
double get_param(const ProtocolParams& params, const std::string& name);
const std::vector<std::string>& param_names();

}  // namespace prsim
