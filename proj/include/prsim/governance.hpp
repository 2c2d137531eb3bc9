#pragma once

#include <map>
#include <string>
#include <vector>

#include "prsim/common.hpp"
#include "prsim/params.hpp"

namespace prsim {

// Voting power P = c * sqrt(r) with commitment factor c = min(1, s / (alpha r)).
// Zero reputation means zero power regardless of stake.
double voting_power(double reputation, double staked, double alpha_stake);

// Science tokens granted so a fully committed (c = 1) account keeps its voting
// power across a reputation gain. Closed form: alpha*sqrt(r_old*r_new) - s,
// floored at zero. Throws Errc::NotMaxedOut if the account was not at c = 1.
double bonus_top_up(double r_old, double r_new, double staked, double alpha_stake);

// Stake amount that earns inflationary interest: min(s, alpha * r).
double interest_eligible(double staked, double reputation, double alpha_stake);

struct StakePosition {
    double amount = 0.0;
    Timestamp locked_until = 0.0;
    friend bool operator==(const StakePosition&, const StakePosition&) = default;
};

enum class PetitionStatus { Open, Passed, Rejected };

struct Petition {
    PetitionId id = 0;
    AccountId proposer = 0;
    std::string target_param;
    double proposed_value = 0.0;
    Timestamp closes_at = 0.0;
    PetitionStatus status = PetitionStatus::Open;
    // Voting power is snapshotted when the vote is cast.
    std::map<AccountId, std::pair<bool, double>> votes;  // account -> (support, power)
    friend bool operator==(const Petition&, const Petition&) = default;
};

struct PetitionTally {
    PetitionStatus status = PetitionStatus::Rejected;
    double participating_power = 0.0;
    double support_power = 0.0;
};

// Quorum is measured against the total active voting power at close; the
// majority bar applies to the power that actually voted.
PetitionTally tally_petition(const Petition& petition, double total_active_power,
                             const ProtocolParams& params);

}  // namespace prsim
