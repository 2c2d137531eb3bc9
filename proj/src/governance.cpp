#include "prsim/governance.hpp"

#include <algorithm>
#include <cmath>

namespace prsim {

double voting_power(double reputation, double staked, double alpha_stake) {
    if (reputation < 0.0 || staked < 0.0 || !(alpha_stake > 0.0))
        fail(Errc::DomainError, "voting power needs r, s >= 0 and alpha > 0");
    if (reputation == 0.0) return 0.0;
    double c = std::min(1.0, staked / (alpha_stake * reputation));
    return c * std::sqrt(reputation);
}

double bonus_top_up(double r_old, double r_new, double staked, double alpha_stake) {
    if (!(r_new >= r_old) || r_old < 0.0) fail(Errc::DomainError, "reputation cannot shrink here");
    if (staked + 1e-12 < alpha_stake * r_old)
        fail(Errc::NotMaxedOut, "bonus only for accounts at full commitment before the gain");
    double needed = alpha_stake * std::sqrt(r_old * r_new);
    return std::max(0.0, needed - staked);
}

double interest_eligible(double staked, double reputation, double alpha_stake) {
    if (staked < 0.0 || reputation < 0.0) fail(Errc::DomainError, "negative stake or reputation");
    return std::min(staked, alpha_stake * std::max(reputation, 0.0));
}

PetitionTally tally_petition(const Petition& petition, double total_active_power,
                             const ProtocolParams& params) {
    PetitionTally tally;
    for (const auto& [_, vote] : petition.votes) {
        tally.participating_power += vote.second;
        if (vote.first) tally.support_power += vote.second;
    }
    bool quorum_met = tally.participating_power >= params.petition_quorum * total_active_power &&
                      tally.participating_power > 0.0;
    bool majority_met = tally.support_power > params.petition_majority * tally.participating_power;
    tally.status = quorum_met && majority_met ? PetitionStatus::Passed : PetitionStatus::Rejected;
    return tally;
}

}  // namespace prsim
