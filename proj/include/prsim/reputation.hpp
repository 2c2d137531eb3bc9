#pragma once

#include <map>
#include <vector>

#include "prsim/common.hpp"
#include "prsim/params.hpp"

namespace prsim {

// Closed form of dr/dt = -k r + f with constant source f over dt years:
// r(dt) = r0 e^{-k dt} + (f/k)(1 - e^{-k dt}).
double decay_to(double r0, double f_avg, double k_per_year, double dt_years);

// Same ODE with a source ramping linearly from f_start to f_end across the
// segment; used to reproduce smooth activity profiles.
double decay_linear_source(double r0, double f_start, double f_end, double k_per_year, double dt_years);

// A piecewise-linear activity profile: (time, f) knots, constant after the last.
struct ActivityProfile {
    std::vector<std::pair<double, double>> knots;  // (t_years, f)
    double value_at(double t_years) const;
};

// Reputation trajectory r(t) for a profile, sampled every dt. Exact per segment.
std::vector<double> reputation_trajectory(double r0, const ActivityProfile& profile, double k_per_year,
                                          double t_end_years, double dt_years);

enum class RatingLogBase { Natural, Base10 };

struct StarTally {
    Timestamp first_at = 0.0;
    int count = 0;
    int sum = 0;
    std::vector<std::pair<AccountId, int>> votes;  // (rater, stars)
    friend bool operator==(const StarTally&, const StarTally&) = default;
};

struct RatingSettlement {
    double reviewer_delta = 0.0;
    double average = 0.0;  // x in [1,3]; only ever exposed through a settlement
    std::map<AccountId, double> rater_deltas;
};

// Settle a reviewer's collected star votes once the threshold is reached.
// Reviewer contribution is 100 log(x-1) (clamped below), raters are paid per
// how their vote relates to the average.
RatingSettlement settle_star_ratings(const StarTally& tally, const ProtocolParams& params,
                                     RatingLogBase base = RatingLogBase::Natural);

// Per-rater payoff given the settled average; exposed for exhaustive rule tests.
double rater_payoff(int stars, double average);

struct Recommendation {
    AccountId recommender = 0;
    AccountId subject = 0;
    double predicted_level = 0.0;
    Timestamp made_at = 0.0;
    Timestamp horizon_at = 0.0;
    friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

struct RecommendationSettlement {
    double recommender_delta = 0.0;
    double subject_delta = 0.0;
};

// Reward kernel over the realized/predicted ratio: peak R at a correct call,
// falling off linearly, twice as fast on the overestimation side (realized
// below prediction), clamped to [-R, R]. The subject gets half of a positive
// recommender reward.
RecommendationSettlement settle_recommendation(const Recommendation& rec, double realized_level,
                                               double reward_peak);

}  // namespace prsim
