#include "prsim/reputation.hpp"

#include <algorithm>
#include <cmath>

namespace prsim {

double decay_to(double r0, double f_avg, double k_per_year, double dt_years) {
    if (dt_years < 0.0) fail(Errc::DomainError, "negative decay interval");
    if (!(k_per_year > 0.0)) fail(Errc::DomainError, "decay rate must be positive");
    double e = std::exp(-k_per_year * dt_years);
    return r0 * e + (f_avg / k_per_year) * (1.0 - e);
}

double decay_linear_source(double r0, double f_start, double f_end, double k_per_year,
                           double dt_years) {
    if (dt_years < 0.0) fail(Errc::DomainError, "negative decay interval");
    if (dt_years == 0.0) return r0;
    double k = k_per_year;
    double e = std::exp(-k * dt_years);
    double slope = (f_end - f_start) / dt_years;
    // integral of e^{-k(t-s)} (f_start + slope*s) ds over [0, t]
    double src = f_start * (1.0 - e) / k + slope * (dt_years / k - (1.0 - e) / (k * k));
    return r0 * e + src;
}

double ActivityProfile::value_at(double t_years) const {
    if (knots.empty()) return 0.0;
    if (t_years <= knots.front().first) return knots.front().second;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (t_years <= knots[i].first) {
            auto [t0, f0] = knots[i - 1];
            auto [t1, f1] = knots[i];
            return f0 + (f1 - f0) * (t_years - t0) / (t1 - t0);
        }
    }
    return knots.back().second;
}

std::vector<double> reputation_trajectory(double r0, const ActivityProfile& profile, double k_per_year,
                                          double t_end_years, double dt_years) {
    std::vector<double> out;
    double r = r0;
    out.push_back(r);
    for (double t = 0.0; t < t_end_years - 1e-12; t += dt_years) {
        double t1 = std::min(t + dt_years, t_end_years);
        r = decay_linear_source(r, profile.value_at(t), profile.value_at(t1), k_per_year, t1 - t);
        out.push_back(r);
    }
    return out;
}

double rater_payoff(int stars, double average) {
    switch (stars) {
        case 1:
            // One-star votes have no upside; tearing others down pays enough.
            return average > 2.5 ? -5.0 : 0.0;
        case 2:
            if (average < 1.25) return -5.0;
            if (average >= 1.5 && average <= 2.5) return 5.0;
            return 0.0;
        case 3:
            if (average > 2.5) return 5.0;
            if (average < 1.5) return -5.0;
            return 0.0;
        default:
            fail(Errc::DomainError, "stars must be 1..3");
    }
}

RatingSettlement settle_star_ratings(const StarTally& tally, const ProtocolParams& params,
                                     RatingLogBase base) {
    if (tally.count < params.rating_vote_threshold)
        fail(Errc::BelowThreshold, "only " + std::to_string(tally.count) + " ratings collected");
    RatingSettlement out;
    out.average = double(tally.sum) / double(tally.count);
    double arg = out.average - 1.0;
    double contribution;
    if (arg <= 0.0) {
        contribution = params.rating_clamp;
    } else {
        double lg = base == RatingLogBase::Natural ? std::log(arg) : std::log10(arg);
        contribution = std::max(100.0 * lg, params.rating_clamp);
    }
    out.reviewer_delta = contribution;
    for (auto [rater, stars] : tally.votes) out.rater_deltas[rater] += rater_payoff(stars, out.average);
    return out;
}

RecommendationSettlement settle_recommendation(const Recommendation& rec, double realized_level,
                                               double reward_peak) {
    if (!(rec.predicted_level > 0.0)) fail(Errc::DomainError, "prediction must be positive");
    double rho = std::max(realized_level, 0.0) / rec.predicted_level;
    double miss = std::abs(1.0 - rho);
    // rho < 1 means the recommender promised more than materialized.
    double raw = rho <= 1.0 ? reward_peak * (1.0 - 2.0 * miss) : reward_peak * (1.0 - miss);
    double delta = std::clamp(raw, -reward_peak, reward_peak);
    return RecommendationSettlement{delta, std::max(0.0, delta) / 2.0};
}

}  // namespace prsim
