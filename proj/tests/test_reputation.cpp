#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "prsim/reputation.hpp"
#include "prsim/rng.hpp"

using namespace prsim;

TEST_CASE("decay closed form: fixed points and the zero-interval case") {
    CHECK(decay_to(37.5, 4.0, 0.2, 0.0) == 37.5);
    // r = f/k is the equilibrium of the flow.
    for (double dt : {0.1, 1.0, 7.5, 40.0})
        CHECK(decay_to(100.0, 20.0, 0.2, dt) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK_THROWS_AS(decay_to(1.0, 0.0, 0.2, -1.0), Error);
    CHECK_THROWS_AS(decay_to(1.0, 0.0, 0.0, 1.0), Error);
}

TEST_CASE("decay satisfies the semigroup law") {
    Rng rng(5, stream_id(Draw::Misc, 0));
    for (int i = 0; i < 200; ++i) {
        double r0 = rng.uniform(-50.0, 150.0);
        double f = rng.uniform(-5.0, 25.0);
        double k = rng.uniform(0.05, 2.0);
        double a = rng.uniform(0.0, 10.0);
        double b = rng.uniform(0.0, 10.0);
        double two_steps = decay_to(decay_to(r0, f, k, a), f, k, b);
        double one_step = decay_to(r0, f, k, a + b);
        CHECK(two_steps == doctest::Approx(one_step).epsilon(1e-9));
    }
}

TEST_CASE("closed form tracks a fourth-order integration over twenty years") {
    Rng rng(17, stream_id(Draw::Misc, 1));
    for (int i = 0; i < 10; ++i) {
        double r0 = rng.uniform(0.0, 120.0);
        double f = rng.uniform(0.0, 25.0);
        double k = rng.uniform(0.1, 1.0);
        double numeric = oracles::rk4_reputation(r0, [f](double) { return f; }, k, 20.0, 1e-3);
        CHECK(std::abs(decay_to(r0, f, k, 20.0) - numeric) < 1e-6);
    }
}

TEST_CASE("linear-source segment matches the integrator") {
    double numeric = oracles::rk4_reputation(
        40.0, [](double t) { return 20.0 - 2.0 * t; }, 0.2, 5.0, 1e-4);
    CHECK(decay_linear_source(40.0, 20.0, 10.0, 0.2, 5.0) == doctest::Approx(numeric).epsilon(1e-8));
}

TEST_CASE("a rising junior overtakes a winding-down senior within a few years") {
    // Senior: equilibrium 100, activity 20 falling to 10 over five years.
    // Junior: from zero, activity ramping to the senior's old level over five years.
    ActivityProfile senior{{{0.0, 20.0}, {5.0, 10.0}}};
    ActivityProfile junior{{{0.0, 0.0}, {5.0, 20.0}}};
    const double k = 1.0 / 5.0;
    auto rs = reputation_trajectory(100.0, senior, k, 20.0, 1.0 / 12);
    auto rj = reputation_trajectory(0.0, junior, k, 20.0, 1.0 / 12);
    REQUIRE(rs.size() == rj.size());

    double crossover = -1.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        double t = double(i) / 12.0;
        if (rj[i] > rs[i]) {
            crossover = t;
            break;
        }
    }
    CHECK(crossover > 5.0);
    CHECK(crossover < 15.0);
    // Long-run levels reflect the new activity rates.
    CHECK(rj.back() == doctest::Approx(100.0).epsilon(0.05));
    CHECK(rs.back() == doctest::Approx(50.0).epsilon(0.05));
}

namespace {

StarTally tally_with_average(double x, int count = 100) {
    // Threes, at most one two, then ones: hits any average with x*count integral.
    StarTally t;
    int extra = int(std::lround(x * count)) - count;
    int n3 = extra / 2, n2 = extra % 2;
    AccountId id = 100;
    for (int i = 0; i < n3; ++i) t.votes.push_back({id++, 3});
    for (int i = 0; i < n2; ++i) t.votes.push_back({id++, 2});
    while (int(t.votes.size()) < count) t.votes.push_back({id++, 1});
    for (auto [rater, stars] : t.votes) t.sum += stars;
    t.count = count;
    return t;
}

}  // namespace

TEST_CASE("reviewer rating contribution crosses zero at an average of two") {
    ProtocolParams p;
    StarTally even = tally_with_average(2.0);
    REQUIRE(double(even.sum) / even.count == doctest::Approx(2.0));
    CHECK(std::abs(settle_star_ratings(even, p).reviewer_delta) < 1e-12);

    StarTally low = tally_with_average(1.1);
    CHECK(settle_star_ratings(low, p).reviewer_delta ==
          doctest::Approx(100.0 * std::log(0.1)).epsilon(1e-9));

    // All one-star: the log diverges and the clamp kicks in.
    StarTally ones;
    for (int i = 0; i < 100; ++i) {
        ones.votes.push_back({AccountId(i + 1), 1});
        ones.sum += 1;
        ones.count += 1;
    }
    CHECK(settle_star_ratings(ones, p).reviewer_delta == p.rating_clamp);

    StarTally thin = tally_with_average(2.5, 50);
    CHECK_THROWS_AS(settle_star_ratings(thin, p), Error);
}

TEST_CASE("reviewer delta grows with the average") {
    ProtocolParams p;
    double prev = -1e9;
    for (double x : {1.2, 1.6, 2.0, 2.4, 2.8, 3.0}) {
        StarTally t = tally_with_average(x, 200);
        double d = settle_star_ratings(t, p).reviewer_delta;
        CHECK(d > prev);
        prev = d;
    }
}

TEST_CASE("rater payoffs across every rule region") {
    // Regions: below 1.25, [1.25, 1.5), [1.5, 2.5], (2.5, 3].
    CHECK(rater_payoff(1, 1.1) == 0.0);
    CHECK(rater_payoff(1, 1.4) == 0.0);
    CHECK(rater_payoff(1, 2.0) == 0.0);
    CHECK(rater_payoff(1, 2.8) == -5.0);

    CHECK(rater_payoff(2, 1.1) == -5.0);
    CHECK(rater_payoff(2, 1.4) == 0.0);
    CHECK(rater_payoff(2, 1.5) == 5.0);
    CHECK(rater_payoff(2, 2.5) == 5.0);
    CHECK(rater_payoff(2, 2.8) == 0.0);

    CHECK(rater_payoff(3, 1.1) == -5.0);
    CHECK(rater_payoff(3, 1.4) == -5.0);
    CHECK(rater_payoff(3, 2.0) == 0.0);
    CHECK(rater_payoff(3, 2.8) == 5.0);

    CHECK_THROWS_AS(rater_payoff(4, 2.0), Error);

    ProtocolParams p;
    StarTally high = tally_with_average(2.8, 100);  // 90 threes, 10 ones
    RatingSettlement st = settle_star_ratings(high, p);
    CHECK(st.average == doctest::Approx(2.8));
    CHECK(st.rater_deltas.at(100) == 5.0);   // a three-star voter
    CHECK(st.rater_deltas.at(199) == -5.0);  // a one-star voter
}

TEST_CASE("recommendation rewards peak at the correct call") {
    Recommendation rec{1, 2, 80.0, 0.0, 3.0};
    const double R = 10.0;

    auto peak = settle_recommendation(rec, 80.0, R);
    CHECK(peak.recommender_delta == doctest::Approx(R));
    CHECK(peak.subject_delta == doctest::Approx(R / 2));

    // Realized at half the promise: overestimation, twice the slope, lands at zero.
    auto over = settle_recommendation(rec, 40.0, R);
    CHECK(over.recommender_delta == doctest::Approx(0.0));
    CHECK(over.subject_delta == 0.0);

    // Realized 1.5x the promise: plain slope, half reward left.
    auto under = settle_recommendation(rec, 120.0, R);
    CHECK(under.recommender_delta == doctest::Approx(R / 2));
    CHECK(under.subject_delta == doctest::Approx(R / 4));

    // Way off on either side clamps at -R; the subject never pays.
    CHECK(settle_recommendation(rec, 0.0, R).recommender_delta == doctest::Approx(-R));
    CHECK(settle_recommendation(rec, 800.0, R).recommender_delta == doctest::Approx(-R));
    CHECK(settle_recommendation(rec, 0.0, R).subject_delta == 0.0);

    CHECK_THROWS_AS(settle_recommendation(Recommendation{1, 2, 0.0, 0, 0}, 1.0, R), Error);
}
