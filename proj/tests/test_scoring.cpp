#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "prsim/rng.hpp"
#include "prsim/scoring.hpp"

using namespace prsim;

TEST_CASE("hypothesis learning matches the reference values") {
    CHECK(learn_hypothesis(0.5, 0.9) == doctest::Approx(0.53).epsilon(0.02));
    CHECK(learn_hypothesis(0.02, 0.98) == doctest::Approx(5.4).epsilon(0.01));
    CHECK(learn_hypothesis(0.37, 0.37) == 0.0);
    CHECK(learn_hypothesis(0.75, 0.7) == doctest::Approx(0.01).epsilon(0.2));
}

TEST_CASE("hypothesis learning is symmetric under negation and non-negative") {
    for (double p = 0.02; p < 1.0; p += 0.07) {
        for (double pa = 0.02; pa < 1.0; pa += 0.07) {
            double l = learn_hypothesis(p, pa);
            CHECK(l >= 0.0);
            CHECK(l == doctest::Approx(learn_hypothesis(1.0 - p, 1.0 - pa)).epsilon(1e-12));
            if (std::abs(p - pa) > 1e-12) CHECK(l > 0.0);
        }
        CHECK(learn_hypothesis(p, p) == 0.0);
    }
}

TEST_CASE("hypothesis learning rejects boundary beliefs") {
    CHECK_THROWS_AS(learn_hypothesis(0.0, 0.5), Error);
    CHECK_THROWS_AS(learn_hypothesis(0.5, 1.0), Error);
    CHECK(clamp_belief(0.0) == doctest::Approx(1e-4));
    CHECK(clamp_belief(1.0) == doctest::Approx(1.0 - 1e-4));
    CHECK(learn_hypothesis(clamp_belief(0.0), clamp_belief(1.0)) > 0.0);
}

TEST_CASE("measurement learning equals quadrature relative entropy") {
    CHECK(learn_measurement(1.3, 0.7, 1.3, 0.7) == 0.0);
    CHECK(learn_measurement(0.0, 1.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(learn_measurement(0.0, 1.0, 0.0, 0.5) ==
          doctest::Approx(oracles::gaussian_kl_quadrature(0.0, 1.0, 0.0, 0.5)).epsilon(1e-9));

    Rng rng(99, stream_id(Draw::Misc, 42));
    for (int i = 0; i < 25; ++i) {
        double sigma = rng.uniform(0.1, 10.0);
        double sigma_a = rng.uniform(0.1, 10.0);
        double mu = rng.uniform(-10.0, 10.0);
        double mu_a = mu + rng.uniform(-20.0, 20.0);
        double closed = learn_measurement(mu, sigma, mu_a, sigma_a);
        double quad = oracles::gaussian_kl_quadrature(mu, sigma, mu_a, sigma_a);
        CHECK(closed >= 0.0);
        CHECK(std::abs(closed - quad) < 1e-6);
    }
    CHECK_THROWS_AS(learn_measurement(0.0, 0.0, 0.0, 1.0), Error);
    CHECK_THROWS_AS(learn_measurement(0.0, 1.0, 0.0, -2.0), Error);
}

TEST_CASE("doubt discounts a measurement toward the prior") {
    Gaussian prior{0.0, 2.0}, claimed{2.0, 1.0};
    Gaussian full = discounted_measurement(1.0, prior, claimed);
    CHECK(full.mu == 2.0);
    CHECK(full.sigma == 1.0);
    Gaussian none = discounted_measurement(0.0, prior, claimed);
    CHECK(none.mu == 0.0);
    CHECK(none.sigma == 2.0);
    CHECK(learn_measurement(prior.mu, prior.sigma, none.mu, none.sigma) == 0.0);
    Gaussian half = discounted_measurement(0.5, prior, claimed);
    CHECK(half.mu == doctest::Approx(1.0));
    CHECK(half.sigma == doctest::Approx(1.5));
}

TEST_CASE("interpolation heuristic tracks the exact doubt-mixture entropy") {
    // The doubted-measurement model is a two-component mixture with no closed
    // form; the implementation interpolates the Gaussian parameters instead.
    // Endpoints agree exactly, both grow with credence, and for compatible
    // results the interpolation stays within ~15% of the quadrature value.
    struct Case {
        Gaussian prior, claimed;
        bool compatible;
    };
    const Case cases[] = {
        {{0.0, 1.0}, {1.0, 0.5}, true},
        {{0.0, 1.0}, {0.0, 0.5}, true},
        {{0.0, 2.0}, {0.5, 1.5}, true},
        {{0.0, 1.0}, {2.0, 1.0}, false},  // incompatible shift: phrase as hypothesis
    };
    for (const Case& c : cases) {
        double prev_h = -1.0, prev_e = -1.0;
        for (double pa : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            Gaussian eff = discounted_measurement(pa, c.prior, c.claimed);
            double heur = learn_measurement(c.prior.mu, c.prior.sigma, eff.mu, eff.sigma);
            double exact = oracles::mixture_kl_quadrature(pa, c.prior.mu, c.prior.sigma,
                                                          c.claimed.mu, c.claimed.sigma);
            CHECK(heur >= prev_h - 1e-12);
            CHECK(exact >= prev_e - 1e-9);
            prev_h = heur;
            prev_e = exact;
            if (pa == 0.0) {
                CHECK(heur == 0.0);
                CHECK(std::abs(exact) < 1e-9);
            } else if (pa == 1.0) {
                CHECK(std::abs(heur - exact) < 1e-9);
            } else if (c.compatible) {
                CHECK(std::abs(heur - exact) <= 0.15 * std::max(exact, 0.05));
            } else {
                // Full doubt accounting would credit more than the interpolation.
                CHECK(heur <= exact + 1e-9);
            }
        }
    }
}

namespace {

StatementManifest one_hypothesis() {
    StatementManifest m;
    m.items.push_back(StatementItem{StatementKind::Hypothesis, 1.0, 0, 0, 0, 0});
    return m;
}

}  // namespace

TEST_CASE("total quality composes importance and weighted learnings") {
    StatementManifest m = one_hypothesis();
    ReviewerBeliefs b;
    b.importance = 3;
    b.items.push_back(BeliefItem{StatementKind::Hypothesis, 0.5, 0.9, 1.0});
    double q = total_quality(m, b);
    CHECK(q == doctest::Approx(3.0 * learn_hypothesis(0.5, 0.9)).epsilon(1e-12));
    CHECK(q == doctest::Approx(1.59).epsilon(0.01));

    // Zero learning means zero quality at any importance.
    b.items[0].p_after = 0.5;
    for (int v = 0; v < kImportanceLevels; ++v) {
        b.importance = v;
        CHECK(total_quality(m, b) == 0.0);
    }
}

TEST_CASE("quality is invariant under splitting equal-learning statements") {
    StatementManifest two;
    two.items.push_back(StatementItem{StatementKind::Hypothesis, 0.5, 0, 0, 0, 0});
    two.items.push_back(StatementItem{StatementKind::Hypothesis, 0.5, 0, 0, 0, 0});
    ReviewerBeliefs b2;
    b2.importance = 4;
    b2.items = {BeliefItem{StatementKind::Hypothesis, 0.3, 0.8, 1.0},
                BeliefItem{StatementKind::Hypothesis, 0.3, 0.8, 1.0}};
    ReviewerBeliefs b1;
    b1.importance = 4;
    b1.items = {BeliefItem{StatementKind::Hypothesis, 0.3, 0.8, 1.0}};
    CHECK(total_quality(two, b2) == doctest::Approx(total_quality(one_hypothesis(), b1)).epsilon(1e-12));

    // Permuting statements together with their weights changes nothing.
    StatementManifest mixed;
    mixed.items.push_back(StatementItem{StatementKind::Hypothesis, 0.7, 0, 0, 0, 0});
    mixed.items.push_back(StatementItem{StatementKind::Measurement, 0.3, 0.0, 1.0, 1.0, 0.5});
    ReviewerBeliefs bm;
    bm.importance = 2;
    bm.items = {BeliefItem{StatementKind::Hypothesis, 0.4, 0.9, 1.0},
                BeliefItem{StatementKind::Measurement, 0, 0, 0.95}};
    StatementManifest swapped;
    swapped.items = {mixed.items[1], mixed.items[0]};
    ReviewerBeliefs bs;
    bs.importance = 2;
    bs.items = {bm.items[1], bm.items[0]};
    CHECK(total_quality(mixed, bm) == doctest::Approx(total_quality(swapped, bs)).epsilon(1e-12));
}

TEST_CASE("manifest and belief validation") {
    StatementManifest m;
    m.items.push_back(StatementItem{StatementKind::Hypothesis, 0.4, 0, 0, 0, 0});
    CHECK_THROWS_AS(validate_manifest(m, 0.02), Error);  // weights must sum to 1
    m.items.push_back(StatementItem{StatementKind::Hypothesis, 0.6, 0, 0, 0, 0});
    CHECK_NOTHROW(validate_manifest(m, 0.02));
    CHECK_THROWS_AS(validate_manifest(m, 0.5), Error);  // w_min violated

    ReviewerBeliefs wrong_count;
    wrong_count.items.push_back(BeliefItem{});
    CHECK_THROWS_AS(validate_beliefs(m, wrong_count), Error);

    ReviewerBeliefs wrong_kind;
    wrong_kind.items = {BeliefItem{StatementKind::Measurement, 0, 0, 0.5},
                        BeliefItem{StatementKind::Hypothesis, 0.5, 0.6, 1.0}};
    CHECK_THROWS_AS(validate_beliefs(m, wrong_kind), Error);

    ReviewerBeliefs bad_v;
    bad_v.importance = 6;
    bad_v.items = {BeliefItem{StatementKind::Hypothesis, 0.5, 0.6, 1.0},
                   BeliefItem{StatementKind::Hypothesis, 0.5, 0.6, 1.0}};
    CHECK_THROWS_AS(validate_beliefs(m, bad_v), Error);
}

TEST_CASE("bounded and ratio comparison measures") {
    auto same = critique_measures(0.3, 0.3);
    CHECK(same.l_delta == 0.0);
    CHECK(same.added_info == 0.0);

    auto c = critique_measures(0.2, 0.8);
    CHECK(c.l_delta == doctest::Approx(0.6));
    CHECK(c.added_info == doctest::Approx(3.0));

    // Rescaling both probabilities shrinks the bounded measure but not the
    // ratio, which is exactly the objection to the bounded form.
    auto scaled = critique_measures(0.1, 0.4);
    CHECK(scaled.l_delta == doctest::Approx(0.3));
    CHECK(scaled.added_info == doctest::Approx(3.0));

    CHECK_THROWS_AS(critique_measures(0.0, 0.5), Error);
}
