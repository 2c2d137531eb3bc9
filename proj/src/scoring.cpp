#include "prsim/scoring.hpp"

#include <cmath>

namespace prsim {

const char* importance_label(int v) {
    switch (v) {
        case 0: return "unimportant";
        case 1: return "incremental improvement";
        case 2: return "generalization";
        case 3: return "substantial improvement";
        case 4: return "discovery";
        case 5: return "breakthrough";
        default: return "?";
    }
}

double clamp_belief(double p, double eps) {
    if (!(eps > 0.0) || eps >= 0.5) fail(Errc::DomainError, "belief clamp must be in (0, 0.5)");
    if (std::isnan(p)) fail(Errc::DomainError, "belief is NaN");
    if (p < eps) return eps;
    if (p > 1.0 - eps) return 1.0 - eps;
    return p;
}

double learn_hypothesis(double p, double p_after) {
    if (!(p > 0.0 && p < 1.0 && p_after > 0.0 && p_after < 1.0))
        fail(Errc::DomainError, "hypothesis beliefs must lie strictly inside (0,1); clamp first");
    // D(Bernoulli(p_after) || Bernoulli(p)) in bits.
    double l = p_after * std::log2(p_after / p) + (1.0 - p_after) * std::log2((1.0 - p_after) / (1.0 - p));
    // Guard the p == p_after case against a -0.0 result.
    return l < 0.0 ? 0.0 : l;
}

double learn_measurement(double prior_mu, double prior_sigma, double claimed_mu, double claimed_sigma) {
    if (!(prior_sigma > 0.0) || !(claimed_sigma > 0.0))
        fail(Errc::DomainError, "measurement sigmas must be positive");
    double dmu = claimed_mu - prior_mu;
    double l = std::log(prior_sigma / claimed_sigma) +
               (claimed_sigma * claimed_sigma + dmu * dmu) / (2.0 * prior_sigma * prior_sigma) - 0.5;
    return l < 0.0 ? 0.0 : l;
}

Gaussian discounted_measurement(double p_accept, const Gaussian& prior, const Gaussian& claimed) {
    if (!(p_accept >= 0.0 && p_accept <= 1.0)) fail(Errc::DomainError, "credence must be in [0,1]");
    return Gaussian{p_accept * claimed.mu + (1.0 - p_accept) * prior.mu,
                    p_accept * claimed.sigma + (1.0 - p_accept) * prior.sigma};
}

std::vector<double> item_learnings(const StatementManifest& manifest, const ReviewerBeliefs& beliefs,
                                   const ScoringConfig& cfg) {
    validate_beliefs(manifest, beliefs);
    std::vector<double> out;
    out.reserve(manifest.items.size());
    for (std::size_t i = 0; i < manifest.items.size(); ++i) {
        const StatementItem& item = manifest.items[i];
        const BeliefItem& b = beliefs.items[i];
        if (item.kind == StatementKind::Hypothesis) {
            out.push_back(learn_hypothesis(clamp_belief(b.p, cfg.belief_clamp),
                                           clamp_belief(b.p_after, cfg.belief_clamp)));
        } else {
            Gaussian eff = discounted_measurement(b.p_accept, Gaussian{item.prior_mu, item.prior_sigma},
                                                  Gaussian{item.claimed_mu, item.claimed_sigma});
            double l = learn_measurement(item.prior_mu, item.prior_sigma, eff.mu, eff.sigma);
            if (cfg.measurement_unit == LogUnit::Bits) l /= std::log(2.0);
            out.push_back(l);
        }
    }
    return out;
}

double total_quality(const StatementManifest& manifest, const ReviewerBeliefs& beliefs,
                     const ScoringConfig& cfg) {
    std::vector<double> ls = item_learnings(manifest, beliefs, cfg);
    double q = 0.0;
    for (std::size_t i = 0; i < ls.size(); ++i) q += manifest.items[i].weight * ls[i];
    return static_cast<double>(beliefs.importance) * q;
}

CritiqueMeasures critique_measures(double pr_y, double pr_y_given_x) {
    if (!(pr_y > 0.0 && pr_y <= 1.0)) fail(Errc::DomainError, "Pr(Y) must be in (0,1]");
    if (!(pr_y_given_x >= 0.0 && pr_y_given_x <= 1.0)) fail(Errc::DomainError, "Pr(Y|X) must be in [0,1]");
    return CritiqueMeasures{pr_y_given_x - pr_y, pr_y_given_x / pr_y - 1.0};
}

void validate_manifest(const StatementManifest& manifest, double w_min) {
    if (manifest.items.empty()) fail(Errc::ManifestMismatch, "manifest has no statements");
    double sum = 0.0;
    for (std::size_t i = 0; i < manifest.items.size(); ++i) {
        const StatementItem& item = manifest.items[i];
        if (!(item.weight > w_min))
            fail(Errc::ManifestMismatch,
                 "statement " + std::to_string(i + 1) + " weight must exceed w_min");
        sum += item.weight;
        if (item.kind == StatementKind::Measurement) {
            if (!(item.prior_sigma > 0.0) || !(item.claimed_sigma > 0.0))
                fail(Errc::ManifestMismatch,
                     "statement " + std::to_string(i + 1) + " needs positive sigmas");
        }
    }
    if (std::abs(sum - 1.0) > 1e-9) fail(Errc::ManifestMismatch, "statement weights must sum to 1");
}

void validate_beliefs(const StatementManifest& manifest, const ReviewerBeliefs& beliefs) {
    if (beliefs.items.size() != manifest.items.size())
        fail(Errc::ManifestMismatch, "belief count does not match manifest");
    if (beliefs.importance < 0 || beliefs.importance >= kImportanceLevels)
        fail(Errc::DomainError, "importance level out of range");
    for (std::size_t i = 0; i < manifest.items.size(); ++i) {
        if (beliefs.items[i].kind != manifest.items[i].kind)
            fail(Errc::ManifestMismatch, "belief " + std::to_string(i + 1) + " kind mismatch");
        if (manifest.items[i].kind == StatementKind::Measurement) {
            double pa = beliefs.items[i].p_accept;
            if (!(pa >= 0.0 && pa <= 1.0)) fail(Errc::DomainError, "measurement credence outside [0,1]");
        }
    }
}

}  // namespace prsim
