#pragma once

#include <string>
#include <vector>

#include "prsim/common.hpp"

namespace prsim {

enum class StatementKind { Hypothesis, Measurement };

struct StatementItem {
    StatementKind kind = StatementKind::Hypothesis;
    double weight = 0.0;
    // Measurement statements carry the previously known (combined-prior) Gaussian
    // and the Gaussian claimed after including the paper's result.
    double prior_mu = 0.0;
    double prior_sigma = 0.0;
    double claimed_mu = 0.0;
    double claimed_sigma = 0.0;
    friend bool operator==(const StatementItem&, const StatementItem&) = default;
};

struct StatementManifest {
    std::vector<StatementItem> items;
    friend bool operator==(const StatementManifest&, const StatementManifest&) = default;
};

// A reviewer's per-item assessment. Hypotheses get prior/posterior truth
// probabilities; measurements get a single credence that the claimed result holds.
struct BeliefItem {
    StatementKind kind = StatementKind::Hypothesis;
    double p = 0.5;         // hypothesis: prior belief
    double p_after = 0.5;   // hypothesis: belief after reading
    double p_accept = 1.0;  // measurement: credence in the claimed result
    friend bool operator==(const BeliefItem&, const BeliefItem&) = default;
};

// Importance levels a reviewer can assign, in increasing order.
inline constexpr int kImportanceLevels = 6;  // 0 = unimportant .. 5 = breakthrough
const char* importance_label(int v);

struct ReviewerBeliefs {
    std::vector<BeliefItem> items;
    int importance = 0;  // V, 0..5
    friend bool operator==(const ReviewerBeliefs&, const ReviewerBeliefs&) = default;
};

enum class LogUnit { Nats, Bits };

struct ScoringConfig {
    LogUnit measurement_unit = LogUnit::Nats;  // unit for L_M inside Q; L_H is always bits
    double belief_clamp = 1e-4;                // probabilities clamped into [eps, 1-eps]

    friend bool operator==(const ScoringConfig&, const ScoringConfig&) = default;
};

// Clamp a reviewer-supplied probability away from the divergent endpoints.
double clamp_belief(double p, double eps = 1e-4);

// Relative entropy added about a hypothesis, in bits. Inputs must already be in (0,1).
double learn_hypothesis(double p, double p_after);

// Gaussian relative entropy D(N_after || N_prior), in nats.
double learn_measurement(double prior_mu, double prior_sigma, double claimed_mu, double claimed_sigma);

// Interpolate the claimed Gaussian toward the prior as credence drops.
struct Gaussian {
    double mu = 0.0;
    double sigma = 1.0;
};
Gaussian discounted_measurement(double p_accept, const Gaussian& prior, const Gaussian& claimed);

// Per-item learning for one reviewer; index-aligned with the manifest.
std::vector<double> item_learnings(const StatementManifest& manifest, const ReviewerBeliefs& beliefs,
                                   const ScoringConfig& cfg = {});

// Paper quality Q = V * sum_i w_i * L_i.
double total_quality(const StatementManifest& manifest, const ReviewerBeliefs& beliefs,
                     const ScoringConfig& cfg = {});

// Comparison measures used to contrast against the relative-entropy choice:
// the bounded difference and the unbounded ratio-based added information.
struct CritiqueMeasures {
    double l_delta = 0.0;  // Pr(Y|X) - Pr(Y)
    double added_info = 0.0;  // Pr(Y|X)/Pr(Y) - 1
};
CritiqueMeasures critique_measures(double pr_y, double pr_y_given_x);

// Throws Errc::ManifestMismatch / DomainError on invalid shapes.
void validate_manifest(const StatementManifest& manifest, double w_min);
void validate_beliefs(const StatementManifest& manifest, const ReviewerBeliefs& beliefs);

}  // namespace prsim
