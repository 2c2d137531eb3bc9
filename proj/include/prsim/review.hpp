#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prsim/common.hpp"
#include "prsim/params.hpp"
#include "prsim/scoring.hpp"

namespace prsim {

enum class RequestKind { Clarification, ChangeRequest };

struct ReviewRequest {
    RequestKind kind = RequestKind::Clarification;
    std::string text;
    friend bool operator==(const ReviewRequest&, const ReviewRequest&) = default;
};

struct RoundEntry {
    std::vector<ReviewRequest> requests;
    bool passed = false;
    Timestamp filed_at = 0.0;
    friend bool operator==(const RoundEntry&, const RoundEntry&) = default;
};

struct ReviewRound {
    int round_no = 1;
    Timestamp opened_at = 0.0;
    std::map<AccountId, RoundEntry> entries;
    std::optional<std::string> author_reply;
    std::optional<std::string> new_version;
    friend bool operator==(const ReviewRound&, const ReviewRound&) = default;
};

struct FinalReportData {
    ReviewerBeliefs beliefs;
    double confidence = 1.0;
    double fraction_read = 1.0;
    double fraction_understood = 1.0;
    std::string conclusion;
    double quality = 0.0;       // Q from the scoring of beliefs vs the manifest
    double delay_factor = 1.0;  // worst suppression across this reviewer's filings
    Timestamp filed_at = 0.0;
    friend bool operator==(const FinalReportData&, const FinalReportData&) = default;
};

enum class ReviewStage { Iterating, FinalReports, Decided };

// Multiplicative payout suppression for a late report: 1 up to the deadline,
// linear down to the floor at deadline + window. Filing later than that is not
// allowed; the reviewer gets replaced instead.
double delay_factor(Timestamp due, Timestamp filed, double window_days, double floor_value = 0.25);

struct Decision {
    bool accepted = false;
    double aggregate_q = 0.0;
};

struct WeightedScore {
    double quality = 0.0;
    double confidence = 1.0;
    double fraction_read = 1.0;
    double fraction_understood = 1.0;
};

// Confidence-weighted average of the reviewers' Q scores; ties at the
// threshold accept. Weight = confidence * fraction read * fraction understood.
Decision decide(const std::vector<WeightedScore>& finals, double threshold, int n_reviews);

// Discussion-phase state for one submission. Mutating calls validate the
// transition rules and throw Errc::IllegalTransition / UnknownReviewer.
struct ReviewPhase {
    std::vector<AccountId> active;                 // always n_reviews strong while iterating
    std::map<AccountId, AccountId> replaced;       // retired -> substitute
    std::map<AccountId, double> time_factors;      // from each reviewer's poll vote
    std::map<AccountId, double> delay_factors;     // min over this reviewer's filings
    std::vector<ReviewRound> rounds;
    std::map<AccountId, FinalReportData> finals;
    ReviewStage stage = ReviewStage::Iterating;
    Timestamp finals_opened_at = 0.0;

    bool is_active(AccountId reviewer) const;
    ReviewRound& current_round();
    const ReviewRound& current_round() const;
    bool round_complete() const;
    bool all_passed() const;

    void open(const std::vector<AccountId>& reviewers, const std::map<AccountId, double>& tfactors,
              Timestamp at);
    void file_report(AccountId reviewer, std::vector<ReviewRequest> requests, Timestamp at,
                     const ProtocolParams& params);
    void pass(AccountId reviewer, Timestamp at, const ProtocolParams& params);
    void author_reply(const std::string& text, const std::string& new_version, Timestamp at);
    void author_proceed(Timestamp at);
    // Swap in a substitute for a reviewer who blew past the replacement window.
    void replace(AccountId retired, AccountId substitute, double substitute_time_factor, Timestamp at,
                 const ProtocolParams& params);
    void file_final(AccountId reviewer, FinalReportData data, const ProtocolParams& params);

    Timestamp round_due(const ProtocolParams& params) const;
    Timestamp finals_due(const ProtocolParams& params) const;

    friend bool operator==(const ReviewPhase&, const ReviewPhase&) = default;

  private:
    void note_filing(AccountId reviewer, Timestamp due, Timestamp at, const ProtocolParams& params);
    void maybe_enter_finals(Timestamp at);
};

}  // namespace prsim
