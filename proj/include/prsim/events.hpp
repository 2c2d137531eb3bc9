#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "prsim/common.hpp"
#include "prsim/prereview.hpp"
#include "prsim/review.hpp"
#include "prsim/scoring.hpp"
#include "prsim/treasury.hpp"

namespace prsim {

// Everything that can change engine state enters through one of these records.
// Random choices (reviewer draws, replacements) are made by the caller and
// logged with their seed, so a log replays to the identical state.

struct SubmitEv {
    SubmissionId submission = 0;
    std::vector<AccountId> authors;
    PaymentMethod payment = PaymentMethod::Cash;
    StatementManifest manifest;

    friend bool operator==(const SubmitEv&, const SubmitEv&) = default;
};

struct PreVoteEv {
    SubmissionId submission = 0;
    AccountId voter = 0;
    VoteOption option = VoteOption::NoOpinion;

    friend bool operator==(const PreVoteEv&, const PreVoteEv&) = default;
};

// Close of the pre-review poll, recorded by the driver once an outcome fires.
// For EnterReview it carries the drawn committee plus the seed of the draw.
struct PollClosedEv {
    SubmissionId submission = 0;
    PollStatus outcome = PollStatus::EarlyReject;
    std::vector<AccountId> reviewers;
    std::uint64_t draw_seed = 0;

    friend bool operator==(const PollClosedEv&, const PollClosedEv&) = default;
};

struct ReportFiledEv {
    SubmissionId submission = 0;
    AccountId reviewer = 0;
    std::vector<ReviewRequest> requests;

    friend bool operator==(const ReportFiledEv&, const ReportFiledEv&) = default;
};

struct AuthorReplyEv {
    SubmissionId submission = 0;
    std::string text;
    std::string new_version;

    friend bool operator==(const AuthorReplyEv&, const AuthorReplyEv&) = default;
};

struct ReviewerPassEv {
    SubmissionId submission = 0;
    AccountId reviewer = 0;

    friend bool operator==(const ReviewerPassEv&, const ReviewerPassEv&) = default;
};

struct AuthorProceedEv {
    SubmissionId submission = 0;

    friend bool operator==(const AuthorProceedEv&, const AuthorProceedEv&) = default;
};

struct FinalReportEv {
    SubmissionId submission = 0;
    AccountId reviewer = 0;
    ReviewerBeliefs beliefs;
    double confidence = 1.0;
    double fraction_read = 1.0;
    double fraction_understood = 1.0;
    std::string conclusion;
    PaymentMethod payout = PaymentMethod::Cash;

    friend bool operator==(const FinalReportEv&, const FinalReportEv&) = default;
};

// Replacement draw for a reviewer who missed the hard deadline. An absent
// substitute means no volunteers were left and the submission fails.
struct ReviewerReplacedEv {
    SubmissionId submission = 0;
    AccountId retired = 0;
    std::optional<AccountId> substitute;
    std::uint64_t draw_seed = 0;

    friend bool operator==(const ReviewerReplacedEv&, const ReviewerReplacedEv&) = default;
};

struct StarVoteEv {
    AccountId rater = 0;
    AccountId reviewer = 0;
    SubmissionId submission = 0;
    int stars = 1;

    friend bool operator==(const StarVoteEv&, const StarVoteEv&) = default;
};

struct StakeEv {
    AccountId account = 0;
    double amount = 0.0;

    friend bool operator==(const StakeEv&, const StakeEv&) = default;
};

struct UnstakeEv {
    AccountId account = 0;
    double amount = 0.0;

    friend bool operator==(const UnstakeEv&, const UnstakeEv&) = default;
};

struct PetitionOpenEv {
    PetitionId petition = 0;
    AccountId proposer = 0;
    std::string param;
    double value = 0.0;
    Timestamp closes_at = 0.0;

    friend bool operator==(const PetitionOpenEv&, const PetitionOpenEv&) = default;
};

struct PetitionVoteEv {
    PetitionId petition = 0;
    AccountId account = 0;
    bool support = true;

    friend bool operator==(const PetitionVoteEv&, const PetitionVoteEv&) = default;
};

struct RecommendationMadeEv {
    AccountId recommender = 0;
    AccountId subject = 0;
    double predicted_level = 0.0;
    double horizon_years = 0.0;

    friend bool operator==(const RecommendationMadeEv&, const RecommendationMadeEv&) = default;
};

// Exogenous income: certificate auctions, donations, grants.
struct FundingReceivedEv {
    Milli amount = 0;
    std::string source;
    bool earmarked = false;

    friend bool operator==(const FundingReceivedEv&, const FundingReceivedEv&) = default;
};

// Direct parameter change (scenario setup or operator action); passed petitions
// enact themselves at the next epoch boundary without an extra event.
struct ParamChangeEv {
    std::string param;
    double value = 0.0;

    friend bool operator==(const ParamChangeEv&, const ParamChangeEv&) = default;
};

using EventPayload =
    std::variant<SubmitEv, PreVoteEv, PollClosedEv, ReportFiledEv, AuthorReplyEv, ReviewerPassEv,
                 AuthorProceedEv, FinalReportEv, ReviewerReplacedEv, StarVoteEv, StakeEv, UnstakeEv,
                 PetitionOpenEv, PetitionVoteEv, RecommendationMadeEv, FundingReceivedEv,
                 ParamChangeEv>;

struct Event {
    std::uint64_t seq = 0;  // dense from 1
    Timestamp at = 0.0;     // non-decreasing along the log
    EventPayload payload;

    const char* kind_name() const;
};

// One canonical single-line JSON record per event; identical logs are
// byte-identical. Parsing is strict: unknown fields are rejected.
std::string event_to_line(const Event& event);
Event event_from_line(const std::string& line, std::size_t lineno);

std::vector<Event> read_event_log(const std::string& path);

}  // namespace prsim
