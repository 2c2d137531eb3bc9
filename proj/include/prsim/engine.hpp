#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "prsim/common.hpp"
#include "prsim/events.hpp"
#include "prsim/governance.hpp"
#include "prsim/params.hpp"
#include "prsim/prereview.hpp"
#include "prsim/reputation.hpp"
#include "prsim/review.hpp"
#include "prsim/treasury.hpp"

namespace prsim {

enum class SubmissionStage { PreReview, InReview, EarlyRejected, Failed, Accepted, Rejected };
const char* stage_name(SubmissionStage s);

struct SubmissionRecord {
    SubmissionId id = 0;
    std::vector<AccountId> authors;
    PaymentMethod payment = PaymentMethod::Cash;
    StatementManifest manifest;
    Timestamp submitted_at = 0.0;
    SubmissionStage stage = SubmissionStage::PreReview;
    std::vector<PreVote> votes;  // vote times are elapsed since submission
    Milli cash_charged = 0;
    int vouchers_burned = 0;
    int vouchers_burned_backed = 0;
    Timestamp closed_at = 0.0;  // poll close (absolute)
    ReviewPhase review;
    std::map<AccountId, PaymentMethod> payout_choices;  // from each final report
    double aggregate_q = 0.0;

    friend bool operator==(const SubmissionRecord&, const SubmissionRecord&) = default;
};

enum class DeltaCause { PreVote, StarRating, RaterFeedback, Recommendation, RecommendationSubject };
const char* delta_cause_name(DeltaCause c);

struct DeltaRecord {
    Timestamp at = 0.0;
    double delta = 0.0;
    DeltaCause cause = DeltaCause::PreVote;
    SubmissionId submission = 0;
    VoteOption option = VoteOption::NoOpinion;  // meaningful for PreVote causes

    friend bool operator==(const DeltaRecord&, const DeltaRecord&) = default;
};

struct Account {
    double r = 0.0;
    Timestamp r_updated = 0.0;
    Milli cash = 0;  // external stablecoin wallet
    int vouchers_backed = 0;
    int vouchers_unbacked = 0;
    double tokens_free = 0.0;  // unstaked science tokens
    std::vector<StakePosition> stakes;
    StarTally pending_ratings;
    std::set<std::pair<AccountId, SubmissionId>> raters_seen;  // one star vote per (rater, review)
    std::set<SubmissionId> reviews_done;
    std::vector<DeltaRecord> history;

    double staked_total() const;
    friend bool operator==(const Account&, const Account&) = default;
};

struct TreasuryLedger {
    Milli initial = 0;
    Milli balance = 0;
    Milli intake_total = 0;
    Milli outflow_total = 0;
    Milli earmarked = 0;  // grant/donation sub-balance, part of balance
    std::int64_t backed_vouchers = 0;
    std::int64_t unbacked_vouchers = 0;
    NftRegistry nfts;

    // Cash available for payouts after the backed-voucher reserve.
    Milli available(Milli voucher_value) const;
    friend bool operator==(const TreasuryLedger&, const TreasuryLedger&) = default;
};

struct RatingSettlementRecord {
    Timestamp at = 0.0;
    AccountId reviewer = 0;
    double average = 0.0;  // the only place the average ever becomes visible
    double reviewer_delta = 0.0;

    friend bool operator==(const RatingSettlementRecord&, const RatingSettlementRecord&) = default;
};

struct PendingParamChange {
    std::string param;
    double value = 0.0;
    std::optional<PetitionId> petition;

    friend bool operator==(const PendingParamChange&, const PendingParamChange&) = default;
};

struct EngineOptions {
    Milli initial_treasury = 0;
    Milli default_wallet = 0;  // stablecoin a fresh account shows up with
    bool record_history = true;
    ScoringConfig scoring;
    RateEstimates initial_rates;

    friend bool operator==(const EngineOptions&, const EngineOptions&) = default;
};

struct EngineState {
    ProtocolParams params;
    EngineOptions options;
    std::uint64_t last_seq = 0;
    Timestamp now = 0.0;
    std::map<SubmissionId, SubmissionRecord> submissions;
    std::map<AccountId, Account> accounts;
    RateEstimates rates;
    TreasuryLedger treasury;
    std::map<PetitionId, Petition> petitions;
    std::vector<PendingParamChange> pending_params;
    std::vector<Recommendation> pending_recs;
    std::vector<RatingSettlementRecord> rating_settlements;
    double epochs_done = 0.0;  // epoch boundaries processed so far

    // Reputation as of time t (pure read; decay applied on the fly).
    double reputation_at(AccountId account, Timestamp t) const;
    // The running average of a reviewer's pending stars is hidden until it
    // settles; only a settled average is ever visible.
    std::optional<double> visible_rating_average(AccountId reviewer) const;
    const Account* find_account(AccountId id) const;

    friend bool operator==(const EngineState&, const EngineState&) = default;
};

EngineState initial_state(const ProtocolParams& params, const EngineOptions& options = {});

// Fold one event into the state. Pure in the sense that the successor state is
// a function of (state, event) alone; throws on events illegal in the current
// lifecycle stage.
void apply_in_place(EngineState& state, const Event& event);
EngineState apply(EngineState state, const Event& event);

EngineState replay(std::span<const Event> log, const ProtocolParams& params,
                   const EngineOptions& options = {});

// Volunteers eligible for the committee draw of a submission, with their
// decayed reputations as of `at`. Drivers use this to produce the same draw
// the engine will verify.
std::vector<Candidate> review_candidates(const EngineState& state, SubmissionId submission,
                                         Timestamp at);

// Deterministic fingerprint over every state field (doubles by bit pattern).
std::uint64_t state_hash(const EngineState& state);

// Per-account ledger export (reputation, balances, delta history) as JSON text.
std::string ledger_to_json(const EngineState& state);

}  // namespace prsim
