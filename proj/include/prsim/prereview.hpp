#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "prsim/common.hpp"
#include "prsim/params.hpp"

namespace prsim {

// The four poll options offered on a fresh submission.
enum class VoteOption : std::uint8_t {
    NoOpinion = 0,        // a
    RejectImmediately,    // b
    Interesting,          // c
    WantReview,           // d
};
const char* vote_option_name(VoteOption o);

struct PreVote {
    AccountId voter = 0;
    VoteOption option = VoteOption::NoOpinion;
    Timestamp at = 0.0;
    friend bool operator==(const PreVote&, const PreVote&) = default;
};

enum class PollStatus { Open, EarlyReject, Failed, EnterReview };

struct PollOutcome {
    PollStatus status = PollStatus::Open;
    Timestamp close_time = 0.0;  // meaningful unless Open
};

// Evaluate the poll at elapsed time t since submission, over the votes cast so
// far. Early rejection takes precedence over entering review, and a poll never
// closes for review before t_vote.
PollOutcome poll_outcome(const std::vector<PreVote>& votes, double t, const ProtocolParams& params);

// Remuneration suppression for volunteering late: 1 on [0, t_vote], linearly
// falling to 0 at t_max.
double time_factor(double vote_at, const ProtocolParams& params);

struct Candidate {
    AccountId account = 0;
    double reputation = 0.0;
};

// Sequential weighted sampling without replacement; weight of a candidate is
// max(reputation, floor)^alpha. The draw is a pure function of draw_seed, so a
// logged seed reproduces the committee exactly.
std::vector<AccountId> select_reviewers(std::vector<Candidate> candidates, int n,
                                        const ProtocolParams& params, std::uint64_t draw_seed);

// Terminal outcomes a cast vote can be judged against.
enum class TerminalOutcome { EarlyReject, ReviewAccept, ReviewReject };

// Running estimates of the early-rejection and acceptance fractions that the
// payoff table divides by. Laplace-smoothed counts over the three terminal
// classes; fixed bootstrap values are used until enough submissions concluded.
struct RateEstimates {
    std::int64_t n_early_rejected = 0;
    std::int64_t n_accepted = 0;
    std::int64_t n_review_rejected = 0;
    std::int64_t bootstrap_until = 100;
    double bootstrap_f_rej = 0.60;
    double bootstrap_f_acc = 0.05;

    std::int64_t total() const { return n_early_rejected + n_accepted + n_review_rejected; }
    bool bootstrapped() const { return total() < bootstrap_until; }
    double f_rej() const;
    double f_acc() const;
    friend bool operator==(const RateEstimates&, const RateEstimates&) = default;
    void record(TerminalOutcome o);
};

// Reputation payoff for one cast vote given how the submission ended.
double prevote_payoff(VoteOption option, TerminalOutcome outcome, const RateEstimates& rates,
                      const ProtocolParams& params);

// Settle a whole poll: per-voter reputation deltas for a terminal outcome.
std::map<AccountId, double> settle_prevotes(const std::vector<PreVote>& votes, TerminalOutcome outcome,
                                            const RateEstimates& rates, const ProtocolParams& params);

}  // namespace prsim
