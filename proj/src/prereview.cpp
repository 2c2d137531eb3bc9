#include "prsim/prereview.hpp"

#include <algorithm>
#include <cmath>

#include "prsim/rng.hpp"

namespace prsim {

const char* vote_option_name(VoteOption o) {
    switch (o) {
        case VoteOption::NoOpinion: return "no_opinion";
        case VoteOption::RejectImmediately: return "reject_immediately";
        case VoteOption::Interesting: return "interesting";
        case VoteOption::WantReview: return "want_review";
    }
    return "?";
}

PollOutcome poll_outcome(const std::vector<PreVote>& votes, double t, const ProtocolParams& params) {
    int n_total = 0, n_reject = 0, n_interest = 0, n_review = 0;
    for (const PreVote& v : votes) {
        if (v.at > t) continue;  // the tally at time t
        ++n_total;
        switch (v.option) {
            case VoteOption::RejectImmediately: ++n_reject; break;
            case VoteOption::Interesting: ++n_interest; break;
            case VoteOption::WantReview: ++n_review; break;
            case VoteOption::NoOpinion: break;
        }
    }

    if (t > params.t_vote && n_total > params.n_votes && n_reject > n_interest + n_review)
        return {PollStatus::EarlyReject, t};
    if (t >= params.t_max && (n_total < params.n_votes || n_review < params.n_reviews))
        return {PollStatus::Failed, params.t_max};
    if (t >= params.t_vote && t < params.t_max && n_total >= params.n_votes && n_review >= params.n_reviews)
        return {PollStatus::EnterReview, std::max(t, params.t_vote)};
    return {PollStatus::Open, 0.0};
}

double time_factor(double vote_at, const ProtocolParams& params) {
    double f = 1.0 - (vote_at - params.t_vote) / (params.t_max - params.t_vote);
    return std::clamp(f, 0.0, 1.0);
}

std::vector<AccountId> select_reviewers(std::vector<Candidate> candidates, int n,
                                        const ProtocolParams& params, std::uint64_t draw_seed) {
    if (static_cast<int>(candidates.size()) < n)
        fail(Errc::NotEnoughVolunteers, "need " + std::to_string(n) + " volunteers, have " +
                                            std::to_string(candidates.size()));
    // Canonical order so the draw only depends on the candidate set, not on
    // however the caller assembled it.
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.account < b.account; });

    std::vector<double> weights(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        weights[i] = std::pow(std::max(candidates[i].reputation, params.selection_rep_floor),
                              params.alpha_select);

    Rng rng(draw_seed, stream_id(Draw::Selection));
    std::vector<AccountId> picked;
    picked.reserve(n);
    for (int k = 0; k < n; ++k) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = rng.next_double() * total;
        std::size_t chosen = candidates.size() - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            acc += weights[i];
            if (u < acc) {
                chosen = i;
                break;
            }
        }
        picked.push_back(candidates[chosen].account);
        weights[chosen] = 0.0;
    }
    return picked;
}

double RateEstimates::f_rej() const {
    if (bootstrapped()) return bootstrap_f_rej;
    return double(n_early_rejected + 1) / double(total() + 3);
}

double RateEstimates::f_acc() const {
    if (bootstrapped()) return bootstrap_f_acc;
    return double(n_accepted + 1) / double(total() + 3);
}

void RateEstimates::record(TerminalOutcome o) {
    switch (o) {
        case TerminalOutcome::EarlyReject: ++n_early_rejected; break;
        case TerminalOutcome::ReviewAccept: ++n_accepted; break;
        case TerminalOutcome::ReviewReject: ++n_review_rejected; break;
    }
}

double prevote_payoff(VoteOption option, TerminalOutcome outcome, const RateEstimates& rates,
                      const ProtocolParams& params) {
    const double f_rej = rates.f_rej();
    const double f_acc = rates.f_acc();
    switch (option) {
        case VoteOption::NoOpinion:
            switch (outcome) {
                case TerminalOutcome::EarlyReject: return -(1.0 - f_rej) / f_rej;
                case TerminalOutcome::ReviewAccept: return 1.0;
                case TerminalOutcome::ReviewReject: return 1.0;
            }
            break;
        case VoteOption::RejectImmediately:
            switch (outcome) {
                case TerminalOutcome::EarlyReject: return 1.0;
                case TerminalOutcome::ReviewAccept: return -params.margin_b * f_rej / f_acc;
                case TerminalOutcome::ReviewReject: return 0.0;
            }
            break;
        case VoteOption::Interesting:
            switch (outcome) {
                case TerminalOutcome::EarlyReject: return -1.0 / f_rej;
                case TerminalOutcome::ReviewAccept: return 1.0 / (1.0 - f_rej);
                case TerminalOutcome::ReviewReject: return 1.0 / (1.0 - f_rej);
            }
            break;
        case VoteOption::WantReview:
            switch (outcome) {
                case TerminalOutcome::EarlyReject: return -params.margin_d / f_rej;
                case TerminalOutcome::ReviewAccept: return 1.0 / (1.0 - f_rej);
                case TerminalOutcome::ReviewReject: return 1.0 / (1.0 - f_rej);
            }
            break;
    }
    fail(Errc::DomainError, "unreachable payoff cell");
}

std::map<AccountId, double> settle_prevotes(const std::vector<PreVote>& votes, TerminalOutcome outcome,
                                            const RateEstimates& rates, const ProtocolParams& params) {
    std::map<AccountId, double> deltas;
    for (const PreVote& v : votes) {
        auto [it, fresh] = deltas.emplace(v.voter, 0.0);
        if (!fresh) fail(Errc::UnknownVoter, "duplicate vote by account " + std::to_string(v.voter));
        it->second = prevote_payoff(v.option, outcome, rates, params);
    }
    return deltas;
}

}  // namespace prsim
