#include "prsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "prsim/rng.hpp"

namespace prsim {

const char* stage_name(SubmissionStage s) {
    switch (s) {
        case SubmissionStage::PreReview: return "pre_review";
        case SubmissionStage::InReview: return "in_review";
        case SubmissionStage::EarlyRejected: return "early_rejected";
        case SubmissionStage::Failed: return "failed";
        case SubmissionStage::Accepted: return "accepted";
        case SubmissionStage::Rejected: return "rejected";
    }
    return "?";
}

const char* delta_cause_name(DeltaCause c) {
    switch (c) {
        case DeltaCause::PreVote: return "pre_vote";
        case DeltaCause::StarRating: return "star_rating";
        case DeltaCause::RaterFeedback: return "rater_feedback";
        case DeltaCause::Recommendation: return "recommendation";
        case DeltaCause::RecommendationSubject: return "recommendation_subject";
    }
    return "?";
}

double Account::staked_total() const {
    double s = 0.0;
    for (const StakePosition& p : stakes) s += p.amount;
    return s;
}

Milli TreasuryLedger::available(Milli voucher_value) const {
    Milli reserved = backed_vouchers * voucher_value;
    return balance - earmarked - reserved;
}

double EngineState::reputation_at(AccountId account, Timestamp t) const {
    auto it = accounts.find(account);
    if (it == accounts.end()) return 0.0;
    return decay_to(it->second.r, 0.0, params.k_decay_per_year, days_to_years(t - it->second.r_updated));
}

std::optional<double> EngineState::visible_rating_average(AccountId reviewer) const {
    for (auto it = rating_settlements.rbegin(); it != rating_settlements.rend(); ++it)
        if (it->reviewer == reviewer) return it->average;
    return std::nullopt;  // a pending tally stays hidden
}

const Account* EngineState::find_account(AccountId id) const {
    auto it = accounts.find(id);
    return it == accounts.end() ? nullptr : &it->second;
}

EngineState initial_state(const ProtocolParams& params, const EngineOptions& options) {
    params.validate();
    EngineState s;
    s.params = params;
    s.options = options;
    s.rates = options.initial_rates;
    s.treasury.initial = options.initial_treasury;
    s.treasury.balance = options.initial_treasury;
    return s;
}

namespace {

class Applier {
  public:
    Applier(EngineState& s, const Event& ev) : s_(s), ev_(ev) {}

    void run() {
        if (ev_.seq != s_.last_seq + 1)
            fail(Errc::OutOfOrderEvent, "event seq " + std::to_string(ev_.seq) + " after seq " +
                                            std::to_string(s_.last_seq));
        if (ev_.at < s_.now)
            fail(Errc::OutOfOrderEvent, "event at " + std::to_string(ev_.at) +
                                            " precedes clock " + std::to_string(s_.now));
        advance_to(ev_.at);
        s_.now = ev_.at;
        s_.last_seq = ev_.seq;
        std::visit([this](const auto& payload) { handle(payload); }, ev_.payload);
    }

  private:
    EngineState& s_;
    const Event& ev_;

    Account& account(AccountId id) {
        auto [it, fresh] = s_.accounts.try_emplace(id);
        if (fresh) it->second.cash = s_.options.default_wallet;
        return it->second;
    }

    SubmissionRecord& submission(SubmissionId id) {
        auto it = s_.submissions.find(id);
        if (it == s_.submissions.end())
            fail(Errc::IllegalTransition, "unknown submission " + std::to_string(id));
        return it->second;
    }

    // ---- money ----

    void treasury_in(Milli amount) {
        s_.treasury.balance += amount;
        s_.treasury.intake_total += amount;
    }

    void treasury_out(Milli amount) {
        if (amount > s_.treasury.balance)
            fail(Errc::TreasuryInsufficient, "payout would overdraft the treasury");
        s_.treasury.balance -= amount;
        s_.treasury.outflow_total += amount;
    }

    Milli voucher_value() const { return s_.params.x_fee - s_.params.delta; }

    void grant_voucher(Account& to) {
        if (s_.treasury.available(voucher_value()) >= voucher_value()) {
            ++to.vouchers_backed;
            ++s_.treasury.backed_vouchers;
        } else {
            ++to.vouchers_unbacked;
            ++s_.treasury.unbacked_vouchers;
        }
    }

    // ---- reputation ----

    void decay_account(Account& acc, Timestamp at) {
        acc.r = decay_to(acc.r, 0.0, s_.params.k_decay_per_year, days_to_years(at - acc.r_updated));
        acc.r_updated = at;
    }

    void award(AccountId id, Timestamp at, double delta, DeltaCause cause, SubmissionId sub,
               VoteOption option = VoteOption::NoOpinion) {
        Account& acc = account(id);
        decay_account(acc, at);
        double r_old = acc.r;
        acc.r = std::max(acc.r + delta, s_.params.r_min);
        if (s_.options.record_history)
            acc.history.push_back(DeltaRecord{at, delta, cause, sub, option});
        // Accounts at full commitment keep their voting power across a gain.
        if (acc.r > r_old && r_old > 0.0 && !acc.stakes.empty()) {
            double staked = acc.staked_total();
            if (staked >= s_.params.alpha_stake * r_old) {
                double bonus = bonus_top_up(r_old, acc.r, staked, s_.params.alpha_stake);
                if (bonus > 0.0)
                    acc.stakes.push_back(
                        StakePosition{bonus, at + years_to_days(s_.params.t_stake_years)});
            }
        }
    }

    // ---- lazy, time-triggered settlements ----

    void advance_to(Timestamp t) {
        while (true) {
            // Earliest pending trigger at or before t; ties settle in a fixed
            // order (epoch, petitions by id, recommendations in filing order).
            double m = t;
            bool found = false;
            double boundary = (s_.epochs_done + 1.0) * s_.params.epoch_days;
            bool epoch_work = !s_.pending_params.empty() || has_stakers_();
            if (epoch_work && boundary <= m) {
                m = boundary;
                found = true;
            }
            for (const auto& [id, p] : s_.petitions)
                if (p.status == PetitionStatus::Open && p.closes_at <= m) {
                    m = p.closes_at;
                    found = true;
                }
            for (const Recommendation& r : s_.pending_recs)
                if (r.horizon_at <= m) {
                    m = r.horizon_at;
                    found = true;
                }
            if (!found) break;

            if (epoch_work && boundary == m) settle_epoch(boundary);
            for (auto& [id, p] : s_.petitions)
                if (p.status == PetitionStatus::Open && p.closes_at == m) close_petition(p);
            for (std::size_t i = 0; i < s_.pending_recs.size();) {
                if (s_.pending_recs[i].horizon_at == m)
                    settle_recommendation_at(i);
                else
                    ++i;
            }
        }
        // No scheduled work: just bring the epoch counter up to date.
        double done = std::floor(t / s_.params.epoch_days);
        if (done > s_.epochs_done && s_.pending_params.empty() && !has_stakers_())
            s_.epochs_done = done;
    }

    bool has_stakers_() const {
        for (const auto& [_, acc] : s_.accounts)
            if (!acc.stakes.empty()) return true;
        return false;
    }

    void settle_epoch(Timestamp boundary) {
        // Enact queued parameter changes first, then pay interest under the new rules.
        std::vector<PendingParamChange> queued;
        queued.swap(s_.pending_params);
        for (const PendingParamChange& c : queued) {
            try {
                set_param(s_.params, c.param, c.value);
            } catch (const Error&) {
                // A change that no longer validates against the current
                // parameter set is dropped.
            }
        }
        double dt_years = days_to_years(s_.params.epoch_days);
        for (auto& [id, acc] : s_.accounts) {
            if (acc.stakes.empty()) continue;
            double r = std::max(
                decay_to(acc.r, 0.0, s_.params.k_decay_per_year, days_to_years(boundary - acc.r_updated)),
                0.0);
            double eligible = interest_eligible(acc.staked_total(), r, s_.params.alpha_stake);
            acc.tokens_free += eligible * s_.params.interest_per_year * dt_years;
        }
        s_.epochs_done += 1.0;
    }

    void close_petition(Petition& p) {
        double total_active = 0.0;
        for (const auto& [id, acc] : s_.accounts) {
            double r = std::max(s_.reputation_at(id, p.closes_at), 0.0);
            total_active += voting_power(r, acc.staked_total(), s_.params.alpha_stake);
        }
        PetitionTally tally = tally_petition(p, total_active, s_.params);
        p.status = tally.status;
        if (tally.status == PetitionStatus::Passed)
            s_.pending_params.push_back(PendingParamChange{p.target_param, p.proposed_value, p.id});
    }

    void settle_recommendation_at(std::size_t idx) {
        Recommendation rec = s_.pending_recs[idx];
        s_.pending_recs.erase(s_.pending_recs.begin() + idx);
        double realized = std::max(s_.reputation_at(rec.subject, rec.horizon_at), 0.0);
        RecommendationSettlement st = settle_recommendation(rec, realized, s_.params.rec_reward);
        award(rec.recommender, rec.horizon_at, st.recommender_delta, DeltaCause::Recommendation, 0);
        if (st.subject_delta != 0.0)
            award(rec.subject, rec.horizon_at, st.subject_delta, DeltaCause::RecommendationSubject, 0);
    }

    // ---- event handlers ----

    void handle(const SubmitEv& e) {
        if (s_.submissions.count(e.submission))
            fail(Errc::IllegalTransition, "submission id already used");
        if (e.authors.empty()) fail(Errc::IllegalTransition, "a submission needs authors");
        validate_manifest(e.manifest, s_.params.w_min);

        SubmissionRecord rec;
        rec.id = e.submission;
        rec.authors = e.authors;
        rec.payment = e.payment;
        rec.manifest = e.manifest;
        rec.submitted_at = ev_.at;

        Charge charge = submission_charge(e.payment, fee_schedule(s_.params), s_.params.n_reviews);
        Account& payer = account(e.authors.front());
        if (charge.vouchers_burned > 0) {
            if (payer.vouchers_backed + payer.vouchers_unbacked < charge.vouchers_burned)
                fail(Errc::InsufficientVouchers, "author holds too few vouchers");
            int burn_backed = std::min(charge.vouchers_burned, payer.vouchers_backed);
            payer.vouchers_backed -= burn_backed;
            payer.vouchers_unbacked -= charge.vouchers_burned - burn_backed;
            s_.treasury.backed_vouchers -= burn_backed;
            s_.treasury.unbacked_vouchers -= charge.vouchers_burned - burn_backed;
            rec.vouchers_burned = charge.vouchers_burned;
            rec.vouchers_burned_backed = burn_backed;
        }
        if (payer.cash < charge.cash) fail(Errc::InsufficientFunds, "author cannot cover the fee");
        payer.cash -= charge.cash;
        treasury_in(charge.cash);
        rec.cash_charged = charge.cash;

        s_.treasury.nfts.mint(NftKind::Preprint, e.authors.front(), e.submission, ev_.seq);
        for (AccountId a : e.authors) account(a);
        s_.submissions.emplace(e.submission, std::move(rec));
    }

    void handle(const PreVoteEv& e) {
        SubmissionRecord& rec = submission(e.submission);
        if (rec.stage != SubmissionStage::PreReview)
            fail(Errc::IllegalTransition, "poll is not open");
        double elapsed = ev_.at - rec.submitted_at;
        if (elapsed >= s_.params.t_max)
            fail(Errc::IllegalTransition, "voting period expired");
        if (std::find(rec.authors.begin(), rec.authors.end(), e.voter) != rec.authors.end())
            fail(Errc::IllegalTransition, "authors cannot vote on their own submission");
        for (const PreVote& v : rec.votes)
            if (v.voter == e.voter)
                fail(Errc::IllegalTransition, "reviewers vote once per submission");
        account(e.voter);
        rec.votes.push_back(PreVote{e.voter, e.option, elapsed});
    }

    void refund_submission(SubmissionRecord& rec, bool keep_fee_min) {
        Milli refund = rec.cash_charged - (keep_fee_min ? s_.params.fee_min : 0);
        if (refund > 0) {
            treasury_out(refund);
            account(rec.authors.front()).cash += refund;
        }
        if (rec.vouchers_burned > 0) {
            Account& payer = account(rec.authors.front());
            payer.vouchers_backed += rec.vouchers_burned_backed;
            payer.vouchers_unbacked += rec.vouchers_burned - rec.vouchers_burned_backed;
            s_.treasury.backed_vouchers += rec.vouchers_burned_backed;
            s_.treasury.unbacked_vouchers += rec.vouchers_burned - rec.vouchers_burned_backed;
        }
    }

    void settle_poll(SubmissionRecord& rec, TerminalOutcome outcome) {
        auto deltas = settle_prevotes(rec.votes, outcome, s_.rates, s_.params);
        for (const PreVote& v : rec.votes)
            award(v.voter, ev_.at, deltas.at(v.voter), DeltaCause::PreVote, rec.id, v.option);
        s_.rates.record(outcome);
    }

    void handle(const PollClosedEv& e) {
        SubmissionRecord& rec = submission(e.submission);
        if (rec.stage != SubmissionStage::PreReview)
            fail(Errc::IllegalTransition, "poll already closed");
        double elapsed = ev_.at - rec.submitted_at;
        PollOutcome computed = poll_outcome(rec.votes, elapsed, s_.params);
        if (computed.status != e.outcome)
            fail(Errc::IllegalTransition,
                 "recorded poll outcome not supported by the tally (submission " +
                     std::to_string(rec.id) + ", elapsed " + std::to_string(elapsed) + ", " +
                     std::to_string(rec.votes.size()) + " votes, computed " +
                     std::to_string(static_cast<int>(computed.status)) + " vs recorded " +
                     std::to_string(static_cast<int>(e.outcome)) + ")");
        rec.closed_at = ev_.at;

        switch (e.outcome) {
            case PollStatus::EarlyReject:
                settle_poll(rec, TerminalOutcome::EarlyReject);
                refund_submission(rec, /*keep_fee_min=*/true);
                rec.stage = SubmissionStage::EarlyRejected;
                break;
            case PollStatus::Failed:
                refund_submission(rec, /*keep_fee_min=*/false);
                rec.stage = SubmissionStage::Failed;
                break;
            case PollStatus::EnterReview: {
                open_review(rec, e);
                break;
            }
            case PollStatus::Open:
                fail(Errc::IllegalTransition, "cannot close an open poll without an outcome");
        }
    }

    std::vector<Candidate> volunteer_candidates(const SubmissionRecord& rec,
                                                const std::vector<AccountId>& exclude) const {
        std::vector<Candidate> out;
        for (const PreVote& v : rec.votes) {
            if (v.option != VoteOption::WantReview) continue;
            if (std::find(exclude.begin(), exclude.end(), v.voter) != exclude.end()) continue;
            out.push_back(Candidate{v.voter, std::max(s_.reputation_at(v.voter, ev_.at), 0.0)});
        }
        return out;
    }

    void open_review(SubmissionRecord& rec, const PollClosedEv& e) {
        if (static_cast<int>(e.reviewers.size()) != s_.params.n_reviews)
            fail(Errc::IllegalTransition, "committee size must be n_reviews");
        std::vector<Candidate> candidates = review_candidates(s_, rec.id, ev_.at);
        std::vector<AccountId> expected =
            select_reviewers(candidates, s_.params.n_reviews, s_.params, e.draw_seed);
        if (expected != e.reviewers)
            fail(Errc::IllegalTransition, "recorded committee does not match the seeded draw");

        std::map<AccountId, double> tfactors;
        for (const PreVote& v : rec.votes)
            if (v.option == VoteOption::WantReview) tfactors[v.voter] = time_factor(v.at, s_.params);
        rec.review.open(e.reviewers, tfactors, ev_.at);
        rec.stage = SubmissionStage::InReview;
    }

    template <typename F>
    SubmissionRecord& in_review(SubmissionId id, F&& op) {
        SubmissionRecord& rec = submission(id);
        if (rec.stage != SubmissionStage::InReview)
            fail(Errc::IllegalTransition, "submission is not under review");
        op(rec);
        return rec;
    }

    void handle(const ReportFiledEv& e) {
        in_review(e.submission, [&](SubmissionRecord& rec) {
            rec.review.file_report(e.reviewer, e.requests, ev_.at, s_.params);
        });
    }

    void handle(const AuthorReplyEv& e) {
        in_review(e.submission, [&](SubmissionRecord& rec) {
            rec.review.author_reply(e.text, e.new_version, ev_.at);
        });
    }

    void handle(const ReviewerPassEv& e) {
        in_review(e.submission,
                  [&](SubmissionRecord& rec) { rec.review.pass(e.reviewer, ev_.at, s_.params); });
    }

    void handle(const AuthorProceedEv& e) {
        in_review(e.submission, [&](SubmissionRecord& rec) { rec.review.author_proceed(ev_.at); });
    }

    void handle(const ReviewerReplacedEv& e) {
        SubmissionRecord& rec = submission(e.submission);
        if (rec.stage != SubmissionStage::InReview)
            fail(Errc::IllegalTransition, "submission is not under review");
        std::vector<AccountId> exclude = rec.review.active;
        for (const auto& [old_rev, _] : rec.review.replaced) exclude.push_back(old_rev);
        std::vector<Candidate> candidates = volunteer_candidates(rec, exclude);

        if (!e.substitute) {
            if (!candidates.empty())
                fail(Errc::IllegalTransition, "volunteers remain; the review must continue");
            // Nobody left to draw: the process stops and the authors are refunded.
            refund_submission(rec, /*keep_fee_min=*/false);
            rec.stage = SubmissionStage::Failed;
            return;
        }
        std::vector<AccountId> drawn = select_reviewers(candidates, 1, s_.params, e.draw_seed);
        if (drawn.front() != *e.substitute)
            fail(Errc::IllegalTransition, "recorded substitute does not match the seeded draw");
        double tf = 1.0;
        for (const PreVote& v : rec.votes)
            if (v.voter == *e.substitute) tf = time_factor(v.at, s_.params);
        rec.review.replace(e.retired, *e.substitute, tf, ev_.at, s_.params);
    }

    void handle(const FinalReportEv& e) {
        SubmissionRecord& rec = submission(e.submission);
        if (rec.stage != SubmissionStage::InReview)
            fail(Errc::IllegalTransition, "submission is not under review");
        validate_beliefs(rec.manifest, e.beliefs);

        FinalReportData data;
        data.beliefs = e.beliefs;
        data.confidence = e.confidence;
        data.fraction_read = e.fraction_read;
        data.fraction_understood = e.fraction_understood;
        data.conclusion = e.conclusion;
        data.quality = total_quality(rec.manifest, e.beliefs, s_.options.scoring);
        data.filed_at = ev_.at;
        rec.review.file_final(e.reviewer, std::move(data), s_.params);
        rec.payout_choices[e.reviewer] = e.payout;

        if (static_cast<int>(rec.review.finals.size()) == s_.params.n_reviews) decide_submission(rec);
    }

    void decide_submission(SubmissionRecord& rec) {
        std::vector<WeightedScore> scores;
        for (const auto& [reviewer, data] : rec.review.finals)
            scores.push_back(WeightedScore{data.quality, data.confidence, data.fraction_read,
                                           data.fraction_understood});
        Decision d = decide(scores, s_.params.accept_threshold, s_.params.n_reviews);
        rec.aggregate_q = d.aggregate_q;
        rec.review.stage = ReviewStage::Decided;
        rec.stage = d.accepted ? SubmissionStage::Accepted : SubmissionStage::Rejected;

        settle_poll(rec, d.accepted ? TerminalOutcome::ReviewAccept : TerminalOutcome::ReviewReject);

        // Remunerate the committee; factors suppress the cash leg.
        FeeSchedule fees = fee_schedule(s_.params);
        for (const auto& [reviewer, data] : rec.review.finals) {
            PaymentMethod choice = rec.payout_choices.at(reviewer);
            double tf = rec.review.time_factors.at(reviewer);
            Payout pay = reviewer_payout(choice, fees, data.delay_factor, tf,
                                         s_.params.voucher_grant_floor);
            if (choice == PaymentMethod::Cash && pay.cash > s_.treasury.available(voucher_value())) {
                // Forced voucher mode: insufficient cash funding, the reviewer
                // is paid in a voucher instead.
                pay = reviewer_payout(PaymentMethod::Voucher, fees, data.delay_factor, tf,
                                      s_.params.voucher_grant_floor);
                pay.vouchers = 1;
            }
            Account& acc = account(reviewer);
            if (pay.cash > 0) {
                Milli affordable = std::min(pay.cash, s_.treasury.available(voucher_value()));
                if (affordable > 0) {
                    treasury_out(affordable);
                    acc.cash += affordable;
                }
            }
            for (int i = 0; i < pay.vouchers; ++i) grant_voucher(acc);
            acc.reviews_done.insert(rec.id);
            s_.treasury.nfts.mint(NftKind::Review, reviewer, rec.id, ev_.seq);
        }

        if (rec.stage == SubmissionStage::Rejected) {
            Milli refund = rejection_refund(fees, s_.params.n_reviews);
            if (refund > 0) {
                treasury_out(refund);
                account(rec.authors.front()).cash += refund;
            }
        } else {
            s_.treasury.nfts.mint(NftKind::Paper, rec.authors.front(), rec.id, ev_.seq);
            for (AccountId a : rec.authors) s_.treasury.nfts.mint(NftKind::Author, a, rec.id, ev_.seq);
        }
    }

    void handle(const StarVoteEv& e) {
        if (e.stars < 1 || e.stars > 3) fail(Errc::DomainError, "stars must be 1..3");
        if (e.rater == e.reviewer) fail(Errc::IllegalTransition, "reviewers cannot rate themselves");
        if (s_.reputation_at(e.rater, ev_.at) <= 0.0)
            fail(Errc::IllegalTransition, "rating requires positive reputation");
        Account& reviewer = account(e.reviewer);
        if (!reviewer.reviews_done.count(e.submission))
            fail(Errc::IllegalTransition, "no completed review to rate");
        if (!reviewer.raters_seen.emplace(e.rater, e.submission).second)
            fail(Errc::IllegalTransition, "already rated this review");

        StarTally& tally = reviewer.pending_ratings;
        // Stale tallies lapse without any payout.
        if (tally.count > 0 &&
            ev_.at - tally.first_at > years_to_days(s_.params.rating_expiry_years))
            tally = StarTally{};
        if (tally.count == 0) tally.first_at = ev_.at;
        ++tally.count;
        tally.sum += e.stars;
        tally.votes.emplace_back(e.rater, e.stars);

        if (tally.count >= s_.params.rating_vote_threshold) {
            RatingSettlement st = settle_star_ratings(tally, s_.params);
            reviewer.pending_ratings = StarTally{};
            award(e.reviewer, ev_.at, st.reviewer_delta, DeltaCause::StarRating, e.submission);
            for (const auto& [rater, delta] : st.rater_deltas)
                if (delta != 0.0) award(rater, ev_.at, delta, DeltaCause::RaterFeedback, e.submission);
            s_.rating_settlements.push_back(
                RatingSettlementRecord{ev_.at, e.reviewer, st.average, st.reviewer_delta});
        }
    }

    void handle(const StakeEv& e) {
        if (!(e.amount > 0.0)) fail(Errc::DomainError, "stake amount must be positive");
        Account& acc = account(e.account);
        if (acc.tokens_free >= e.amount) acc.tokens_free -= e.amount;
        // Otherwise tokens are acquired externally; supply is not conserved here.
        acc.stakes.push_back(StakePosition{e.amount, ev_.at + years_to_days(s_.params.t_stake_years)});
    }

    void handle(const UnstakeEv& e) {
        if (!(e.amount > 0.0)) fail(Errc::DomainError, "unstake amount must be positive");
        Account& acc = account(e.account);
        double unlocked = 0.0;
        for (const StakePosition& p : acc.stakes)
            if (p.locked_until <= ev_.at) unlocked += p.amount;
        if (unlocked + 1e-12 < e.amount)
            fail(Errc::StakeLocked, "staking period has not elapsed for that amount");
        double remaining = e.amount;
        for (StakePosition& p : acc.stakes) {
            if (p.locked_until > ev_.at || remaining <= 0.0) continue;
            double take = std::min(p.amount, remaining);
            p.amount -= take;
            remaining -= take;
        }
        std::erase_if(acc.stakes, [](const StakePosition& p) { return p.amount <= 1e-15; });
        acc.tokens_free += e.amount;
    }

    void handle(const PetitionOpenEv& e) {
        if (s_.petitions.count(e.petition)) fail(Errc::IllegalTransition, "petition id already used");
        if (e.closes_at <= ev_.at) fail(Errc::IllegalTransition, "petition must close in the future");
        // Reject out-of-bounds proposals up front.
        ProtocolParams probe = s_.params;
        set_param(probe, e.param, e.value);
        account(e.proposer);
        Petition p;
        p.id = e.petition;
        p.proposer = e.proposer;
        p.target_param = e.param;
        p.proposed_value = e.value;
        p.closes_at = e.closes_at;
        s_.petitions.emplace(e.petition, std::move(p));
    }

    void handle(const PetitionVoteEv& e) {
        auto it = s_.petitions.find(e.petition);
        if (it == s_.petitions.end()) fail(Errc::IllegalTransition, "unknown petition");
        Petition& p = it->second;
        if (p.status != PetitionStatus::Open || ev_.at >= p.closes_at)
            fail(Errc::IllegalTransition, "petition voting closed");
        if (p.votes.count(e.account)) fail(Errc::IllegalTransition, "already voted on this petition");
        const Account& acc = account(e.account);
        double r = std::max(s_.reputation_at(e.account, ev_.at), 0.0);
        double power = voting_power(r, acc.staked_total(), s_.params.alpha_stake);
        p.votes[e.account] = {e.support, power};
    }

    void handle(const RecommendationMadeEv& e) {
        if (e.recommender == e.subject) fail(Errc::IllegalTransition, "cannot recommend oneself");
        if (!(e.predicted_level > 0.0)) fail(Errc::DomainError, "prediction must be positive");
        if (s_.reputation_at(e.recommender, ev_.at) < s_.params.rec_min_rep)
            fail(Errc::IllegalTransition, "recommender reputation below the bar");
        for (const Recommendation& r : s_.pending_recs)
            if (r.recommender == e.recommender && r.subject == e.subject)
                fail(Errc::IllegalTransition, "an open recommendation for this member exists");
        account(e.subject);
        s_.pending_recs.push_back(Recommendation{e.recommender, e.subject, e.predicted_level, ev_.at,
                                                 ev_.at + years_to_days(e.horizon_years)});
    }

    void handle(const FundingReceivedEv& e) {
        if (e.amount <= 0) fail(Errc::DomainError, "funding must be positive");
        treasury_in(e.amount);
        if (e.earmarked) s_.treasury.earmarked += e.amount;
    }

    void handle(const ParamChangeEv& e) {
        ProtocolParams probe = s_.params;
        set_param(probe, e.param, e.value);  // validate now, enact at the boundary
        s_.pending_params.push_back(PendingParamChange{e.param, e.value, std::nullopt});
    }
};

}  // namespace

void apply_in_place(EngineState& state, const Event& event) {
    Applier(state, event).run();
}

EngineState apply(EngineState state, const Event& event) {
    apply_in_place(state, event);
    return state;
}

std::vector<Candidate> review_candidates(const EngineState& state, SubmissionId submission,
                                         Timestamp at) {
    auto it = state.submissions.find(submission);
    if (it == state.submissions.end())
        fail(Errc::IllegalTransition, "unknown submission " + std::to_string(submission));
    std::vector<Candidate> out;
    for (const PreVote& v : it->second.votes)
        if (v.option == VoteOption::WantReview)
            out.push_back(Candidate{v.voter, std::max(state.reputation_at(v.voter, at), 0.0)});
    return out;
}

EngineState replay(std::span<const Event> log, const ProtocolParams& params,
                   const EngineOptions& options) {
    EngineState state = initial_state(params, options);
    for (const Event& e : log) {
        try {
            apply_in_place(state, e);
        } catch (const Error& err) {
            fail(err.code(), "event seq " + std::to_string(e.seq) + ": " + err.what());
        }
    }
    return state;
}

}  // namespace prsim
