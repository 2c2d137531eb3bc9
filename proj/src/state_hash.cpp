#include <json.hpp>

#include "prsim/engine.hpp"

// State fingerprinting and the per-account ledger export. Every field that
// participates in operator== is folded into the hash, maps in key order.

namespace prsim {

namespace {

void hash_params(const ProtocolParams& p, Fnv64& h) {
    h.put_double(p.t_vote);
    h.put_double(p.t_max);
    h.put_i64(p.n_votes);
    h.put_i64(p.n_reviews);
    h.put_double(p.alpha_select);
    h.put_double(p.selection_rep_floor);
    h.put_double(p.review_due_days);
    h.put_double(p.replace_window_days);
    h.put_double(p.delay_factor_floor);
    h.put_i64(p.min_conclusion_len);
    h.put_double(p.w_min);
    h.put_double(p.accept_threshold);
    h.put_double(p.k_decay_per_year);
    h.put_double(p.r_min);
    h.put_i64(p.rating_vote_threshold);
    h.put_double(p.rating_clamp);
    h.put_double(p.rating_expiry_years);
    h.put_double(p.rec_reward);
    h.put_double(p.rec_horizon_years);
    h.put_double(p.rec_min_rep);
    h.put_double(p.alpha_stake);
    h.put_double(p.t_stake_years);
    h.put_double(p.petition_quorum);
    h.put_double(p.petition_majority);
    h.put_double(p.interest_per_year);
    h.put_double(p.epoch_days);
    h.put_i64(p.x_fee);
    h.put_i64(p.d);
    h.put_i64(p.d_r);
    h.put_i64(p.delta);
    h.put_i64(p.fee_min);
    h.put_double(p.voucher_grant_floor);
    h.put_double(p.margin_b);
    h.put_double(p.margin_d);
}

void hash_manifest(const StatementManifest& m, Fnv64& h) {
    h.put_u64(m.items.size());
    for (const StatementItem& it : m.items) {
        h.put_u32(static_cast<std::uint32_t>(it.kind));
        h.put_double(it.weight);
        h.put_double(it.prior_mu);
        h.put_double(it.prior_sigma);
        h.put_double(it.claimed_mu);
        h.put_double(it.claimed_sigma);
    }
}

void hash_beliefs(const ReviewerBeliefs& b, Fnv64& h) {
    h.put_i64(b.importance);
    h.put_u64(b.items.size());
    for (const BeliefItem& it : b.items) {
        h.put_u32(static_cast<std::uint32_t>(it.kind));
        h.put_double(it.p);
        h.put_double(it.p_after);
        h.put_double(it.p_accept);
    }
}

void hash_review(const ReviewPhase& rp, Fnv64& h) {
    h.put_u32(static_cast<std::uint32_t>(rp.stage));
    h.put_u64(rp.active.size());
    for (AccountId a : rp.active) h.put_u32(a);
    h.put_u64(rp.replaced.size());
    for (auto [old_rev, new_rev] : rp.replaced) {
        h.put_u32(old_rev);
        h.put_u32(new_rev);
    }
    for (const auto& [a, f] : rp.time_factors) {
        h.put_u32(a);
        h.put_double(f);
    }
    for (const auto& [a, f] : rp.delay_factors) {
        h.put_u32(a);
        h.put_double(f);
    }
    h.put_u64(rp.rounds.size());
    for (const ReviewRound& r : rp.rounds) {
        h.put_i64(r.round_no);
        h.put_double(r.opened_at);
        h.put_u64(r.entries.size());
        for (const auto& [a, entry] : r.entries) {
            h.put_u32(a);
            h.put_u64(entry.requests.size());
            h.put_u32(entry.passed ? 1 : 0);
            h.put_double(entry.filed_at);
        }
        h.put_str(r.author_reply.value_or(""));
        h.put_str(r.new_version.value_or(""));
    }
    h.put_u64(rp.finals.size());
    for (const auto& [a, fr] : rp.finals) {
        h.put_u32(a);
        hash_beliefs(fr.beliefs, h);
        h.put_double(fr.confidence);
        h.put_double(fr.fraction_read);
        h.put_double(fr.fraction_understood);
        h.put_str(fr.conclusion);
        h.put_double(fr.quality);
        h.put_double(fr.delay_factor);
        h.put_double(fr.filed_at);
    }
    h.put_double(rp.finals_opened_at);
}

}  // namespace

std::uint64_t state_hash(const EngineState& s) {
    Fnv64 h;
    hash_params(s.params, h);
    h.put_u64(s.last_seq);
    h.put_double(s.now);
    h.put_double(s.epochs_done);

    h.put_u64(s.submissions.size());
    for (const auto& [id, rec] : s.submissions) {
        h.put_u32(id);
        h.put_u32(static_cast<std::uint32_t>(rec.stage));
        h.put_u64(rec.authors.size());
        for (AccountId a : rec.authors) h.put_u32(a);
        h.put_u32(static_cast<std::uint32_t>(rec.payment));
        hash_manifest(rec.manifest, h);
        h.put_double(rec.submitted_at);
        h.put_u64(rec.votes.size());
        for (const PreVote& v : rec.votes) {
            h.put_u32(v.voter);
            h.put_u32(static_cast<std::uint32_t>(v.option));
            h.put_double(v.at);
        }
        h.put_i64(rec.cash_charged);
        h.put_i64(rec.vouchers_burned);
        h.put_i64(rec.vouchers_burned_backed);
        h.put_double(rec.closed_at);
        hash_review(rec.review, h);
        for (const auto& [a, m] : rec.payout_choices) {
            h.put_u32(a);
            h.put_u32(static_cast<std::uint32_t>(m));
        }
        h.put_double(rec.aggregate_q);
    }

    h.put_u64(s.accounts.size());
    for (const auto& [id, acc] : s.accounts) {
        h.put_u32(id);
        h.put_double(acc.r);
        h.put_double(acc.r_updated);
        h.put_i64(acc.cash);
        h.put_i64(acc.vouchers_backed);
        h.put_i64(acc.vouchers_unbacked);
        h.put_double(acc.tokens_free);
        h.put_u64(acc.stakes.size());
        for (const StakePosition& p : acc.stakes) {
            h.put_double(p.amount);
            h.put_double(p.locked_until);
        }
        h.put_i64(acc.pending_ratings.count);
        h.put_i64(acc.pending_ratings.sum);
        h.put_double(acc.pending_ratings.first_at);
        for (auto [rater, stars] : acc.pending_ratings.votes) {
            h.put_u32(rater);
            h.put_i64(stars);
        }
        h.put_u64(acc.raters_seen.size());
        for (auto [rater, sub] : acc.raters_seen) {
            h.put_u32(rater);
            h.put_u32(sub);
        }
        h.put_u64(acc.reviews_done.size());
        for (SubmissionId sub : acc.reviews_done) h.put_u32(sub);
        h.put_u64(acc.history.size());
        for (const DeltaRecord& d : acc.history) {
            h.put_double(d.at);
            h.put_double(d.delta);
            h.put_u32(static_cast<std::uint32_t>(d.cause));
            h.put_u32(d.submission);
            h.put_u32(static_cast<std::uint32_t>(d.option));
        }
    }

    h.put_i64(s.rates.n_early_rejected);
    h.put_i64(s.rates.n_accepted);
    h.put_i64(s.rates.n_review_rejected);

    h.put_i64(s.treasury.initial);
    h.put_i64(s.treasury.balance);
    h.put_i64(s.treasury.intake_total);
    h.put_i64(s.treasury.outflow_total);
    h.put_i64(s.treasury.earmarked);
    h.put_i64(s.treasury.backed_vouchers);
    h.put_i64(s.treasury.unbacked_vouchers);
    h.put_u64(s.treasury.nfts.records().size());
    for (const NftRecord& n : s.treasury.nfts.records()) {
        h.put_u32(static_cast<std::uint32_t>(n.kind));
        h.put_u32(n.owner);
        h.put_u32(n.submission);
        h.put_u64(n.provenance_seq);
        h.put_u32(n.transferable ? 1 : 0);
    }

    h.put_u64(s.petitions.size());
    for (const auto& [id, p] : s.petitions) {
        h.put_u32(id);
        h.put_u32(p.proposer);
        h.put_str(p.target_param);
        h.put_double(p.proposed_value);
        h.put_double(p.closes_at);
        h.put_u32(static_cast<std::uint32_t>(p.status));
        h.put_u64(p.votes.size());
        for (const auto& [a, v] : p.votes) {
            h.put_u32(a);
            h.put_u32(v.first ? 1 : 0);
            h.put_double(v.second);
        }
    }

    h.put_u64(s.pending_params.size());
    for (const PendingParamChange& c : s.pending_params) {
        h.put_str(c.param);
        h.put_double(c.value);
        h.put_u32(c.petition.value_or(0));
    }
    h.put_u64(s.pending_recs.size());
    for (const Recommendation& r : s.pending_recs) {
        h.put_u32(r.recommender);
        h.put_u32(r.subject);
        h.put_double(r.predicted_level);
        h.put_double(r.made_at);
        h.put_double(r.horizon_at);
    }
    h.put_u64(s.rating_settlements.size());
    for (const RatingSettlementRecord& r : s.rating_settlements) {
        h.put_double(r.at);
        h.put_u32(r.reviewer);
        h.put_double(r.average);
        h.put_double(r.reviewer_delta);
    }
    return h.value();
}

std::string ledger_to_json(const EngineState& s) {
    nlohmann::json out;
    for (const auto& [id, acc] : s.accounts) {
        nlohmann::json a;
        a["reputation"] = acc.r;
        a["last_update"] = acc.r_updated;
        a["cash"] = acc.cash;
        a["vouchers_backed"] = acc.vouchers_backed;
        a["vouchers_unbacked"] = acc.vouchers_unbacked;
        a["tokens_free"] = acc.tokens_free;
        a["staked"] = acc.staked_total();
        nlohmann::json hist = nlohmann::json::array();
        for (const DeltaRecord& d : acc.history) {
            nlohmann::json rec;
            rec["at"] = d.at;
            rec["delta"] = d.delta;
            rec["cause"] = delta_cause_name(d.cause);
            if (d.submission != 0) rec["submission"] = d.submission;
            if (d.cause == DeltaCause::PreVote) rec["option"] = vote_option_name(d.option);
            hist.push_back(std::move(rec));
        }
        a["history"] = std::move(hist);
        out[std::to_string(id)] = std::move(a);
    }
    return out.dump(2);
}

}  // namespace prsim
