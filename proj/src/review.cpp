#include "prsim/review.hpp"

#include <algorithm>
#include <cmath>

namespace prsim {

double delay_factor(Timestamp due, Timestamp filed, double window_days, double floor_value) {
    if (filed <= due) return 1.0;
    double late = (filed - due) / window_days;
    if (late >= 1.0) return floor_value;
    return 1.0 - (1.0 - floor_value) * late;
}

Decision decide(const std::vector<WeightedScore>& finals, double threshold, int n_reviews) {
    if (static_cast<int>(finals.size()) != n_reviews)
        fail(Errc::MissingReports, "have " + std::to_string(finals.size()) + " final reports, need " +
                                       std::to_string(n_reviews));
    double wsum = 0.0, qsum = 0.0;
    for (const WeightedScore& f : finals) {
        double w = f.confidence * f.fraction_read * f.fraction_understood;
        wsum += w;
        qsum += w * f.quality;
    }
    double q = wsum > 0.0 ? qsum / wsum : 0.0;
    return Decision{q >= threshold, q};
}

bool ReviewPhase::is_active(AccountId reviewer) const {
    return std::find(active.begin(), active.end(), reviewer) != active.end();
}

ReviewRound& ReviewPhase::current_round() { return rounds.back(); }
const ReviewRound& ReviewPhase::current_round() const { return rounds.back(); }

bool ReviewPhase::round_complete() const {
    return current_round().entries.size() == active.size();
}

bool ReviewPhase::all_passed() const {
    if (!round_complete()) return false;
    for (const auto& [_, entry] : current_round().entries)
        if (!entry.passed) return false;
    return true;
}

Timestamp ReviewPhase::round_due(const ProtocolParams& params) const {
    return current_round().opened_at + params.review_due_days;
}

Timestamp ReviewPhase::finals_due(const ProtocolParams& params) const {
    return finals_opened_at + params.review_due_days;
}

void ReviewPhase::open(const std::vector<AccountId>& reviewers,
                       const std::map<AccountId, double>& tfactors, Timestamp at) {
    active = reviewers;
    for (AccountId r : reviewers) {
        auto it = tfactors.find(r);
        time_factors[r] = it == tfactors.end() ? 1.0 : it->second;
        delay_factors[r] = 1.0;
    }
    rounds.push_back(ReviewRound{1, at, {}, std::nullopt, std::nullopt});
    stage = ReviewStage::Iterating;
}

void ReviewPhase::note_filing(AccountId reviewer, Timestamp due, Timestamp at,
                              const ProtocolParams& params) {
    if (at > due + params.replace_window_days)
        fail(Errc::IllegalTransition, "report window closed; reviewer must be replaced");
    double f = delay_factor(due, at, params.replace_window_days, params.delay_factor_floor);
    delay_factors[reviewer] = std::min(delay_factors[reviewer], f);
}

void ReviewPhase::file_report(AccountId reviewer, std::vector<ReviewRequest> requests, Timestamp at,
                              const ProtocolParams& params) {
    if (stage != ReviewStage::Iterating) fail(Errc::IllegalTransition, "not in discussion rounds");
    if (!is_active(reviewer)) fail(Errc::UnknownReviewer, "account " + std::to_string(reviewer));
    ReviewRound& round = current_round();
    if (round.entries.count(reviewer)) fail(Errc::IllegalTransition, "reviewer already filed this round");
    if (requests.empty()) fail(Errc::IllegalTransition, "a report must raise requests or pass");
    note_filing(reviewer, round_due(params), at, params);
    round.entries[reviewer] = RoundEntry{std::move(requests), false, at};
    maybe_enter_finals(at);
}

void ReviewPhase::pass(AccountId reviewer, Timestamp at, const ProtocolParams& params) {
    if (stage != ReviewStage::Iterating) fail(Errc::IllegalTransition, "not in discussion rounds");
    if (!is_active(reviewer)) fail(Errc::UnknownReviewer, "account " + std::to_string(reviewer));
    ReviewRound& round = current_round();
    if (round.entries.count(reviewer)) fail(Errc::IllegalTransition, "reviewer already filed this round");
    note_filing(reviewer, round_due(params), at, params);
    round.entries[reviewer] = RoundEntry{{}, true, at};
    maybe_enter_finals(at);
}

void ReviewPhase::maybe_enter_finals(Timestamp at) {
    if (round_complete() && all_passed()) {
        stage = ReviewStage::FinalReports;
        finals_opened_at = at;
    }
}

void ReviewPhase::author_reply(const std::string& text, const std::string& new_version, Timestamp at) {
    if (stage != ReviewStage::Iterating) fail(Errc::IllegalTransition, "not in discussion rounds");
    if (!round_complete()) fail(Errc::IllegalTransition, "reply before all reviewers responded");
    if (all_passed()) fail(Errc::IllegalTransition, "all reviewers passed; nothing to reply to");
    if (new_version.empty())
        fail(Errc::IllegalTransition, "a reply must come with a resubmitted version");
    ReviewRound& round = current_round();
    round.author_reply = text;
    round.new_version = new_version;
    rounds.push_back(ReviewRound{round.round_no + 1, at, {}, std::nullopt, std::nullopt});
}

void ReviewPhase::author_proceed(Timestamp at) {
    if (stage != ReviewStage::Iterating) fail(Errc::IllegalTransition, "not in discussion rounds");
    if (!round_complete()) fail(Errc::IllegalTransition, "cannot proceed before the round's reports are in");
    stage = ReviewStage::FinalReports;
    finals_opened_at = at;
}

void ReviewPhase::replace(AccountId retired, AccountId substitute, double substitute_time_factor,
                          Timestamp at, const ProtocolParams& params) {
    if (stage == ReviewStage::Decided) fail(Errc::IllegalTransition, "review already decided");
    if (!is_active(retired)) fail(Errc::UnknownReviewer, "account " + std::to_string(retired));
    if (is_active(substitute)) fail(Errc::IllegalTransition, "substitute already reviews this paper");

    Timestamp due = stage == ReviewStage::Iterating ? round_due(params) : finals_due(params);
    bool overdue = at > due + params.replace_window_days;
    bool missing = stage == ReviewStage::Iterating ? !current_round().entries.count(retired)
                                                   : !finals.count(retired);
    if (!(overdue && missing))
        fail(Errc::IllegalTransition, "replacement only after the window lapses without a filing");

    *std::find(active.begin(), active.end(), retired) = substitute;
    replaced[retired] = substitute;
    time_factors[substitute] = substitute_time_factor;
    delay_factors[substitute] = 1.0;
    if (stage == ReviewStage::Iterating) {
        // The substitute answers the current round on a fresh clock.
        current_round().opened_at = at;
    } else {
        finals_opened_at = at;
    }
}

void ReviewPhase::file_final(AccountId reviewer, FinalReportData data, const ProtocolParams& params) {
    if (stage != ReviewStage::FinalReports) fail(Errc::IllegalTransition, "final reports not open");
    if (!is_active(reviewer)) fail(Errc::UnknownReviewer, "account " + std::to_string(reviewer));
    if (finals.count(reviewer)) fail(Errc::IllegalTransition, "final report already filed");
    if (static_cast<int>(data.conclusion.size()) < params.min_conclusion_len)
        fail(Errc::IllegalTransition, "conclusion shorter than the required minimum");
    for (double f : {data.confidence, data.fraction_read, data.fraction_understood})
        if (!(f >= 0.0 && f <= 1.0)) fail(Errc::DomainError, "report fractions must be in [0,1]");
    note_filing(reviewer, finals_due(params), data.filed_at, params);
    data.delay_factor = delay_factors[reviewer];
    finals[reviewer] = std::move(data);
}

}  // namespace prsim
