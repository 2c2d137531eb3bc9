#include "prsim/events.hpp"

#include <fstream>

#include <json.hpp>

namespace prsim {

using nlohmann::json;

namespace {

const char* kKindNames[] = {
    "submit",        "pre_vote",       "poll_closed",       "report_filed",
    "author_reply",  "reviewer_pass",  "author_proceed",    "final_report",
    "reviewer_replaced", "star_vote",  "stake",             "unstake",
    "petition_open", "petition_vote",  "recommendation",    "funding",
    "param_change",
};

// Strict field access: every key must be consumed exactly once.
class Fields {
  public:
    Fields(const json& j, std::size_t lineno) : j_(j), lineno_(lineno) {
        if (!j.is_object()) bad("event record must be a JSON object");
    }

    const json& get(const char* key) {
        auto it = j_.find(key);
        if (it == j_.end()) bad(std::string("missing field '") + key + "'");
        taken_.push_back(key);
        return *it;
    }

    bool has(const char* key) {
        if (j_.contains(key)) {
            return true;
        }
        return false;
    }

    void done() {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool known = false;
            for (const std::string& k : taken_)
                if (k == it.key()) known = true;
            if (!known) bad("unknown field '" + it.key() + "'");
        }
    }

    [[noreturn]] void bad(const std::string& what) const {
        fail(Errc::ParseError, "line " + std::to_string(lineno_) + ": " + what);
    }

  private:
    const json& j_;
    std::size_t lineno_;
    std::vector<std::string> taken_;
};

json manifest_to_json(const StatementManifest& m) {
    json arr = json::array();
    for (const StatementItem& it : m.items) {
        json o;
        o["weight"] = it.weight;
        if (it.kind == StatementKind::Hypothesis) {
            o["kind"] = "hypothesis";
        } else {
            o["kind"] = "measurement";
            o["mu"] = it.prior_mu;
            o["sigma"] = it.prior_sigma;
            o["mu_a"] = it.claimed_mu;
            o["sigma_a"] = it.claimed_sigma;
        }
        arr.push_back(std::move(o));
    }
    return arr;
}

StatementManifest manifest_from_json(const json& arr, Fields& f) {
    if (!arr.is_array()) f.bad("manifest must be an array");
    StatementManifest m;
    for (const json& o : arr) {
        StatementItem it;
        std::string kind = o.at("kind").get<std::string>();
        it.weight = o.at("weight").get<double>();
        if (kind == "hypothesis") {
            it.kind = StatementKind::Hypothesis;
            if (o.size() != 2) f.bad("hypothesis statement carries extra fields");
        } else if (kind == "measurement") {
            it.kind = StatementKind::Measurement;
            it.prior_mu = o.at("mu").get<double>();
            it.prior_sigma = o.at("sigma").get<double>();
            it.claimed_mu = o.at("mu_a").get<double>();
            it.claimed_sigma = o.at("sigma_a").get<double>();
            if (o.size() != 6) f.bad("measurement statement carries extra fields");
        } else {
            f.bad("unknown statement kind '" + kind + "'");
        }
        m.items.push_back(it);
    }
    return m;
}

json beliefs_to_json(const ReviewerBeliefs& b) {
    json arr = json::array();
    for (const BeliefItem& it : b.items) {
        json o;
        if (it.kind == StatementKind::Hypothesis) {
            o["p"] = it.p;
            o["p_a"] = it.p_after;
        } else {
            o["p_acc"] = it.p_accept;
        }
        arr.push_back(std::move(o));
    }
    json out;
    out["v"] = b.importance;
    out["items"] = std::move(arr);
    return out;
}

ReviewerBeliefs beliefs_from_json(const json& o, Fields& f) {
    ReviewerBeliefs b;
    b.importance = o.at("v").get<int>();
    for (const json& it : o.at("items")) {
        BeliefItem bi;
        if (it.contains("p_acc")) {
            bi.kind = StatementKind::Measurement;
            bi.p_accept = it.at("p_acc").get<double>();
            if (it.size() != 1) f.bad("measurement belief carries extra fields");
        } else {
            bi.kind = StatementKind::Hypothesis;
            bi.p = it.at("p").get<double>();
            bi.p_after = it.at("p_a").get<double>();
            if (it.size() != 2) f.bad("hypothesis belief carries extra fields");
        }
        b.items.push_back(bi);
    }
    if (o.size() != 2) f.bad("beliefs object carries extra fields");
    return b;
}

const char* payment_name(PaymentMethod m) { return m == PaymentMethod::Cash ? "cash" : "voucher"; }

PaymentMethod payment_from(const std::string& s, Fields& f) {
    if (s == "cash") return PaymentMethod::Cash;
    if (s == "voucher") return PaymentMethod::Voucher;
    f.bad("unknown payment method '" + s + "'");
}

VoteOption option_from(const std::string& s, Fields& f) {
    for (VoteOption o : {VoteOption::NoOpinion, VoteOption::RejectImmediately, VoteOption::Interesting,
                         VoteOption::WantReview})
        if (s == vote_option_name(o)) return o;
    f.bad("unknown vote option '" + s + "'");
}

struct PayloadWriter {
    json& j;

    void operator()(const SubmitEv& e) {
        j["submission"] = e.submission;
        j["authors"] = e.authors;
        j["payment"] = payment_name(e.payment);
        j["manifest"] = manifest_to_json(e.manifest);
    }
    void operator()(const PreVoteEv& e) {
        j["submission"] = e.submission;
        j["voter"] = e.voter;
        j["option"] = vote_option_name(e.option);
    }
    void operator()(const PollClosedEv& e) {
        j["submission"] = e.submission;
        switch (e.outcome) {
            case PollStatus::EarlyReject: j["outcome"] = "early_reject"; break;
            case PollStatus::Failed: j["outcome"] = "failed"; break;
            case PollStatus::EnterReview: j["outcome"] = "enter_review"; break;
            case PollStatus::Open: fail(Errc::IllegalTransition, "cannot log an open poll as closed");
        }
        if (e.outcome == PollStatus::EnterReview) {
            j["reviewers"] = e.reviewers;
            j["draw_seed"] = e.draw_seed;
        }
    }
    void operator()(const ReportFiledEv& e) {
        j["submission"] = e.submission;
        j["reviewer"] = e.reviewer;
        json arr = json::array();
        for (const ReviewRequest& r : e.requests) {
            json o;
            o["kind"] = r.kind == RequestKind::Clarification ? "clarification" : "change_request";
            o["text"] = r.text;
            arr.push_back(std::move(o));
        }
        j["requests"] = std::move(arr);
    }
    void operator()(const AuthorReplyEv& e) {
        j["submission"] = e.submission;
        j["text"] = e.text;
        j["new_version"] = e.new_version;
    }
    void operator()(const ReviewerPassEv& e) {
        j["submission"] = e.submission;
        j["reviewer"] = e.reviewer;
    }
    void operator()(const AuthorProceedEv& e) { j["submission"] = e.submission; }
    void operator()(const FinalReportEv& e) {
        j["submission"] = e.submission;
        j["reviewer"] = e.reviewer;
        j["beliefs"] = beliefs_to_json(e.beliefs);
        j["confidence"] = e.confidence;
        j["fraction_read"] = e.fraction_read;
        j["fraction_understood"] = e.fraction_understood;
        j["conclusion"] = e.conclusion;
        j["payout"] = payment_name(e.payout);
    }
    void operator()(const ReviewerReplacedEv& e) {
        j["submission"] = e.submission;
        j["retired"] = e.retired;
        if (e.substitute) j["substitute"] = *e.substitute;
        j["draw_seed"] = e.draw_seed;
    }
    void operator()(const StarVoteEv& e) {
        j["rater"] = e.rater;
        j["reviewer"] = e.reviewer;
        j["submission"] = e.submission;
        j["stars"] = e.stars;
    }
    void operator()(const StakeEv& e) {
        j["account"] = e.account;
        j["amount"] = e.amount;
    }
    void operator()(const UnstakeEv& e) {
        j["account"] = e.account;
        j["amount"] = e.amount;
    }
    void operator()(const PetitionOpenEv& e) {
        j["petition"] = e.petition;
        j["proposer"] = e.proposer;
        j["param"] = e.param;
        j["value"] = e.value;
        j["closes_at"] = e.closes_at;
    }
    void operator()(const PetitionVoteEv& e) {
        j["petition"] = e.petition;
        j["account"] = e.account;
        j["support"] = e.support;
    }
    void operator()(const RecommendationMadeEv& e) {
        j["recommender"] = e.recommender;
        j["subject"] = e.subject;
        j["predicted_level"] = e.predicted_level;
        j["horizon_years"] = e.horizon_years;
    }
    void operator()(const FundingReceivedEv& e) {
        j["amount"] = e.amount;
        j["source"] = e.source;
        j["earmarked"] = e.earmarked;
    }
    void operator()(const ParamChangeEv& e) {
        j["param"] = e.param;
        j["value"] = e.value;
    }
};

}  // namespace

const char* Event::kind_name() const { return kKindNames[payload.index()]; }

std::string event_to_line(const Event& event) {
    json j;
    j["seq"] = event.seq;
    j["at"] = event.at;
    j["kind"] = event.kind_name();
    std::visit(PayloadWriter{j}, event.payload);
    return j.dump();
}

Event event_from_line(const std::string& line, std::size_t lineno) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        fail(Errc::ParseError, "line " + std::to_string(lineno) + ": " + e.what());
    }
    Fields f(j, lineno);
    Event ev;
    ev.seq = f.get("seq").get<std::uint64_t>();
    ev.at = f.get("at").get<double>();
    std::string kind = f.get("kind").get<std::string>();

    if (kind == "submit") {
        SubmitEv e;
        e.submission = f.get("submission").get<SubmissionId>();
        e.authors = f.get("authors").get<std::vector<AccountId>>();
        e.payment = payment_from(f.get("payment").get<std::string>(), f);
        e.manifest = manifest_from_json(f.get("manifest"), f);
        ev.payload = std::move(e);
    } else if (kind == "pre_vote") {
        PreVoteEv e;
        e.submission = f.get("submission").get<SubmissionId>();
        e.voter = f.get("voter").get<AccountId>();
        e.option = option_from(f.get("option").get<std::string>(), f);
        ev.payload = e;
    } else if (kind == "poll_closed") {
        PollClosedEv e;
        e.submission = f.get("submission").get<SubmissionId>();
        std::string oc = f.get("outcome").get<std::string>();
        if (oc == "early_reject") {
            e.outcome = PollStatus::EarlyReject;
        } else if (oc == "failed") {
            e.outcome = PollStatus::Failed;
        } else if (oc == "enter_review") {
            e.outcome = PollStatus::EnterReview;
            e.reviewers = f.get("reviewers").get<std::vector<AccountId>>();
            e.draw_seed = f.get("draw_seed").get<std::uint64_t>();
        } else {
            f.bad("unknown poll outcome '" + oc + "'");
        }
        ev.payload = std::move(e);
    } else if (kind == "report_filed") {
        ReportFiledEv e;
        e.submission = f.get("submission").get<SubmissionId>();
        e.reviewer = f.get("reviewer").get<AccountId>();
        for (const json& o : f.get("requests")) {
            ReviewRequest r;
            std::string rk = o.at("kind").get<std::string>();
            if (rk == "clarification")
                r.kind = RequestKind::Clarification;
            else if (rk == "change_request")
                r.kind = RequestKind::ChangeRequest;
            else
                f.bad("unknown request kind '" + rk + "'");
            r.text = o.at("text").get<std::string>();
            if (o.size() != 2) f.bad("request carries extra fields");
            e.requests.push_back(std::move(r));
        }
        ev.payload = std::move(e);
    } else if (kind == "author_reply") {
        AuthorReplyEv e;
        e.submission = f.get("submission").get<SubmissionId>();
        e.text = f.get("text").get<std::string>();
        e.new_version = f.get("new_version").get<std::string>();
        ev.payload = std::move(e);
    } else if (kind == "reviewer_pass") {
        ReviewerPassEv e;
        e.submission = f.get("submission").get<SubmissionId>();
        e.reviewer = f.get("reviewer").get<AccountId>();
        ev.payload = e;
    } else if (kind == "author_proceed") {
        AuthorProceedEv e;
        e.submission = f.get("submission").get<SubmissionId>();
        ev.payload = e;
    } else if (kind == "final_report") {
        FinalReportEv e;
        e.submission = f.get("submission").get<SubmissionId>();
        e.reviewer = f.get("reviewer").get<AccountId>();
        e.beliefs = beliefs_from_json(f.get("beliefs"), f);
        e.confidence = f.get("confidence").get<double>();
        e.fraction_read = f.get("fraction_read").get<double>();
        e.fraction_understood = f.get("fraction_understood").get<double>();
        e.conclusion = f.get("conclusion").get<std::string>();
        e.payout = payment_from(f.get("payout").get<std::string>(), f);
        ev.payload = std::move(e);
    } else if (kind == "reviewer_replaced") {
        ReviewerReplacedEv e;
        e.submission = f.get("submission").get<SubmissionId>();
        e.retired = f.get("retired").get<AccountId>();
        if (f.has("substitute")) e.substitute = f.get("substitute").get<AccountId>();
        e.draw_seed = f.get("draw_seed").get<std::uint64_t>();
        ev.payload = e;
    } else if (kind == "star_vote") {
        StarVoteEv e;
        e.rater = f.get("rater").get<AccountId>();
        e.reviewer = f.get("reviewer").get<AccountId>();
        e.submission = f.get("submission").get<SubmissionId>();
        e.stars = f.get("stars").get<int>();
        ev.payload = e;
    } else if (kind == "stake") {
        StakeEv e;
        e.account = f.get("account").get<AccountId>();
        e.amount = f.get("amount").get<double>();
        ev.payload = e;
    } else if (kind == "unstake") {
        UnstakeEv e;
        e.account = f.get("account").get<AccountId>();
        e.amount = f.get("amount").get<double>();
        ev.payload = e;
    } else if (kind == "petition_open") {
        PetitionOpenEv e;
        e.petition = f.get("petition").get<PetitionId>();
        e.proposer = f.get("proposer").get<AccountId>();
        e.param = f.get("param").get<std::string>();
        e.value = f.get("value").get<double>();
        e.closes_at = f.get("closes_at").get<double>();
        ev.payload = std::move(e);
    } else if (kind == "petition_vote") {
        PetitionVoteEv e;
        e.petition = f.get("petition").get<PetitionId>();
        e.account = f.get("account").get<AccountId>();
        e.support = f.get("support").get<bool>();
        ev.payload = e;
    } else if (kind == "recommendation") {
        RecommendationMadeEv e;
        e.recommender = f.get("recommender").get<AccountId>();
        e.subject = f.get("subject").get<AccountId>();
        e.predicted_level = f.get("predicted_level").get<double>();
        e.horizon_years = f.get("horizon_years").get<double>();
        ev.payload = e;
    } else if (kind == "funding") {
        FundingReceivedEv e;
        e.amount = f.get("amount").get<Milli>();
        e.source = f.get("source").get<std::string>();
        e.earmarked = f.get("earmarked").get<bool>();
        ev.payload = std::move(e);
    } else if (kind == "param_change") {
        ParamChangeEv e;
        e.param = f.get("param").get<std::string>();
        e.value = f.get("value").get<double>();
        ev.payload = std::move(e);
    } else {
        f.bad("unknown event kind '" + kind + "'");
    }
    f.done();
    return ev;
}

std::vector<Event> read_event_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::ParseError, "cannot open event log '" + path + "'");
    std::vector<Event> events;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        events.push_back(event_from_line(line, lineno));
    }
    return events;
}

}  // namespace prsim
