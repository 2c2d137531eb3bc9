#include "prsim/treasury.hpp"

#include <cmath>

namespace prsim {

FeeSchedule fee_schedule(const ProtocolParams& params) {
    return FeeSchedule{params.x_fee, params.d, params.d_r, params.delta, params.fee_min};
}

Charge submission_charge(PaymentMethod payment, const FeeSchedule& fees, int n_reviews) {
    if (payment == PaymentMethod::Voucher)
        return Charge{fees.fee_min, n_reviews};
    return Charge{n_reviews * (fees.x - fees.d + fees.delta) + fees.fee_min, 0};
}

Payout reviewer_payout(PaymentMethod choice, const FeeSchedule& fees, double delay_fac,
                       double time_fac, double voucher_grant_floor) {
    if (!(delay_fac > 0.0 && delay_fac <= 1.0) || !(time_fac >= 0.0 && time_fac <= 1.0))
        fail(Errc::DomainError, "suppression factors out of range");
    double combined = delay_fac * time_fac;
    Milli base_cash = choice == PaymentMethod::Cash ? fees.x - fees.delta : fees.d;
    Payout out;
    out.cash = static_cast<Milli>(std::llround(double(base_cash) * combined));
    out.vouchers = choice == PaymentMethod::Voucher && combined >= voucher_grant_floor ? 1 : 0;
    return out;
}

Milli rejection_refund(const FeeSchedule& fees, int n_reviews) {
    return n_reviews * (fees.d_r - fees.d);
}

const char* nft_kind_name(NftKind k) {
    switch (k) {
        case NftKind::Paper: return "paper";
        case NftKind::Preprint: return "preprint";
        case NftKind::Author: return "author";
        case NftKind::Review: return "review";
        case NftKind::Voucher: return "voucher";
    }
    return "?";
}

std::size_t NftRegistry::mint(NftKind kind, AccountId owner, SubmissionId submission,
                              std::uint64_t seq) {
    if (kind != NftKind::Voucher) {  // vouchers are fungible credits, minted per grant
        auto key = std::make_tuple(static_cast<int>(kind), submission, owner);
        if (index_.count(key))
            fail(Errc::DuplicateMint, std::string(nft_kind_name(kind)) + " certificate already minted");
        index_[key] = records_.size();
    }
    records_.push_back(NftRecord{kind, owner, submission, seq, kind == NftKind::Paper});
    return records_.size() - 1;
}

void NftRegistry::transfer(std::size_t index, AccountId new_owner) {
    if (index >= records_.size()) fail(Errc::DomainError, "no such certificate");
    NftRecord& rec = records_[index];
    if (!rec.transferable)
        fail(Errc::NotTransferable, std::string(nft_kind_name(rec.kind)) + " certificates are bound");
    rec.owner = new_owner;
}

std::size_t NftRegistry::count(NftKind kind) const {
    std::size_t n = 0;
    for (const NftRecord& r : records_)
        if (r.kind == kind) ++n;
    return n;
}

EconomicsEstimate estimate_economics(std::int64_t n_submissions, double early_reject_rate,
                                     int reviews_per_paper, Milli cost_per_review,
                                     double final_accept_rate) {
    if (early_reject_rate < 0.0 || early_reject_rate > 1.0 || final_accept_rate < 0.0 ||
        final_accept_rate > 1.0)
        fail(Errc::DomainError, "rates must be in [0,1]");
    EconomicsEstimate est;
    est.reviews = std::llround(double(n_submissions) * (1.0 - early_reject_rate)) *
                  std::int64_t(reviews_per_paper);
    est.total_review_cost = est.reviews * cost_per_review;
    est.accepted = std::llround(double(n_submissions) * final_accept_rate);
    if (final_accept_rate == 0.0) fail(Errc::DivisionByZero, "acceptance rate of zero");
    est.breakeven_fee = static_cast<Milli>(
        std::llround(double(reviews_per_paper) * double(cost_per_review) *
                     (1.0 - early_reject_rate) / final_accept_rate));
    return est;
}

std::string format_milli(Milli amount) {
    Milli whole = amount / kMilliPerUnit;
    Milli frac = std::llabs(amount % kMilliPerUnit);
    std::string s = std::to_string(whole);
    if (frac != 0) {
        std::string f = std::to_string(frac);
        s += "." + std::string(3 - f.size(), '0') + f;
        while (s.back() == '0') s.pop_back();
    }
    return s;
}

}  // namespace prsim
