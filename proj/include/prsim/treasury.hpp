#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "prsim/common.hpp"
#include "prsim/params.hpp"

namespace prsim {

enum class PaymentMethod { Cash, Voucher };

struct FeeSchedule {
    Milli x = 0;        // base review value
    Milli d = 0;        // author discount
    Milli d_r = 0;      // rejected-paper discount, refunded as d_r - d
    Milli delta = 0;    // cash penalty nudging both sides toward vouchers
    Milli fee_min = 0;  // non-refundable submission floor
};

FeeSchedule fee_schedule(const ProtocolParams& params);

struct Charge {
    Milli cash = 0;
    int vouchers_burned = 0;
};

// What an author owes to put one paper through n reviews.
Charge submission_charge(PaymentMethod payment, const FeeSchedule& fees, int n_reviews);

struct Payout {
    Milli cash = 0;
    int vouchers = 0;
};

// One reviewer's remuneration. Suppression factors scale the cash leg; the
// voucher is indivisible and granted only when the combined factor stays at or
// above the grant floor.
Payout reviewer_payout(PaymentMethod choice, const FeeSchedule& fees, double delay_fac,
                       double time_fac, double voucher_grant_floor);

// Refund for a reviewed-but-rejected paper: n * (d_R - d).
Milli rejection_refund(const FeeSchedule& fees, int n_reviews);

enum class NftKind { Paper, Preprint, Author, Review, Voucher };
const char* nft_kind_name(NftKind k);

struct NftRecord {
    NftKind kind = NftKind::Preprint;
    AccountId owner = 0;
    SubmissionId submission = 0;
    std::uint64_t provenance_seq = 0;  // event that minted it
    bool transferable = false;         // only paper NFTs
    friend bool operator==(const NftRecord&, const NftRecord&) = default;
};

class NftRegistry {
  public:
    // Throws Errc::DuplicateMint when a (kind, submission, owner) certificate exists.
    std::size_t mint(NftKind kind, AccountId owner, SubmissionId submission, std::uint64_t seq);
    // Throws Errc::NotTransferable for certificate NFTs.
    void transfer(std::size_t index, AccountId new_owner);
    const std::vector<NftRecord>& records() const { return records_; }
    std::size_t count(NftKind kind) const;

    friend bool operator==(const NftRegistry&, const NftRegistry&) = default;

  private:
    std::vector<NftRecord> records_;
    std::map<std::tuple<int, SubmissionId, AccountId>, std::size_t> index_;
};

struct EconomicsEstimate {
    std::int64_t reviews = 0;
    Milli total_review_cost = 0;
    std::int64_t accepted = 0;
    Milli breakeven_fee = 0;  // fee per accepted paper that covers all reviews
};

// Back-of-the-envelope annual throughput and funding arithmetic.
EconomicsEstimate estimate_economics(std::int64_t n_submissions, double early_reject_rate,
                                     int reviews_per_paper, Milli cost_per_review,
                                     double final_accept_rate);

std::string format_milli(Milli amount);

}  // namespace prsim
