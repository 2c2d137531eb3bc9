#include "prsim/common.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

namespace prsim {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::OutOfOrderEvent: return "OutOfOrderEvent";
        case Errc::IllegalTransition: return "IllegalTransition";
        case Errc::UnknownAccount: return "UnknownAccount";
        case Errc::UnknownVoter: return "UnknownVoter";
        case Errc::UnknownReviewer: return "UnknownReviewer";
        case Errc::NotEnoughVolunteers: return "NotEnoughVolunteers";
        case Errc::MissingReports: return "MissingReports";
        case Errc::ManifestMismatch: return "ManifestMismatch";
        case Errc::DomainError: return "DomainError";
        case Errc::BelowThreshold: return "BelowThreshold";
        case Errc::HorizonNotReached: return "HorizonNotReached";
        case Errc::NotMaxedOut: return "NotMaxedOut";
        case Errc::WindowOpen: return "WindowOpen";
        case Errc::InsufficientFunds: return "InsufficientFunds";
        case Errc::InsufficientVouchers: return "InsufficientVouchers";
        case Errc::TreasuryInsufficient: return "TreasuryInsufficient";
        case Errc::DuplicateMint: return "DuplicateMint";
        case Errc::NotTransferable: return "NotTransferable";
        case Errc::DivisionByZero: return "DivisionByZero";
        case Errc::StakeLocked: return "StakeLocked";
        case Errc::ConfigInvalid: return "ConfigInvalid";
        case Errc::ParseError: return "ParseError";
        case Errc::Unreachable: return "Unreachable";
        case Errc::VerifyMismatch: return "VerifyMismatch";
    }
    return "Error";
}

void Fnv64::put_double(double v) {
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof v);
    std::memcpy(&bits, &v, sizeof bits);
    put_u64(bits);
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace prsim
