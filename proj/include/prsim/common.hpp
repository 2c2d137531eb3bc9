#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace prsim {

// Logical time in days since the epoch of the run. Event logs are ordered on it.
using Timestamp = double;

using AccountId = std::uint32_t;
using SubmissionId = std::uint32_t;
using PetitionId = std::uint32_t;

// Stablecoin amounts are integer milli-units so conservation checks are exact.
using Milli = std::int64_t;
inline constexpr Milli kMilliPerUnit = 1000;

inline constexpr double kDaysPerYear = 365.25;

inline double days_to_years(double days) { return days / kDaysPerYear; }
inline double years_to_days(double years) { return years * kDaysPerYear; }

enum class Errc {
    OutOfOrderEvent,
    IllegalTransition,
    UnknownAccount,
    UnknownVoter,
    UnknownReviewer,
    NotEnoughVolunteers,
    MissingReports,
    ManifestMismatch,
    DomainError,
    BelowThreshold,
    HorizonNotReached,
    NotMaxedOut,
    WindowOpen,
    InsufficientFunds,
    InsufficientVouchers,
    TreasuryInsufficient,
    DuplicateMint,
    NotTransferable,
    DivisionByZero,
    StakeLocked,
    ConfigInvalid,
    ParseError,
    Unreachable,
    VerifyMismatch,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
  public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) { throw Error(code, message); }

// FNV-1a 64-bit running hash. Used for event-log and state fingerprints; doubles
// are hashed by bit pattern so replays must agree bit-for-bit.
class Fnv64 {
  public:
    void put_bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 1099511628211ULL;
        }
    }
    void put_u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h_ ^= (v >> (8 * i)) & 0xffu;
            h_ *= 1099511628211ULL;
        }
    }
    void put_i64(std::int64_t v) { put_u64(static_cast<std::uint64_t>(v)); }
    void put_u32(std::uint32_t v) { put_u64(v); }
    void put_double(double v);
    void put_str(const std::string& s) {
        put_u64(s.size());
        put_bytes(s.data(), s.size());
    }
    std::uint64_t value() const { return h_; }

  private:
    std::uint64_t h_ = 1469598103934665603ULL;
};

std::string hex64(std::uint64_t v);

}  // namespace prsim
