#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>

namespace prsim {

// Philox4x32-10 counter-based generator. Output is a pure function of
// (key, counter), so independent sub-streams for parallel work are just
// different counter prefixes; no generator state has to be shared or split.
namespace philox {

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> block(std::uint64_t key, std::uint64_t ctr_hi, std::uint64_t ctr_lo) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;

    std::uint32_t x0 = static_cast<std::uint32_t>(ctr_lo);
    std::uint32_t x1 = static_cast<std::uint32_t>(ctr_lo >> 32);
    std::uint32_t x2 = static_cast<std::uint32_t>(ctr_hi);
    std::uint32_t x3 = static_cast<std::uint32_t>(ctr_hi >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);

    for (int round = 0; round < 10; ++round) {
        if (round != 0) {
            k0 += W0;
            k1 += W1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(M0, x0, hi0, lo0);
        mulhilo(M1, x2, hi1, lo1);
        std::uint32_t y0 = hi1 ^ x1 ^ k0;
        std::uint32_t y1 = lo1;
        std::uint32_t y2 = hi0 ^ x3 ^ k1;
        std::uint32_t y3 = lo0;
        x0 = y0;
        x1 = y1;
        x2 = y2;
        x3 = y3;
    }
    return {x0, x1, x2, x3};
}

}  // namespace philox

// Stream ids pack (purpose, a, b) so every per-submission / per-agent draw in a
// run has its own reproducible sub-stream regardless of evaluation order.
enum class Draw : std::uint8_t {
    Arrival = 1,
    PaperClass = 2,
    VoteOption = 3,
    VoteTime = 4,
    Latent = 5,
    Belief = 6,
    Selection = 7,
    ReportTime = 8,
    Detection = 9,
    Payout = 10,
    Auction = 11,
    Misc = 12,
};

inline std::uint64_t stream_id(Draw purpose, std::uint64_t a = 0, std::uint64_t b = 0) {
    assert(a < (1ull << 28) && b < (1ull << 28));
    return (static_cast<std::uint64_t>(purpose) << 56) | (a << 28) | b;
}

// Sequential view over one Philox stream.
class Rng {
  public:
    Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    std::uint32_t next_u32() {
        if (idx_ == 4) {
            buf_ = philox::block(seed_, stream_, ctr_++);
            idx_ = 0;
        }
        return buf_[idx_++];
    }

    std::uint64_t next_u64() {
        std::uint64_t lo = next_u32();
        std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Unbiased integer in [0, n) (Lemire with rejection).
    std::uint64_t below(std::uint64_t n) {
        assert(n > 0);
        while (true) {
            std::uint64_t x = next_u64();
            unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
            std::uint64_t lo = static_cast<std::uint64_t>(m);
            if (lo < n) {
                std::uint64_t t = (0 - n) % n;
                if (lo < t) continue;
            }
            return static_cast<std::uint64_t>(m >> 64);
        }
    }

    double exponential(double mean) { return -mean * std::log1p(-next_double()); }

    double normal(double mu = 0.0, double sigma = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mu + sigma * spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_double() - 1.0;
            v = 2.0 * next_double() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return mu + sigma * u * f;
    }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t ctr_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int idx_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace prsim
