#ifndef MPEP_PHILOX_HPP
#define MPEP_PHILOX_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace mpep {

// Philox-4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw,
// "Parallel random numbers: as easy as 1, 2, 3", SC 2011). Stateless per
// block: stream identity lives in the key/counter, which makes per-path
// streams reproducible independently of scheduling.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    /// Block `index` of this stream.
    Block block(std::uint64_t index) const {
        Block ctr{static_cast<std::uint32_t>(index),
                  static_cast<std::uint32_t>(index >> 32), stream_lo_, stream_hi_};
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            ctr = round_once(ctr, k0, k1);
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    static constexpr std::uint32_t kMult0 = 0xD2511F53u;
    static constexpr std::uint32_t kMult1 = 0xCD9E8D57u;

    static Block round_once(const Block& c, std::uint32_t k0, std::uint32_t k1) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * c[2];
        return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k0,
                static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k1,
                static_cast<std::uint32_t>(p0)};
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_lo_, stream_hi_;
};

/// Deterministic stream of standard normal deviates drawn from one Philox
/// stream via the polar (Marsaglia) method. Rejection consumes uniforms in
/// a fixed order, so equal (seed, stream) pairs yield identical sequences.
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint64_t stream)
        : gen_(seed, stream) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        for (;;) {
            const double u = 2.0 * next_uniform() - 1.0;
            const double v = 2.0 * next_uniform() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) {
                const double factor = std::sqrt(-2.0 * std::log(s) / s);
                spare_ = v * factor;
                have_spare_ = true;
                return u * factor;
            }
        }
    }

    /// Uniform on (0,1), 32-bit resolution.
    double next_uniform() {
        if (lane_ == 4) {
            block_ = gen_.block(block_index_++);
            lane_ = 0;
        }
        return (static_cast<double>(block_[lane_++]) + 0.5) * 0x1.0p-32;
    }

private:
    Philox4x32 gen_;
    Philox4x32::Block block_{};
    std::uint64_t block_index_ = 0;
    int lane_ = 4;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace mpep

#endif
