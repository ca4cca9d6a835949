#pragma once

#include <array>
#include <cstdint>

namespace kgc {

// Counter-based generator (Philox4x32 with 10 rounds). Output depends only on
// (key, counter), so a stream can be indexed randomly and split across threads
// without changing results.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Purpose tags keep the streams used for different jobs disjoint.
enum class StreamTag : std::uint64_t {
    TrainData = 1,
    TestData = 2,
    ModelInit = 3,
    EpochOrder = 4,
    TestSubsample = 5,
    External = 6,
};

// Derives a stream key from the master seed, a purpose tag and up to two
// indices (run, epoch / subsample / class). The fold is
//   h = mix64(master ^ mix64(tag)); h = mix64(h ^ mix64(a + 1)); h = mix64(h ^ mix64(b + 1))
std::uint64_t derive_seed(std::uint64_t master, StreamTag tag, std::uint64_t a = 0,
                          std::uint64_t b = 0) noexcept;

class Stream {
public:
    explicit Stream(std::uint64_t key) noexcept;

    std::uint64_t key() const noexcept { return key_; }

    // i-th 64-bit word of the stream; does not move the cursor.
    std::uint64_t u64_at(std::uint64_t index) const noexcept;

    std::uint64_t next_u64() noexcept { return u64_at(position_++); }

    // Uniform on [0, 1) with 53 bits.
    double uniform() noexcept;
    // Uniform on the open interval (0, 1).
    double uniform_open() noexcept;
    static double to_open_unit(std::uint64_t bits) noexcept;

    // Standard normal via Box-Muller; pairs are cached.
    double normal() noexcept;

    // Uniform integer in [0, bound) by rejection; bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    std::uint64_t key_;
    PhiloxKey philox_key_;
    std::uint64_t position_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Master seed of an experiment; every per-draw stream is derived from it.
struct SeedSpec {
    std::uint64_t master_seed = 0;

    Stream stream(StreamTag tag, std::uint64_t a = 0, std::uint64_t b = 0) const noexcept {
        return Stream(derive_seed(master_seed, tag, a, b));
    }
    Stream epoch_stream(std::uint64_t run_index, std::uint64_t epoch) const noexcept {
        return stream(StreamTag::EpochOrder, run_index, epoch);
    }
};

}  // namespace kgc
