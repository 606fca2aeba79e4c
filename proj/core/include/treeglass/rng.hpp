#pragma once

#include <cstdint>

namespace treeglass {

/// Counter-based random source. Every draw is a pure function of
/// (key, stream, counter), so sampling order and thread count never
/// change the values produced.
class CounterRng {
public:
    constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

    [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }

    /// 64 random bits for (stream, counter).
    [[nodiscard]] std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const noexcept;

    /// Uniform double on the open interval (0, 1).
    [[nodiscard]] double uniform(std::uint64_t stream, std::uint64_t counter) const noexcept;

    /// Derived key for an independent sub-experiment (e.g. one Monte Carlo replica).
    [[nodiscard]] CounterRng child(std::uint64_t index) const noexcept;

private:
    std::uint64_t key_;
};

/// SplitMix64 finalizer; bijective on 64-bit words.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Streams used by the samplers; kept distinct so draws never alias.
namespace rng_stream {
inline constexpr std::uint64_t kMagnitude = 1;
inline constexpr std::uint64_t kSign = 2;
inline constexpr std::uint64_t kOffspring = 3;
inline constexpr std::uint64_t kAuxiliary = 4;
}  // namespace rng_stream

}  // namespace treeglass
