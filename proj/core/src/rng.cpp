#include "treeglass/rng.hpp"

namespace treeglass {

std::uint64_t CounterRng::bits(std::uint64_t stream, std::uint64_t counter) const noexcept {
    std::uint64_t h = mix64(key_ ^ 0x6a09e667f3bcc909ULL);
    h = mix64(h ^ (stream * 0xd1342543de82ef95ULL));
    return mix64(h ^ counter);
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t counter) const noexcept {
    // 53 random mantissa bits, shifted by half a step so 0 and 1 are never hit.
    const std::uint64_t b = bits(stream, counter) >> 11;
    return (static_cast<double>(b) + 0.5) * 0x1.0p-53;
}

CounterRng CounterRng::child(std::uint64_t index) const noexcept {
    return CounterRng(mix64(mix64(key_ + 0x3c6ef372fe94f82bULL) ^ mix64(index)));
}

}  // namespace treeglass
