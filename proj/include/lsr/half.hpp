#pragma once

#include <cstdint>

namespace lsr {

// IEEE binary16 conversions (round to nearest even).
std::uint16_t to_half_bits(float v) noexcept;
float from_half_bits(std::uint16_t bits) noexcept;

/// Rounds a value to the nearest half-precision number.
inline float round_to_half(float v) noexcept { return from_half_bits(to_half_bits(v)); }

}  // namespace lsr
