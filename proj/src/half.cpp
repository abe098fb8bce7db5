#include "lsr/half.hpp"

#include <Eigen/Core>

namespace lsr {

std::uint16_t to_half_bits(float v) noexcept { return Eigen::numext::bit_cast<std::uint16_t>(Eigen::half(v)); }

float from_half_bits(std::uint16_t bits) noexcept {
    return static_cast<float>(Eigen::numext::bit_cast<Eigen::half>(bits));
}

}  // namespace lsr
