#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "lsr/error.hpp"

namespace lsr {

/// Fixed-width unsigned integers packed back to back in 64-bit words, low
/// bits first. A value may straddle two words.
class PackedArray {
public:
    PackedArray() = default;
    PackedArray(std::uint64_t size, unsigned width)
        : size_(size), width_(width), words_((size * width + 63) / 64, 0) {
        require(width >= 1 && width <= 32, "packed array: width must be in [1, 32]");
    }

    /// Bits needed to store every value in [0, max_value].
    static unsigned width_for(std::uint64_t max_value) noexcept {
        return max_value == 0 ? 1u : static_cast<unsigned>(std::bit_width(max_value));
    }

    std::uint64_t size() const noexcept { return size_; }
    unsigned width() const noexcept { return width_; }

    std::uint32_t get(std::uint64_t i) const noexcept {
        const std::uint64_t bit = i * width_;
        const std::uint64_t w = bit >> 6;
        const unsigned off = bit & 63;
        std::uint64_t v = words_[w] >> off;
        if (off + width_ > 64) v |= words_[w + 1] << (64 - off);
        return static_cast<std::uint32_t>(v & mask());
    }

    void set(std::uint64_t i, std::uint32_t value) {
        require((std::uint64_t{value} & ~mask()) == 0, "packed array: value does not fit the width");
        const std::uint64_t bit = i * width_;
        const std::uint64_t w = bit >> 6;
        const unsigned off = bit & 63;
        words_[w] = (words_[w] & ~(mask() << off)) | (std::uint64_t{value} << off);
        if (off + width_ > 64) {
            const unsigned spill = off + width_ - 64;
            const std::uint64_t hi_mask = (std::uint64_t{1} << spill) - 1;
            words_[w + 1] = (words_[w + 1] & ~hi_mask) | (std::uint64_t{value} >> (64 - off));
        }
    }

    /// Exact payload size: ceil(size * width / 8).
    std::uint64_t payload_bytes() const noexcept { return (size_ * width_ + 7) / 8; }

    /// The first payload_bytes() bytes of the word array.
    std::span<const std::uint8_t> payload() const noexcept {
        return {reinterpret_cast<const std::uint8_t*>(words_.data()), payload_bytes()};
    }

    static PackedArray from_payload(std::uint64_t size, unsigned width, std::span<const std::uint8_t> bytes);

    friend bool operator==(const PackedArray&, const PackedArray&) = default;

private:
    std::uint64_t mask() const noexcept { return (std::uint64_t{1} << width_) - 1; }

    std::uint64_t size_ = 0;
    unsigned width_ = 1;
    std::vector<std::uint64_t> words_;
};

inline PackedArray PackedArray::from_payload(std::uint64_t size, unsigned width, std::span<const std::uint8_t> bytes) {
    PackedArray a(size, width);
    require(bytes.size() == a.payload_bytes(), "packed array: payload size mismatch");
    std::memcpy(a.words_.data(), bytes.data(), bytes.size());
    return a;
}

}  // namespace lsr
