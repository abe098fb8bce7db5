#pragma once

// Little-endian binary buffers shared by the file readers and the index
// serializers. Errors carry the byte offset at which decoding failed.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "lsr/error.hpp"

namespace lsr::binio {

static_assert(std::endian::native == std::endian::little, "only little-endian hosts are supported");

class Writer {
public:
    template <typename T>
    void put(T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
        buf_.insert(buf_.end(), p, p + sizeof(T));
    }

    template <typename T>
    void put_span(std::span<const T> v) {
        static_assert(std::is_trivially_copyable_v<T>);
        const auto* p = reinterpret_cast<const std::uint8_t*>(v.data());
        buf_.insert(buf_.end(), p, p + v.size_bytes());
    }

    void put_bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }

    std::size_t size() const noexcept { return buf_.size(); }
    const std::vector<std::uint8_t>& bytes() const noexcept { return buf_; }

    void save(const std::filesystem::path& path) const;

private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    explicit Reader(std::vector<std::uint8_t> bytes) : buf_(std::move(bytes)) {}
    static Reader load(const std::filesystem::path& path);

    template <typename T>
    T get(const char* what) {
        static_assert(std::is_trivially_copyable_v<T>);
        check(sizeof(T), what);
        T v;
        std::memcpy(&v, buf_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    template <typename T>
    std::vector<T> get_vector(std::uint64_t count, const char* what) {
        static_assert(std::is_trivially_copyable_v<T>);
        if (count > remaining() / sizeof(T)) truncated(what);
        std::vector<T> v(count);
        std::memcpy(v.data(), buf_.data() + pos_, count * sizeof(T));
        pos_ += count * sizeof(T);
        return v;
    }

    std::size_t offset() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return buf_.size() - pos_; }
    bool at_end() const noexcept { return pos_ == buf_.size(); }

    [[noreturn]] void format_error(const std::string& what, std::size_t at) const {
        fail(ErrorCode::Format, what + " (at byte offset " + std::to_string(at) + ")");
    }

private:
    void check(std::size_t n, const char* what) const {
        if (n > remaining()) truncated(what);
    }
    [[noreturn]] void truncated(const char* what) const {
        format_error(std::string("truncated file while reading ") + what, pos_);
    }

    std::vector<std::uint8_t> buf_;
    std::size_t pos_ = 0;
};

}  // namespace lsr::binio
