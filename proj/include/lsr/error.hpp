#pragma once

#include <stdexcept>
#include <string>

namespace lsr {

/// Error categories. Values line up with the C API status codes.
enum class ErrorCode : int {
    InvalidArgument = 1,
    Io = 2,
    Format = 3,
    Unsupported = 4,
    Internal = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace lsr
