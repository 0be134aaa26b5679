#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tradenet {

// Every fatal condition carries a stable machine-readable token. The CLI
// prints "error: <token>: <detail>" on stderr and exits nonzero.
class Error : public std::runtime_error {
public:
    Error(std::string token, const std::string& detail)
        : std::runtime_error(detail), token_(std::move(token)) {}

    const std::string& token() const noexcept { return token_; }

private:
    std::string token_;
};

[[noreturn]] inline void fail(std::string token, const std::string& detail) {
    throw Error(std::move(token), detail);
}

} // namespace tradenet
