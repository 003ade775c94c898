#pragma once

#include <stdexcept>
#include <string>

namespace eqca {

enum class ErrorCode {
    invalid_argument,
    alphabet_mismatch,
    budget_exceeded,
    insufficient_window,
    parse_error,
    witness_invalid,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace eqca
