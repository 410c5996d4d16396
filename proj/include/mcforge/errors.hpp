#pragma once

#include <stdexcept>
#include <string>

namespace mcforge {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind { solver_failure = 1, usage = 2, io = 3, internal = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct UsageError : Error {
    explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

// Mathematically undefined operation (inverse of zero, division by the zero polynomial).
struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

struct InternalError : Error {
    explicit InternalError(const std::string& what) : Error(ErrorKind::internal, what) {}
};

// The received word is outside the correction radius of the code.
struct DecodeFailure : Error {
    explicit DecodeFailure(const std::string& what) : Error(ErrorKind::solver_failure, what) {}
};

inline const char* kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::solver_failure: return "solver-failure";
    case ErrorKind::usage: return "usage";
    case ErrorKind::io: return "io";
    case ErrorKind::internal: return "internal";
    }
    return "internal";
}

} // namespace mcforge
