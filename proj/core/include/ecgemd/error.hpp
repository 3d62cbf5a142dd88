#pragma once

#include <stdexcept>
#include <string>

namespace ecgemd {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
    kSuccess = 0,
    kUsage = 1,
    kData = 2,
    kInvariant = 3,
};

/// Base of all library errors. Each subclass maps to one CLI exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ExitCode exit_code() const noexcept { return ExitCode::kInvariant; }
};

/// Bad configuration, bad arguments, or a missing upstream artifact.
class ConfigError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::kUsage; }
};

/// Input data that cannot be read or does not satisfy an operation's precondition.
class DataError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::kData; }
};

/// A broken internal invariant. Seeing one of these is a bug.
class InvariantError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::kInvariant; }
};

/// Throws InvariantError carrying `what` when `condition` is false.
void ensure(bool condition, const std::string& what);

}  // namespace ecgemd
