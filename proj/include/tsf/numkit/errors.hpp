#pragma once

#include <stdexcept>
#include <string>

namespace tsf {

enum class ErrorKind {
    shape,
    argument,
    degenerate_series,
    numeric,
    parse,
    io,
    version_mismatch,
    corrupt_payload,
};

const char* to_string(ErrorKind kind);

/// Base of every error raised by the toolkit. The kind survives rethrows with
/// added context (see with_context).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& m) : Error(ErrorKind::shape, m) {}
};

class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& m) : Error(ErrorKind::argument, m) {}

protected:
    ArgumentError(ErrorKind kind, const std::string& m) : Error(kind, m) {}
};

class DegenerateSeriesError : public ArgumentError {
public:
    explicit DegenerateSeriesError(const std::string& m)
        : ArgumentError(ErrorKind::degenerate_series, m) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& m) : Error(ErrorKind::numeric, m) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& m) : Error(ErrorKind::parse, m) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& m) : Error(ErrorKind::io, m) {}
};

class VersionMismatchError : public Error {
public:
    explicit VersionMismatchError(const std::string& m) : Error(ErrorKind::version_mismatch, m) {}
};

class CorruptPayloadError : public Error {
public:
    explicit CorruptPayloadError(const std::string& m) : Error(ErrorKind::corrupt_payload, m) {}
};

/// Throws an error of the same concrete kind as `e` with `prefix` prepended.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& prefix);

} // namespace tsf
