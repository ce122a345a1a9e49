#pragma once

#include <stdexcept>
#include <string>

namespace mems {

enum class ErrorKind { Parse, Semantic, Io };

/// Base class for all library failures. The kind partitions errors the same
/// way the C API status codes and the CLI exit codes do.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& m) : Error(ErrorKind::Parse, m) {}
};

class SemanticError : public Error {
public:
    explicit SemanticError(const std::string& m) : Error(ErrorKind::Semantic, m) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& m) : Error(ErrorKind::Io, m) {}
};

}  // namespace mems
