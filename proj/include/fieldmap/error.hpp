#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fieldmap {

// Broad failure classes. Each maps onto one process exit code of the CLI
// and one HTTP status family of the query service.
enum class ErrorKind {
    input,             // malformed or inconsistent input data / parameters
    query,             // unknown or undefined term
    resource,          // enumeration budget exceeded
    degenerate_window  // window outside the corpus or without any counts
};

int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message) : Error(ErrorKind::input, message) {}
};

/// Invalid parameter value (alpha, threshold, k, filter bounds, ...).
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& message) : Error(ErrorKind::input, message) {}
};

class RangeError : public Error {
public:
    explicit RangeError(const std::string& message)
        : Error(ErrorKind::degenerate_window, message) {}
};

class DegenerateWindowError : public Error {
public:
    explicit DegenerateWindowError(const std::string& message)
        : Error(ErrorKind::degenerate_window, message) {}
};

/// Term has zero occurrences in the requested window.
class UndefinedTermError : public Error {
public:
    UndefinedTermError(std::size_t term, const std::string& label, const std::string& context);
    std::size_t term() const noexcept { return term_; }

private:
    std::size_t term_;
};

/// Label not present in the vocabulary.
class UnknownTermError : public Error {
public:
    explicit UnknownTermError(const std::string& label)
        : Error(ErrorKind::query, "unknown term '" + label + "'"), label_(label) {}
    const std::string& label() const noexcept { return label_; }

private:
    std::string label_;
};

class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& message) : Error(ErrorKind::resource, message) {}
};

}  // namespace fieldmap
