#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace byrne {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Input is well-formed but violates the required shape (e.g. fact before tick).
class StructureError : public ParseError {
public:
    using ParseError::ParseError;
};

/// Time went backwards or stood still where it must increase.
class OrderingError : public Error {
public:
    using Error::Error;
};

/// Evaluating an emotion before it was created.
class ClockError : public Error {
public:
    using Error::Error;
};

class DirectiveError : public Error {
public:
    using Error::Error;
};

class VerificationError : public Error {
public:
    using Error::Error;
};

class InstantiationError : public Error {
public:
    using Error::Error;
};

/// No template can verbalize the selected fact.
class CoverageError : public Error {
public:
    explicit CoverageError(std::string predicate)
        : Error("no template matches fact '" + predicate + "'"), predicate_(std::move(predicate)) {}
    const std::string& predicate() const noexcept { return predicate_; }

private:
    std::string predicate_;
};

class StyleError : public Error {
public:
    using Error::Error;
};

struct Diagnostic {
    int line = 0;
    std::string message;
};

/// Profile failed validation; carries every problem found, not just the first.
class ProfileError : public Error {
public:
    explicit ProfileError(std::vector<Diagnostic> diagnostics)
        : Error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    static std::string summarize(const std::vector<Diagnostic>& diags) {
        std::string out;
        for (const auto& d : diags) {
            if (!out.empty()) out += "; ";
            if (d.line > 0) out += "line " + std::to_string(d.line) + ": ";
            out += d.message;
        }
        return out.empty() ? "invalid profile" : out;
    }
    std::vector<Diagnostic> diagnostics_;
};

}  // namespace byrne
