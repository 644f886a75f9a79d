#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geomancer {

enum class ErrorKind {
    parse,      // malformed text: JSON, CSV, filter expressions, URLs
    schema,     // well-formed input with the wrong shape
    validation, // values violating a domain invariant
    lookup,     // unknown layer, column, or dialect
    compile,    // a spell that cannot be lowered to SQL
    io,         // unreadable or unwritable files
};

constexpr std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::schema: return "schema error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::lookup: return "lookup error";
    case ErrorKind::compile: return "compile error";
    case ErrorKind::io: return "I/O error";
    }
    return "error";
}

/// Single exception type for the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind),
          detail_(message)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

    /// Message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

    /// Same error with `context` (usually a file path) prepended.
    Error with_context(std::string_view context) const
    {
        return Error(kind_, std::string(context) + ": " + detail_);
    }

  private:
    ErrorKind kind_;
    std::string detail_;
};

} // namespace geomancer
