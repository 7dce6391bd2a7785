#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hydap {

using Index = std::size_t;

// Base for all library errors. Subclasses carry the failure kind in the
// type so callers can catch selectively; the what() string has details.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : Error { using Error::Error; };
struct UsageError : Error { using Error::Error; };

struct MissingValueError : Error {
  MissingValueError(Index row, Index col)
      : Error("missing value at row " + std::to_string(row) + ", column " +
              std::to_string(col)),
        row(row), col(col) {}
  Index row, col;
};

struct UnknownLevelError : Error {
  UnknownLevelError(Index row, Index col, const std::string& token)
      : Error("unknown level '" + token + "' at row " + std::to_string(row) +
              ", column " + std::to_string(col)),
        row(row), col(col), token(token) {}
  Index row, col;
  std::string token;
};

struct ParseError : Error { using Error::Error; };
struct NoContinuousError : Error { using Error::Error; };
struct EmptySelectionError : Error { using Error::Error; };
struct UnknownVariableError : Error { using Error::Error; };
struct DimensionMismatchError : Error { using Error::Error; };
struct InvalidOrderError : Error { using Error::Error; };
struct TooFewSubjectsError : Error { using Error::Error; };
struct InvalidKError : Error { using Error::Error; };
struct InvalidSparsityError : Error { using Error::Error; };
struct InvalidFractionError : Error { using Error::Error; };
struct LengthMismatchError : Error { using Error::Error; };
struct DegenerateTableError : Error { using Error::Error; };
struct TooShortError : Error { using Error::Error; };
struct NothingSelectedError : Error { using Error::Error; };
struct DegenerateComponentError : Error { using Error::Error; };
struct InvalidRhoError : Error { using Error::Error; };

}  // namespace hydap
