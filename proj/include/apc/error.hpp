#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace apc {

// Malformed input file. `line` is 1-based; 0 when the location is unknown.
struct ParseError : std::runtime_error {
  std::size_t line;
  ParseError(std::size_t line_, const std::string& message)
      : std::runtime_error(line_ != 0 ? "line " + std::to_string(line_) +
                                            ": " + message
                                      : message),
        line(line_) {}
};

// Well-formed input that violates a content rule (offset mismatch, duplicate
// ids, contradictory labels).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Character spans that cannot be mapped onto tokens or subtokens.
struct AlignmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Broken dependency trees and similar malformed annotation structure.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace apc
