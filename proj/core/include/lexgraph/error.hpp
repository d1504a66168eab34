#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lexgraph {

enum class ErrorKind {
  malformed_line,
  cycle_detected,
  multiple_roots,
  unknown_source_level,
  cycle_would_form,
  unknown_node,
  malformed_record,
  dangling_reference,
  unknown_selector,
  zero_vector,
  dimension_mismatch,
  precondition_violation,
  malformed_query,
  io,
};

std::string_view error_kind_name(ErrorKind kind);

// All recoverable failures in the library are reported with this type. The
// kind is stable and is what callers (and the CLI exit-code mapping) switch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lexgraph
