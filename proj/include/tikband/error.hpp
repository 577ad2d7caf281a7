#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tikband {

enum class ErrorKind {
  invalid_bounds,
  invalid_count,
  dimension_mismatch,
  non_finite,
  empty_sample,
  nonpositive_bandwidth,
  nonpositive_alpha,
  degenerate_sample,
  index_out_of_range,
  non_psd_input,
  invalid_gamma,
  zero_envelope,
  invalid_argument,
  usage,
  unknown_command,
  missing_column,
  parse_error,
  too_few_rows,
  io_error,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

}  // namespace tikband
