#include "tikband/error.hpp"

namespace tikband {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_bounds: return "invalid-bounds";
    case ErrorKind::invalid_count: return "invalid-count";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::non_finite: return "non-finite";
    case ErrorKind::empty_sample: return "empty-sample";
    case ErrorKind::nonpositive_bandwidth: return "nonpositive-bandwidth";
    case ErrorKind::nonpositive_alpha: return "nonpositive-alpha";
    case ErrorKind::degenerate_sample: return "degenerate-sample";
    case ErrorKind::index_out_of_range: return "index-out-of-range";
    case ErrorKind::non_psd_input: return "non-psd-input";
    case ErrorKind::invalid_gamma: return "invalid-gamma";
    case ErrorKind::zero_envelope: return "zero-envelope";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::usage: return "usage-error";
    case ErrorKind::unknown_command: return "unknown-command";
    case ErrorKind::missing_column: return "missing-column";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::too_few_rows: return "too-few-rows";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace tikband
