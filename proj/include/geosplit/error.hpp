#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace geosplit {

enum class ErrorKind {
  io,
  parse,
  duplicate_id,
  non_monotone_time,
  missing_confidence,
  degenerate_polyline,
  unknown_sample_id,
  unknown_map,
  cross_map,
  invalid_argument,
  invalid_polygon,
  duplicate_priority,
  infeasible_lock,
  overlapping_maps,
  no_train,
  shape_mismatch,
  digest_mismatch,
};

std::string_view to_string(ErrorKind kind);

/// All library failures are reported through this exception. `subject` names the
/// offending entity (sample id, sequence id, region name, frame id ...), `line` is
/// the 1-based input line for parse failures and 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::string subject = {}, std::size_t line = 0);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& subject() const noexcept { return subject_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  std::string subject_;
  std::size_t line_;
};

}  // namespace geosplit
