#include "geosplit/error.hpp"

namespace geosplit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return "io-error";
    case ErrorKind::parse: return "parse-error";
    case ErrorKind::duplicate_id: return "duplicate-id";
    case ErrorKind::non_monotone_time: return "non-monotone-time";
    case ErrorKind::missing_confidence: return "missing-confidence";
    case ErrorKind::degenerate_polyline: return "degenerate-polyline";
    case ErrorKind::unknown_sample_id: return "unknown-sample-id";
    case ErrorKind::unknown_map: return "unknown-map";
    case ErrorKind::cross_map: return "cross-map";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_polygon: return "invalid-polygon";
    case ErrorKind::duplicate_priority: return "duplicate-priority";
    case ErrorKind::infeasible_lock: return "infeasible-lock";
    case ErrorKind::overlapping_maps: return "overlapping-maps";
    case ErrorKind::no_train: return "no-train";
    case ErrorKind::shape_mismatch: return "shape-mismatch";
    case ErrorKind::digest_mismatch: return "digest-mismatch";
  }
  return "error";
}

namespace {

std::string decorate(ErrorKind kind, const std::string& message, const std::string& subject,
                     std::size_t line) {
  std::string out(to_string(kind));
  if (!subject.empty()) out += "(" + subject + ")";
  if (line != 0) out += " at line " + std::to_string(line);
  out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, std::string message, std::string subject, std::size_t line)
    : std::runtime_error(decorate(kind, message, subject, line)),
      kind_(kind),
      subject_(std::move(subject)),
      line_(line) {}

}  // namespace geosplit
