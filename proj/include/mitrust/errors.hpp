#pragma once

#include <stdexcept>
#include <string>

namespace mitrust {

// Error taxonomy used across the library. The kind is what callers dispatch
// on; the message carries the human-readable detail (row numbers, year
// pairs, fingerprints, HTTP status codes).
enum class ErrorKind {
  schema,        // input file is missing a required column or is malformed
  row,           // a single data row failed to parse
  lookup,        // a required key (e.g. inflation year pair) is absent
  domain,        // argument violates an operation precondition
  state,         // operation illegal in the object's current state
  transport,     // network failure that survived the retry policy
  request,       // HTTP 4xx from the completion service
  archive_miss,  // replay fingerprint not present in the archive
  storage,       // file write failure
  usage,         // bad CLI arguments or missing configuration
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::schema: return "schema";
    case ErrorKind::row: return "row";
    case ErrorKind::lookup: return "lookup";
    case ErrorKind::domain: return "domain";
    case ErrorKind::state: return "state";
    case ErrorKind::transport: return "transport";
    case ErrorKind::request: return "request";
    case ErrorKind::archive_miss: return "archive-miss";
    case ErrorKind::storage: return "storage";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

}  // namespace mitrust
