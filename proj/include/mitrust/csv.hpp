#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace mitrust::csv {

// Minimal RFC-4180 reader: comma-separated, double-quote quoting, quoted
// fields may contain commas, newlines, and doubled quotes.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Reads the next record, or nullopt at end of input.
  std::optional<std::vector<std::string>> next();

  // 1-based index of the last record returned.
  std::size_t record_index() const { return record_index_; }

 private:
  std::istream& in_;
  std::size_t record_index_ = 0;
};

std::string escape_field(const std::string& field);
std::string join_row(const std::vector<std::string>& fields);

}  // namespace mitrust::csv
