#include "mitrust/csv.hpp"

namespace mitrust::csv {

std::optional<std::vector<std::string>> Reader::next() {
  int c = in_.get();
  if (c == std::istream::traits_type::eof()) return std::nullopt;

  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;

  for (;;) {
    if (c == std::istream::traits_type::eof()) {
      fields.push_back(std::move(field));
      break;
    }
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      fields.push_back(std::move(field));
      break;
    } else if (ch == '\r') {
      if (in_.peek() == '\n') in_.get();
      fields.push_back(std::move(field));
      break;
    } else {
      field.push_back(ch);
    }
    c = in_.get();
  }

  ++record_index_;
  return fields;
}

std::string escape_field(const std::string& field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += escape_field(fields[i]);
  }
  return out;
}

}  // namespace mitrust::csv
