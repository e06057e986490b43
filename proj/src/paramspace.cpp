#include "mitrust/paramspace.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "mitrust/csv.hpp"
#include "mitrust/errors.hpp"

namespace mitrust {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

bool parse_int(const std::string& raw, long long& out) {
  const std::string s = trim(raw);
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

// Parses a dollar amount such as "10", "10.5", "$10.50" into exact cents.
// More than two fraction digits is rejected: the input is money, not a real.
bool parse_usd_cents(const std::string& raw, std::int64_t& out_cents) {
  std::string s = trim(raw);
  if (!s.empty() && s.front() == '$') s.erase(s.begin());
  if (s.empty()) return false;
  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.erase(s.begin());
  }
  const std::size_t dot = s.find('.');
  std::string whole = dot == std::string::npos ? s : s.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : s.substr(dot + 1);
  if (whole.empty() && frac.empty()) return false;
  if (frac.size() > 2) return false;
  while (frac.size() < 2) frac.push_back('0');
  if (whole.empty()) whole = "0";
  long long whole_v = 0, frac_v = 0;
  if (!parse_int(whole, whole_v) || !parse_int(frac, frac_v)) return false;
  out_cents = whole_v * 100 + frac_v;
  if (negative) out_cents = -out_cents;
  return true;
}

std::int64_t round_half_away(double value) {
  return static_cast<std::int64_t>(std::llround(value));
}

std::int64_t round_to_nearest_10(double cents) {
  return round_half_away(cents / 10.0) * 10;
}

[[noreturn]] void row_error(std::size_t data_row, const std::string& what) {
  std::ostringstream msg;
  msg << "row " << data_row << ": " << what;
  throw Error(ErrorKind::row, msg.str());
}

}  // namespace

std::vector<EndowmentObservation> load_endowment_history(std::istream& in) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) throw Error(ErrorKind::schema, "empty endowment history file");

  const std::vector<std::string> required = {"study_id", "year",
                                             "endowment_usd", "multiplier"};
  std::vector<std::size_t> col(required.size());
  for (std::size_t i = 0; i < required.size(); ++i) {
    auto it = std::find(header->begin(), header->end(), required[i]);
    if (it == header->end()) {
      throw Error(ErrorKind::schema,
                  "endowment history is missing column '" + required[i] + "'");
    }
    col[i] = static_cast<std::size_t>(it - header->begin());
  }

  std::vector<EndowmentObservation> observations;
  std::size_t data_row = 0;
  while (auto record = reader.next()) {
    ++data_row;
    if (record->size() == 1 && (*record)[0].empty()) continue;  // blank line
    if (record->size() < header->size())
      row_error(data_row, "expected " + std::to_string(header->size()) +
                              " fields, got " + std::to_string(record->size()));

    EndowmentObservation obs;
    obs.study_id = trim((*record)[col[0]]);
    long long year = 0, multiplier = 0;
    if (!parse_int((*record)[col[1]], year))
      row_error(data_row, "non-numeric year '" + (*record)[col[1]] + "'");
    if (!parse_usd_cents((*record)[col[2]], obs.endowment_nominal_cents))
      row_error(data_row,
                "non-numeric endowment '" + (*record)[col[2]] + "'");
    if (!parse_int((*record)[col[3]], multiplier))
      row_error(data_row,
                "non-numeric multiplier '" + (*record)[col[3]] + "'");
    if (obs.endowment_nominal_cents <= 0)
      row_error(data_row, "endowment must be positive");
    if (multiplier < 1) row_error(data_row, "multiplier must be >= 1");
    obs.year = static_cast<int>(year);
    obs.multiplier = static_cast<int>(multiplier);
    observations.push_back(std::move(obs));
  }
  return observations;
}

void InflationTable::add(int from_year, int to_year, double factor) {
  if (factor <= 0.0)
    throw Error(ErrorKind::schema, "inflation factor must be positive");
  if (from_year == to_year && factor != 1.0)
    throw Error(ErrorKind::schema,
                "inflation factor for identical years must be 1");
  entries_[{from_year, to_year}] = factor;
}

double InflationTable::factor(int from_year, int to_year) const {
  if (from_year == to_year) return 1.0;
  auto it = entries_.find({from_year, to_year});
  if (it == entries_.end()) {
    std::ostringstream msg;
    msg << "no inflation factor for years " << from_year << " -> " << to_year;
    throw Error(ErrorKind::lookup, msg.str());
  }
  return it->second;
}

InflationTable InflationTable::from_csv(std::istream& in) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || header->size() < 3 || (*header)[0] != "from_year" ||
      (*header)[1] != "to_year" || (*header)[2] != "factor") {
    throw Error(ErrorKind::schema,
                "inflation table header must be from_year,to_year,factor");
  }
  InflationTable table;
  std::size_t data_row = 0;
  while (auto record = reader.next()) {
    ++data_row;
    if (record->size() == 1 && (*record)[0].empty()) continue;
    if (record->size() < 3) row_error(data_row, "expected 3 fields");
    long long from = 0, to = 0;
    if (!parse_int((*record)[0], from) || !parse_int((*record)[1], to))
      row_error(data_row, "non-numeric year");
    const std::string f = trim((*record)[2]);
    double factor = 0.0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), factor);
    if (ec != std::errc{} || ptr != f.data() + f.size())
      row_error(data_row, "non-numeric factor '" + f + "'");
    table.add(static_cast<int>(from), static_cast<int>(to), factor);
  }
  return table;
}

std::int64_t adjust_for_inflation(std::int64_t nominal_cents, int from_year,
                                  int to_year, const InflationTable& table) {
  const double factor = table.factor(from_year, to_year);
  return round_half_away(static_cast<double>(nominal_cents) * factor);
}

std::pair<std::int64_t, std::int64_t> quartiles(
    std::vector<std::int64_t> values_cents) {
  if (values_cents.empty())
    throw Error(ErrorKind::domain, "quartiles of an empty list");
  std::sort(values_cents.begin(), values_cents.end());

  auto percentile = [&](double p) {
    // Order statistic at position 1 + (n-1)p, linearly interpolated.
    const double pos = static_cast<double>(values_cents.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    double value = static_cast<double>(values_cents[lo]);
    if (frac > 0.0 && lo + 1 < values_cents.size()) {
      value += frac * static_cast<double>(values_cents[lo + 1] -
                                          values_cents[lo]);
    }
    return value;
  };

  return {round_to_nearest_10(percentile(0.25)),
          round_to_nearest_10(percentile(0.75))};
}

EndowmentGrid build_grid(std::int64_t q1_cents, std::int64_t q3_cents,
                         std::int64_t step_cents) {
  if (step_cents <= 0)
    throw Error(ErrorKind::domain, "grid step must be positive");
  if (q1_cents > q3_cents)
    throw Error(ErrorKind::domain, "grid lower bound exceeds upper bound");
  const std::int64_t span = q3_cents - q1_cents;
  if (span % step_cents != 0) {
    std::ostringstream msg;
    msg << "grid span " << span << " is not divisible by step " << step_cents;
    throw Error(ErrorKind::domain, msg.str());
  }

  EndowmentGrid grid;
  grid.step_cents = step_cents;
  grid.q1_cents = q1_cents;
  grid.q3_cents = q3_cents;
  grid.values_cents.reserve(static_cast<std::size_t>(span / step_cents) + 1);
  for (std::int64_t v = q1_cents; v <= q3_cents; v += step_cents) {
    grid.values_cents.push_back(v);
  }
  return grid;
}

std::int64_t cents_to_tokens(std::int64_t cents, TokenRate rate) {
  if (cents < 0) throw Error(ErrorKind::domain, "cents must be non-negative");
  if (rate.usd_per_1000_tokens <= 0.0)
    throw Error(ErrorKind::domain, "token rate must be positive");
  // cents / 100 dollars, / rate thousands of tokens, * 1000 tokens.
  const double tokens =
      static_cast<double>(cents) * 10.0 / rate.usd_per_1000_tokens;
  return round_half_away(tokens);
}

}  // namespace mitrust
