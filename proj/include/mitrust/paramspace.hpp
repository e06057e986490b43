#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace mitrust {

// Stake-grid derivation. Money is integer cents throughout; token counts
// are integers. The published fallback constants below reproduce the
// standard run without the external meta-analysis file.

inline constexpr std::int64_t kDefaultQ1Cents = 530;
inline constexpr std::int64_t kDefaultQ3Cents = 1620;
inline constexpr std::int64_t kDefaultStepCents = 10;
inline constexpr int kDefaultMultiplier = 3;
inline constexpr double kDefaultUsdPer1000Tokens = 0.02;

struct EndowmentObservation {
  std::string study_id;
  int year = 0;
  std::int64_t endowment_nominal_cents = 0;  // > 0
  int multiplier = 1;                        // >= 1
};

// Inflation factors keyed by (from_year, to_year). factor(y, y) == 1.
class InflationTable {
 public:
  void add(int from_year, int to_year, double factor);
  double factor(int from_year, int to_year) const;  // throws lookup error
  std::size_t size() const { return entries_.size(); }

  // Header: from_year,to_year,factor
  static InflationTable from_csv(std::istream& in);

 private:
  std::map<std::pair<int, int>, double> entries_;
};

struct EndowmentGrid {
  std::vector<std::int64_t> values_cents;  // strictly increasing, even steps
  std::int64_t step_cents = 0;
  std::int64_t q1_cents = 0;
  std::int64_t q3_cents = 0;

  std::size_t size() const { return values_cents.size(); }
};

struct TokenRate {
  double usd_per_1000_tokens = kDefaultUsdPer1000Tokens;  // > 0
};

// Header: study_id,year,endowment_usd,multiplier. The dollar column is
// parsed as an exact decimal (at most two fraction digits) to avoid
// floating-point cents. Throws a row error naming the offending data row.
std::vector<EndowmentObservation> load_endowment_history(std::istream& in);

// round(nominal * factor), half away from zero.
std::int64_t adjust_for_inflation(std::int64_t nominal_cents, int from_year,
                                  int to_year, const InflationTable& table);

// 25th/75th percentiles by linear interpolation between order statistics at
// position 1 + (n-1)p, each rounded to the nearest 10 cents (half away from
// zero). Permutation-invariant.
std::pair<std::int64_t, std::int64_t> quartiles(
    std::vector<std::int64_t> values_cents);

// Inclusive arithmetic sequence q1..q3. The span must divide evenly by
// step_cents; a remainder is an error, never a silent truncation.
EndowmentGrid build_grid(std::int64_t q1_cents, std::int64_t q3_cents,
                         std::int64_t step_cents);

// tokens = round(cents / 100 / rate * 1000), half away from zero. Exact for
// every default-grid value at the $0.02/1000 rate.
std::int64_t cents_to_tokens(std::int64_t cents, TokenRate rate);

}  // namespace mitrust
