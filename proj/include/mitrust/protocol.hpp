#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mitrust/paramspace.hpp"

namespace mitrust {

// The 2x2 experimental design (task x incentive) in two wording waves, the
// waves' verbatim question templates, and the randomized session schedule.

enum class Task { trust_game, non_social };
enum class Incentive { real, hypothetical };
enum class Wave { wave1 = 1, wave2 = 2 };

struct Condition {
  Task task{};
  Incentive incentive{};
  Wave wave{};

  auto operator<=>(const Condition&) const = default;
};

// Stable, injective label, e.g. "w1_trust_incentivized".
std::string condition_label(const Condition& condition);
std::optional<Condition> parse_condition_label(std::string_view label);

// The four conditions of a wave, in label order.
std::array<Condition, 4> wave_conditions(Wave wave);

// The stored question template, with [X] and [3X] placeholders. Source
// quote marks are normalized to straight ASCII quotes.
const std::string& prompt_template(const Condition& condition);

// Substitutes [X] -> x_tokens and [3X] -> 3*x_tokens as plain decimal
// integers (optionally comma-grouped); byte-exact otherwise.
std::string render_prompt(const Condition& condition, std::int64_t x_tokens,
                          bool comma_grouping = false);

struct Trial {
  std::string trial_id;  // "{condition_label}-{endowment_cents}"
  Condition condition{};
  std::int64_t endowment_cents = 0;
  std::int64_t x_tokens = 0;
  std::int64_t triple_tokens = 0;  // always 3 * x_tokens
  std::string prompt;
  int order_index = 0;  // position after the seeded shuffle
};

struct Session {
  std::uint64_t seed = 0;
  Wave wave{};
  std::vector<Trial> trials;
};

// Cartesian product of the grid and the wave's four conditions, shuffled by
// a seeded Fisher-Yates permutation. Identical inputs give identical order.
Session build_session(const EndowmentGrid& grid, Wave wave,
                      std::uint64_t seed, TokenRate rate = {},
                      bool comma_grouping = false);

// Line-delimited manifest: trial_id, wave, condition, endowment_cents,
// x_tokens, triple_tokens, order_index, prompt.
void write_session_manifest(const Session& session, std::ostream& out);

std::string format_tokens(std::int64_t tokens, bool comma_grouping);

int wave_number(Wave wave);
Wave wave_from_number(int number);

}  // namespace mitrust
