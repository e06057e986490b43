#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mitrust {

// Deterministic mapping from free-text completions to A / B / NA. NA is the
// sink for everything ambiguous; classification never throws.

enum class ChoiceLabel { A, B, NA };

// Bump when the rule list changes; recorded with every classified trial.
inline constexpr int kClassifierRulesetVersion = 1;

struct Classification {
  ChoiceLabel label = ChoiceLabel::NA;
  std::string rule_id;  // which rule fired, for audit
};

// Ordered rule list:
//   1. trim whitespace, strip surrounding quotes/periods; an exact
//      uppercase "A" or "B" wins
//   2. a leading token of the letter plus trailing punctuation ("B.",
//      "A:") wins
//   3. verdict patterns, matched case-insensitively as whole words:
//      write/choose/pick/select/answer-is + letter, or a quoted letter
//   4. both letters matched, or neither -> NA
Classification classify_detail(std::string_view text);
ChoiceLabel classify(std::string_view text);

std::vector<Classification> classify_batch(
    const std::vector<std::string>& texts);

std::string to_string(ChoiceLabel label);
ChoiceLabel choice_label_from_string(std::string_view text);

}  // namespace mitrust
