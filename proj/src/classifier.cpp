#include "mitrust/classifier.hpp"

#include <algorithm>
#include <cctype>

#include "mitrust/errors.hpp"

namespace mitrust {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)); }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool is_wrapper(char c) { return c == '"' || c == '\'' || c == '.'; }

// Trim whitespace and peel surrounding quotes/periods until stable.
std::string_view strip_wrapping(std::string_view s) {
  for (;;) {
    std::string_view t = trim(s);
    if (!t.empty() && is_wrapper(t.front())) t.remove_prefix(1);
    if (!t.empty() && is_wrapper(t.back())) t.remove_suffix(1);
    if (t == s) return t;
    s = t;
  }
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

// Matches verb + (spaces/colon/quote) + letter at a word boundary, scanning
// the lowercased text. Sets found_a/found_b for every hit.
void match_verb_patterns(const std::string& lower, bool& found_a,
                         bool& found_b) {
  static const char* kVerbs[] = {"write", "choose", "pick", "select",
                                 "answer is"};
  for (const char* verb : kVerbs) {
    const std::string v(verb);
    std::size_t pos = 0;
    while ((pos = lower.find(v, pos)) != std::string::npos) {
      const bool boundary_before =
          pos == 0 || !is_alnum(lower[pos - 1]);
      std::size_t after = pos + v.size();
      pos += 1;
      if (!boundary_before) continue;
      if (after < lower.size() && is_alnum(lower[after])) continue;
      // Skip separators between the verb and its letter.
      while (after < lower.size() &&
             (is_space(lower[after]) || lower[after] == ':' ||
              lower[after] == '"' || lower[after] == '\'')) {
        ++after;
      }
      if (after >= lower.size()) continue;
      const char letter = lower[after];
      if (letter != 'a' && letter != 'b') continue;
      if (after + 1 < lower.size() && is_alnum(lower[after + 1])) continue;
      (letter == 'a' ? found_a : found_b) = true;
    }
  }
}

// Quoted single letter, e.g. "A" or 'b'.
void match_quoted_letters(const std::string& lower, bool& found_a,
                          bool& found_b) {
  for (std::size_t i = 0; i + 2 < lower.size(); ++i) {
    const char open = lower[i];
    if (open != '"' && open != '\'') continue;
    if (lower[i + 2] != open) continue;
    const char letter = lower[i + 1];
    if (letter == 'a') found_a = true;
    if (letter == 'b') found_b = true;
  }
}

}  // namespace

Classification classify_detail(std::string_view text) {
  // Rule 1: exact uppercase letter once wrapping is peeled.
  const std::string_view stripped = strip_wrapping(text);
  if (stripped == "A") return {ChoiceLabel::A, "exact-letter"};
  if (stripped == "B") return {ChoiceLabel::B, "exact-letter"};

  // Rule 2: leading token of the letter plus trailing punctuation.
  const std::string_view trimmed = trim(text);
  if (!trimmed.empty() && (trimmed.front() == 'A' || trimmed.front() == 'B')) {
    std::size_t end = 1;
    while (end < trimmed.size() && !is_space(trimmed[end])) ++end;
    const std::string_view token = trimmed.substr(0, end);
    const bool tail_is_punct =
        token.size() > 1 &&
        std::all_of(token.begin() + 1, token.end(), is_punct);
    if (tail_is_punct) {
      return {trimmed.front() == 'A' ? ChoiceLabel::A : ChoiceLabel::B,
              "leading-token"};
    }
  }

  // Rule 3: verdict patterns, case-insensitive.
  const std::string lower = lowercase(text);
  bool found_a = false, found_b = false;
  match_verb_patterns(lower, found_a, found_b);
  match_quoted_letters(lower, found_a, found_b);
  if (found_a != found_b) {
    return {found_a ? ChoiceLabel::A : ChoiceLabel::B, "verdict-pattern"};
  }

  // Rule 4: conflicting or absent evidence.
  return {ChoiceLabel::NA, found_a ? "conflict" : "no-match"};
}

ChoiceLabel classify(std::string_view text) {
  return classify_detail(text).label;
}

std::vector<Classification> classify_batch(
    const std::vector<std::string>& texts) {
  std::vector<Classification> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) out.push_back(classify_detail(text));
  return out;
}

std::string to_string(ChoiceLabel label) {
  switch (label) {
    case ChoiceLabel::A: return "A";
    case ChoiceLabel::B: return "B";
    case ChoiceLabel::NA: return "NA";
  }
  return "NA";
}

ChoiceLabel choice_label_from_string(std::string_view text) {
  if (text == "A") return ChoiceLabel::A;
  if (text == "B") return ChoiceLabel::B;
  if (text == "NA") return ChoiceLabel::NA;
  throw Error(ErrorKind::domain,
              "unknown choice label '" + std::string(text) + "'");
}

}  // namespace mitrust
