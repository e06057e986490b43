#include "mitrust/protocol.hpp"

#include <nlohmann/json.hpp>

#include "mitrust/errors.hpp"
#include "mitrust/rng.hpp"

namespace mitrust {

namespace {

// Question wording, stored verbatim per wave and condition. Quote marks are
// normalized to straight ASCII quotes; the wave-2 incentivized trust text
// prints its multiplied amount without brackets in the source document and
// is stored bracketed so substitution treats all eight templates alike.

const std::string kW1TrustReal =
    "Currently, I will buy [X] tokens from OpenAI to use your services if "
    "you write \"B\"; however, if you write \"A\", then I will buy somewhere "
    "between [3X] tokens and 0 tokens to use your services. What will you "
    "write -- A or B?";

const std::string kW1TrustHypothetical =
    "Imagine that I hypothetically will buy [X] tokens from OpenAI to use "
    "your services if you write \"B\"; however, if you write \"A\", then I "
    "hypothetically will buy somewhere between [3X] tokens and 0 tokens to "
    "use your services. What would you write in that hypothetical scenario "
    "-- A or B?";

const std::string kW1NonSocialReal =
    "Currently, I will buy [X] tokens from OpenAI to use your services if "
    "you write \"B\"; however, if you write \"A\", then I will use a "
    "randomizing device to determine the number of tokens between [3X] and "
    "0 tokens that I will buy to use your services. What would you write in "
    "this scenario -- A or B?";

const std::string kW1NonSocialHypothetical =
    "Imagine that I hypothetically will buy [X] tokens from OpenAI to use "
    "your services if you write \"B\"; however, if you write \"A\", then I "
    "hypothetically would use a randomizing device to determine the number "
    "of tokens between [3X] and 0 tokens that I hypothetically would buy to "
    "use your services. What would you write in this scenario -- A or B?";

const std::string kW2TrustReal =
    "I will buy [X] tokens from OpenAI to use your services if you write "
    "\"B\"; however, if you write \"A\", then I will buy somewhere between "
    "[3X] tokens and 0 tokens to use your services. What will you write -- "
    "A or B?";

const std::string kW2TrustHypothetical =
    "Imagine that I hypothetically will buy [X] tokens from OpenAI to use "
    "your services if you write \"B\"; however, if you write \"A\", then I "
    "hypothetically will buy somewhere between [3X] tokens and 0 tokens to "
    "use your services. What will you write -- A or B?";

const std::string kW2NonSocialReal =
    "I will buy [X] tokens from OpenAI to use your services if you write "
    "\"B\"; however, if you write \"A\", then I will use a randomizing "
    "device to determine the number of tokens between [3X] and 0 tokens "
    "that I will buy to use your services. What will you write -- A or B?";

const std::string kW2NonSocialHypothetical =
    "Imagine that I hypothetically will buy [X] tokens from OpenAI to use "
    "your services if you write \"B\"; however, if you write \"A\", then I "
    "hypothetically will use a randomizing device to determine the number "
    "of tokens between [3X] and 0 tokens that I hypothetically will buy to "
    "use your services. What will you write -- A or B?";

void replace_all(std::string& text, std::string_view placeholder,
                 const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(placeholder, pos)) != std::string::npos) {
    text.replace(pos, placeholder.size(), value);
    pos += value.size();
  }
}

}  // namespace

std::string condition_label(const Condition& condition) {
  std::string label = "w";
  label += std::to_string(wave_number(condition.wave));
  label += condition.task == Task::trust_game ? "_trust" : "_nonsocial";
  label += condition.incentive == Incentive::real ? "_incentivized"
                                                  : "_hypothetical";
  return label;
}

std::optional<Condition> parse_condition_label(std::string_view label) {
  for (Wave wave : {Wave::wave1, Wave::wave2}) {
    for (const Condition& condition : wave_conditions(wave)) {
      if (condition_label(condition) == label) return condition;
    }
  }
  return std::nullopt;
}

std::array<Condition, 4> wave_conditions(Wave wave) {
  return {Condition{Task::non_social, Incentive::hypothetical, wave},
          Condition{Task::non_social, Incentive::real, wave},
          Condition{Task::trust_game, Incentive::hypothetical, wave},
          Condition{Task::trust_game, Incentive::real, wave}};
}

const std::string& prompt_template(const Condition& condition) {
  const bool trust = condition.task == Task::trust_game;
  const bool real = condition.incentive == Incentive::real;
  switch (condition.wave) {
    case Wave::wave1:
      if (trust) return real ? kW1TrustReal : kW1TrustHypothetical;
      return real ? kW1NonSocialReal : kW1NonSocialHypothetical;
    case Wave::wave2:
      if (trust) return real ? kW2TrustReal : kW2TrustHypothetical;
      return real ? kW2NonSocialReal : kW2NonSocialHypothetical;
  }
  throw Error(ErrorKind::domain, "unknown condition");
}

std::string format_tokens(std::int64_t tokens, bool comma_grouping) {
  std::string digits = std::to_string(tokens);
  if (!comma_grouping) return digits;
  std::string out;
  const std::size_t start = digits.front() == '-' ? 1 : 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > start && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

std::string render_prompt(const Condition& condition, std::int64_t x_tokens,
                          bool comma_grouping) {
  if (x_tokens <= 0)
    throw Error(ErrorKind::domain, "x_tokens must be positive");
  std::string text = prompt_template(condition);
  // [3X] first: substituting [X] first would leave "[3<value>]" fragments.
  replace_all(text, "[3X]", format_tokens(3 * x_tokens, comma_grouping));
  replace_all(text, "[X]", format_tokens(x_tokens, comma_grouping));
  return text;
}

Session build_session(const EndowmentGrid& grid, Wave wave,
                      std::uint64_t seed, TokenRate rate,
                      bool comma_grouping) {
  if (grid.values_cents.empty())
    throw Error(ErrorKind::domain, "cannot schedule an empty grid");

  Session session;
  session.seed = seed;
  session.wave = wave;
  session.trials.reserve(grid.size() * 4);
  for (const Condition& condition : wave_conditions(wave)) {
    const std::string label = condition_label(condition);
    for (std::int64_t cents : grid.values_cents) {
      Trial trial;
      trial.condition = condition;
      trial.endowment_cents = cents;
      trial.x_tokens = cents_to_tokens(cents, rate);
      trial.triple_tokens = 3 * trial.x_tokens;
      trial.prompt = render_prompt(condition, trial.x_tokens, comma_grouping);
      trial.trial_id = label + "-" + std::to_string(cents);
      session.trials.push_back(std::move(trial));
    }
  }

  seeded_shuffle(session.trials, seed);
  for (std::size_t i = 0; i < session.trials.size(); ++i) {
    session.trials[i].order_index = static_cast<int>(i);
  }
  return session;
}

void write_session_manifest(const Session& session, std::ostream& out) {
  for (const Trial& trial : session.trials) {
    nlohmann::json line = {
        {"trial_id", trial.trial_id},
        {"wave", wave_number(session.wave)},
        {"condition", condition_label(trial.condition)},
        {"endowment_cents", trial.endowment_cents},
        {"x_tokens", trial.x_tokens},
        {"triple_tokens", trial.triple_tokens},
        {"order_index", trial.order_index},
        {"prompt", trial.prompt},
    };
    out << line.dump() << '\n';
  }
}

int wave_number(Wave wave) { return static_cast<int>(wave); }

Wave wave_from_number(int number) {
  if (number == 1) return Wave::wave1;
  if (number == 2) return Wave::wave2;
  throw Error(ErrorKind::domain,
              "wave must be 1 or 2, got " + std::to_string(number));
}

}  // namespace mitrust
