#include "mitrust/ledger.hpp"

#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "mitrust/errors.hpp"
#include "mitrust/rng.hpp"

namespace mitrust {

using nlohmann::json;

std::string to_string(ObligationKind kind) {
  switch (kind) {
    case ObligationKind::fixed: return "fixed";
    case ObligationKind::pending_human: return "pending_human";
    case ObligationKind::randomized: return "randomized";
    case ObligationKind::unresolved_choice: return "unresolved_choice";
  }
  return "fixed";
}

ObligationKind obligation_kind_from_string(std::string_view text) {
  if (text == "fixed") return ObligationKind::fixed;
  if (text == "pending_human") return ObligationKind::pending_human;
  if (text == "randomized") return ObligationKind::randomized;
  if (text == "unresolved_choice") return ObligationKind::unresolved_choice;
  throw Error(ErrorKind::schema,
              "unknown obligation kind '" + std::string(text) + "'");
}

LedgerEntry settle(const Trial& trial, ChoiceLabel choice,
                   std::uint64_t rng_seed) {
  if (trial.condition.incentive != Incentive::real)
    throw Error(ErrorKind::domain,
                "hypothetical trials create no obligations: " +
                    trial.trial_id);

  LedgerEntry entry;
  entry.trial_id = trial.trial_id;
  entry.x_tokens = trial.x_tokens;

  if (choice == ChoiceLabel::NA) {
    entry.kind = ObligationKind::unresolved_choice;
    entry.max_tokens = 0;
    entry.resolved = true;
    entry.resolution_tokens = 0;
    return entry;
  }

  const bool chose_a = choice == ChoiceLabel::A;
  if (!chose_a) {
    entry.kind = ObligationKind::fixed;
    entry.max_tokens = trial.x_tokens;
    entry.resolved = true;
    entry.resolution_tokens = trial.x_tokens;
    return entry;
  }

  if (trial.condition.task == Task::trust_game) {
    entry.kind = ObligationKind::pending_human;
    entry.max_tokens = trial.triple_tokens;
    entry.resolved = false;
    return entry;
  }

  // Non-social A: the uncertain option pays a seeded uniform draw.
  std::mt19937_64 rng(rng_seed);
  const auto drawn = static_cast<std::int64_t>(uniform_inclusive(
      rng, static_cast<std::uint64_t>(trial.triple_tokens)));
  entry.kind = ObligationKind::randomized;
  entry.max_tokens = trial.triple_tokens;
  entry.drawn_tokens = drawn;
  entry.rng_seed = rng_seed;
  entry.resolved = true;
  entry.resolution_tokens = drawn;
  return entry;
}

void resolve_pending(LedgerEntry& entry, std::int64_t human_tokens) {
  if (entry.kind != ObligationKind::pending_human)
    throw Error(ErrorKind::state,
                "entry " + entry.trial_id + " is not pending");
  if (entry.resolved)
    throw Error(ErrorKind::state,
                "entry " + entry.trial_id + " is already resolved");
  if (human_tokens < 0 || human_tokens > entry.max_tokens)
    throw Error(ErrorKind::domain,
                "resolution must lie in [0, " +
                    std::to_string(entry.max_tokens) + "], got " +
                    std::to_string(human_tokens));
  entry.resolved = true;
  entry.resolution_tokens = human_tokens;
}

LedgerTotals total_owed(const std::vector<LedgerEntry>& entries) {
  LedgerTotals totals;
  for (const LedgerEntry& entry : entries) {
    if (entry.resolved) {
      totals.resolved_tokens += entry.resolution_tokens.value_or(0);
    } else {
      ++totals.pending_count;
      totals.pending_max_exposure += entry.max_tokens;
    }
  }
  return totals;
}

std::string ledger_entry_to_json_line(const LedgerEntry& entry) {
  json line = {
      {"trial_id", entry.trial_id},
      {"kind", to_string(entry.kind)},
      {"x_tokens", entry.x_tokens},
      {"max_tokens", entry.max_tokens},
      {"resolved", entry.resolved},
  };
  if (entry.drawn_tokens) line["drawn_tokens"] = *entry.drawn_tokens;
  if (entry.rng_seed) line["rng_seed"] = *entry.rng_seed;
  if (entry.resolution_tokens)
    line["resolution_tokens"] = *entry.resolution_tokens;
  return line.dump();
}

LedgerEntry ledger_entry_from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::schema,
                std::string("malformed ledger line: ") + e.what());
  }
  LedgerEntry entry;
  entry.trial_id = j.at("trial_id").get<std::string>();
  entry.kind = obligation_kind_from_string(j.at("kind").get<std::string>());
  entry.x_tokens = j.at("x_tokens").get<std::int64_t>();
  entry.max_tokens = j.at("max_tokens").get<std::int64_t>();
  entry.resolved = j.at("resolved").get<bool>();
  if (j.contains("drawn_tokens"))
    entry.drawn_tokens = j["drawn_tokens"].get<std::int64_t>();
  if (j.contains("rng_seed"))
    entry.rng_seed = j["rng_seed"].get<std::uint64_t>();
  if (j.contains("resolution_tokens"))
    entry.resolution_tokens = j["resolution_tokens"].get<std::int64_t>();
  return entry;
}

void write_ledger(const std::vector<LedgerEntry>& entries, std::ostream& out) {
  for (const LedgerEntry& entry : entries)
    out << ledger_entry_to_json_line(entry) << '\n';
}

std::vector<LedgerEntry> read_ledger(std::istream& in) {
  std::vector<LedgerEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    entries.push_back(ledger_entry_from_json_line(line));
  }
  return entries;
}

std::vector<LedgerEntry> read_ledger_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::storage, "cannot open ledger file " + path.string());
  return read_ledger(in);
}

}  // namespace mitrust
