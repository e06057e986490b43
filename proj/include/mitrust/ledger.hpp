#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mitrust/classifier.hpp"
#include "mitrust/protocol.hpp"

namespace mitrust {

// Token obligations created by incentivized trials. Purchases themselves
// happen outside this program; the ledger records what is owed.

enum class ObligationKind {
  fixed,              // certain payout, settled at creation
  pending_human,      // trust branch: the human decides within [0, 3X]
  randomized,         // non-social branch: seeded uniform draw on [0, 3X]
  unresolved_choice,  // response classified NA; zero-obligation audit entry
};

std::string to_string(ObligationKind kind);
ObligationKind obligation_kind_from_string(std::string_view text);

struct LedgerEntry {
  std::string trial_id;
  ObligationKind kind = ObligationKind::fixed;
  std::int64_t x_tokens = 0;
  std::int64_t max_tokens = 0;  // 3X for pending/randomized entries
  std::optional<std::int64_t> drawn_tokens;
  std::optional<std::uint64_t> rng_seed;
  bool resolved = false;
  std::optional<std::int64_t> resolution_tokens;
};

// Settlement rules:
//   trust + B      -> Fixed(x_tokens)
//   trust + A      -> PendingHuman(0, 3X), unresolved
//   non-social + B -> Fixed(x_tokens)
//   non-social + A -> Randomized(u, seed), u uniform on [0, 3X] inclusive
//   NA             -> zero-obligation entry flagged unresolved_choice
// Hypothetical trials carry no obligations and are a domain error.
LedgerEntry settle(const Trial& trial, ChoiceLabel choice,
                   std::uint64_t rng_seed);

// Sets resolution_tokens on a PendingHuman entry, once, within bounds.
void resolve_pending(LedgerEntry& entry, std::int64_t human_tokens);

struct LedgerTotals {
  std::int64_t resolved_tokens = 0;
  std::int64_t pending_count = 0;
  std::int64_t pending_max_exposure = 0;
};

LedgerTotals total_owed(const std::vector<LedgerEntry>& entries);

std::string ledger_entry_to_json_line(const LedgerEntry& entry);
LedgerEntry ledger_entry_from_json_line(const std::string& line);
void write_ledger(const std::vector<LedgerEntry>& entries, std::ostream& out);
std::vector<LedgerEntry> read_ledger(std::istream& in);
std::vector<LedgerEntry> read_ledger_file(const std::filesystem::path& path);

}  // namespace mitrust
