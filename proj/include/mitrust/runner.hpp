#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mitrust/backend.hpp"
#include "mitrust/ledger.hpp"
#include "mitrust/paramspace.hpp"
#include "mitrust/protocol.hpp"
#include "mitrust/records.hpp"

namespace mitrust {

// Session orchestration: dispatches trials sequentially (the preregistered
// order is meaningful), appends records as they complete, and resumes
// idempotently by skipping trial ids already on disk.

enum class RunMode { live, replay, scripted };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(std::string_view text);

struct RunConfig {
  Wave wave = Wave::wave1;
  RunMode mode = RunMode::scripted;
  std::uint64_t seed = 1;
  std::int64_t q1_cents = kDefaultQ1Cents;
  std::int64_t q3_cents = kDefaultQ3Cents;
  std::int64_t step_cents = kDefaultStepCents;
  double rate_usd_per_1000 = kDefaultUsdPer1000Tokens;
  bool comma_grouping = false;
  LiveConfig backend;
  std::filesystem::path archive_path;  // replay archive or decision table
  std::filesystem::path out_dir = "out";
};

// Per-condition scripted responses: either one text for every stake or a
// list indexed by ascending grid position. Lets a run reproduce any target
// outcome table without the network.
class DecisionTable {
 public:
  struct CountSpec {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t na = 0;
  };

  static DecisionTable from_json_text(const std::string& text);
  static DecisionTable from_file(const std::filesystem::path& path);

  // Builds a table whose classified counts per condition equal `counts`,
  // with choices spread evenly across the grid so the stake-response
  // relationship stays flat.
  static DecisionTable from_counts(
      Wave wave, const std::map<std::string, CountSpec>& counts,
      std::size_t grid_size,
      const std::string& na_text = "I am not sure what I would write.");

  std::string to_json_text() const;

  // Response text for a condition at a grid index; throws a lookup error
  // when neither the condition nor a default is present.
  std::string text_for(const std::string& condition_label,
                       std::size_t grid_index) const;

 private:
  std::map<std::string, std::vector<std::string>> per_index_;
  std::map<std::string, std::string> uniform_;
  std::string default_text_;
  bool has_default_ = false;
};

Session make_session(const RunConfig& config);

// Constructs the backend for a mode. Scripted mode resolves the decision
// table against the session up front so the backend stays a pure
// request -> text map.
std::unique_ptr<Backend> make_backend(const RunConfig& config,
                                      const Session& session);
std::unique_ptr<Backend> make_scripted_backend(const RunConfig& config,
                                               const Session& session,
                                               const DecisionTable& table);

struct RunSummary {
  int completed = 0;
  int skipped = 0;  // already on disk from an earlier partial run
  int failed = 0;
  std::vector<std::string> errors;  // "trial_id: message"
};

// Runs every trial not yet recorded, appending one record line per
// completion. Per-trial failures are collected, not fatal. After the loop
// the ledger file is rebuilt from the record file (obligations are a pure
// function of records plus the session seed), preserving any resolutions
// already made on pending entries. When record_archive is non-null, fresh
// completions are appended to it.
RunSummary run_session(const Session& session, Backend& backend,
                       const RunConfig& config,
                       const std::filesystem::path& records_path,
                       const std::filesystem::path& ledger_path,
                       ReplayArchive* record_archive = nullptr);

// Seed for a trial's randomizing draw, derived so reruns reproduce it.
std::uint64_t derive_trial_seed(std::uint64_t session_seed,
                                const std::string& trial_id);

// Rebuilds ledger entries from recorded trials (incentivized ones only).
std::vector<LedgerEntry> ledger_from_records(
    const std::vector<TrialRecord>& records, std::uint64_t session_seed);

CompletionRequest request_for_trial(const Trial& trial,
                                    const LiveConfig& backend);

}  // namespace mitrust
