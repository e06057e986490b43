#include "mitrust/runner.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "mitrust/classifier.hpp"
#include "mitrust/errors.hpp"
#include "mitrust/rng.hpp"

namespace mitrust {

using nlohmann::json;

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::live: return "live";
    case RunMode::replay: return "replay";
    case RunMode::scripted: return "scripted";
  }
  return "scripted";
}

RunMode run_mode_from_string(std::string_view text) {
  if (text == "live") return RunMode::live;
  if (text == "replay") return RunMode::replay;
  if (text == "scripted") return RunMode::scripted;
  throw Error(ErrorKind::usage, "unknown mode '" + std::string(text) + "'");
}

DecisionTable DecisionTable::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::schema,
                std::string("decision table is not valid JSON: ") + e.what());
  }
  DecisionTable table;
  if (j.contains("default")) {
    table.default_text_ = j["default"].get<std::string>();
    table.has_default_ = true;
  }
  if (j.contains("conditions")) {
    for (const auto& [label, value] : j["conditions"].items()) {
      if (value.is_string()) {
        table.uniform_[label] = value.get<std::string>();
      } else if (value.is_array()) {
        table.per_index_[label] = value.get<std::vector<std::string>>();
      } else {
        throw Error(ErrorKind::schema,
                    "decision table condition '" + label +
                        "' must be a string or an array of strings");
      }
    }
  }
  return table;
}

DecisionTable DecisionTable::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::storage,
                "cannot open decision table " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

DecisionTable DecisionTable::from_counts(
    Wave wave, const std::map<std::string, CountSpec>& counts,
    std::size_t grid_size, const std::string& na_text) {
  DecisionTable table;
  for (const Condition& condition : wave_conditions(wave)) {
    const std::string label = condition_label(condition);
    auto it = counts.find(label);
    if (it == counts.end())
      throw Error(ErrorKind::domain, "no counts given for " + label);
    const CountSpec& spec = it->second;
    if (spec.a + spec.b + spec.na != static_cast<std::int64_t>(grid_size))
      throw Error(ErrorKind::domain,
                  label + ": counts must sum to the grid size");

    // Spread each category evenly over the grid (sorted fractional
    // positions) so no category clusters at one end of the stakes.
    struct Slot {
      double key;
      int category;  // 0 = A, 1 = B, 2 = NA
    };
    std::vector<Slot> slots;
    slots.reserve(grid_size);
    const std::int64_t per_category[3] = {spec.a, spec.b, spec.na};
    for (int category = 0; category < 3; ++category) {
      const std::int64_t count = per_category[category];
      for (std::int64_t k = 0; k < count; ++k) {
        slots.push_back({(static_cast<double>(k) + 0.5) /
                             static_cast<double>(count),
                         category});
      }
    }
    std::stable_sort(slots.begin(), slots.end(),
                     [](const Slot& lhs, const Slot& rhs) {
                       if (lhs.key != rhs.key) return lhs.key < rhs.key;
                       return lhs.category < rhs.category;
                     });

    std::vector<std::string> texts;
    texts.reserve(grid_size);
    for (const Slot& slot : slots) {
      texts.push_back(slot.category == 0   ? "A"
                      : slot.category == 1 ? "B"
                                           : na_text);
    }
    table.per_index_[label] = std::move(texts);
  }
  return table;
}

std::string DecisionTable::to_json_text() const {
  json conditions = json::object();
  for (const auto& [label, texts] : per_index_) conditions[label] = texts;
  for (const auto& [label, text] : uniform_) conditions[label] = text;
  json j = {{"conditions", conditions}};
  if (has_default_) j["default"] = default_text_;
  return j.dump(2);
}

std::string DecisionTable::text_for(const std::string& condition_label,
                                    std::size_t grid_index) const {
  if (auto it = per_index_.find(condition_label); it != per_index_.end()) {
    if (grid_index >= it->second.size())
      throw Error(ErrorKind::lookup,
                  condition_label + ": grid index " +
                      std::to_string(grid_index) + " exceeds scripted list");
    return it->second[grid_index];
  }
  if (auto it = uniform_.find(condition_label); it != uniform_.end())
    return it->second;
  if (has_default_) return default_text_;
  throw Error(ErrorKind::lookup,
              "decision table has no entry for " + condition_label);
}

Session make_session(const RunConfig& config) {
  const EndowmentGrid grid =
      build_grid(config.q1_cents, config.q3_cents, config.step_cents);
  return build_session(grid, config.wave, config.seed,
                       TokenRate{config.rate_usd_per_1000},
                       config.comma_grouping);
}

CompletionRequest request_for_trial(const Trial& trial,
                                    const LiveConfig& backend) {
  return CompletionRequest{backend.model_name, trial.prompt,
                           backend.temperature, backend.max_output_tokens};
}

std::unique_ptr<Backend> make_scripted_backend(const RunConfig& config,
                                               const Session& session,
                                               const DecisionTable& table) {
  // Grid index = rank of the trial's endowment within its condition.
  std::unordered_map<std::string, std::string> texts;
  const std::int64_t q1 = config.q1_cents;
  const std::int64_t step = config.step_cents;
  for (const Trial& trial : session.trials) {
    const auto index =
        static_cast<std::size_t>((trial.endowment_cents - q1) / step);
    const std::string text =
        table.text_for(condition_label(trial.condition), index);
    texts[request_fingerprint(request_for_trial(trial, config.backend))] =
        text;
  }
  return std::make_unique<ScriptedBackend>(std::move(texts));
}

std::unique_ptr<Backend> make_backend(const RunConfig& config,
                                      const Session& session) {
  switch (config.mode) {
    case RunMode::live:
      return std::make_unique<LiveBackend>(config.backend);
    case RunMode::replay: {
      if (config.archive_path.empty())
        throw Error(ErrorKind::usage, "replay mode requires an archive path");
      return std::make_unique<ReplayBackend>(
          ReplayArchive::load(config.archive_path));
    }
    case RunMode::scripted: {
      if (config.archive_path.empty())
        throw Error(ErrorKind::usage,
                    "scripted mode requires a decision table path");
      return make_scripted_backend(config, session,
                                   DecisionTable::from_file(config.archive_path));
    }
  }
  throw Error(ErrorKind::usage, "unknown run mode");
}

std::uint64_t derive_trial_seed(std::uint64_t session_seed,
                                const std::string& trial_id) {
  return fnv1a64(trial_id) ^ (session_seed * 0x9e3779b97f4a7c15ULL);
}

std::vector<LedgerEntry> ledger_from_records(
    const std::vector<TrialRecord>& records, std::uint64_t session_seed) {
  std::vector<LedgerEntry> entries;
  for (const TrialRecord& record : records) {
    const auto condition = parse_condition_label(record.condition);
    if (!condition)
      throw Error(ErrorKind::schema,
                  "record has unknown condition " + record.condition);
    if (condition->incentive != Incentive::real) continue;

    Trial trial;
    trial.trial_id = record.trial_id;
    trial.condition = *condition;
    trial.endowment_cents = record.endowment_cents;
    trial.x_tokens = record.x_tokens;
    trial.triple_tokens = record.triple_tokens;
    entries.push_back(settle(trial, record.choice,
                             derive_trial_seed(session_seed, record.trial_id)));
  }
  return entries;
}

RunSummary run_session(const Session& session, Backend& backend,
                       const RunConfig& config,
                       const std::filesystem::path& records_path,
                       const std::filesystem::path& ledger_path,
                       ReplayArchive* record_archive) {
  RunSummary summary;

  std::set<std::string> done;
  if (std::filesystem::exists(records_path)) {
    for (const TrialRecord& record : read_records_file(records_path)) {
      done.insert(record.trial_id);
    }
  }

  std::ofstream records_out(records_path, std::ios::app);
  if (!records_out)
    throw Error(ErrorKind::storage,
                "cannot open record file " + records_path.string());

  for (const Trial& trial : session.trials) {
    if (done.contains(trial.trial_id)) {
      ++summary.skipped;
      continue;
    }
    const CompletionRequest request =
        request_for_trial(trial, config.backend);

    CompletionResult result;
    try {
      result = backend.complete(request);
    } catch (const Error& e) {
      ++summary.failed;
      summary.errors.push_back(trial.trial_id + ": " + e.what());
      continue;
    }

    if (record_archive && !record_archive->contains(request)) {
      record_archive->record(request, result);
    }

    const Classification classification = classify_detail(result.text);
    TrialRecord record;
    record.trial_id = trial.trial_id;
    record.wave = session.wave;
    record.condition = condition_label(trial.condition);
    record.endowment_cents = trial.endowment_cents;
    record.x_tokens = trial.x_tokens;
    record.triple_tokens = trial.triple_tokens;
    record.order_index = trial.order_index;
    record.prompt = trial.prompt;
    record.response_text = result.text;
    record.choice = classification.label;
    record.rule_id = classification.rule_id;
    record.ruleset_version = kClassifierRulesetVersion;
    record.backend_id = result.backend_id;
    record.latency_ms = result.latency_ms;
    record.retrieved_at = result.retrieved_at;

    records_out << record_to_json_line(record) << '\n';
    records_out.flush();
    if (!records_out)
      throw Error(ErrorKind::storage, "record write failed");
    ++summary.completed;
  }
  records_out.close();

  // The ledger is a pure function of the records and the session seed;
  // rebuilding it keeps resumed and uninterrupted runs identical. Earlier
  // resolutions of pending entries are carried over.
  std::map<std::string, std::int64_t> prior_resolutions;
  if (std::filesystem::exists(ledger_path)) {
    for (const LedgerEntry& entry : read_ledger_file(ledger_path)) {
      if (entry.kind == ObligationKind::pending_human && entry.resolved &&
          entry.resolution_tokens) {
        prior_resolutions[entry.trial_id] = *entry.resolution_tokens;
      }
    }
  }
  std::vector<LedgerEntry> entries =
      ledger_from_records(read_records_file(records_path), session.seed);
  for (LedgerEntry& entry : entries) {
    auto it = prior_resolutions.find(entry.trial_id);
    if (it != prior_resolutions.end() && !entry.resolved) {
      resolve_pending(entry, it->second);
    }
  }
  std::ofstream ledger_out(ledger_path, std::ios::trunc);
  if (!ledger_out)
    throw Error(ErrorKind::storage,
                "cannot open ledger file " + ledger_path.string());
  write_ledger(entries, ledger_out);

  return summary;
}

}  // namespace mitrust
