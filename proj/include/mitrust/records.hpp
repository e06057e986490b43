#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "mitrust/backend.hpp"
#include "mitrust/classifier.hpp"
#include "mitrust/protocol.hpp"

namespace mitrust {

// One scheduled query and its observed outcome, as persisted to the
// line-delimited record file.
struct TrialRecord {
  std::string trial_id;
  Wave wave{};
  std::string condition;  // condition label
  std::int64_t endowment_cents = 0;
  std::int64_t x_tokens = 0;
  std::int64_t triple_tokens = 0;
  int order_index = 0;
  std::string prompt;
  std::string response_text;
  ChoiceLabel choice = ChoiceLabel::NA;
  std::string rule_id;
  int ruleset_version = kClassifierRulesetVersion;
  BackendId backend_id = BackendId::replay;
  std::int64_t latency_ms = 0;
  std::string retrieved_at;
};

std::string record_to_json_line(const TrialRecord& record);
TrialRecord record_from_json_line(const std::string& line);

void write_records(const std::vector<TrialRecord>& records, std::ostream& out);
std::vector<TrialRecord> read_records(std::istream& in);
std::vector<TrialRecord> read_records_file(const std::filesystem::path& path);

}  // namespace mitrust
