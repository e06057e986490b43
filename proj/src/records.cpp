#include "mitrust/records.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "mitrust/errors.hpp"

namespace mitrust {

using nlohmann::json;

std::string record_to_json_line(const TrialRecord& r) {
  json line = {
      {"trial_id", r.trial_id},
      {"wave", wave_number(r.wave)},
      {"condition", r.condition},
      {"endowment_cents", r.endowment_cents},
      {"x_tokens", r.x_tokens},
      {"triple_tokens", r.triple_tokens},
      {"order_index", r.order_index},
      {"prompt", r.prompt},
      {"response_text", r.response_text},
      {"choice", to_string(r.choice)},
      {"rule_id", r.rule_id},
      {"ruleset_version", r.ruleset_version},
      {"backend_id", to_string(r.backend_id)},
      {"latency_ms", r.latency_ms},
      {"retrieved_at", r.retrieved_at},
  };
  return line.dump();
}

TrialRecord record_from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::schema,
                std::string("malformed record line: ") + e.what());
  }
  TrialRecord r;
  try {
    r.trial_id = j.at("trial_id").get<std::string>();
    r.wave = wave_from_number(j.at("wave").get<int>());
    r.condition = j.at("condition").get<std::string>();
    r.endowment_cents = j.at("endowment_cents").get<std::int64_t>();
    r.x_tokens = j.at("x_tokens").get<std::int64_t>();
    r.triple_tokens = j.at("triple_tokens").get<std::int64_t>();
    r.order_index = j.at("order_index").get<int>();
    r.prompt = j.at("prompt").get<std::string>();
    r.response_text = j.at("response_text").get<std::string>();
    r.choice = choice_label_from_string(j.at("choice").get<std::string>());
    r.rule_id = j.at("rule_id").get<std::string>();
    r.ruleset_version = j.at("ruleset_version").get<int>();
    r.backend_id =
        backend_id_from_string(j.at("backend_id").get<std::string>());
    r.latency_ms = j.at("latency_ms").get<std::int64_t>();
    r.retrieved_at = j.at("retrieved_at").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::schema,
                std::string("record line missing field: ") + e.what());
  }
  return r;
}

void write_records(const std::vector<TrialRecord>& records,
                   std::ostream& out) {
  for (const TrialRecord& r : records) out << record_to_json_line(r) << '\n';
}

std::vector<TrialRecord> read_records(std::istream& in) {
  std::vector<TrialRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(record_from_json_line(line));
  }
  return records;
}

std::vector<TrialRecord> read_records_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::storage,
                "cannot open record file " + path.string());
  }
  return read_records(in);
}

}  // namespace mitrust
