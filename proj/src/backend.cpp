#include "mitrust/backend.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "mitrust/errors.hpp"
#include "mitrust/rng.hpp"

namespace mitrust {

using nlohmann::json;

std::string to_string(BackendId id) {
  switch (id) {
    case BackendId::live: return "live";
    case BackendId::replay: return "replay";
    case BackendId::scripted: return "scripted";
  }
  return "replay";
}

BackendId backend_id_from_string(std::string_view text) {
  if (text == "live") return BackendId::live;
  if (text == "replay") return BackendId::replay;
  if (text == "scripted") return BackendId::scripted;
  throw Error(ErrorKind::schema,
              "unknown backend id '" + std::string(text) + "'");
}

namespace {

// Shortest round-trip decimal for a double, so that the fingerprint of a
// request does not depend on formatting habits.
std::string canonical_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

}  // namespace

std::string request_fingerprint(const CompletionRequest& request) {
  std::string canonical;
  canonical.reserve(request.model_name.size() + request.prompt.size() + 32);
  canonical += request.model_name;
  canonical += '\x1f';
  canonical += request.prompt;
  canonical += '\x1f';
  canonical += canonical_double(request.temperature);
  canonical += '\x1f';
  canonical += std::to_string(request.max_output_tokens);
  return hex64(fnv1a64(canonical));
}

void ReplayArchive::record(const CompletionRequest& request,
                           const CompletionResult& result) {
  const std::string fp = request_fingerprint(request);
  std::lock_guard lock(*mutex_);
  if (entries_.contains(fp)) {
    throw Error(ErrorKind::state,
                "archive already holds fingerprint " + fp +
                    " (the archive is append-only)");
  }
  Entry entry{request, result.text, result.retrieved_at};
  if (sink_) {
    *sink_ << entry_line(fp, entry) << '\n';
    sink_->flush();
    if (!*sink_) throw Error(ErrorKind::storage, "archive write failed");
  }
  entries_.emplace(fp, std::move(entry));
}

CompletionResult ReplayArchive::lookup(const CompletionRequest& request) const {
  const std::string fp = request_fingerprint(request);
  std::lock_guard lock(*mutex_);
  auto it = entries_.find(fp);
  // The stored request fields are re-checked so a hash collision can never
  // silently answer with the wrong completion.
  if (it == entries_.end() || it->second.request.prompt != request.prompt ||
      it->second.request.model_name != request.model_name) {
    throw Error(ErrorKind::archive_miss,
                "archive has no entry for fingerprint " + fp);
  }
  CompletionResult result;
  result.text = it->second.text;
  result.latency_ms = 0;
  result.backend_id = BackendId::replay;
  result.retrieved_at = it->second.retrieved_at;
  return result;
}

bool ReplayArchive::contains(const CompletionRequest& request) const {
  std::lock_guard lock(*mutex_);
  return entries_.contains(request_fingerprint(request));
}

std::size_t ReplayArchive::size() const {
  std::lock_guard lock(*mutex_);
  return entries_.size();
}

std::string ReplayArchive::entry_line(const std::string& fingerprint,
                                      const Entry& entry) {
  json line = {
      {"fingerprint", fingerprint},
      {"model_name", entry.request.model_name},
      {"prompt", entry.request.prompt},
      {"temperature", entry.request.temperature},
      {"max_output_tokens", entry.request.max_output_tokens},
      {"text", entry.text},
      {"retrieved_at", entry.retrieved_at},
  };
  return line.dump();
}

ReplayArchive ReplayArchive::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::storage, "cannot open archive " + path.string());
  ReplayArchive archive;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw Error(ErrorKind::schema, "archive line " + std::to_string(line_no) +
                                         " is not valid JSON");
    }
    Entry entry;
    entry.request.model_name = j.at("model_name").get<std::string>();
    entry.request.prompt = j.at("prompt").get<std::string>();
    entry.request.temperature = j.at("temperature").get<double>();
    entry.request.max_output_tokens = j.at("max_output_tokens").get<int>();
    entry.text = j.at("text").get<std::string>();
    entry.retrieved_at = j.value("retrieved_at", "");
    const std::string fp = request_fingerprint(entry.request);
    if (!archive.entries_.emplace(fp, std::move(entry)).second) {
      throw Error(ErrorKind::schema,
                  "archive holds duplicate fingerprint " + fp);
    }
  }
  return archive;
}

ReplayArchive ReplayArchive::open_for_append(
    const std::filesystem::path& path) {
  ReplayArchive archive;
  if (std::filesystem::exists(path)) archive = load(path);
  auto sink = std::make_unique<std::ofstream>(path, std::ios::app);
  if (!*sink)
    throw Error(ErrorKind::storage,
                "cannot open archive for append: " + path.string());
  archive.sink_ = std::move(sink);
  return archive;
}

void ReplayArchive::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw Error(ErrorKind::storage, "cannot write archive " + path.string());
  std::lock_guard lock(*mutex_);
  for (const auto& [fp, entry] : entries_) {
    out << entry_line(fp, entry) << '\n';
  }
}

CompletionResult ReplayBackend::complete(const CompletionRequest& request) {
  return archive_.lookup(request);
}

CompletionResult ScriptedBackend::complete(const CompletionRequest& request) {
  const std::string fp = request_fingerprint(request);
  auto it = texts_.find(fp);
  if (it == texts_.end()) {
    throw Error(ErrorKind::archive_miss,
                "decision table has no entry for fingerprint " + fp);
  }
  CompletionResult result;
  result.text = it->second;
  result.latency_ms = 0;
  result.backend_id = BackendId::scripted;
  // Fixed timestamp: scripted runs are synthetic and must replay
  // byte-identically.
  result.retrieved_at = "1970-01-01T00:00:00Z";
  return result;
}

TokenBucket::TokenBucket(ThrottlePolicy policy) : policy_(policy) {
  if (policy_.requests_per_minute <= 0.0)
    throw Error(ErrorKind::domain, "requests_per_minute must be positive");
  if (policy_.burst < 1.0)
    throw Error(ErrorKind::domain, "burst must be at least 1");
  tokens_ = policy_.burst;
}

std::optional<TokenBucket::duration> TokenBucket::acquire(
    clock::time_point now) {
  std::lock_guard lock(*mutex_);
  const double rate_per_sec = policy_.requests_per_minute / 60.0;
  if (last_refill_) {
    const double elapsed = duration(now - *last_refill_).count();
    if (elapsed > 0.0) {
      tokens_ = std::min(policy_.burst, tokens_ + elapsed * rate_per_sec);
    }
  }
  last_refill_ = now;
  if (tokens_ + 1e-9 >= 1.0) {
    tokens_ -= 1.0;
    return std::nullopt;
  }
  const double need = 1.0 - tokens_;
  // Round up to the next millisecond so waiting the returned amount always
  // suffices.
  const double wait_s =
      std::ceil(need / rate_per_sec * 1000.0) / 1000.0;
  return duration(wait_s);
}

std::string now_utc_iso8601() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

namespace {

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorKind::usage, "endpoint_url must include a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool is_transient_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

}  // namespace

LiveBackend::LiveBackend(LiveConfig config)
    : config_(std::move(config)),
      bucket_(ThrottlePolicy{config_.requests_per_minute, 1.0}) {
  const char* key = std::getenv(kApiKeyEnvVar);
  if (key == nullptr || *key == '\0') {
    throw Error(ErrorKind::usage,
                std::string(kApiKeyEnvVar) +
                    " must be set in the environment for live mode");
  }
  api_key_ = key;
  const ParsedUrl parsed = parse_endpoint(config_.endpoint_url);
  host_ = parsed.base;
  path_ = parsed.path;
}

LiveBackend::~LiveBackend() = default;

CompletionResult LiveBackend::complete(const CompletionRequest& request) {
  // Client-side pacing: the service rate-limits token purchases, so stay
  // under the configured request budget.
  for (;;) {
    auto wait = bucket_.acquire(TokenBucket::clock::now());
    if (!wait) break;
    std::this_thread::sleep_for(*wait);
  }

  const json body = {
      {"model", request.model_name},
      {"prompt", request.prompt},
      {"temperature", request.temperature},
      {"max_tokens", request.max_output_tokens},
  };
  const std::string payload = body.dump();

  std::mt19937_64 jitter_rng(std::random_device{}());
  std::string last_failure = "no attempts made";
  const int attempts = std::max(1, config_.max_retries);

  for (int attempt = 1; attempt <= attempts; ++attempt) {
    last_attempts_ = attempt;
    httplib::Client client(host_);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    httplib::Headers headers = {
        {"Authorization", "Bearer " + api_key_},
    };

    const auto started = std::chrono::steady_clock::now();
    httplib::Result res =
        client.Post(path_, headers, payload, "application/json");
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);

    if (res && res->status == 200) {
      json reply;
      try {
        reply = json::parse(res->body);
      } catch (const json::parse_error&) {
        throw Error(ErrorKind::request,
                    "service returned unparseable body (status 200)");
      }
      if (!reply.contains("choices") || reply["choices"].empty() ||
          !reply["choices"][0].contains("text")) {
        throw Error(ErrorKind::request,
                    "service reply is missing choices[0].text");
      }
      CompletionResult result;
      result.text = reply["choices"][0]["text"].get<std::string>();
      result.latency_ms = elapsed.count();
      result.backend_id = BackendId::live;
      result.retrieved_at = now_utc_iso8601();
      return result;
    }

    if (res && !is_transient_status(res->status)) {
      throw Error(ErrorKind::request,
                  "service returned HTTP " + std::to_string(res->status));
    }

    last_failure = res ? "HTTP " + std::to_string(res->status)
                       : "transport: " + httplib::to_string(res.error());
    if (attempt == attempts) break;

    // Exponential backoff with jitter.
    const double base = static_cast<double>(config_.backoff_initial_ms) *
                        static_cast<double>(1LL << std::min(attempt - 1, 20));
    const double capped =
        std::min(base, static_cast<double>(config_.backoff_max_ms));
    const auto jitter = config_.jitter_ms > 0
                            ? bounded_uint(jitter_rng, static_cast<std::uint64_t>(
                                                           config_.jitter_ms))
                            : 0;
    const auto delay = std::chrono::milliseconds(
        static_cast<std::int64_t>(capped) + static_cast<std::int64_t>(jitter));
    std::clog << "[backend] attempt " << attempt << "/" << attempts
              << " failed (" << last_failure << "); retrying in "
              << delay.count() << " ms\n";
    std::this_thread::sleep_for(delay);
  }

  throw Error(ErrorKind::transport, "request failed after " +
                                        std::to_string(attempts) +
                                        " attempts; last error: " +
                                        last_failure);
}

}  // namespace mitrust
