#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

namespace mitrust {

// Uniform completion interface over a live HTTPS service, a deterministic
// record/replay store, and a scripted decision table. Experiments re-run
// without the network; tests never require it.

struct CompletionRequest {
  std::string model_name;
  std::string prompt;
  double temperature = 0.0;
  int max_output_tokens = 16;
};

enum class BackendId { live, replay, scripted };

std::string to_string(BackendId id);
BackendId backend_id_from_string(std::string_view text);

struct CompletionResult {
  std::string text;
  std::int64_t latency_ms = 0;
  BackendId backend_id = BackendId::replay;
  std::string retrieved_at;  // ISO-8601 UTC
};

// Stable digest of exactly the four request fields. The temperature is
// canonicalized through shortest round-trip formatting so 0.0 and 0 agree.
std::string request_fingerprint(const CompletionRequest& request);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual CompletionResult complete(const CompletionRequest& request) = 0;
  virtual BackendId id() const = 0;
};

// Append-only archive of prompt -> completion pairs keyed by fingerprint.
// Duplicate fingerprints are rejected so the provenance trail stays stable.
// Readers may inspect concurrently with the single writer.
class ReplayArchive {
 public:
  struct Entry {
    CompletionRequest request;
    std::string text;
    std::string retrieved_at;
  };

  ReplayArchive() = default;
  ReplayArchive(ReplayArchive&&) = default;
  ReplayArchive& operator=(ReplayArchive&&) = default;

  // Appends; throws a state error on a duplicate fingerprint. When the
  // archive is attached to a file, the entry is flushed immediately.
  void record(const CompletionRequest& request, const CompletionResult& result);

  // Exact-match lookup; throws an archive-miss error naming the fingerprint.
  CompletionResult lookup(const CompletionRequest& request) const;

  bool contains(const CompletionRequest& request) const;
  std::size_t size() const;

  static ReplayArchive load(const std::filesystem::path& path);
  // Loads if present, then keeps the file open for appends.
  static ReplayArchive open_for_append(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  static std::string entry_line(const std::string& fingerprint,
                                const Entry& entry);

  std::map<std::string, Entry> entries_;
  std::unique_ptr<std::ofstream> sink_;
  std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
};

class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(ReplayArchive archive) : archive_(std::move(archive)) {}

  CompletionResult complete(const CompletionRequest& request) override;
  BackendId id() const override { return BackendId::replay; }
  const ReplayArchive& archive() const { return archive_; }

 private:
  ReplayArchive archive_;
};

// Answers from a fingerprint -> text map prepared ahead of the run.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::unordered_map<std::string, std::string> texts)
      : texts_(std::move(texts)) {}

  CompletionResult complete(const CompletionRequest& request) override;
  BackendId id() const override { return BackendId::scripted; }

 private:
  std::unordered_map<std::string, std::string> texts_;
};

struct ThrottlePolicy {
  double requests_per_minute = 60.0;  // > 0
  double burst = 1.0;
};

// Token bucket over an injected clock: never permits more than the
// configured rate over any window (beyond the initial burst).
class TokenBucket {
 public:
  using clock = std::chrono::steady_clock;
  using duration = std::chrono::duration<double>;

  explicit TokenBucket(ThrottlePolicy policy);

  // nullopt: permitted (one token consumed). Otherwise the caller must wait
  // at least the returned duration and ask again.
  std::optional<duration> acquire(clock::time_point now);

 private:
  ThrottlePolicy policy_;
  double tokens_;
  std::optional<clock::time_point> last_refill_;
  std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
};

struct LiveConfig {
  std::string endpoint_url = "https://api.openai.com/v1/completions";
  std::string model_name = "text-davinci-003";
  double temperature = 0.0;
  int max_output_tokens = 16;
  double requests_per_minute = 60.0;
  int max_retries = 5;  // total attempts
  int backoff_initial_ms = 500;
  int backoff_max_ms = 8000;
  int jitter_ms = 250;
};

inline constexpr const char* kApiKeyEnvVar = "MI_API_KEY";

// HTTPS POST of {model, prompt, temperature, max_tokens}; the reply text is
// the first element of the service's choices array. The credential comes
// only from MI_API_KEY. Transient failures (transport, 429, 5xx) are
// retried with exponential backoff and jitter up to max_retries attempts;
// other 4xx surface immediately as request errors.
class LiveBackend : public Backend {
 public:
  explicit LiveBackend(LiveConfig config);
  ~LiveBackend() override;

  CompletionResult complete(const CompletionRequest& request) override;
  BackendId id() const override { return BackendId::live; }

  // Attempts used by the most recent complete() call.
  int last_attempts() const { return last_attempts_; }

 private:
  LiveConfig config_;
  std::string api_key_;
  std::string host_;  // scheme://host[:port]
  std::string path_;
  TokenBucket bucket_;
  int last_attempts_ = 0;
};

std::string now_utc_iso8601();

}  // namespace mitrust
