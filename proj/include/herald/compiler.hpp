#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace herald {

struct CompileOutcome {
  bool ok = false;
  std::string diagnostic;  // empty on success

  static CompileOutcome pass() { return {true, {}}; }
  static CompileOutcome fail(std::string diagnostic) { return {false, std::move(diagnostic)}; }
  bool operator==(const CompileOutcome&) const = default;
};

// Elaborates a complete Lean source file. Candidate failures come back as
// CompileOutcome::fail; BackendUnavailable is reserved for a backend that
// cannot answer at all. Implementations are safe to call concurrently.
class CompilerBackend {
 public:
  virtual ~CompilerBackend() = default;
  virtual std::string id() const = 0;
  virtual CompileOutcome check(std::string_view source, std::chrono::milliseconds timeout) = 0;
};

/// Structural stand-in for elaboration: `import`/`open` lines may precede
/// one or more declarations, each with a parseable header, a conclusion and
/// a non-empty body, with balanced brackets.
CompileOutcome structural_check(std::string_view source);

// Scriptable backend: outcomes keyed by digest of the full source, falling
// back to structural_check. `latency` simulates elaboration time; a check
// whose latency exceeds the timeout fails with "timeout".
class MockCompilerBackend final : public CompilerBackend {
 public:
  std::string id() const override { return "mock-compiler"; }
  CompileOutcome check(std::string_view source, std::chrono::milliseconds timeout) override;

  void script(std::string_view source, CompileOutcome outcome);
  void set_latency(std::chrono::milliseconds latency) { latency_ = latency; }
  void set_available(bool available) { available_ = available; }
  long calls() const noexcept { return calls_.load(); }

 private:
  std::mutex mutex_;
  std::map<std::string, CompileOutcome> scripted_;
  std::atomic<std::chrono::milliseconds> latency_{std::chrono::milliseconds(0)};
  std::atomic<bool> available_{true};
  std::atomic<long> calls_{0};
};

// Drives a long-running REPL subprocess over stdin/stdout with one JSON
// object per line:
//   -> {"cmd": "check", "id": n, "source": "..."}
//   <- {"id": n, "ok": bool, "diagnostics": ["..."]}
// Requests are serialised. On timeout the process is killed and restarted
// lazily on the next check.
class ReplBackend final : public CompilerBackend {
 public:
  explicit ReplBackend(std::vector<std::string> argv);
  ~ReplBackend() override;
  ReplBackend(const ReplBackend&) = delete;
  ReplBackend& operator=(const ReplBackend&) = delete;

  std::string id() const override;
  CompileOutcome check(std::string_view source, std::chrono::milliseconds timeout) override;

  long restarts() const noexcept { return restarts_; }

 private:
  void start();
  void stop();
  bool read_line(std::string& line, std::chrono::steady_clock::time_point deadline);

  std::vector<std::string> argv_;
  std::mutex mutex_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  long next_id_ = 0;
  long restarts_ = 0;
  bool started_once_ = false;
};

inline constexpr std::string_view kDefaultHeaderPrelude = "import Mathlib\n";
inline constexpr std::chrono::milliseconds kDefaultCompileTimeout{60'000};

/// Prepends `prelude` to the statement and checks it. timeout_ms must be >= 1.
CompileOutcome compile_check(std::string_view statement_text, CompilerBackend& backend,
                             long timeout_ms = kDefaultCompileTimeout.count(),
                             std::string_view prelude = kDefaultHeaderPrelude);

}  // namespace herald
