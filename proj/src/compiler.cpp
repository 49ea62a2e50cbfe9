#include "herald/compiler.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include <json.hpp>

#include "herald/corpus.hpp"
#include "herald/digest.hpp"
#include "herald/error.hpp"
#include "herald/text.hpp"

namespace herald {

using nlohmann::json;

namespace {

bool balanced(std::string_view s) {
  std::string stack;
  for (char c : s) {
    if (c == '(' || c == '[' || c == '{') stack.push_back(c);
    if (c == ')' || c == ']' || c == '}') {
      const char open = c == ')' ? '(' : c == ']' ? '[' : '{';
      if (stack.empty() || stack.back() != open) return false;
      stack.pop_back();
    }
  }
  return stack.empty();
}

std::string lines_of(std::string_view source, LineSpan span) {
  const auto lines = split(source, '\n');
  std::string out;
  for (int l = span.start; l <= span.end && l <= static_cast<int>(lines.size()); ++l) {
    out += lines[l - 1];
    out += '\n';
  }
  return out;
}

}  // namespace

CompileOutcome structural_check(std::string_view source) {
  const auto scan = scan_declarations(source, "<candidate>");
  if (!scan.diagnostics.empty()) return CompileOutcome::fail(scan.diagnostics.front());
  if (scan.declarations.empty()) return CompileOutcome::fail("no declaration found");
  for (const auto& d : scan.declarations) {
    const auto where = "line " + std::to_string(d.line_span.start) + ": ";
    const auto parts = parse_header(d.signature);
    if (!parts) return CompileOutcome::fail(where + "unparseable declaration header");
    if (!balanced(d.signature)) return CompileOutcome::fail(where + "unbalanced brackets");
    const bool needs_type = d.kind == DeclKind::Theorem || d.kind == DeclKind::Opaque;
    if (needs_type && trim(parts->conclusion).empty()) {
      return CompileOutcome::fail(where + "unexpected token ':='; expected term");
    }
    const auto text = lines_of(source, d.line_span);
    const auto at = text.find(d.signature);
    auto rest = trim(at == std::string::npos ? std::string_view() :
                                               std::string_view(text).substr(at + d.signature.size()));
    if (rest.starts_with(":=")) {
      const auto body = trim(std::string_view(rest).substr(2));
      if (body.empty()) return CompileOutcome::fail(where + "expected term after ':='");
      if (body == "by") return CompileOutcome::fail(where + "expected tactic sequence after 'by'");
      if (!balanced(body)) return CompileOutcome::fail(where + "unbalanced brackets in body");
    } else if (needs_type) {
      return CompileOutcome::fail(where + "expected ':=' or 'where'");
    }
  }
  return CompileOutcome::pass();
}

CompileOutcome MockCompilerBackend::check(std::string_view source,
                                          std::chrono::milliseconds timeout) {
  ++calls_;
  if (!available_) throw BackendUnavailable("mock compiler marked unavailable");
  const auto latency = latency_.load();
  if (latency.count() > 0) {
    std::this_thread::sleep_for(std::min(latency, timeout));
    if (latency > timeout) return CompileOutcome::fail("timeout");
  }
  {
    std::lock_guard lock(mutex_);
    if (const auto it = scripted_.find(digest(source)); it != scripted_.end()) return it->second;
  }
  return structural_check(source);
}

void MockCompilerBackend::script(std::string_view source, CompileOutcome outcome) {
  std::lock_guard lock(mutex_);
  scripted_[digest(source)] = std::move(outcome);
}

ReplBackend::ReplBackend(std::vector<std::string> argv) : argv_(std::move(argv)) {
  if (argv_.empty()) throw InvalidInput("REPL command is empty");
}

ReplBackend::~ReplBackend() { stop(); }

std::string ReplBackend::id() const { return "repl:" + join(argv_, " "); }

void ReplBackend::start() {
  // A dead child must surface as EPIPE, not terminate us.
  signal(SIGPIPE, SIG_IGN);
  int in_pipe[2];
  int out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) throw BackendUnavailable(std::string("pipe: ") + std::strerror(errno));
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw BackendUnavailable(std::string("pipe: ") + std::strerror(errno));
  }
  std::vector<char*> args;
  for (auto& a : argv_) args.push_back(a.data());
  args.push_back(nullptr);

  const pid_t pid = fork();
  if (pid < 0) throw BackendUnavailable(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  buffer_.clear();
  if (started_once_) ++restarts_;
  started_once_ = true;
}

void ReplBackend::stop() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
  }
  pid_ = -1;
}

bool ReplBackend::read_line(std::string& line, std::chrono::steady_clock::time_point deadline) {
  for (;;) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return true;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return false;
    pollfd pfd{from_child_, POLLIN, 0};
    const int r = poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1 << 30)));
    if (r < 0 && errno == EINTR) continue;
    if (r < 0) throw BackendUnavailable(std::string("poll: ") + std::strerror(errno));
    if (r == 0) return false;
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      stop();
      throw BackendUnavailable("REPL process exited");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

CompileOutcome ReplBackend::check(std::string_view source, std::chrono::milliseconds timeout) {
  std::lock_guard lock(mutex_);
  if (pid_ < 0) start();
  const long id = next_id_++;
  const auto request =
      json{{"cmd", "check"}, {"id", id}, {"source", std::string(source)}}.dump() + "\n";

  std::size_t written = 0;
  while (written < request.size()) {
    const ssize_t n = write(to_child_, request.data() + written, request.size() - written);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      stop();
      throw BackendUnavailable("REPL closed its input");
    }
    written += static_cast<std::size_t>(n);
  }

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::string line;
  for (;;) {
    if (!read_line(line, deadline)) {
      stop();
      return CompileOutcome::fail("timeout");
    }
    json reply;
    try {
      reply = json::parse(line);
    } catch (const json::parse_error&) {
      continue;  // stray output from the tool, not a reply
    }
    if (!reply.is_object() || reply.value("id", -1L) != id) continue;
    if (reply.value("ok", false)) return CompileOutcome::pass();
    std::vector<std::string> diags;
    if (reply.contains("diagnostics") && reply["diagnostics"].is_array()) {
      for (const auto& d : reply["diagnostics"]) diags.push_back(d.is_string() ? d.get<std::string>() : d.dump());
    }
    return CompileOutcome::fail(diags.empty() ? std::string("elaboration failed") : join(diags, "\n"));
  }
}

CompileOutcome compile_check(std::string_view statement_text, CompilerBackend& backend,
                             long timeout_ms, std::string_view prelude) {
  if (timeout_ms < 1) throw InvalidInput("timeout_ms must be >= 1");
  std::string source(prelude);
  if (!source.empty() && source.back() != '\n') source += '\n';
  source += statement_text;
  if (source.empty() || source.back() != '\n') source += '\n';
  return backend.check(source, std::chrono::milliseconds(timeout_ms));
}

}  // namespace herald
