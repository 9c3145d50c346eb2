#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <map>
#include <string>

#include "json.hpp"
#include "drxp/models.hpp"
#include "drxp/oracles.hpp"

namespace drxp {

using nlohmann::json;

struct ExternalOracle::Process {
  pid_t pid = -1;
  int to_child = -1;    // our write end
  int from_child = -1;  // our read end
  std::string rdbuf;
  std::map<long long, json> pending;  // responses seen out of order

  ~Process() { close_fds(); }

  void close_fds() {
    if (to_child >= 0) ::close(to_child);
    if (from_child >= 0) ::close(from_child);
    to_child = from_child = -1;
  }
};

ExternalOracle::ExternalOracle(std::string command,
                               std::optional<double> per_query_timeout,
                               std::string model_ref)
    : command_(std::move(command)),
      timeout_(per_query_timeout),
      model_ref_(std::move(model_ref)) {
  if (command_.empty()) throw Error("external oracle: empty command");
  if (timeout_ && !(*timeout_ > 0))
    throw Error("external oracle: timeout must be > 0");
}

ExternalOracle::~ExternalOracle() { shutdown(); }

void ExternalOracle::ensure_running(const OracleQuery&) {
  if (proc_ && proc_->pid > 0) return;
  auto proc = std::make_unique<Process>();
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
    throw OracleError("external oracle: pipe() failed");
  pid_t pid = fork();
  if (pid < 0) throw OracleError("external oracle: fork() failed");
  if (pid == 0) {
    setpgid(0, 0);  // own process group so the whole tree can be killed
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), (char*)nullptr);
    _exit(127);
  }
  setpgid(pid, pid);  // mirror the child's setpgid to close the race
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  proc->pid = pid;
  proc->to_child = in_pipe[1];
  proc->from_child = out_pipe[0];
  proc_ = std::move(proc);
}

void ExternalOracle::shutdown() {
  if (!proc_) return;
  if (proc_->to_child >= 0) {
    ::close(proc_->to_child);  // EOF: protocol asks the tool to exit 0
    proc_->to_child = -1;
  }
  if (proc_->pid > 0) {
    int status = 0;
    // give it a moment, then force
    for (int i = 0; i < 50; ++i) {
      pid_t r = waitpid(proc_->pid, &status, WNOHANG);
      if (r == proc_->pid) {
        proc_->pid = -1;
        break;
      }
      usleep(10000);
    }
    if (proc_->pid > 0) {
      kill(-proc_->pid, SIGKILL);
      waitpid(proc_->pid, &status, 0);
      proc_->pid = -1;
    }
  }
  proc_.reset();
}

namespace {

// Reads one line, honoring an optional absolute deadline. Returns nullopt on
// deadline expiry; throws on EOF or read error.
std::optional<std::string> read_line(
    int fd, std::string& rdbuf,
    const std::optional<std::chrono::steady_clock::time_point>& deadline) {
  for (;;) {
    auto nl = rdbuf.find('\n');
    if (nl != std::string::npos) {
      std::string line = rdbuf.substr(0, nl);
      rdbuf.erase(0, nl + 1);
      return line;
    }
    int wait_ms = -1;
    if (deadline) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                      *deadline - std::chrono::steady_clock::now())
                      .count();
      if (left <= 0) return std::nullopt;
      wait_ms = static_cast<int>(left);
    }
    struct pollfd pfd{fd, POLLIN, 0};
    int pr = poll(&pfd, 1, wait_ms);
    if (pr == 0) return std::nullopt;
    if (pr < 0) {
      if (errno == EINTR) continue;
      throw OracleError("external oracle: poll() failed");
    }
    char buf[4096];
    ssize_t n = ::read(fd, buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw OracleError("external oracle: read() failed");
    }
    if (n == 0)
      throw OracleError("external oracle: process closed stdout mid-query");
    rdbuf.append(buf, static_cast<size_t>(n));
  }
}

void write_all(int fd, const std::string& s) {
  size_t off = 0;
  while (off < s.size()) {
    ssize_t n = ::write(fd, s.data() + off, s.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw OracleError("external oracle: write() failed (process gone?)");
    }
    off += static_cast<size_t>(n);
  }
}

}  // namespace

OracleAnswer ExternalOracle::find(const OracleQuery& query) {
  ensure_running(query);
  const long long id = next_id_++;

  json req;
  req["id"] = id;
  req["epsilon"] = query.budget.epsilon;
  req["p"] = query.budget.norm.str();
  req["v"] = query.problem.v();
  req["label"] = query.problem.label();
  std::vector<int> fixed1;  // wire format is 1-based
  for (int i : query.fixed) fixed1.push_back(i + 1);
  req["fixed"] = fixed1;
  req["model_ref"] = model_ref_;

  std::optional<std::chrono::steady_clock::time_point> deadline;
  if (timeout_)
    deadline = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(*timeout_));

  try {
    write_all(proc_->to_child, req.dump() + "\n");
  } catch (const OracleError&) {
    shutdown();
    throw;
  }

  json resp;
  for (;;) {
    auto it = proc_->pending.find(id);
    if (it != proc_->pending.end()) {
      resp = std::move(it->second);
      proc_->pending.erase(it);
      break;
    }
    std::optional<std::string> line;
    try {
      line = read_line(proc_->from_child, proc_->rdbuf, deadline);
    } catch (const OracleError&) {
      shutdown();
      throw;
    }
    if (!line) {
      // deadline passed: kill the stuck process and report Timeout
      if (proc_ && proc_->pid > 0) {
        kill(-proc_->pid, SIGKILL);
        int status = 0;
        waitpid(proc_->pid, &status, 0);
        proc_->pid = -1;
      }
      proc_.reset();
      return {AnswerStatus::Timeout, std::nullopt, 0.0};
    }
    if (line->empty()) continue;
    json j;
    try {
      j = json::parse(*line);
    } catch (const json::exception& e) {
      shutdown();
      throw OracleError(std::string("external oracle: bad response line: ") +
                        e.what());
    }
    if (!j.contains("id") || !j.contains("status")) {
      shutdown();
      throw OracleError("external oracle: response missing id/status");
    }
    long long rid = j["id"].get<long long>();
    if (rid == id) {
      resp = std::move(j);
      break;
    }
    proc_->pending[rid] = std::move(j);
  }

  const std::string status = resp["status"].get<std::string>();
  if (status == "robust") return {AnswerStatus::Robust, std::nullopt, 0.0};
  if (status == "timeout") return {AnswerStatus::Timeout, std::nullopt, 0.0};
  if (status != "adv") {
    shutdown();
    throw OracleError("external oracle: unknown status '" + status + "'");
  }
  if (!resp.contains("witness") || !resp["witness"].is_array()) {
    shutdown();
    throw OracleError("external oracle: adv response lacks a witness");
  }
  Point w = resp["witness"].get<Point>();
  if (static_cast<int>(w.size()) != query.problem.num_features()) {
    shutdown();
    throw OracleError("external oracle: witness has wrong dimension");
  }
  for (int i : query.fixed)
    if (w[static_cast<size_t>(i)] != query.problem.v()[static_cast<size_t>(i)])
      throw OracleError(
          "external oracle: witness moved a fixed feature (soundness)");
  if (!is_adversarial(w, query.problem, query.budget))
    throw OracleError(
        "external oracle: witness is not adversarial (soundness)");
  OracleAnswer ans;
  ans.status = AnswerStatus::AdversarialFound;
  ans.witness = std::move(w);
  return ans;
}

}  // namespace drxp
