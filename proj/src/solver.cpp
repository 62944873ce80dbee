#include "minivc/solver.hpp"

#include <cctype>
#include <chrono>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace minivc {

namespace {

void setNonblock(int fd) {
  fcntl(fd, F_SETFL, fcntl(fd, F_GETFL, 0) | O_NONBLOCK);
}

int64_t nowMs() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

} // namespace

SolverOutput run_solver(const std::string &path, const std::string &input,
                        int hardTimeoutMs) {
  SolverOutput r;
  int inPipe[2], outPipe[2], errPipe[2];
  if (pipe(inPipe) || pipe(outPipe) || pipe(errPipe)) {
    r.spawnFailed = true;
    return r;
  }
  pid_t pid = fork();
  if (pid < 0) {
    r.spawnFailed = true;
    return r;
  }
  if (pid == 0) {
    dup2(inPipe[0], 0);
    dup2(outPipe[1], 1);
    dup2(errPipe[1], 2);
    close(inPipe[0]); close(inPipe[1]);
    close(outPipe[0]); close(outPipe[1]);
    close(errPipe[0]); close(errPipe[1]);
    execlp(path.c_str(), path.c_str(), "-in", (char *)nullptr);
    _exit(127);
  }
  close(inPipe[0]);
  close(outPipe[1]);
  close(errPipe[1]);
  signal(SIGPIPE, SIG_IGN);
  setNonblock(inPipe[1]);
  setNonblock(outPipe[0]);
  setNonblock(errPipe[0]);

  size_t written = 0;
  bool inOpen = true, outOpen = true, errOpen = true;
  int64_t deadline = nowMs() + hardTimeoutMs;
  char buf[65536];
  while (outOpen || errOpen || inOpen) {
    int64_t left = deadline - nowMs();
    if (left <= 0) {
      kill(pid, SIGKILL);
      r.timedOut = true;
      break;
    }
    struct pollfd fds[3];
    int n = 0;
    int inIdx = -1, outIdx = -1, errIdx = -1;
    if (inOpen) {
      inIdx = n;
      fds[n++] = {inPipe[1], POLLOUT, 0};
    }
    if (outOpen) {
      outIdx = n;
      fds[n++] = {outPipe[0], POLLIN, 0};
    }
    if (errOpen) {
      errIdx = n;
      fds[n++] = {errPipe[0], POLLIN, 0};
    }
    int pr = poll(fds, n, (int)std::min<int64_t>(left, 200));
    if (pr < 0 && errno != EINTR)
      break;
    if (inIdx >= 0 && (fds[inIdx].revents & (POLLOUT | POLLERR | POLLHUP))) {
      if (fds[inIdx].revents & (POLLERR | POLLHUP)) {
        close(inPipe[1]);
        inOpen = false;
      } else {
        ssize_t w = write(inPipe[1], input.data() + written,
                          std::min<size_t>(input.size() - written, 65536));
        if (w > 0)
          written += (size_t)w;
        if (w < 0 && errno != EAGAIN && errno != EINTR) {
          close(inPipe[1]);
          inOpen = false;
        }
        if (written == input.size()) {
          close(inPipe[1]);
          inOpen = false;
        }
      }
    }
    auto drain = [&](int idx, int fd, std::string &sink, bool &open) {
      if (idx < 0 || !(fds[idx].revents & (POLLIN | POLLHUP)))
        return;
      ssize_t got = read(fd, buf, sizeof buf);
      if (got > 0)
        sink.append(buf, (size_t)got);
      else if (got == 0 || (got < 0 && errno != EAGAIN && errno != EINTR)) {
        close(fd);
        open = false;
      }
    };
    drain(outIdx, outPipe[0], r.out, outOpen);
    drain(errIdx, errPipe[0], r.err, errOpen);
  }
  if (inOpen)
    close(inPipe[1]);
  if (outOpen)
    close(outPipe[0]);
  if (errOpen)
    close(errPipe[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  r.exitCode = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (r.exitCode == 127 && r.out.empty())
    r.spawnFailed = true;
  return r;
}

// ---------------------------------------------------------------------------
// Transcript parsing
// ---------------------------------------------------------------------------

namespace {

// minimal s-expression reader over the model block
struct Sexp {
  std::string atom;
  std::vector<Sexp> list;
  bool isAtom = false;
};

struct Reader {
  const std::string &s;
  size_t i = 0;
  explicit Reader(const std::string &text) : s(text) {}

  void skipWs() {
    while (i < s.size()) {
      if (isspace((unsigned char)s[i])) {
        ++i;
      } else if (s[i] == ';') {
        while (i < s.size() && s[i] != '\n')
          ++i;
      } else {
        break;
      }
    }
  }

  bool atEnd() {
    skipWs();
    return i >= s.size();
  }

  Sexp read() {
    skipWs();
    Sexp e;
    if (i >= s.size())
      return e;
    if (s[i] == '(') {
      ++i;
      while (true) {
        skipWs();
        if (i >= s.size() || s[i] == ')')
          break;
        e.list.push_back(read());
      }
      if (i < s.size())
        ++i; // ')'
      return e;
    }
    e.isAtom = true;
    if (s[i] == '|') {
      size_t j = s.find('|', i + 1);
      e.atom = s.substr(i + 1, j - i - 1);
      i = (j == std::string::npos) ? s.size() : j + 1;
      return e;
    }
    if (s[i] == '"') {
      size_t j = s.find('"', i + 1);
      e.atom = s.substr(i, j - i + 1);
      i = (j == std::string::npos) ? s.size() : j + 1;
      return e;
    }
    size_t start = i;
    while (i < s.size() && !isspace((unsigned char)s[i]) && s[i] != '(' &&
           s[i] != ')')
      ++i;
    e.atom = s.substr(start, i - start);
    return e;
  }
};

std::string renderValue(const Sexp &v) {
  if (v.isAtom)
    return v.atom;
  // (- 5) prints as -5; anything else keeps its sexpr shape
  if (v.list.size() == 2 && v.list[0].isAtom && v.list[0].atom == "-" &&
      v.list[1].isAtom)
    return "-" + v.list[1].atom;
  std::string out = "(";
  for (size_t i = 0; i < v.list.size(); ++i) {
    if (i)
      out += " ";
    out += renderValue(v.list[i]);
  }
  out += ")";
  return out;
}

} // namespace

std::vector<QueryResult> parse_solver_output(const std::string &text,
                                             size_t expected) {
  std::vector<QueryResult> results;
  Reader rd(text);
  // keep reading past the last verdict: its model block may still follow
  while (!rd.atEnd()) {
    Sexp e = rd.read();
    if (e.isAtom) {
      if (results.size() >= expected)
        break;
      if (e.atom == "unsat") {
        results.push_back({Verdict::Proved, {}});
      } else if (e.atom == "sat") {
        results.push_back({Verdict::Refuted, {}});
      } else if (e.atom == "unknown" || e.atom == "timeout") {
        results.push_back({Verdict::Unknown, {}});
      }
      continue;
    }
    // a parenthesized block: either an (error ...) or a model for the
    // latest sat answer
    if (!e.list.empty() && e.list[0].isAtom && e.list[0].atom == "error")
      continue;
    if (results.empty() || results.back().verdict != Verdict::Refuted)
      continue;
    for (const Sexp &df : e.list) {
      if (df.list.size() >= 5 && df.list[0].isAtom &&
          df.list[0].atom == "define-fun" && df.list[1].isAtom &&
          df.list[2].list.empty() && !df.list[2].isAtom)
        results.back().model.emplace_back(df.list[1].atom,
                                          renderValue(df.list[4]));
    }
  }
  while (results.size() < expected)
    results.push_back({Verdict::Error, {}});
  return results;
}

} // namespace minivc
