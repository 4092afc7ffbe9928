#include "cltlb/solver.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <filesystem>
#include <poll.h>
#include <sstream>
#include <stdexcept>
#include <sys/wait.h>
#include <unistd.h>

namespace cltlb {

std::string to_string(SolverVerdict v) {
  switch (v) {
  case SolverVerdict::Sat:
    return "sat";
  case SolverVerdict::Unsat:
    return "unsat";
  case SolverVerdict::Unknown:
    return "unknown";
  default:
    return "solver-error";
  }
}

std::string to_string(const Value &v) {
  if (v.denominator() == 1)
    return std::to_string(v.numerator());
  return std::to_string(v.numerator()) + "/" + std::to_string(v.denominator());
}

std::vector<std::string> split_command(const std::string &cmd) {
  std::istringstream in(cmd);
  std::vector<std::string> out;
  for (std::string w; in >> w;)
    out.push_back(w);
  return out;
}

namespace {

bool on_path(const std::string &exe) {
  if (exe.find('/') != std::string::npos)
    return access(exe.c_str(), X_OK) == 0;
  const char *path = std::getenv("PATH");
  if (!path)
    return false;
  std::istringstream dirs(path);
  for (std::string d; std::getline(dirs, d, ':');) {
    if (d.empty())
      continue;
    const auto p = std::filesystem::path(d) / exe;
    if (access(p.c_str(), X_OK) == 0)
      return true;
  }
  return false;
}

struct Pipe {
  int fd[2] = {-1, -1};
  Pipe() {
    if (pipe(fd) != 0)
      throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  void close_read() {
    if (fd[0] >= 0)
      close(fd[0]);
    fd[0] = -1;
  }
  void close_write() {
    if (fd[1] >= 0)
      close(fd[1]);
    fd[1] = -1;
  }
};

void set_nonblocking(int fd) { fcntl(fd, F_SETFL, fcntl(fd, F_GETFL) | O_NONBLOCK); }

} // namespace

std::optional<std::vector<std::string>> solver_command(const std::string &name) {
  std::vector<std::string> cmd;
  if (name == "z3")
    cmd = {"z3", "-in"};
  else if (name == "cvc5")
    cmd = {"cvc5", "--lang=smt2"};
  else if (name == "cvc4")
    cmd = {"cvc4", "--lang=smt2"};
  else
    cmd = split_command(name);
  if (cmd.empty() || !on_path(cmd.front()))
    return std::nullopt;
  return cmd;
}

std::optional<Value> parse_value(const SExpr &e) {
  if (!e.is_list) {
    const std::string &s = e.atom;
    if (s.empty())
      return std::nullopt;
    const auto dot = s.find('.');
    const std::string digits = dot == std::string::npos ? s : s.substr(0, dot) + s.substr(dot + 1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      return std::nullopt;
    try {
      long long n = std::stoll(digits);
      long long d = 1;
      if (dot != std::string::npos)
        for (size_t i = dot + 1; i < s.size(); ++i)
          d *= 10;
      return Value(n, d);
    } catch (const std::out_of_range &) {
      return std::nullopt;
    }
  }
  if (e.list.size() == 2 && !e.list[0].is_list && e.list[0].atom == "-") {
    auto v = parse_value(e.list[1]);
    if (!v)
      return std::nullopt;
    return -*v;
  }
  if (e.list.size() == 3 && !e.list[0].is_list && e.list[0].atom == "/") {
    auto a = parse_value(e.list[1]);
    auto b = parse_value(e.list[2]);
    if (!a || !b || b->numerator() == 0)
      return std::nullopt;
    return *a / *b;
  }
  return std::nullopt;
}

SolverResult parse_solver_output(const std::string &out) {
  SolverResult r;
  r.raw = out;
  std::vector<SExpr> items;
  try {
    items = parse_sexprs(out);
  } catch (const std::exception &ex) {
    r.verdict = SolverVerdict::Error;
    r.reason = ex.what();
    return r;
  }
  size_t i = 0;
  for (; i < items.size(); ++i) {
    const SExpr &e = items[i];
    if (!e.is_list && (e.atom == "sat" || e.atom == "unsat" || e.atom == "unknown"))
      break;
    if (e.is_list && !e.list.empty() && e.list[0].atom == "error") {
      r.verdict = SolverVerdict::Error;
      r.reason = to_smt(e);
      return r;
    }
  }
  if (i == items.size()) {
    r.verdict = SolverVerdict::Error;
    r.reason = "no verdict in solver output";
    return r;
  }
  const std::string v = items[i].atom;
  if (v == "unsat") {
    r.verdict = SolverVerdict::Unsat;
    return r;
  }
  if (v == "unknown") {
    r.verdict = SolverVerdict::Unknown;
    r.reason = "solver answered unknown";
    return r;
  }
  r.verdict = SolverVerdict::Sat;
  for (size_t j = i + 1; j < items.size(); ++j) {
    const SExpr &e = items[j];
    if (!e.is_list)
      continue;
    if (!e.list.empty() && !e.list[0].is_list && e.list[0].atom == "error") {
      r.reason = to_smt(e);
      continue;
    }
    for (const auto &pair : e.list) {
      if (!pair.is_list || pair.list.size() != 2)
        continue;
      ModelValue mv;
      const SExpr &val = pair.list[1];
      if (!val.is_list && (val.atom == "true" || val.atom == "false")) {
        mv.is_bool = true;
        mv.b = val.atom == "true";
      } else if (auto n = parse_value(val)) {
        mv.num = *n;
      } else {
        continue;
      }
      r.model[to_smt(pair.list[0])] = mv;
    }
  }
  return r;
}

std::vector<ModelValue> get_model_values(const SolverResult &result,
                                         const std::vector<SExpr> &points) {
  if (result.verdict != SolverVerdict::Sat)
    throw std::runtime_error("model requested from a " + to_string(result.verdict) + " result");
  std::vector<ModelValue> out;
  out.reserve(points.size());
  for (const auto &p : points) {
    const std::string key = to_smt(p);
    auto it = result.model.find(key);
    if (it == result.model.end())
      throw std::runtime_error("missing model value for " + key);
    out.push_back(it->second);
  }
  return out;
}

SolverResult solve(const std::string &script_text, const SolverConfig &cfg) {
  using clock = std::chrono::steady_clock;
  static const bool sigpipe_ignored = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;

  SolverResult r;
  if (cfg.command.empty()) {
    r.reason = "empty solver command";
    return r;
  }
  const auto start = clock::now();
  Pipe in, out, err;
  const pid_t pid = fork();
  if (pid < 0) {
    r.reason = std::string("fork: ") + std::strerror(errno);
    return r;
  }
  if (pid == 0) {
    dup2(in.fd[0], STDIN_FILENO);
    dup2(out.fd[1], STDOUT_FILENO);
    dup2(err.fd[1], STDERR_FILENO);
    for (int fd : {in.fd[0], in.fd[1], out.fd[0], out.fd[1], err.fd[0], err.fd[1]})
      close(fd);
    std::vector<char *> argv;
    for (const auto &a : cfg.command)
      argv.push_back(const_cast<char *>(a.c_str()));
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    const std::string msg = std::string("exec failed: ") + std::strerror(errno) + "\n";
    (void)!write(STDERR_FILENO, msg.data(), msg.size());
    _exit(127);
  }
  in.close_read();
  out.close_write();
  err.close_write();
  set_nonblocking(in.fd[1]);
  set_nonblocking(out.fd[0]);
  set_nonblocking(err.fd[0]);

  std::string stdout_text, stderr_text;
  size_t written = 0;
  bool timed_out = false;
  const auto deadline = start + cfg.timeout;
  char buf[65536];
  while (out.fd[0] >= 0 || err.fd[0] >= 0) {
    std::vector<pollfd> fds;
    if (in.fd[1] >= 0)
      fds.push_back({in.fd[1], POLLOUT, 0});
    if (out.fd[0] >= 0)
      fds.push_back({out.fd[0], POLLIN, 0});
    if (err.fd[0] >= 0)
      fds.push_back({err.fd[0], POLLIN, 0});
    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
    if (left <= 0) {
      timed_out = true;
      break;
    }
    const int n = poll(fds.data(), fds.size(), static_cast<int>(std::min<long long>(left, 1000)));
    if (n < 0 && errno != EINTR)
      break;
    for (const auto &p : fds) {
      if (!p.revents)
        continue;
      if (p.fd == in.fd[1]) {
        const ssize_t w =
            write(p.fd, script_text.data() + written, script_text.size() - written);
        if (w > 0)
          written += static_cast<size_t>(w);
        if ((w < 0 && errno != EAGAIN) || written == script_text.size())
          in.close_write();
      } else {
        const ssize_t got = read(p.fd, buf, sizeof buf);
        if (got > 0) {
          (p.fd == out.fd[0] ? stdout_text : stderr_text).append(buf, static_cast<size_t>(got));
        } else if (got == 0 || errno != EAGAIN) {
          (p.fd == out.fd[0] ? out : err).close_read();
        }
      }
    }
  }
  if (timed_out)
    kill(pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  r.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start);

  if (timed_out) {
    r.verdict = SolverVerdict::Unknown;
    r.raw = stdout_text;
    r.reason = "timeout after " + std::to_string(cfg.timeout.count()) + " ms";
    return r;
  }
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127 && stdout_text.empty()) {
    r.verdict = SolverVerdict::Error;
    r.reason = "cannot launch solver '" + cfg.command.front() + "': " + stderr_text;
    return r;
  }
  SolverResult parsed = parse_solver_output(stdout_text);
  parsed.wall_time = r.wall_time;
  if (parsed.verdict == SolverVerdict::Error && !stderr_text.empty())
    parsed.reason += "; stderr: " + stderr_text;
  return parsed;
}

SolverResult solve(const SmtScript &script, const SolverConfig &cfg) {
  return solve(emit_smtlib(script), cfg);
}

} // namespace cltlb
