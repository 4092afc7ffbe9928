#pragma once

#include "cltlb/smt.hpp"

#include <boost/rational.hpp>

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cltlb {

using Value = boost::rational<long long>;

enum class SolverVerdict { Sat, Unsat, Unknown, Error };

std::string to_string(SolverVerdict v);
// "3", "-2" or "1/2".
std::string to_string(const Value &v);

// A model entry is either a number or a boolean.
struct ModelValue {
  bool is_bool = false;
  bool b = false;
  Value num{0};
};

struct SolverResult {
  SolverVerdict verdict = SolverVerdict::Error;
  // Keyed by the printed get-value term, e.g. "(v_x_0 3)" or "loop".
  std::map<std::string, ModelValue> model;
  std::string raw;
  // Why the verdict is unknown or an error, e.g. "timeout after 5000 ms".
  std::string reason;
  std::chrono::milliseconds wall_time{0};
};

struct SolverConfig {
  // argv; the script is written to stdin.
  std::vector<std::string> command{"z3", "-in"};
  std::chrono::milliseconds timeout{60000};
};

// Looks up the configured solver names on PATH and returns the first
// working command line, e.g. {"z3", "-in"} or {"cvc5", "--lang=smt2", ...}.
std::optional<std::vector<std::string>> solver_command(const std::string &name);

SolverResult solve(const std::string &script_text, const SolverConfig &cfg);
SolverResult solve(const SmtScript &script, const SolverConfig &cfg);

// Parses a verdict line followed by an optional get-value response.
SolverResult parse_solver_output(const std::string &out);

std::optional<Value> parse_value(const SExpr &e);

// Values of the requested ground applications; throws std::runtime_error
// naming the first point the model does not cover.
std::vector<ModelValue> get_model_values(const SolverResult &result,
                                         const std::vector<SExpr> &points);

std::vector<std::string> split_command(const std::string &cmd);

} // namespace cltlb
