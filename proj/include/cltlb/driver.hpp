#pragma once

#include "cltlb/encoder.hpp"
#include "cltlb/parser.hpp"
#include "cltlb/rewrite.hpp"
#include "cltlb/solver.hpp"
#include "cltlb/witness.hpp"

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cltlb {

struct RunConfig {
  int max_k = 10;
  // Unset: the problem file's theory, or int.
  std::optional<Theory> theory;
  EncodeOptions encode;
  SolverConfig solver;
  std::string emit_smt;
  bool json = false;
  bool shift = true;
  // Number of bounds solved concurrently; 1 is the plain linear loop.
  int parallel_k = 1;
};

// Applies `option key = value;` entries from a problem file. Throws
// std::invalid_argument on unknown keys or malformed values. The keys
// `expect` and `expect_k` are suite annotations and are ignored here.
void apply_options(RunConfig &cfg, const std::map<std::string, std::string> &options);

struct KRecord {
  int k = 0;
  SolverVerdict verdict = SolverVerdict::Error;
  std::chrono::milliseconds wall{0};
  std::size_t assertions = 0;
  std::size_t bytes = 0;
  std::string reason;
};

enum class VerdictKind { Sat, UnsatUpTo, Unknown };

std::string to_string(VerdictKind v);

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  // First satisfiable bound, or the bound reached.
  int k = 0;
  std::optional<Witness> witness;
  bool verified = false;
  // Subformula positions where the solver's truth table disagrees with the
  // independent evaluation of the encoded formula.
  std::vector<std::string> truth_mismatches;
  std::string reason;
  std::string note;
  std::vector<KRecord> per_k;
};

// The formula at each pipeline stage.
struct Pipeline {
  Formula original;
  Formula pnf;
  PropRemoval np;
  Shifted shifted;
  Theory theory;
};

Pipeline prepare(const ProblemFile &problem, const RunConfig &cfg);

struct KAttempt {
  KRecord record;
  std::optional<Witness> witness;
  bool verified = false;
  std::vector<std::string> truth_mismatches;
};

KAttempt run_k(const Pipeline &p, int k, const RunConfig &cfg);

Verdict check_sat(const ProblemFile &problem, const RunConfig &cfg);

nlohmann::json to_json(const Verdict &v);

struct SuiteRow {
  std::string file;
  std::string expected;
  std::string verdict;
  int k = 0;
  long long wall_ms = 0;
  std::size_t assertions = 0;
  std::size_t bytes = 0;
  bool verified = false;
  std::string status;
};

struct SuiteReport {
  std::vector<SuiteRow> rows;
  bool ok = true;
};

SuiteReport run_suite(const std::string &dir, const RunConfig &cfg);
std::string to_csv(const SuiteReport &r);

// 0 sat (verified), 1 unsat up to max k, 2 otherwise.
int exit_code(const Verdict &v);

} // namespace cltlb
