#include "cltlb/driver.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace cltlb;

namespace {

struct Flags {
  int max_k = 0;
  std::string theory;
  std::string solver;
  int timeout = 0;
  bool weak = false;
  bool strong = false;
  std::string consts;
  std::string emit_smt;
  bool json = false;
  bool no_shift = false;
  bool no_existence = false;
  bool self_pairs = false;
  int parallel_k = 0;
};

void add_run_flags(CLI::App &app, Flags &f) {
  app.add_option("--max-k", f.max_k, "Largest bound to try (default 10)")->check(CLI::PositiveNumber);
  app.add_option("--theory", f.theory, "ipc, int, nat, rat or real");
  app.add_option("--solver", f.solver, "Solver command line reading SMT-LIB from stdin");
  app.add_option("--timeout", f.timeout, "Per-bound solver timeout in seconds")
      ->check(CLI::PositiveNumber);
  auto *weak = app.add_flag("--weak", f.weak, "Weak symbolic valuations (default)");
  auto *strong = app.add_flag("--strong", f.strong, "Strong symbolic valuations");
  weak->excludes(strong);
  app.add_option("--consts", f.consts, "occurring or interval")
      ->check(CLI::IsMember({"occurring", "interval"}));
  app.add_option("--emit-smt", f.emit_smt, "Write the SMT-LIB script of the last bound tried");
  app.add_flag("--json", f.json, "Print the verdict as JSON");
  app.add_flag("--no-shift", f.no_shift, "Keep past terms instead of shifting them away");
  app.add_flag("--no-existence", f.no_existence, "Omit the arithmetic-model existence condition");
  app.add_flag("--self-pairs", f.self_pairs, "Also assert the existence condition for (x, x)");
  app.add_option("--parallel-k", f.parallel_k, "Solve this many bounds at once")
      ->check(CLI::PositiveNumber);
}

void apply_flags(RunConfig &cfg, const Flags &f) {
  if (f.max_k > 0)
    cfg.max_k = f.max_k;
  if (!f.theory.empty()) {
    auto th = Theory::from_string(f.theory);
    if (!th)
      throw std::invalid_argument("unknown theory '" + f.theory + "'");
    cfg.theory = *th;
  }
  if (!f.solver.empty()) {
    auto cmd = solver_command(f.solver);
    cfg.solver.command = cmd ? *cmd : split_command(f.solver);
  }
  if (f.timeout > 0)
    cfg.solver.timeout = std::chrono::seconds(f.timeout);
  if (f.weak)
    cfg.encode.mode = ValuationMode::Weak;
  if (f.strong)
    cfg.encode.mode = ValuationMode::Strong;
  if (!f.consts.empty())
    cfg.encode.consts = *const_mode_from_string(f.consts);
  if (!f.emit_smt.empty())
    cfg.emit_smt = f.emit_smt;
  if (f.json)
    cfg.json = true;
  if (f.no_shift)
    cfg.shift = false;
  if (f.no_existence)
    cfg.encode.existence = false;
  if (f.self_pairs)
    cfg.encode.self_pairs = true;
  if (f.parallel_k > 0)
    cfg.parallel_k = f.parallel_k;
}

void print_text(const Verdict &v, std::ostream &os) {
  switch (v.kind) {
  case VerdictKind::Sat:
    os << "sat at k=" << v.k << (v.verified ? "" : " (witness NOT verified: " + v.reason + ")")
       << '\n';
    break;
  case VerdictKind::UnsatUpTo:
    os << "unsat up to k=" << v.k << '\n' << "note: " << v.note << '\n';
    break;
  default:
    os << "unknown: " << v.reason << '\n';
    return;
  }
  if (!v.witness)
    return;
  const Witness &w = *v.witness;
  os << "loop: " << w.loop << '\n';
  for (const auto &[var, row] : w.sigma) {
    os << var << ':';
    for (size_t i = 0; i < row.size(); ++i)
      os << ' ' << to_string(row[i]);
    os << "   (positions " << w.sigma_first << ".." << w.sigma_last() << ")\n";
  }
  bool any = false;
  for (const auto &ps : w.props)
    any = any || !ps.empty();
  if (any) {
    for (size_t i = 0; i < w.props.size(); ++i) {
      os << "props@" << i << ':';
      for (const auto &p : w.props[i])
        os << ' ' << p;
      os << '\n';
    }
  }
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Bounded satisfiability checker for constraint LTL with past operators"};
  Flags flags;
  std::string file;
  add_run_flags(app, flags);
  app.add_option("file", file, "Problem file (.cltl)");

  auto *suite = app.add_subcommand("suite", "Run every .cltl file of a directory");
  std::string suite_dir, csv_out;
  suite->add_option("dir", suite_dir, "Directory of .cltl files")->required();
  suite->add_option("--csv", csv_out, "Write the CSV report here (default stdout)");
  Flags suite_flags;
  add_run_flags(*suite, suite_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*suite) {
      RunConfig cfg;
      apply_flags(cfg, suite_flags);
      const SuiteReport report = run_suite(suite_dir, cfg);
      const std::string csv = to_csv(report);
      if (csv_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream os(csv_out);
        if (!os)
          throw std::runtime_error("cannot write '" + csv_out + "'");
        os << csv;
      }
      for (const auto &row : report.rows)
        if (row.status != "ok")
          std::cerr << row.file << ": " << row.status << '\n';
      return report.ok ? 0 : 1;
    }
    if (file.empty()) {
      std::cerr << app.help();
      return 2;
    }
    const ProblemFile pf = parse_file(file);
    RunConfig cfg;
    apply_options(cfg, pf.options);
    apply_flags(cfg, flags);
    const Verdict v = check_sat(pf, cfg);
    if (cfg.json)
      std::cout << to_json(v).dump(2) << '\n';
    else
      print_text(v, std::cout);
    return exit_code(v);
  } catch (const std::exception &ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
}
