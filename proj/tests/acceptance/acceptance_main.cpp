#include "cltlb/driver.hpp"
#include "random_formula.hpp"
#include "solver_probe.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace cltlb;
namespace gen = cltlb::testing;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kOracleFormulae = 200;
constexpr double kOracleSeconds = 600.0;
constexpr int kBoundedIncreaseMaxK = 8;
constexpr int kSpuriousMaxK = 3;
constexpr int kShiftFormulae = 50;
constexpr int kShiftMaxK = 3;
constexpr double kQuadraticRatio = 4.5;
constexpr double kLinearRatio = 2.2;
constexpr double kSizeSeconds = 1.0;
constexpr int kSortMaxK = 6;
constexpr double kSortSeconds = 60.0;

const std::string kSource = CLTLB_SOURCE_DIR;
const char *kBoundedIncrease = "theory int; var x, y; formula G(x < X(x)) & G(x < y) & G(!(y < X(y)));";
const char *kUncomparedPair = "theory int; var x, y; formula G(x < X(x) & !(y < X(y)));";

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

RunConfig base_config(const SolverConfig &solver) {
  RunConfig cfg;
  cfg.solver = solver;
  return cfg;
}

// Sat witnesses gathered by the oracle comparison, re-checked for soundness.
struct SatCase {
  Formula phi;
  Formula np;
  Theory theory;
  Witness w;
};
std::vector<SatCase> g_sat_cases;

Outcome oracle_equivalence(const SolverConfig &solver) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  int agree = 0, total = 0, sat = 0;
  std::string first_bad;
  for (int n = 0; n < kOracleFormulae; ++n) {
    gen::GenOptions g;
    if (rng() % 2)
      g.vars = {"x"};
    ProblemFile pf;
    pf.vars = g.vars;
    pf.formula = gen::confine(gen::random_formula(rng, g), g.vars, 0, 3);
    for (TheoryName th : {TheoryName::Int, TheoryName::Nat}) {
      RunConfig cfg = base_config(solver);
      cfg.theory = Theory{th};
      const Pipeline p = prepare(pf, cfg);
      for (int k = 1; k <= 3; ++k) {
        ++total;
        const KAttempt a = run_k(p, k, cfg);
        const bool oracle = brute_force_ksat(pf.formula, k, Theory{th}).sat;
        const bool smt_sat = a.record.verdict == SolverVerdict::Sat;
        const bool decided = smt_sat || a.record.verdict == SolverVerdict::Unsat;
        if (decided && smt_sat == oracle) {
          ++agree;
        } else if (first_bad.empty()) {
          first_bad = "; first disagreement: " + to_string(pf.formula) + " over " +
                      Theory{th}.str() + " at k=" + std::to_string(k);
        }
        if (smt_sat && a.witness) {
          ++sat;
          g_sat_cases.push_back({pf.formula, p.np.formula, Theory{th}, *a.witness});
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = agree == total && secs < kOracleSeconds;
  o.detail = std::to_string(agree) + "/" + std::to_string(total) + " agree (" +
             std::to_string(sat) + " sat), " + fmt(secs) + "s, limit " + fmt(kOracleSeconds) +
             "s" + first_bad;
  return o;
}

Outcome witness_soundness(const SolverConfig &solver) {
  int checked = 0, bad = 0;
  std::string first_bad;
  for (const auto &c : g_sat_cases) {
    ++checked;
    const bool holds = verify_lasso(c.phi, c.w);
    const SymbolicLasso lasso = induced_symbolic_model(c.w, c.np, c.theory);
    const bool no_model = c.theory.discrete() && check_property_c_graph(lasso);
    if (!holds || !lasso.periodic() || no_model) {
      ++bad;
      if (first_bad.empty())
        first_bad = "; first failure: " + to_string(c.phi);
    }
  }
  const SuiteReport suite = run_suite(kSource + "/suite", base_config(solver));
  int suite_sat = 0;
  for (const auto &row : suite.rows) {
    if (row.verdict != "sat")
      continue;
    ++suite_sat;
    ++checked;
    if (!row.verified) {
      ++bad;
      if (first_bad.empty())
        first_bad = "; first failure: suite/" + row.file;
    }
  }
  Outcome o;
  o.pass = bad == 0 && checked > 0 && suite_sat > 0;
  o.detail = std::to_string(checked - bad) + "/" + std::to_string(checked) +
             " sat witnesses sound (" + std::to_string(suite_sat) + " from the suite)" +
             first_bad;
  return o;
}

Outcome existence_effectiveness(const SolverConfig &solver) {
  const ProblemFile pf = parse(kBoundedIncrease);
  RunConfig on = base_config(solver);
  on.max_k = kBoundedIncreaseMaxK;
  const Verdict with = check_sat(pf, on);
  RunConfig off = base_config(solver);
  off.max_k = kSpuriousMaxK;
  off.encode.existence = false;
  const Verdict without = check_sat(pf, off);
  Outcome o;
  const bool unsat = with.kind == VerdictKind::UnsatUpTo && with.k == kBoundedIncreaseMaxK;
  const bool spurious =
      without.kind == VerdictKind::Sat && without.k <= kSpuriousMaxK && !without.verified;
  o.pass = unsat && spurious;
  o.detail = "existence on: " + to_string(with.kind) + " k=" + std::to_string(with.k) +
             "; existence off: " + to_string(without.kind) + " k=" + std::to_string(without.k) +
             (without.verified ? " (verified)" : " (witness rejected)");
  return o;
}

Outcome weak_valuations(const SolverConfig &solver) {
  const ProblemFile pf = parse(kUncomparedPair);
  RunConfig weak = base_config(solver);
  weak.max_k = 1;
  RunConfig strong = weak;
  strong.encode.mode = ValuationMode::Strong;
  const Verdict w = check_sat(pf, weak);
  const Verdict s = check_sat(pf, strong);
  const std::size_t wa = w.per_k.empty() ? 0 : w.per_k[0].assertions;
  const std::size_t sa = s.per_k.empty() ? 0 : s.per_k[0].assertions;
  Outcome o;
  o.pass = w.kind == VerdictKind::Sat && w.k == 1 && w.verified && s.kind == w.kind &&
           s.k == w.k && wa < sa;
  o.detail = "weak " + to_string(w.kind) + " k=" + std::to_string(w.k) + " with " +
             std::to_string(wa) + " assertions; strong " + to_string(s.kind) + " k=" +
             std::to_string(s.k) + " with " + std::to_string(sa);
  return o;
}

bool has_past_term(const Formula &f) { return bounds(f).look_back < 0; }

Outcome equisatisfiability(const SolverConfig &solver) {
  std::mt19937_64 rng(77);
  gen::GenOptions g;
  g.past_ops = true;
  g.props = true;
  g.max_y_depth = 2;
  int agree = 0, total = 0, sat = 0;
  std::string first_bad;
  while (total < kShiftFormulae) {
    const Formula raw = gen::random_formula(rng, g);
    if (!has_past_term(raw) || propositions_of(raw).empty())
      continue;
    ++total;
    ProblemFile pf;
    pf.vars = g.vars;
    pf.formula = gen::confine(raw, g.vars, 0, 3);

    RunConfig shifted = base_config(solver);
    shifted.max_k = kShiftMaxK;
    RunConfig plain = shifted;
    plain.shift = false;
    const Verdict a = check_sat(pf, shifted);
    const Verdict b = check_sat(pf, plain);

    // The proposition-free formula on its own, with fresh variables declared.
    ProblemFile np_pf = pf;
    const PropRemoval np = remove_propositions(to_pnf(pf.formula));
    np_pf.formula = np.formula;
    for (const auto &[prop, var] : np.fresh)
      np_pf.vars.push_back(var);
    const Verdict c = check_sat(np_pf, plain);

    bool ok = a.kind == b.kind && a.k == b.k && a.kind == c.kind && a.k == c.k &&
              a.kind != VerdictKind::Unknown;
    if (ok && a.kind == VerdictKind::Sat) {
      ++sat;
      ok = a.verified && b.verified && c.verified && a.witness &&
           verify_lasso(pf.formula, *a.witness);
    }
    if (ok)
      ++agree;
    else if (first_bad.empty())
      first_bad = "; first disagreement: " + to_string(raw);
  }
  Outcome o;
  o.pass = agree == total;
  o.detail = std::to_string(agree) + "/" + std::to_string(total) + " agree (" +
             std::to_string(sat) + " sat)" + first_bad;
  return o;
}

std::size_t assertion_count(const Formula &phi, int k, bool existence) {
  EncodeOptions opts;
  opts.existence = existence;
  return build_encoding(phi, k, Theory{TheoryName::Int}, opts).assertions.size();
}

Outcome size_claims() {
  const auto t0 = Clock::now();
  const Formula phi =
      to_pnf(parse_formula("G(x < X(x)) & G(!(y < X(y)) | x = y) & F(y < 2)", {"x", "y"}));
  const double total = static_cast<double>(assertion_count(phi, 20, true)) /
                       static_cast<double>(assertion_count(phi, 10, true));
  const double base = static_cast<double>(assertion_count(phi, 20, false)) /
                      static_cast<double>(assertion_count(phi, 10, false));
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = bounds(phi).width() == 2 && total <= kQuadraticRatio && base <= kLinearRatio &&
           secs < kSizeSeconds;
  o.detail = "total ratio " + fmt(total) + " (<= " + fmt(kQuadraticRatio) + "), without " +
             "existence " + fmt(base) + " (<= " + fmt(kLinearRatio) + "), " + fmt(secs) + "s";
  return o;
}

Outcome sorting(const SolverConfig &solver) {
  const auto t0 = Clock::now();
  RunConfig cfg = base_config(solver);
  cfg.max_k = kSortMaxK;
  const ProblemFile n3 = parse_file(kSource + "/suite/sorting_n3.cltl");
  const ProblemFile stuck = parse_file(kSource + "/suite/sorting_n3_unsorted.cltl");
  const Verdict v = check_sat(n3, cfg);
  const Verdict u = check_sat(stuck, cfg);
  const double secs = seconds_since(t0);
  bool sorted = false;
  if (v.witness) {
    const Witness &w = *v.witness;
    sorted = w.at("a_1", w.k) < w.at("a_2", w.k) && w.at("a_2", w.k) < w.at("a_3", w.k);
  }
  Outcome o;
  o.pass = v.kind == VerdictKind::Sat && v.verified && v.k <= kSortMaxK && sorted &&
           u.kind == VerdictKind::UnsatUpTo && u.k == kSortMaxK && secs < kSortSeconds;
  o.detail = "N=3 " + to_string(v.kind) + " at k=" + std::to_string(v.k) +
             (sorted ? " with sorted last row" : " without sorted last row") + "; unsorted " +
             "invariant " + to_string(u.kind) + " k=" + std::to_string(u.k) + "; " + fmt(secs) +
             "s";
  return o;
}

std::string read(const std::string &path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome table_exactness() {
  const PropRemoval np = remove_propositions(to_pnf(parse_formula("true U q", {})));
  EncodeOptions off;
  off.existence = false;
  const SmtScript s = build_encoding(np.formula, 2, Theory{TheoryName::Int}, off);
  const SmtScript on = build_encoding(np.formula, 2, Theory{TheoryName::Int});
  const auto subs = subformulae(np.formula);
  int owner = -1;
  for (size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->op == Op::Until)
      owner = static_cast<int>(i);
  std::size_t relation_atoms = 0;
  for (const auto &f : subs)
    relation_atoms += f->op == Op::Atom;
  const std::map<std::string, std::size_t> want{
      {"Prop", 24},       {"Temp", 6},      {"LoopRange", 1},  {"Loop", relation_atoms},
      {"Periodicity", 4}, {"LastState", subs.size()}, {"Eventually", 2}, {"Init", 1}};
  const auto counts = s.family_counts();
  bool same_with_existence = true;
  for (const auto &[family, n] : want)
    same_with_existence = same_with_existence && on.count(family) == n;
  const bool golden = emit_smtlib(s) == read(kSource + "/tests/golden/true_until_q_k2.smt2");
  const bool u_rows = owner >= 0 && s.count("Temp", owner) == 3 && s.count("Eventually", owner) == 1;
  Outcome o;
  o.pass = counts == want && u_rows && same_with_existence && golden;
  std::ostringstream os;
  for (const auto &[family, n] : counts)
    os << family << '=' << n << ' ';
  o.detail = os.str() + "| U rows " + (u_rows ? "3+1" : "wrong") + ", golden " +
             (golden ? "identical" : "differs");
  return o;
}

} // namespace

int main() {
  const auto solver = gen::primary_solver();
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"C1 oracle equivalence", [&] { return oracle_equivalence(*solver); }},
      {"C2 witness soundness", [&] { return witness_soundness(*solver); }},
      {"C3 existence condition effectiveness", [&] { return existence_effectiveness(*solver); }},
      {"C4 weak valuations", [&] { return weak_valuations(*solver); }},
      {"C5 equisatisfiability", [&] { return equisatisfiability(*solver); }},
      {"C6 size growth", [] { return size_claims(); }},
      {"C7 sorting case study", [&] { return sorting(*solver); }},
      {"C8 table exactness", [] { return table_exactness(); }},
  };
  bool all = true;
  for (const auto &[name, run] : criteria) {
    Outcome o;
    if (!solver && name != "C6 size growth" && name != "C8 table exactness") {
      o.detail = "no SMT solver on PATH";
    } else {
      try {
        o = run();
      } catch (const std::exception &ex) {
        o.detail = std::string("exception: ") + ex.what();
      }
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
