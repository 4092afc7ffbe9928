#include "cltlb/driver.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

namespace cltlb {

namespace {

bool parse_bool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes")
    return true;
  if (v == "false" || v == "off" || v == "0" || v == "no")
    return false;
  throw std::invalid_argument("option '" + key + "' expects a boolean, got '" + v + "'");
}

int parse_int(const std::string &key, const std::string &v) {
  try {
    size_t used = 0;
    const int n = std::stoi(v, &used);
    if (used == v.size())
      return n;
  } catch (const std::exception &) {
  }
  throw std::invalid_argument("option '" + key + "' expects an integer, got '" + v + "'");
}

} // namespace

void apply_options(RunConfig &cfg, const std::map<std::string, std::string> &options) {
  for (const auto &[key, v] : options) {
    if (key == "expect" || key == "expect_k") {
      continue;
    } else if (key == "max_k") {
      cfg.max_k = parse_int(key, v);
      if (cfg.max_k < 1)
        throw std::invalid_argument("max_k must be at least 1");
    } else if (key == "theory") {
      auto th = Theory::from_string(v);
      if (!th)
        throw std::invalid_argument("unknown theory '" + v + "'");
      cfg.theory = *th;
    } else if (key == "mode") {
      if (v == "weak")
        cfg.encode.mode = ValuationMode::Weak;
      else if (v == "strong")
        cfg.encode.mode = ValuationMode::Strong;
      else
        throw std::invalid_argument("option 'mode' expects weak or strong");
    } else if (key == "consts") {
      auto m = const_mode_from_string(v);
      if (!m)
        throw std::invalid_argument("option 'consts' expects occurring or interval");
      cfg.encode.consts = *m;
    } else if (key == "existence") {
      cfg.encode.existence = parse_bool(key, v);
    } else if (key == "self_pairs") {
      cfg.encode.self_pairs = parse_bool(key, v);
    } else if (key == "shift") {
      cfg.shift = parse_bool(key, v);
    } else if (key == "timeout") {
      cfg.solver.timeout = std::chrono::seconds(parse_int(key, v));
    } else if (key == "solver") {
      cfg.solver.command = split_command(v);
    } else {
      throw std::invalid_argument("unknown option '" + key + "'");
    }
  }
}

std::string to_string(VerdictKind v) {
  switch (v) {
  case VerdictKind::Sat:
    return "sat";
  case VerdictKind::UnsatUpTo:
    return "unsat-up-to";
  default:
    return "unknown";
  }
}

Pipeline prepare(const ProblemFile &problem, const RunConfig &cfg) {
  Pipeline p;
  p.original = problem.formula;
  p.theory = cfg.theory ? *cfg.theory : problem.theory;
  p.pnf = to_pnf(p.original);
  std::set<std::string> taken(problem.vars.begin(), problem.vars.end());
  p.np = remove_propositions(p.pnf, taken);
  p.shifted = cfg.shift ? shift_left(p.np.formula) : Shifted{p.np.formula, 0};
  return p;
}

KAttempt run_k(const Pipeline &p, int k, const RunConfig &cfg) {
  KAttempt out;
  out.record.k = k;
  const EncodingContext ctx = make_context(p.shifted.formula, k, p.theory, cfg.encode);
  const SmtScript script = build_encoding(ctx);
  const std::string text = emit_smtlib(script);
  out.record.assertions = script.assertions.size();
  out.record.bytes = text.size();
  if (!cfg.emit_smt.empty()) {
    std::ofstream os(cfg.emit_smt);
    os << text;
  }
  const SolverResult res = solve(text, cfg.solver);
  out.record.verdict = res.verdict;
  out.record.wall = res.wall_time;
  out.record.reason = res.reason;
  if (res.verdict != SolverVerdict::Sat)
    return out;

  Witness w3;
  try {
    w3 = extract_witness(res, ctx);
  } catch (const std::exception &ex) {
    out.record.verdict = SolverVerdict::Error;
    out.record.reason = ex.what();
    return out;
  }
  out.truth_mismatches = check_lasso(p.shifted.formula, w3, true).mismatches;

  Witness w2 = w3;
  w2.sigma_first = w3.sigma_first + p.shifted.offset;
  w2.sub_names.clear();
  w2.truth.clear();

  const SymbolicLasso lasso = induced_symbolic_model(w2, p.np.formula, p.theory, cfg.encode);
  bool ok = lasso.periodic();
  if (ok && p.theory.discrete())
    ok = !check_property_c_graph(lasso, cfg.encode.self_pairs);

  Witness w = w2;
  w.props.assign(k + 1, {});
  for (const auto &[prop, var] : p.np.fresh) {
    for (int i = 0; i <= k; ++i)
      if (w2.at(var, i) == Value(1))
        w.props[i].insert(prop);
    w.sigma.erase(var);
  }
  ok = ok && verify_lasso(p.original, w);
  w.verified = ok;
  out.verified = ok;
  out.witness = std::move(w);
  return out;
}

namespace {

// |SV(phi)| * 2^|phi| bounds the lasso length needed for completeness.
std::string completeness_note(const Pipeline &p, int max_k) {
  std::ostringstream os;
  os << "no lasso model with k <= " << max_k
     << "; a complete answer may need k up to |SV(phi)| * 2^" << subformulae(p.pnf).size()
     << " (not computed)";
  return os.str();
}

} // namespace

Verdict check_sat(const ProblemFile &problem, const RunConfig &cfg) {
  if (cfg.max_k < 1)
    throw std::invalid_argument("max k must be at least 1");
  Verdict v;
  const Pipeline p = prepare(problem, cfg);
  const int batch = std::max(1, cfg.parallel_k);
  std::vector<std::string> failures;
  for (int k0 = 1; k0 <= cfg.max_k; k0 += batch) {
    std::vector<KAttempt> attempts;
    if (batch == 1) {
      attempts.push_back(run_k(p, k0, cfg));
    } else {
      std::vector<std::future<KAttempt>> futs;
      RunConfig each = cfg;
      each.emit_smt.clear();
      for (int k = k0; k < k0 + batch && k <= cfg.max_k; ++k)
        futs.push_back(std::async(std::launch::async, [&p, k, each] { return run_k(p, k, each); }));
      for (auto &f : futs)
        attempts.push_back(f.get());
    }
    for (auto &a : attempts) {
      v.per_k.push_back(a.record);
      if (a.record.verdict == SolverVerdict::Sat) {
        v.kind = VerdictKind::Sat;
        v.k = a.record.k;
        v.witness = std::move(a.witness);
        v.verified = a.verified;
        v.truth_mismatches = std::move(a.truth_mismatches);
        if (!v.verified)
          v.reason = "witness failed independent verification";
        return v;
      }
      if (a.record.verdict != SolverVerdict::Unsat)
        failures.push_back("k=" + std::to_string(a.record.k) + ": " +
                           to_string(a.record.verdict) +
                           (a.record.reason.empty() ? "" : " (" + a.record.reason + ")"));
    }
  }
  v.k = cfg.max_k;
  if (!failures.empty()) {
    v.kind = VerdictKind::Unknown;
    std::ostringstream os;
    for (size_t i = 0; i < failures.size(); ++i)
      os << (i ? "; " : "") << failures[i];
    v.reason = os.str();
    return v;
  }
  v.kind = VerdictKind::UnsatUpTo;
  v.note = completeness_note(p, cfg.max_k);
  return v;
}

nlohmann::json to_json(const Verdict &v) {
  nlohmann::json j;
  j["verdict"] = to_string(v.kind);
  j["k"] = v.k;
  if (v.witness)
    j["witness"] = to_json(*v.witness);
  j["verified"] = v.verified;
  if (!v.truth_mismatches.empty())
    j["truth_mismatches"] = v.truth_mismatches;
  if (!v.reason.empty())
    j["reason"] = v.reason;
  if (!v.note.empty())
    j["note"] = v.note;
  nlohmann::json per = nlohmann::json::array();
  for (const auto &r : v.per_k) {
    nlohmann::json e{{"k", r.k},
                     {"solver", to_string(r.verdict)},
                     {"wall_ms", r.wall.count()},
                     {"assertions", r.assertions},
                     {"bytes", r.bytes}};
    if (!r.reason.empty())
      e["reason"] = r.reason;
    per.push_back(e);
  }
  j["per_k"] = per;
  return j;
}

int exit_code(const Verdict &v) {
  switch (v.kind) {
  case VerdictKind::Sat:
    return v.verified ? 0 : 2;
  case VerdictKind::UnsatUpTo:
    return 1;
  default:
    return 2;
  }
}

SuiteReport run_suite(const std::string &dir, const RunConfig &cfg) {
  namespace fs = std::filesystem;
  SuiteReport report;
  std::vector<fs::path> files;
  std::error_code ec;
  for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec))
    if (it->path().extension() == ".cltl")
      files.push_back(it->path());
  if (ec)
    throw std::runtime_error("cannot read suite directory '" + dir + "': " + ec.message());
  std::sort(files.begin(), files.end());

  for (const auto &path : files) {
    SuiteRow row;
    row.file = path.filename().string();
    try {
      const ProblemFile pf = parse_file(path.string());
      RunConfig run = cfg;
      apply_options(run, pf.options);
      if (auto it = pf.options.find("expect"); it != pf.options.end())
        row.expected = it->second;
      int expect_k = 0;
      if (auto it = pf.options.find("expect_k"); it != pf.options.end())
        expect_k = std::stoi(it->second);
      const Verdict v = check_sat(pf, run);
      row.verdict = to_string(v.kind);
      row.k = v.k;
      row.verified = v.verified;
      for (const auto &r : v.per_k) {
        row.wall_ms += r.wall.count();
        row.assertions = r.assertions;
        row.bytes = r.bytes;
      }
      const bool expected_sat = row.expected == "sat";
      const bool expected_unsat = row.expected == "unsat";
      if (v.kind == VerdictKind::Sat && !v.verified)
        row.status = "unverified";
      else if (v.kind == VerdictKind::Unknown)
        row.status = "unknown";
      else if ((expected_sat && v.kind != VerdictKind::Sat) ||
               (expected_unsat && v.kind != VerdictKind::UnsatUpTo))
        row.status = "mismatch";
      else if (expected_sat && expect_k > 0 && v.k > expect_k)
        row.status = "mismatch";
      else
        row.status = "ok";
    } catch (const std::exception &ex) {
      row.status = std::string("error: ") + ex.what();
    }
    if (row.status != "ok")
      report.ok = false;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string to_csv(const SuiteReport &r) {
  auto quote = [](const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
      return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"')
        out += '"';
      out += c;
    }
    return out + "\"";
  };
  std::ostringstream os;
  os << "file,expected,verdict,k,wall_ms,assertions,bytes,verified,status\n";
  for (const auto &row : r.rows)
    os << quote(row.file) << ',' << quote(row.expected) << ',' << row.verdict << ',' << row.k
       << ',' << row.wall_ms << ',' << row.assertions << ',' << row.bytes << ','
       << (row.verified ? "true" : "false") << ',' << quote(row.status) << '\n';
  return os.str();
}

} // namespace cltlb
