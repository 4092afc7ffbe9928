#include "cltlb/formula.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace cltlb {

std::string Theory::str() const {
  switch (name) {
  case TheoryName::Ipc:
    return "ipc";
  case TheoryName::Int:
    return "int";
  case TheoryName::Nat:
    return "nat";
  case TheoryName::Rat:
    return "rat";
  case TheoryName::Real:
    return "real";
  }
  return "int";
}

std::optional<Theory> Theory::from_string(const std::string &s) {
  static const std::map<std::string, TheoryName> names = {
      {"ipc", TheoryName::Ipc}, {"int", TheoryName::Int},
      {"nat", TheoryName::Nat}, {"rat", TheoryName::Rat},
      {"real", TheoryName::Real}};
  auto it = names.find(s);
  if (it == names.end())
    return std::nullopt;
  return Theory{it->second};
}

Term Term::variable(std::string name, int depth) {
  Term t;
  t.var = std::move(name);
  t.depth = depth;
  return t;
}

Term Term::constant(long long v) {
  Term t;
  t.is_const = true;
  t.value = v;
  return t;
}

Term normalize_term(const RawTerm &raw) {
  Term t = raw.base;
  if (t.is_const) {
    t.depth = 0;
    return t;
  }
  for (char c : raw.ops)
    t.depth += (c == 'X') ? 1 : -1;
  return t;
}

std::string Atom::kind_name() const {
  switch (rel) {
  case Rel::Lt:
    return (lhs.is_const || rhs.is_const) ? "LTconst" : "LT";
  case Rel::Eq:
    return (lhs.is_const || rhs.is_const) ? "EQconst" : "EQ";
  case Rel::ModConst:
    return "ModEQconst";
  case Rel::ModTerm:
    return "ModEQterm";
  }
  return "LT";
}

std::vector<Term> Atom::terms() const {
  if (rel == Rel::ModConst)
    return {lhs};
  return {lhs, rhs};
}

namespace {

Formula make(Op op, Formula a = nullptr, Formula b = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

} // namespace

Formula f_true() { return make(Op::True); }
Formula f_false() { return make(Op::False); }

Formula f_prop(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Prop;
  n->prop = std::move(name);
  return n;
}

Formula f_atom(Atom atom) {
  auto n = std::make_shared<Node>();
  n->op = Op::Atom;
  n->atom = std::move(atom);
  return n;
}

Formula f_not(Formula a) { return make(Op::Not, std::move(a)); }
Formula f_and(Formula a, Formula b) { return make(Op::And, std::move(a), std::move(b)); }
Formula f_or(Formula a, Formula b) { return make(Op::Or, std::move(a), std::move(b)); }
Formula f_next(Formula a) { return make(Op::Next, std::move(a)); }
Formula f_prev(Formula a) { return make(Op::Prev, std::move(a)); }
Formula f_weak_prev(Formula a) { return make(Op::WeakPrev, std::move(a)); }
Formula f_until(Formula a, Formula b) { return make(Op::Until, std::move(a), std::move(b)); }
Formula f_since(Formula a, Formula b) { return make(Op::Since, std::move(a), std::move(b)); }
Formula f_release(Formula a, Formula b) { return make(Op::Release, std::move(a), std::move(b)); }
Formula f_trigger(Formula a, Formula b) { return make(Op::Trigger, std::move(a), std::move(b)); }

Formula f_globally(Formula a) { return f_release(f_false(), std::move(a)); }
Formula f_finally(Formula a) { return f_until(f_true(), std::move(a)); }
Formula f_historically(Formula a) { return f_trigger(f_false(), std::move(a)); }
Formula f_once(Formula a) { return f_since(f_true(), std::move(a)); }
Formula f_implies(Formula a, Formula b) { return f_or(f_not(std::move(a)), std::move(b)); }

Formula f_lt(Term a, Term b) {
  Atom at;
  at.rel = Rel::Lt;
  at.lhs = std::move(a);
  at.rhs = std::move(b);
  return f_atom(at);
}

Formula f_eq(Term a, Term b) {
  Atom at;
  at.rel = Rel::Eq;
  at.lhs = std::move(a);
  at.rhs = std::move(b);
  return f_atom(at);
}

Formula f_and_all(const std::vector<Formula> &fs) {
  if (fs.empty())
    return f_true();
  Formula acc = fs.front();
  for (size_t i = 1; i < fs.size(); ++i)
    acc = f_and(acc, fs[i]);
  return acc;
}

Formula f_or_all(const std::vector<Formula> &fs) {
  if (fs.empty())
    return f_false();
  Formula acc = fs.front();
  for (size_t i = 1; i < fs.size(); ++i)
    acc = f_or(acc, fs[i]);
  return acc;
}

bool is_binary(Op op) {
  switch (op) {
  case Op::And:
  case Op::Or:
  case Op::Until:
  case Op::Since:
  case Op::Release:
  case Op::Trigger:
    return true;
  default:
    return false;
  }
}

bool is_unary(Op op) {
  return op == Op::Not || op == Op::Next || op == Op::Prev || op == Op::WeakPrev;
}

bool is_temporal(Op op) {
  switch (op) {
  case Op::Next:
  case Op::Prev:
  case Op::WeakPrev:
  case Op::Until:
  case Op::Since:
  case Op::Release:
  case Op::Trigger:
    return true;
  default:
    return false;
  }
}

bool is_past(Op op) {
  return op == Op::Prev || op == Op::WeakPrev || op == Op::Since || op == Op::Trigger;
}

bool equal(const Formula &x, const Formula &y) {
  if (x == y)
    return true;
  if (!x || !y || x->op != y->op)
    return false;
  switch (x->op) {
  case Op::True:
  case Op::False:
    return true;
  case Op::Prop:
    return x->prop == y->prop;
  case Op::Atom:
    return x->atom == y->atom;
  default:
    break;
  }
  if (!equal(x->a, y->a))
    return false;
  return !is_binary(x->op) || equal(x->b, y->b);
}

std::string to_string(const Term &t) {
  if (t.is_const)
    return std::to_string(t.value);
  std::string s = t.var;
  const char op = t.depth >= 0 ? 'X' : 'Y';
  for (int i = 0; i < std::abs(t.depth); ++i)
    s = std::string(1, op) + "(" + s + ")";
  return s;
}

std::string to_string(const Atom &a) {
  switch (a.rel) {
  case Rel::Lt:
    return to_string(a.lhs) + " < " + to_string(a.rhs);
  case Rel::Eq:
    return to_string(a.lhs) + " = " + to_string(a.rhs);
  case Rel::ModConst:
    return to_string(a.lhs) + " mod " + std::to_string(a.modulus) + " = " +
           std::to_string(a.offset);
  case Rel::ModTerm: {
    std::string s = to_string(a.lhs) + " mod " + std::to_string(a.modulus) +
                    " = " + to_string(a.rhs);
    if (a.offset > 0)
      s += " + " + std::to_string(a.offset);
    else if (a.offset < 0)
      s += " - " + std::to_string(-a.offset);
    return s;
  }
  }
  return "";
}

namespace {

const char *binary_symbol(Op op) {
  switch (op) {
  case Op::And:
    return "&";
  case Op::Or:
    return "|";
  case Op::Until:
    return "U";
  case Op::Since:
    return "S";
  case Op::Release:
    return "R";
  case Op::Trigger:
    return "T";
  default:
    return "?";
  }
}

std::string render(const Formula &f, bool top) {
  switch (f->op) {
  case Op::True:
    return "true";
  case Op::False:
    return "false";
  case Op::Prop:
    return f->prop;
  case Op::Atom:
    return top ? to_string(f->atom) : "(" + to_string(f->atom) + ")";
  case Op::Not:
    return "!" + render(f->a, false);
  case Op::Next:
    return "X(" + render(f->a, true) + ")";
  case Op::Prev:
    return "Y(" + render(f->a, true) + ")";
  case Op::WeakPrev:
    return "Z(" + render(f->a, true) + ")";
  default: {
    std::string s = render(f->a, false) + " " + binary_symbol(f->op) + " " +
                    render(f->b, false);
    return top ? s : "(" + s + ")";
  }
  }
}

} // namespace

std::string to_string(const Formula &f) { return render(f, true); }

namespace {

void visit(const Formula &f, const std::function<void(const Node &)> &fn) {
  fn(*f);
  if (f->a)
    visit(f->a, fn);
  if (f->b)
    visit(f->b, fn);
}

} // namespace

std::vector<Atom> atoms_of(const Formula &f) {
  std::vector<Atom> out;
  visit(f, [&](const Node &n) {
    if (n.op == Op::Atom)
      out.push_back(n.atom);
  });
  return out;
}

Bounds bounds(const Formula &f) {
  Bounds b;
  for (const auto &a : atoms_of(f))
    for (const auto &t : a.terms()) {
      if (t.is_const)
        continue;
      b.look_back = std::min(b.look_back, t.depth);
      b.look_ahead = std::max(b.look_ahead, t.depth);
    }
  return b;
}

std::set<std::string> variables_of(const Formula &f) {
  std::set<std::string> vars;
  for (const auto &a : atoms_of(f))
    for (const auto &t : a.terms())
      if (!t.is_const)
        vars.insert(t.var);
  return vars;
}

std::set<std::string> propositions_of(const Formula &f) {
  std::set<std::string> props;
  visit(f, [&](const Node &n) {
    if (n.op == Op::Prop)
      props.insert(n.prop);
  });
  return props;
}

std::vector<Term> terms_of(const Formula &f) {
  const Bounds b = bounds(f);
  std::vector<Term> out;
  for (const auto &v : variables_of(f))
    for (int d = b.look_back; d <= b.look_ahead; ++d)
      out.push_back(Term::variable(v, d));
  return out;
}

std::vector<long long> constants_of(const Formula &f, ConstMode mode,
                                    const Theory &theory) {
  if (mode == ConstMode::Interval && !theory.discrete())
    throw std::invalid_argument("interval extension undefined for dense domains");
  std::set<long long> cs;
  for (const auto &a : atoms_of(f)) {
    if (a.rel != Rel::Lt && a.rel != Rel::Eq)
      continue;
    for (const auto &t : a.terms())
      if (t.is_const)
        cs.insert(t.value);
  }
  if (mode == ConstMode::Interval && !cs.empty()) {
    const long long lo = *cs.begin(), hi = *cs.rbegin();
    std::vector<long long> out;
    for (long long v = lo; v <= hi; ++v)
      out.push_back(v);
    return out;
  }
  return {cs.begin(), cs.end()};
}

std::optional<ConstMode> const_mode_from_string(const std::string &s) {
  if (s == "occurring")
    return ConstMode::Occurring;
  if (s == "interval")
    return ConstMode::Interval;
  return std::nullopt;
}

std::string to_string(ConstMode m) {
  return m == ConstMode::Occurring ? "occurring" : "interval";
}

std::vector<Formula> subformulae(const Formula &f) {
  std::vector<Formula> out;
  std::unordered_set<std::string> seen;
  std::function<void(const Formula &)> walk = [&](const Formula &g) {
    if (g->a)
      walk(g->a);
    if (g->b)
      walk(g->b);
    if (seen.insert(to_string(g)).second)
      out.push_back(g);
  };
  walk(f);
  return out;
}

int VarPartition::class_of(const std::string &var) const {
  for (size_t i = 0; i < classes.size(); ++i)
    if (std::find(classes[i].begin(), classes[i].end(), var) != classes[i].end())
      return static_cast<int>(i);
  return -1;
}

VarPartition partition_variables(const Formula &f) {
  const auto vars_set = variables_of(f);
  std::vector<std::string> vars(vars_set.begin(), vars_set.end());
  std::map<std::string, int> index;
  for (size_t i = 0; i < vars.size(); ++i)
    index[vars[i]] = static_cast<int>(i);

  std::vector<int> parent(vars.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };

  const auto atoms = atoms_of(f);
  for (const auto &a : atoms) {
    int first = -1;
    for (const auto &t : a.terms()) {
      if (t.is_const)
        continue;
      const int r = find(index[t.var]);
      if (first < 0)
        first = r;
      else
        parent[r] = first;
    }
  }

  std::map<int, std::set<long long>> consts_by_root;
  for (const auto &a : atoms) {
    if (a.rel != Rel::Lt && a.rel != Rel::Eq)
      continue;
    int root = -1;
    std::vector<long long> cs;
    for (const auto &t : a.terms()) {
      if (t.is_const)
        cs.push_back(t.value);
      else
        root = find(index[t.var]);
    }
    if (root >= 0)
      consts_by_root[root].insert(cs.begin(), cs.end());
  }

  // Classes come out ordered by their smallest member since vars is sorted.
  VarPartition p;
  std::map<int, size_t> slot;
  for (size_t i = 0; i < vars.size(); ++i) {
    const int r = find(static_cast<int>(i));
    auto [it, fresh] = slot.emplace(r, p.classes.size());
    if (fresh) {
      p.classes.emplace_back();
      const auto &cs = consts_by_root[r];
      p.consts.emplace_back(cs.begin(), cs.end());
    }
    p.classes[it->second].push_back(vars[i]);
  }
  return p;
}

VarPartition single_class(const VarPartition &p) {
  VarPartition out;
  if (p.classes.empty())
    return out;
  std::vector<std::string> vars;
  std::set<long long> cs;
  for (size_t i = 0; i < p.classes.size(); ++i) {
    vars.insert(vars.end(), p.classes[i].begin(), p.classes[i].end());
    cs.insert(p.consts[i].begin(), p.consts[i].end());
  }
  std::sort(vars.begin(), vars.end());
  out.classes.push_back(vars);
  out.consts.emplace_back(cs.begin(), cs.end());
  return out;
}

VarPartition with_interval_constants(const VarPartition &p) {
  VarPartition out = p;
  for (auto &cs : out.consts) {
    if (cs.empty())
      continue;
    const long long lo = cs.front(), hi = cs.back();
    cs.clear();
    for (long long v = lo; v <= hi; ++v)
      cs.push_back(v);
  }
  return out;
}

} // namespace cltlb
