#include "cltlb/witness.hpp"

#include "cltlb/existence.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <stdexcept>
#include <unordered_map>

namespace cltlb {

int Witness::sigma_last() const {
  if (sigma.empty())
    return sigma_first - 1;
  return sigma_first + static_cast<int>(sigma.begin()->second.size()) - 1;
}

const Value &Witness::at(const std::string &var, int pos) const {
  auto it = sigma.find(var);
  if (it == sigma.end())
    throw std::out_of_range("witness has no values for '" + var + "'");
  const int idx = pos - sigma_first;
  if (idx < 0 || idx >= static_cast<int>(it->second.size()))
    throw std::out_of_range("witness has no value for '" + var + "' at " + std::to_string(pos));
  return it->second[idx];
}

Witness extract_witness(const SolverResult &result, const EncodingContext &ctx) {
  Witness w;
  w.k = ctx.k;
  const auto loop = get_model_values(result, {ctx.loop()}).front();
  if (loop.is_bool || loop.num.denominator() != 1)
    throw std::runtime_error("loop is not an integer in the model");
  w.loop = static_cast<int>(loop.num.numerator());
  w.sigma_first = ctx.b.look_back;
  const int last = ctx.k + ctx.b.look_ahead;
  for (const auto &var : variables_of(ctx.phi)) {
    std::vector<SExpr> points;
    for (int p = w.sigma_first; p <= last; ++p)
      points.push_back(ctx.sigma(var, p));
    auto row = get_model_values(result, points);
    auto &out = w.sigma[var];
    for (const auto &v : row) {
      if (v.is_bool)
        throw std::runtime_error("boolean value for a term of '" + var + "'");
      out.push_back(v.num);
    }
  }
  for (size_t s = 0; s < ctx.subs.size(); ++s) {
    w.sub_names.push_back(to_string(ctx.subs[s]));
    std::vector<SExpr> points;
    for (int i = 0; i <= ctx.k + 1; ++i)
      points.push_back(ctx.pred_at(static_cast<int>(s), i));
    std::vector<bool> row;
    for (const auto &v : get_model_values(result, points))
      row.push_back(v.is_bool && v.b);
    w.truth.push_back(std::move(row));
  }
  w.props.assign(ctx.k + 1, {});
  return w;
}

nlohmann::json to_json(const Witness &w) {
  nlohmann::json j;
  j["k"] = w.k;
  j["loop"] = w.loop;
  j["sigma_first"] = w.sigma_first;
  nlohmann::json sigma = nlohmann::json::object();
  for (const auto &[var, row] : w.sigma) {
    nlohmann::json vals = nlohmann::json::array();
    for (const auto &v : row) {
      if (v.denominator() == 1)
        vals.push_back(v.numerator());
      else
        vals.push_back(std::to_string(v.numerator()) + "/" + std::to_string(v.denominator()));
    }
    sigma[var] = vals;
  }
  j["sigma"] = sigma;
  nlohmann::json props = nlohmann::json::array();
  for (const auto &ps : w.props)
    props.push_back(std::vector<std::string>(ps.begin(), ps.end()));
  j["props"] = props;
  j["verified"] = w.verified;
  return j;
}

namespace {

long long floor_mod(long long v, long long c) { return ((v % c) + c) % c; }

Value value_mod(const Value &v, long long c) {
  if (v.denominator() != 1)
    throw std::invalid_argument("mod constraint over a non-integer value");
  return Value(floor_mod(v.numerator(), c));
}

template <class ValueOf> bool atom_holds(const Atom &a, ValueOf value_of) {
  switch (a.rel) {
  case Rel::Lt:
    return value_of(a.lhs) < value_of(a.rhs);
  case Rel::Eq:
    return value_of(a.lhs) == value_of(a.rhs);
  case Rel::ModConst:
    return value_mod(value_of(a.lhs), a.modulus) == Value(floor_mod(a.offset, a.modulus));
  case Rel::ModTerm:
    return value_mod(value_of(a.lhs) - value_of(a.rhs) - Value(a.offset), a.modulus) == Value(0);
  }
  return false;
}

int past_height(const Formula &f) {
  if (!f)
    return 0;
  const int below = std::max(past_height(f->a), past_height(f->b));
  return below + (is_past(f->op) ? 1 : 0);
}

// Evaluates every subformula on a lasso whose states 0..k carry the truth of
// the leaves (atoms and propositions), with k followed by `loop`. The loop
// body is unrolled until past subformulae repeat at the back edge.
class LassoEvaluator {
public:
  explicit LassoEvaluator(const Formula &phi) : subs_(subformulae(phi)) {
    for (size_t s = 0; s < subs_.size(); ++s) {
      index_[to_string(subs_[s])] = static_cast<int>(s);
      if (subs_[s]->op == Op::Atom || subs_[s]->op == Op::Prop)
        leaves_.push_back(static_cast<int>(s));
    }
    height_ = past_height(phi);
  }

  const std::vector<Formula> &subs() const { return subs_; }
  const std::vector<int> &leaves() const { return leaves_; }
  int index_of(const std::string &name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }

  // leaf_truth[state][i] is the truth of subs()[leaves()[i]]. Returns the
  // value of every subformula at positions 0..k.
  std::vector<std::vector<char>> eval(const std::vector<std::vector<char>> &leaf_truth, int k,
                                      int loop) const {
    std::vector<std::vector<char>> val;
    const int period = k - loop + 1;
    for (int copies = height_ + 1;; ++copies) {
      const int n = loop + copies * period;
      const int back = loop + (copies - 1) * period;
      val = eval_unrolled(leaf_truth, k, loop, n, back);
      if (past_stable(val, n, back) || copies > height_ + 8)
        break;
    }
    for (auto &row : val)
      row.resize(k + 1);
    return val;
  }

private:
  std::vector<Formula> subs_;
  std::map<std::string, int> index_;
  std::vector<int> leaves_;
  int height_ = 0;

  int child(const Formula &f) const { return index_.at(to_string(f)); }

  static int state_of(int pos, int k, int loop) {
    return pos <= k ? pos : loop + (pos - loop) % (k - loop + 1);
  }

  std::vector<std::vector<char>> eval_unrolled(const std::vector<std::vector<char>> &leaf_truth,
                                               int k, int loop, int n, int back) const {
    std::vector<std::vector<char>> val(subs_.size(), std::vector<char>(n, 0));
    auto succ = [&](int p) { return p + 1 < n ? p + 1 : back; };
    std::vector<int> leaf_slot(subs_.size(), -1);
    for (size_t i = 0; i < leaves_.size(); ++i)
      leaf_slot[leaves_[i]] = static_cast<int>(i);

    for (size_t s = 0; s < subs_.size(); ++s) {
      const auto &f = subs_[s];
      auto &v = val[s];
      const std::vector<char> *a = f->a ? &val[child(f->a)] : nullptr;
      const std::vector<char> *b = f->b ? &val[child(f->b)] : nullptr;
      switch (f->op) {
      case Op::True:
        std::fill(v.begin(), v.end(), 1);
        break;
      case Op::False:
        break;
      case Op::Prop:
      case Op::Atom:
        for (int p = 0; p < n; ++p)
          v[p] = leaf_truth[state_of(p, k, loop)][leaf_slot[s]];
        break;
      case Op::Not:
        for (int p = 0; p < n; ++p)
          v[p] = !(*a)[p];
        break;
      case Op::And:
        for (int p = 0; p < n; ++p)
          v[p] = (*a)[p] && (*b)[p];
        break;
      case Op::Or:
        for (int p = 0; p < n; ++p)
          v[p] = (*a)[p] || (*b)[p];
        break;
      case Op::Next:
        for (int p = 0; p < n; ++p)
          v[p] = (*a)[succ(p)];
        break;
      case Op::Until:
      case Op::Release: {
        const bool until = f->op == Op::Until;
        std::fill(v.begin(), v.end(), until ? 0 : 1);
        for (bool changed = true; changed;) {
          changed = false;
          for (int p = n - 1; p >= 0; --p) {
            const char nv = until ? ((*b)[p] || ((*a)[p] && v[succ(p)]))
                                  : ((*b)[p] && ((*a)[p] || v[succ(p)]));
            if (nv != v[p]) {
              v[p] = nv;
              changed = true;
            }
          }
        }
        break;
      }
      case Op::Prev:
      case Op::WeakPrev:
        v[0] = f->op == Op::WeakPrev;
        for (int p = 1; p < n; ++p)
          v[p] = (*a)[p - 1];
        break;
      case Op::Since:
        v[0] = (*b)[0];
        for (int p = 1; p < n; ++p)
          v[p] = (*b)[p] || ((*a)[p] && v[p - 1]);
        break;
      case Op::Trigger:
        v[0] = (*b)[0];
        for (int p = 1; p < n; ++p)
          v[p] = (*b)[p] && ((*a)[p] || v[p - 1]);
        break;
      }
    }
    return val;
  }

  // The value each past subformula would take right after position n-1
  // must equal its value at the back-edge target.
  bool past_stable(const std::vector<std::vector<char>> &val, int n, int back) const {
    for (size_t s = 0; s < subs_.size(); ++s) {
      const auto &f = subs_[s];
      if (!is_past(f->op))
        continue;
      const auto &v = val[s];
      char next = 0;
      auto a = [&](int p) { return val[child(f->a)][p]; };
      auto b = [&](int p) { return val[child(f->b)][p]; };
      switch (f->op) {
      case Op::Prev:
      case Op::WeakPrev:
        next = a(n - 1);
        break;
      case Op::Since:
        next = b(back) || (a(back) && v[n - 1]);
        break;
      case Op::Trigger:
        next = b(back) && (a(back) || v[n - 1]);
        break;
      default:
        break;
      }
      if (next != v[back])
        return false;
    }
    return true;
  }
};

std::vector<std::vector<char>> leaf_truth_of(const LassoEvaluator &ev, const Witness &w) {
  std::vector<std::vector<char>> out(w.k + 1, std::vector<char>(ev.leaves().size(), 0));
  for (int s = 0; s <= w.k; ++s) {
    for (size_t i = 0; i < ev.leaves().size(); ++i) {
      const auto &f = ev.subs()[ev.leaves()[i]];
      if (f->op == Op::Prop) {
        out[s][i] = s < static_cast<int>(w.props.size()) && w.props[s].count(f->prop);
      } else {
        out[s][i] = atom_holds(f->atom, [&](const Term &t) {
          return t.is_const ? Value(t.value) : w.at(t.var, s + t.depth);
        });
      }
    }
  }
  return out;
}

} // namespace

LassoCheck check_lasso(const Formula &phi, const Witness &w, bool claimed) {
  LassoCheck out;
  if (w.loop < 1 || w.loop > w.k) {
    out.mismatches.push_back("loop " + std::to_string(w.loop) + " outside [1, k]");
    return out;
  }
  LassoEvaluator ev(phi);
  std::vector<std::vector<char>> leaves;
  try {
    leaves = leaf_truth_of(ev, w);
  } catch (const std::exception &ex) {
    out.mismatches.push_back(ex.what());
    return out;
  }
  bool periodic = true;
  for (size_t i = 0; i < ev.leaves().size(); ++i) {
    if (ev.subs()[ev.leaves()[i]]->op != Op::Atom)
      continue;
    if (leaves[w.loop - 1][i] != leaves[w.k][i]) {
      periodic = false;
      out.mismatches.push_back(to_string(ev.subs()[ev.leaves()[i]]) + " differs at loop-1 and k");
    }
  }
  const auto val = ev.eval(leaves, w.k, w.loop);
  out.holds = periodic && val.back()[0];
  if (claimed) {
    for (size_t s = 0; s < w.sub_names.size() && s < w.truth.size(); ++s) {
      const int idx = ev.index_of(w.sub_names[s]);
      if (idx < 0)
        continue;
      for (int i = 0; i <= w.k; ++i)
        if (static_cast<bool>(val[idx][i]) != w.truth[s][i])
          out.mismatches.push_back(w.sub_names[s] + "@" + std::to_string(i));
    }
  }
  return out;
}

bool verify_lasso(const Formula &phi, const Witness &w) { return check_lasso(phi, w).holds; }

int SymbolicLasso::slot_of(int c, const Term &subject, int h) const {
  const auto &cs = slots[c];
  for (size_t i = 0; i < cs.size(); ++i)
    if (cs[i].first == subject && (subject.is_const || cs[i].second == h))
      return static_cast<int>(i);
  throw std::out_of_range("no slot for " + to_string(subject));
}

int SymbolicLasso::sign(int j, int c, int a, int b) const {
  size_t offset = 0;
  for (int i = 0; i < c; ++i)
    offset += slots[i].size() * slots[i].size();
  return sv.at(j).order.at(offset + a * slots[c].size() + b);
}

bool SymbolicLasso::periodic() const { return sv.at(loop - 1) == sv.at(k); }

SymbolicLasso induced_symbolic_model(const Witness &w, const Formula &phi, const Theory &theory,
                                     const EncodeOptions &opts) {
  SymbolicLasso l;
  l.k = w.k;
  l.loop = w.loop;
  l.b = bounds(phi);
  l.partition = valuation_partition(phi, theory, opts);
  for (size_t c = 0; c < l.partition.classes.size(); ++c) {
    std::vector<std::pair<Term, int>> cs;
    for (const auto &subject : class_subjects(l.partition, static_cast<int>(c))) {
      if (subject.is_const) {
        cs.emplace_back(subject, 0);
        continue;
      }
      for (int h = l.b.look_back; h <= l.b.look_ahead; ++h)
        cs.emplace_back(subject, h);
    }
    l.slots.push_back(std::move(cs));
  }
  std::set<std::pair<Term, long long>> keys;
  for (const auto &a : atoms_of(phi)) {
    if (a.rel == Rel::ModConst || a.rel == Rel::ModTerm)
      keys.emplace(Term::variable(a.lhs.var), a.modulus);
    if (a.rel == Rel::ModTerm)
      keys.emplace(Term::variable(a.rhs.var), a.modulus);
  }
  l.residue_keys.assign(keys.begin(), keys.end());

  for (int j = 0; j <= w.k; ++j) {
    auto value = [&](const std::pair<Term, int> &slot) {
      return slot.first.is_const ? Value(slot.first.value) : w.at(slot.first.var, j + slot.second);
    };
    SymbolicValuation v;
    for (const auto &cs : l.slots)
      for (const auto &a : cs)
        for (const auto &b : cs) {
          const Value x = value(a), y = value(b);
          v.order.push_back(static_cast<std::int8_t>(x < y ? -1 : (y < x ? 1 : 0)));
        }
    for (const auto &[t, c] : l.residue_keys)
      for (int h = l.b.look_back; h <= l.b.look_ahead; ++h)
        v.residues.push_back(value_mod(w.at(t.var, j + h), c).numerator());
    l.sv.push_back(std::move(v));
  }
  return l;
}

namespace {

// Best strictness (-1 none, 0 non-strict, 1 strict) of monotone paths from
// (src, from) to (src, to) over the point graph of class c.
class PointGraph {
public:
  PointGraph(const SymbolicLasso &l, int c)
      : l_(l), c_(c), subj_(class_subjects(l.partition, c)), lb_(l.b.look_back),
        npos_(l.k + l.b.look_ahead - l.b.look_back + 1), lambda_(l.b.width()) {}

  const std::vector<Term> &subjects() const { return subj_; }

  // Sign of value(x at p1) - value(y at p2), |p1 - p2| < lambda.
  int cmp(int x, int p1, int y, int p2) const {
    const int lo = std::min(p1, p2), hi = std::max(p1, p2);
    const int j = std::max(0, hi - l_.b.look_ahead);
    if (j > l_.k || lo - j < lb_)
      throw std::logic_error("points share no window");
    return l_.sign(j, c_, l_.slot_of(c_, subj_[x], p1 - j), l_.slot_of(c_, subj_[y], p2 - j));
  }

  int reach(int x, int from, int to, bool forward) const {
    const int n = static_cast<int>(subj_.size()) * npos_;
    std::vector<char> seen(2 * n, 0);
    std::deque<std::pair<int, int>> queue;
    auto id = [&](int s, int p) { return s * npos_ + (p - lb_); };
    queue.emplace_back(id(x, from), 0);
    seen[2 * id(x, from)] = 1;
    while (!queue.empty()) {
      auto [node, strict] = queue.front();
      queue.pop_front();
      const int s = node / npos_, p = node % npos_ + lb_;
      for (int q = p; q < p + lambda_ && q - lb_ < npos_; ++q)
        for (int t = 0; t < static_cast<int>(subj_.size()); ++t) {
          if (t == s && q == p)
            continue;
          const int sg = cmp(s, p, t, q);
          const bool ok = forward ? sg <= 0 : sg >= 0;
          if (!ok)
            continue;
          const int ns = strict || sg != 0;
          const int nid = id(t, q);
          if (!seen[2 * nid + ns]) {
            seen[2 * nid + ns] = 1;
            queue.emplace_back(nid, ns);
          }
        }
    }
    const int target = id(x, to);
    return seen[2 * target + 1] ? 1 : (seen[2 * target] ? 0 : -1);
  }

private:
  const SymbolicLasso &l_;
  int c_;
  std::vector<Term> subj_;
  int lb_, npos_, lambda_;
};

} // namespace

bool check_property_c_graph(const SymbolicLasso &lasso, bool self_pairs) {
  const int L = lasso.loop - 1;
  const int lb = lasso.b.look_back, la = lasso.b.look_ahead;
  for (size_t c = 0; c < lasso.partition.classes.size(); ++c) {
    PointGraph g(lasso, static_cast<int>(c));
    const int n = static_cast<int>(g.subjects().size());
    std::vector<std::vector<int>> up(n), down(n);
    for (int x = 0; x < n; ++x)
      for (int h = lb; h <= la; ++h) {
        up[x].push_back(g.reach(x, L + h, lasso.k + h, true));
        down[x].push_back(g.reach(x, L + h, lasso.k + h, false));
      }
    for (int x = 0; x < n; ++x)
      for (int x2 = 0; x2 < n; ++x2) {
        const Term &a = g.subjects()[x], &b = g.subjects()[x2];
        if (a.is_const && b.is_const)
          continue;
        if (x == x2 && !(self_pairs && !a.is_const))
          continue;
        for (int h = lb; h <= la; ++h)
          for (int h2 = lb; h2 <= la; ++h2) {
            const int f = up[x][h - lb], d = down[x2][h2 - lb];
            if (f < 0 || d < 0 || (f == 0 && d == 0))
              continue;
            if (g.cmp(x, L + h, x2, L + h2) < 0)
              return true;
          }
      }
  }
  return false;
}

BruteForceResult brute_force_ksat(const Formula &phi, int k, const Theory &theory,
                                  const BruteForceOptions &opts) {
  if (!propositions_of(phi).empty())
    throw std::invalid_argument("brute force expects a formula without propositions");
  if (k < 1)
    throw std::invalid_argument("bound k must be at least 1");
  const auto var_set = variables_of(phi);
  const std::vector<std::string> vars(var_set.begin(), var_set.end());
  const Bounds b = bounds(phi);
  const int first = b.look_back, width = k + b.look_ahead - b.look_back + 1;
  const size_t cells = vars.size() * static_cast<size_t>(width);
  const size_t d = opts.domain.size();
  if (d == 0)
    throw std::invalid_argument("empty domain");

  std::uint64_t total = 1;
  for (size_t i = 0; i < cells; ++i) {
    if (total > opts.cap / d)
      throw std::invalid_argument("search space exceeds the cap of " + std::to_string(opts.cap) +
                                  " tables");
    total *= d;
  }

  LassoEvaluator ev(phi);
  // Leaves as (atom, variable index per term) for fast evaluation.
  std::vector<Atom> atoms;
  for (int leaf : ev.leaves())
    atoms.push_back(ev.subs()[leaf]->atom);
  auto var_index = [&](const std::string &v) {
    return static_cast<int>(std::find(vars.begin(), vars.end(), v) - vars.begin());
  };

  std::vector<size_t> digit(cells, 0);
  std::vector<long long> val(cells, opts.domain[0]);
  auto cell = [&](int vi, int pos) { return static_cast<size_t>(vi) * width + (pos - first); };

  std::unordered_map<std::string, bool> memo;
  BruteForceResult out;
  Witness w;
  w.k = k;
  w.sigma_first = first;
  for (const auto &v : vars)
    w.sigma[v].assign(width, Value(0));
  w.props.assign(k + 1, {});

  std::vector<std::vector<char>> leaf(k + 1, std::vector<char>(atoms.size(), 0));
  for (std::uint64_t n = 0; n < total; ++n) {
    if (n > 0) {
      for (size_t i = 0;; ++i) {
        if (++digit[i] < d) {
          val[i] = opts.domain[digit[i]];
          break;
        }
        digit[i] = 0;
        val[i] = opts.domain[0];
      }
    }
    ++out.tables;
    std::string key;
    for (int s = 0; s <= k; ++s)
      for (size_t i = 0; i < atoms.size(); ++i) {
        leaf[s][i] = atom_holds(atoms[i], [&](const Term &t) {
          return t.is_const ? Value(t.value) : Value(val[cell(var_index(t.var), s + t.depth)]);
        });
        key.push_back(leaf[s][i] ? '1' : '0');
      }
    bool witness_ready = false;
    for (int loop = 1; loop <= k; ++loop) {
      bool periodic_atoms = true;
      for (size_t i = 0; i < atoms.size() && periodic_atoms; ++i)
        periodic_atoms = leaf[loop - 1][i] == leaf[k][i];
      if (!periodic_atoms)
        continue;
      const std::string mk = key + ":" + std::to_string(loop);
      auto it = memo.find(mk);
      if (it == memo.end())
        it = memo.emplace(mk, ev.eval(leaf, k, loop).back()[0] != 0).first;
      if (!it->second)
        continue;
      if (!witness_ready) {
        for (size_t vi = 0; vi < vars.size(); ++vi)
          for (int p = 0; p < width; ++p)
            w.sigma[vars[vi]][p] = Value(val[vi * width + p]);
        witness_ready = true;
      }
      w.loop = loop;
      const SymbolicLasso lasso = induced_symbolic_model(w, phi, theory, opts.encode);
      if (!lasso.periodic())
        continue;
      if (theory.discrete() && check_property_c_graph(lasso, opts.encode.self_pairs))
        continue;
      w.verified = true;
      out.sat = true;
      out.witness = w;
      return out;
    }
  }
  return out;
}

} // namespace cltlb
