#include "cltlb/encoder.hpp"

#include "cltlb/existence.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace cltlb {

namespace {

std::string depth_tag(int d) {
  if (d > 0)
    return "p" + std::to_string(d);
  if (d < 0)
    return "m" + std::to_string(-d);
  return "0";
}

long long norm_mod(long long d, long long c) { return ((d % c) + c) % c; }

SExpr relation_at(const EncodingContext &ctx, const Atom &a, const SExpr &idx) {
  switch (a.rel) {
  case Rel::Lt:
    return app("<", {ctx.term_at(a.lhs, idx), ctx.term_at(a.rhs, idx)});
  case Rel::Eq:
    return app("=", {ctx.term_at(a.lhs, idx), ctx.term_at(a.rhs, idx)});
  case Rel::ModConst:
    return app("=", {ctx.residue_at(a.lhs, a.modulus, idx), num(norm_mod(a.offset, a.modulus))});
  case Rel::ModTerm: {
    const long long d = norm_mod(a.offset, a.modulus);
    SExpr r1 = ctx.residue_at(a.lhs, a.modulus, idx);
    SExpr r2 = ctx.residue_at(a.rhs, a.modulus, idx);
    if (d == 0)
      return app("=", {r1, r2});
    return mk_or({app("=", {r1, app("+", {r2, num(d)})}),
                  app("=", {r1, app("+", {r2, num(d - a.modulus)})})});
  }
  }
  return sym("false");
}

} // namespace

int EncodingContext::index_of(const Formula &f) const {
  auto it = sub_index.find(to_string(f));
  if (it == sub_index.end())
    throw std::logic_error("not a subformula: " + to_string(f));
  return it->second;
}

SExpr EncodingContext::lit(long long v) const {
  if (sort == "Real") {
    SExpr d = sym(std::to_string(v < 0 ? -v : v) + ".0");
    return v < 0 ? app("-", {d}) : d;
  }
  return num(v);
}

SExpr EncodingContext::term_at(const Term &t, const SExpr &idx) const {
  if (t.is_const)
    return lit(t.value);
  auto it = term_fn.find(t);
  if (it == term_fn.end())
    throw std::logic_error("term outside the window: " + to_string(t));
  return app(it->second, {idx});
}

SExpr EncodingContext::residue_at(const Term &t, long long c, const SExpr &idx) const {
  return app("r_" + t.var + "_" + depth_tag(t.depth) + "_" + std::to_string(c), {idx});
}

SExpr EncodingContext::quotient_at(const Term &t, long long c, const SExpr &idx) const {
  return app("q_" + t.var + "_" + depth_tag(t.depth) + "_" + std::to_string(c), {idx});
}

SExpr EncodingContext::sigma(const std::string &var, int pos) const {
  if (pos > k)
    return term_at(Term::variable(var, pos - k), k);
  if (pos < 0)
    return term_at(Term::variable(var, pos), 0);
  return term_at(Term::variable(var, 0), pos);
}

SExpr EncodingContext::pred_at(int sub, const SExpr &idx) const {
  return app(pred_fn.at(sub), {idx});
}

VarPartition valuation_partition(const Formula &phi, const Theory &theory,
                                 const EncodeOptions &opts) {
  VarPartition p = partition_variables(phi);
  if (opts.mode == ValuationMode::Strong)
    p = single_class(p);
  if (opts.consts == ConstMode::Interval)
    p = with_interval_constants(p);
  if (theory.name == TheoryName::Nat) {
    // 0 bounds every descending chain in N, so it joins V' of each class.
    for (auto &cs : p.consts)
      if (std::find(cs.begin(), cs.end(), 0) == cs.end()) {
        cs.push_back(0);
        std::sort(cs.begin(), cs.end());
      }
  }
  return p;
}

EncodingContext make_context(const Formula &phi, int k, const Theory &theory,
                             const EncodeOptions &opts) {
  if (k < 1)
    throw std::invalid_argument("bound k must be at least 1");
  if (!propositions_of(phi).empty())
    throw std::invalid_argument("encoding expects a formula without propositions");

  EncodingContext ctx;
  ctx.phi = phi;
  ctx.k = k;
  ctx.theory = theory;
  ctx.opts = opts;
  ctx.b = bounds(phi);
  ctx.sort = theory.discrete() ? "Int" : "Real";
  ctx.terms = terms_of(phi);
  ctx.consts = constants_of(phi, opts.consts, theory);
  ctx.subs = subformulae(phi);
  for (size_t i = 0; i < ctx.subs.size(); ++i) {
    ctx.sub_index[to_string(ctx.subs[i])] = static_cast<int>(i);
    ctx.pred_fn.push_back("s" + std::to_string(i));
  }
  for (const auto &t : ctx.terms)
    ctx.term_fn[t] = "v_" + t.var + "_" + depth_tag(t.depth);

  for (const auto &f : ctx.subs) {
    if (f->op != Op::Until && f->op != Op::Release)
      continue;
    const bool until = f->op == Op::Until;
    const int psi2 = ctx.index_of(f->b);
    ctx.j_vars.emplace(std::make_pair(until, psi2),
                       std::string(until ? "j_u" : "j_r") + std::to_string(psi2));
  }

  std::set<std::pair<std::string, long long>> residues;
  for (const auto &a : atoms_of(phi)) {
    if (a.rel != Rel::ModConst && a.rel != Rel::ModTerm)
      continue;
    if (!theory.admits_mod())
      throw std::invalid_argument("mod constraint requires discrete theory");
    residues.emplace(a.lhs.var, a.modulus);
    if (a.rel == Rel::ModTerm)
      residues.emplace(a.rhs.var, a.modulus);
  }
  ctx.residue_keys.assign(residues.begin(), residues.end());

  ctx.partition = valuation_partition(phi, theory, opts);
  return ctx;
}

std::vector<Assertion> encode_arith_constraints(const EncodingContext &ctx) {
  std::vector<Assertion> out;
  for (const auto &t : ctx.terms) {
    if (t.depth > 0) {
      const Term inner = Term::variable(t.var, t.depth - 1);
      for (int i = 0; i < ctx.k; ++i)
        out.push_back({"Arith", app("=", {ctx.term_at(t, i), ctx.term_at(inner, i + 1)})});
    } else if (t.depth < 0) {
      const Term inner = Term::variable(t.var, t.depth + 1);
      for (int i = 1; i <= ctx.k + 1; ++i)
        out.push_back({"Arith", app("=", {ctx.term_at(t, i), ctx.term_at(inner, i - 1)})});
    }
  }
  return out;
}

std::vector<Assertion> encode_mod_definitions(const EncodingContext &ctx) {
  std::vector<Assertion> out;
  for (const auto &[var, c] : ctx.residue_keys) {
    for (const auto &t : ctx.terms) {
      if (t.var != var)
        continue;
      for (int i = 0; i <= ctx.k + 1; ++i) {
        SExpr r = ctx.residue_at(t, c, num(i));
        SExpr q = ctx.quotient_at(t, c, num(i));
        out.push_back({"Mod", mk_and({app("=", {app("-", {ctx.term_at(t, i), r}),
                                                app("*", {num(c), q})}),
                                      app("<=", {num(0), r}), app("<", {r, num(c)})})});
      }
    }
  }
  return out;
}

std::vector<Assertion> encode_domain_constraints(const EncodingContext &ctx) {
  std::vector<Assertion> out;
  if (ctx.theory.name != TheoryName::Nat)
    return out;
  for (const auto &t : ctx.terms)
    for (int i = 0; i <= ctx.k + 1; ++i)
      out.push_back({"Domain", app(">=", {ctx.term_at(t, i), num(0)})});
  return out;
}

std::vector<Assertion> encode_prop_constraints(const EncodingContext &ctx) {
  std::vector<Assertion> out;
  for (size_t s = 0; s < ctx.subs.size(); ++s) {
    const auto &f = ctx.subs[s];
    const int owner = static_cast<int>(s);
    if (is_temporal(f->op))
      continue;
    for (int i = 0; i <= ctx.k + 1; ++i) {
      SExpr th = ctx.pred_at(owner, i);
      SExpr row;
      switch (f->op) {
      case Op::True:
        row = th;
        break;
      case Op::False:
        row = mk_not(th);
        break;
      case Op::Atom:
        row = mk_iff(th, relation_at(ctx, f->atom, num(i)));
        break;
      case Op::Not:
        if (f->a->op != Op::Atom)
          throw std::invalid_argument("formula is not in positive normal form");
        row = mk_iff(th, mk_not(relation_at(ctx, f->a->atom, num(i))));
        break;
      case Op::And:
        row = mk_iff(th, mk_and({ctx.pred_at(f->a, i), ctx.pred_at(f->b, i)}));
        break;
      case Op::Or:
        row = mk_iff(th, mk_or({ctx.pred_at(f->a, i), ctx.pred_at(f->b, i)}));
        break;
      default:
        throw std::invalid_argument("unexpected node in encoding");
      }
      out.push_back({"Prop", row, owner});
    }
  }
  return out;
}

std::vector<Assertion> encode_temp_constraints(const EncodingContext &ctx) {
  std::vector<Assertion> out;
  const int k = ctx.k;
  for (size_t s = 0; s < ctx.subs.size(); ++s) {
    const auto &f = ctx.subs[s];
    const int owner = static_cast<int>(s);
    auto th = [&](int i) { return ctx.pred_at(owner, i); };
    auto a = [&](int i) { return ctx.pred_at(f->a, i); };
    auto b = [&](int i) { return ctx.pred_at(f->b, i); };
    auto row = [&](SExpr e) { out.push_back({"Temp", std::move(e), owner}); };
    switch (f->op) {
    case Op::Next:
      for (int i = 0; i <= k; ++i)
        row(mk_iff(th(i), a(i + 1)));
      break;
    case Op::Until:
      for (int i = 0; i <= k; ++i)
        row(mk_iff(th(i), mk_or({b(i), mk_and({a(i), th(i + 1)})})));
      break;
    case Op::Release:
      for (int i = 0; i <= k; ++i)
        row(mk_iff(th(i), mk_and({b(i), mk_or({a(i), th(i + 1)})})));
      break;
    case Op::Prev:
      row(mk_not(th(0)));
      for (int i = 1; i <= k + 1; ++i)
        row(mk_iff(th(i), a(i - 1)));
      break;
    case Op::WeakPrev:
      row(th(0));
      for (int i = 1; i <= k + 1; ++i)
        row(mk_iff(th(i), a(i - 1)));
      break;
    case Op::Since:
      row(mk_iff(th(0), b(0)));
      for (int i = 1; i <= k + 1; ++i)
        row(mk_iff(th(i), mk_or({b(i), mk_and({a(i), th(i - 1)})})));
      break;
    case Op::Trigger:
      row(mk_iff(th(0), b(0)));
      for (int i = 1; i <= k + 1; ++i)
        row(mk_iff(th(i), mk_and({b(i), mk_or({a(i), th(i - 1)})})));
      break;
    default:
      break;
    }
  }
  return out;
}

std::vector<Assertion> encode_loop_constraints(const EncodingContext &ctx) {
  std::vector<Assertion> out;
  out.push_back({"LoopRange", mk_and({app("<=", {num(1), ctx.loop()}),
                                      app("<=", {ctx.loop(), num(ctx.k)})})});
  for (size_t s = 0; s < ctx.subs.size(); ++s) {
    if (ctx.subs[s]->op != Op::Atom)
      continue;
    const int owner = static_cast<int>(s);
    out.push_back({"Loop",
                   mk_iff(ctx.pred_at(owner, ctx.loop_minus_one()), ctx.pred_at(owner, ctx.k)),
                   owner});
  }
  return out;
}

std::vector<Assertion> encode_periodicity_constraints(const EncodingContext &ctx) {
  std::vector<Assertion> out;
  const SExpr lm1 = ctx.loop_minus_one();
  const SExpr kk = num(ctx.k);
  for (size_t c = 0; c < ctx.partition.classes.size(); ++c) {
    std::vector<Term> slots;
    for (const auto &t : ctx.terms)
      if (ctx.partition.class_of(t.var) == static_cast<int>(c))
        slots.push_back(t);
    const size_t nvars = slots.size();
    for (long long v : ctx.partition.consts[c])
      slots.push_back(Term::constant(v));
    for (size_t i = 0; i < nvars; ++i) {
      for (size_t j = i + 1; j < slots.size(); ++j) {
        for (int dir = 0; dir < 2; ++dir) {
          const Term &x = dir ? slots[j] : slots[i];
          const Term &y = dir ? slots[i] : slots[j];
          out.push_back({"Periodicity",
                         mk_iff(app("<", {ctx.term_at(x, lm1), ctx.term_at(y, lm1)}),
                                app("<", {ctx.term_at(x, kk), ctx.term_at(y, kk)}))});
        }
      }
    }
  }
  for (const auto &[var, c] : ctx.residue_keys)
    for (const auto &t : ctx.terms)
      if (t.var == var)
        out.push_back({"Periodicity", app("=", {ctx.residue_at(t, c, lm1),
                                                ctx.residue_at(t, c, kk)})});
  return out;
}

std::vector<Assertion> encode_last_state_constraints(const EncodingContext &ctx) {
  std::vector<Assertion> out;
  for (size_t s = 0; s < ctx.subs.size(); ++s) {
    const int owner = static_cast<int>(s);
    out.push_back({"LastState",
                   mk_iff(ctx.pred_at(owner, ctx.k + 1), ctx.pred_at(owner, ctx.loop())),
                   owner});
  }
  return out;
}

std::vector<Assertion> encode_eventualities(const EncodingContext &ctx) {
  std::vector<Assertion> out;
  for (size_t s = 0; s < ctx.subs.size(); ++s) {
    const auto &f = ctx.subs[s];
    if (f->op != Op::Until && f->op != Op::Release)
      continue;
    const bool until = f->op == Op::Until;
    const int psi2 = ctx.index_of(f->b);
    const SExpr j = sym(ctx.j_vars.at({until, psi2}));
    SExpr at_j = ctx.pred_at(psi2, j);
    SExpr th = ctx.pred_at(static_cast<int>(s), ctx.k);
    SExpr body = mk_and({app("<=", {ctx.loop(), j}), app("<=", {j, num(ctx.k)}),
                         until ? at_j : mk_not(at_j)});
    out.push_back({"Eventually", mk_implies(until ? th : mk_not(th), body),
                   static_cast<int>(s)});
  }
  return out;
}

SmtScript build_encoding(const EncodingContext &ctx) {
  SmtScript script;
  script.logic = ctx.theory.discrete() ? "QF_UFLIA" : "QF_UFLIRA";
  script.meta.push_back({"formula", to_string(ctx.phi)});
  script.meta.push_back({"k", std::to_string(ctx.k)});
  script.meta.push_back({"theory", ctx.theory.str()});
  script.meta.push_back(
      {"options", std::string("existence=") + (ctx.opts.existence ? "on" : "off") +
                      " mode=" + (ctx.opts.mode == ValuationMode::Weak ? "weak" : "strong") +
                      " consts=" + to_string(ctx.opts.consts) +
                      (ctx.opts.self_pairs ? " self-pairs" : "")});

  script.declare("loop", {}, "Int");
  for (const auto &[t, name] : ctx.term_fn)
    script.declare(name, {"Int"}, ctx.sort);
  for (const auto &[var, c] : ctx.residue_keys)
    for (const auto &t : ctx.terms)
      if (t.var == var) {
        script.declare(ctx.residue_at(t, c, num(0)).list[0].atom, {"Int"}, "Int");
        script.declare(ctx.quotient_at(t, c, num(0)).list[0].atom, {"Int"}, "Int");
      }
  for (const auto &p : ctx.pred_fn)
    script.declare(p, {"Int"}, "Bool");
  for (const auto &[key, name] : ctx.j_vars)
    script.declare(name, {}, "Int");

  auto add = [&](std::vector<Assertion> rows) {
    for (auto &r : rows)
      script.assertions.push_back(std::move(r));
  };
  add(encode_arith_constraints(ctx));
  add(encode_mod_definitions(ctx));
  add(encode_domain_constraints(ctx));
  add(encode_prop_constraints(ctx));
  add(encode_temp_constraints(ctx));
  add(encode_loop_constraints(ctx));
  add(encode_periodicity_constraints(ctx));
  add(encode_last_state_constraints(ctx));
  add(encode_eventualities(ctx));
  script.assert_("Init", ctx.pred_at(static_cast<int>(ctx.subs.size()) - 1, 0),
                 static_cast<int>(ctx.subs.size()) - 1);

  if (ctx.theory.discrete() && ctx.opts.existence)
    encode_existence(ctx, script);

  script.get_values.push_back(ctx.loop());
  for (const auto &[t, name] : ctx.term_fn)
    for (int i = 0; i <= ctx.k; ++i)
      script.get_values.push_back(app(name, {num(i)}));
  for (size_t s = 0; s < ctx.subs.size(); ++s)
    for (int i = 0; i <= ctx.k + 1; ++i)
      script.get_values.push_back(ctx.pred_at(static_cast<int>(s), i));
  return script;
}

SmtScript build_encoding(const Formula &phi, int k, const Theory &theory,
                         const EncodeOptions &opts) {
  return build_encoding(make_context(phi, k, theory, opts));
}

} // namespace cltlb
