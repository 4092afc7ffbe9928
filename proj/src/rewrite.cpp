#include "cltlb/rewrite.hpp"

#include <stdexcept>

namespace cltlb {

namespace {

Formula rebuild(const Formula &f, Formula a, Formula b) {
  auto n = std::make_shared<Node>(*f);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

Formula pnf(const Formula &f, bool neg) {
  switch (f->op) {
  case Op::True:
    return neg ? f_false() : f;
  case Op::False:
    return neg ? f_true() : f;
  case Op::Prop:
  case Op::Atom:
    return neg ? f_not(f) : f;
  case Op::Not:
    return pnf(f->a, !neg);
  case Op::And:
    return neg ? f_or(pnf(f->a, true), pnf(f->b, true))
               : f_and(pnf(f->a, false), pnf(f->b, false));
  case Op::Or:
    return neg ? f_and(pnf(f->a, true), pnf(f->b, true))
               : f_or(pnf(f->a, false), pnf(f->b, false));
  case Op::Next:
    return f_next(pnf(f->a, neg));
  case Op::Prev:
    return neg ? f_weak_prev(pnf(f->a, true)) : f_prev(pnf(f->a, false));
  case Op::WeakPrev:
    return neg ? f_prev(pnf(f->a, true)) : f_weak_prev(pnf(f->a, false));
  case Op::Until:
    return neg ? f_release(pnf(f->a, true), pnf(f->b, true))
               : f_until(pnf(f->a, false), pnf(f->b, false));
  case Op::Release:
    return neg ? f_until(pnf(f->a, true), pnf(f->b, true))
               : f_release(pnf(f->a, false), pnf(f->b, false));
  case Op::Since:
    return neg ? f_trigger(pnf(f->a, true), pnf(f->b, true))
               : f_since(pnf(f->a, false), pnf(f->b, false));
  case Op::Trigger:
    return neg ? f_since(pnf(f->a, true), pnf(f->b, true))
               : f_trigger(pnf(f->a, false), pnf(f->b, false));
  }
  return f;
}

Formula replace_props(const Formula &f, const std::map<std::string, std::string> &m) {
  if (f->op == Op::Prop)
    return f_eq(Term::variable(m.at(f->prop)), Term::constant(1));
  if (!f->a)
    return f;
  return rebuild(f, replace_props(f->a, m), f->b ? replace_props(f->b, m) : nullptr);
}

Term shift(Term t, int delta) {
  if (!t.is_const)
    t.depth += delta;
  return t;
}

} // namespace

Formula to_pnf(const Formula &f) { return pnf(f, false); }

PropRemoval remove_propositions(const Formula &f, const std::set<std::string> &taken) {
  PropRemoval out;
  const auto props = propositions_of(f);
  if (props.empty()) {
    out.formula = f;
    return out;
  }
  const auto vars = variables_of(f);
  std::vector<Formula> guards;
  for (const auto &p : props) {
    std::string fresh = std::string(kPropPrefix) + p;
    if (vars.count(fresh) || taken.count(fresh))
      throw std::invalid_argument("fresh variable '" + fresh +
                                  "' collides with an existing variable");
    out.fresh[p] = fresh;
    guards.push_back(f_or(f_eq(Term::variable(fresh), Term::constant(1)),
                          f_eq(Term::variable(fresh), Term::constant(0))));
  }
  out.formula = f_and(replace_props(f, out.fresh), f_globally(f_and_all(guards)));
  return out;
}

Formula shift_terms(const Formula &f, int delta) {
  if (delta == 0)
    return f;
  if (f->op == Op::Atom) {
    Atom a = f->atom;
    a.lhs = shift(a.lhs, delta);
    a.rhs = shift(a.rhs, delta);
    return f_atom(a);
  }
  if (!f->a)
    return f;
  return rebuild(f, shift_terms(f->a, delta), f->b ? shift_terms(f->b, delta) : nullptr);
}

Shifted shift_left(const Formula &f) {
  const int lb = bounds(f).look_back;
  return {shift_terms(f, -lb), lb};
}

} // namespace cltlb
