#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cltlb {

enum class TheoryName { Ipc, Int, Nat, Rat, Real };

struct Theory {
  TheoryName name = TheoryName::Int;

  bool has_completion_property() const {
    return name == TheoryName::Rat || name == TheoryName::Real;
  }
  bool discrete() const { return !has_completion_property(); }
  bool admits_mod() const { return discrete(); }
  std::string str() const;

  static std::optional<Theory> from_string(const std::string &s);
  bool operator==(const Theory &) const = default;
};

// A variable or constant shifted by a net number of X (positive) or Y
// (negative) applications. Constants always carry depth 0.
struct Term {
  bool is_const = false;
  std::string var;
  long long value = 0;
  int depth = 0;

  static Term variable(std::string name, int depth = 0);
  static Term constant(long long v);

  auto operator<=>(const Term &) const = default;
};

// Unnormalized term as written: a chain of 'X'/'Y' applications, outermost
// first, around a variable or constant.
struct RawTerm {
  std::string ops;
  Term base;
};

Term normalize_term(const RawTerm &raw);

enum class Rel { Lt, Eq, ModConst, ModTerm };

// Lt/Eq compare lhs with rhs (either side may be a constant term).
// ModConst: lhs mod modulus = offset. ModTerm: lhs mod modulus = rhs + offset.
struct Atom {
  Rel rel = Rel::Lt;
  Term lhs;
  Term rhs;
  long long modulus = 1;
  long long offset = 0;

  std::string kind_name() const;
  std::vector<Term> terms() const;
  auto operator<=>(const Atom &) const = default;
};

enum class Op {
  True,
  False,
  Prop,
  Atom,
  Not,
  And,
  Or,
  Next,
  Prev,
  WeakPrev,
  Until,
  Since,
  Release,
  Trigger
};

struct Node;
using Formula = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::True;
  std::string prop;
  Atom atom;
  Formula a;
  Formula b;
};

Formula f_true();
Formula f_false();
Formula f_prop(std::string name);
Formula f_atom(Atom atom);
Formula f_not(Formula a);
Formula f_and(Formula a, Formula b);
Formula f_or(Formula a, Formula b);
Formula f_next(Formula a);
Formula f_prev(Formula a);
Formula f_weak_prev(Formula a);
Formula f_until(Formula a, Formula b);
Formula f_since(Formula a, Formula b);
Formula f_release(Formula a, Formula b);
Formula f_trigger(Formula a, Formula b);

/* G(a) = (false)R(a), F(a) = (true)U(a), H(a) = (false)T(a), O(a) = (true)S(a) */
Formula f_globally(Formula a);
Formula f_finally(Formula a);
Formula f_historically(Formula a);
Formula f_once(Formula a);
Formula f_implies(Formula a, Formula b);

Formula f_lt(Term a, Term b);
Formula f_eq(Term a, Term b);
Formula f_and_all(const std::vector<Formula> &fs);
Formula f_or_all(const std::vector<Formula> &fs);

bool is_binary(Op op);
bool is_unary(Op op);
bool is_temporal(Op op);
bool is_past(Op op);

bool equal(const Formula &x, const Formula &y);

// Canonical, fully parenthesized text. Used as the structural identity of a
// formula and as the printer behind parser::render.
std::string to_string(const Formula &f);
std::string to_string(const Term &t);
std::string to_string(const Atom &a);

struct Bounds {
  int look_back = 0;
  int look_ahead = 0;
  int width() const { return look_ahead - look_back + 1; }
  bool operator==(const Bounds &) const = default;
};

Bounds bounds(const Formula &f);

std::set<std::string> variables_of(const Formula &f);
std::set<std::string> propositions_of(const Formula &f);
std::vector<Atom> atoms_of(const Formula &f);

// Full window closure: X^i x for 0 <= i <= lookAhead and Y^i x for
// 1 <= i <= -lookBack, ordered by (variable, depth).
std::vector<Term> terms_of(const Formula &f);

enum class ConstMode { Occurring, Interval };

std::vector<long long> constants_of(const Formula &f, ConstMode mode,
                                    const Theory &theory = Theory{});

std::optional<ConstMode> const_mode_from_string(const std::string &s);
std::string to_string(ConstMode m);

// Distinct subformulae, children before parents.
std::vector<Formula> subformulae(const Formula &f);

struct VarPartition {
  std::vector<std::vector<std::string>> classes;
  std::vector<std::vector<long long>> consts;

  int class_of(const std::string &var) const;
};

VarPartition partition_variables(const Formula &f);

// Collapses every class into one, as used by strong valuations.
VarPartition single_class(const VarPartition &p);

// Replaces each class's constants with the integer interval they span.
VarPartition with_interval_constants(const VarPartition &p);

} // namespace cltlb
