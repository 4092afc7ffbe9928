#include "cltlb/encoder.hpp"
#include "cltlb/parser.hpp"
#include "cltlb/rewrite.hpp"
#include "cltlb/witness.hpp"
#include "random_formula.hpp"
#include "solver_probe.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace cltlb;
namespace gen = cltlb::testing;

namespace {

Witness lasso(int k, int loop, std::map<std::string, std::vector<long long>> rows) {
  Witness w;
  w.k = k;
  w.loop = loop;
  for (auto &[var, row] : rows)
    for (long long v : row)
      w.sigma[var].push_back(Value(v));
  w.props.assign(k + 1, {});
  return w;
}

// Naive state-graph evaluation of a future-only formula: state k is followed
// by state loop, and an until/release walk stops at the first revisited state.
class NaiveLasso {
public:
  explicit NaiveLasso(const Witness &w) : w_(w) {}

  bool eval(const Formula &f, int s) const {
    switch (f->op) {
    case Op::True:
      return true;
    case Op::False:
      return false;
    case Op::Prop:
      return w_.props[s].count(f->prop) > 0;
    case Op::Atom:
      return atom(f->atom, s);
    case Op::Not:
      return !eval(f->a, s);
    case Op::And:
      return eval(f->a, s) && eval(f->b, s);
    case Op::Or:
      return eval(f->a, s) || eval(f->b, s);
    case Op::Next:
      return eval(f->a, succ(s));
    case Op::Until: {
      std::set<int> seen;
      for (int t = s; seen.insert(t).second; t = succ(t)) {
        if (eval(f->b, t))
          return true;
        if (!eval(f->a, t))
          return false;
      }
      return false;
    }
    case Op::Release: {
      std::set<int> seen;
      for (int t = s; seen.insert(t).second; t = succ(t)) {
        if (!eval(f->b, t))
          return false;
        if (eval(f->a, t))
          return true;
      }
      return true;
    }
    default:
      throw std::logic_error("past operator in naive evaluation");
    }
  }

private:
  int succ(int s) const { return s == w_.k ? w_.loop : s + 1; }

  Value value(const Term &t, int s) const {
    return t.is_const ? Value(t.value) : w_.at(t.var, s + t.depth);
  }

  bool atom(const Atom &a, int s) const {
    const Value l = value(a.lhs, s);
    switch (a.rel) {
    case Rel::Lt:
      return l < value(a.rhs, s);
    case Rel::Eq:
      return l == value(a.rhs, s);
    case Rel::ModConst: {
      const long long n = l.numerator() % a.modulus;
      return (n + a.modulus) % a.modulus == ((a.offset % a.modulus) + a.modulus) % a.modulus;
    }
    case Rel::ModTerm: {
      const long long n = (l - value(a.rhs, s)).numerator() - a.offset;
      return n % a.modulus == 0;
    }
    }
    return false;
  }

  const Witness &w_;
};

} // namespace

TEST(ExtractWitness, IncreasingChainFromSolverModel) {
  CLTLB_REQUIRE_SOLVER(solver);
  const Formula phi = to_pnf(parse_formula("G(x < X(x))", {"x"}));
  const EncodingContext ctx = make_context(phi, 1, Theory{TheoryName::Int});
  const auto r = solve(build_encoding(ctx), solver);
  ASSERT_EQ(r.verdict, SolverVerdict::Sat);
  const Witness w = extract_witness(r, ctx);
  EXPECT_EQ(w.k, 1);
  EXPECT_EQ(w.loop, 1);
  EXPECT_EQ(w.sigma_first, 0);
  ASSERT_EQ(w.sigma.at("x").size(), 3u);
  EXPECT_LT(w.at("x", 0), w.at("x", 1));
  EXPECT_LT(w.at("x", 1), w.at("x", 2));
  EXPECT_EQ(w.sub_names.size(), ctx.subs.size());
  for (const auto &row : w.truth)
    EXPECT_EQ(row.size(), 3u);
  EXPECT_TRUE(verify_lasso(phi, w));
  EXPECT_TRUE(check_lasso(phi, w, true).mismatches.empty());
}

TEST(ExtractWitness, MissingPointsAreAnError) {
  const Formula phi = to_pnf(parse_formula("G(x < X(x))", {"x"}));
  const EncodingContext ctx = make_context(phi, 1, Theory{TheoryName::Int});
  const auto r = parse_solver_output("sat\n((loop 1) ((v_x_0 0) 3))\n");
  EXPECT_THROW(extract_witness(r, ctx), std::runtime_error);
}

TEST(WitnessAccess, OutOfWindowThrows) {
  const Witness w = lasso(1, 1, {{"x", {0, 1, 2}}});
  EXPECT_EQ(w.at("x", 2), Value(2));
  EXPECT_THROW(w.at("x", 3), std::out_of_range);
  EXPECT_THROW(w.at("y", 0), std::out_of_range);
}

TEST(SymbolicModel, IncreasingChainIsPeriodic) {
  const Formula phi = parse_formula("G(x < X(x))", {"x"});
  const SymbolicLasso l =
      induced_symbolic_model(lasso(1, 1, {{"x", {0, 1, 2}}}), phi, Theory{TheoryName::Int});
  ASSERT_EQ(l.slots.size(), 1u);
  ASSERT_EQ(l.slots[0].size(), 2u);
  ASSERT_EQ(l.sv.size(), 2u);
  const int x0 = l.slot_of(0, Term::variable("x"), 0), x1 = l.slot_of(0, Term::variable("x"), 1);
  EXPECT_EQ(l.sign(0, 0, x0, x1), -1);
  EXPECT_EQ(l.sign(1, 0, x1, x0), 1);
  EXPECT_EQ(l.sign(1, 0, x0, x0), 0);
  EXPECT_TRUE(l.periodic());
}

TEST(SymbolicModel, PlateauBreaksPeriodicity) {
  const Formula phi = parse_formula("G(x < X(x))", {"x"});
  const SymbolicLasso l =
      induced_symbolic_model(lasso(1, 1, {{"x", {0, 1, 1}}}), phi, Theory{TheoryName::Int});
  EXPECT_FALSE(l.periodic());
}

TEST(SymbolicModel, ConstantsTakeOneSlotAndResiduesAreRecorded) {
  const Formula phi = parse_formula("G(x < 3 & x mod 2 = 0)", {"x"});
  const SymbolicLasso l =
      induced_symbolic_model(lasso(2, 2, {{"x", {2, 0, 2}}}), phi, Theory{TheoryName::Int});
  ASSERT_EQ(l.slots.size(), 1u);
  EXPECT_EQ(l.slots[0].size(), 2u);
  const int c = l.slot_of(0, Term::constant(3), 0), x = l.slot_of(0, Term::variable("x"), 0);
  EXPECT_EQ(l.sign(1, 0, x, c), -1);
  ASSERT_EQ(l.residue_keys.size(), 1u);
  EXPECT_EQ(l.residue_keys[0].second, 2);
  for (const auto &v : l.sv)
    EXPECT_EQ(v.residues, std::vector<long long>{0});
  EXPECT_TRUE(l.periodic());
  EXPECT_THROW(l.slot_of(0, Term::variable("y"), 0), std::out_of_range);
}

TEST(VerifyLasso, Examples) {
  const Formula up = parse_formula("G(x < X(x))", {"x"});
  EXPECT_TRUE(verify_lasso(up, lasso(1, 1, {{"x", {0, 1, 2}}})));
  EXPECT_FALSE(verify_lasso(up, lasso(1, 1, {{"x", {0, 0, 2}}})));

  // q is absent from the loop body, so F q fails even though q holds at 0.
  const Formula gfq = parse_formula("G(F q)", {});
  Witness w = lasso(2, 2, {});
  w.props[0] = {"q"};
  EXPECT_FALSE(verify_lasso(gfq, w));
  w.props[2] = {"q"};
  EXPECT_TRUE(verify_lasso(gfq, w));
}

TEST(VerifyLasso, PastOperatorsSeeTheLoopHistory) {
  // Y q holds at 1 and at the loop position only when q held at 0 and k.
  const Formula phi = parse_formula("q & X(G(Y q))", {});
  Witness w = lasso(2, 1, {});
  w.props[0] = {"q"};
  w.props[1] = {"q"};
  EXPECT_FALSE(verify_lasso(phi, w));
  w.props[2] = {"q"};
  EXPECT_TRUE(verify_lasso(phi, w));
}

TEST(CheckLasso, LoopOutOfRangeAndAperiodicAtoms) {
  const Formula up = parse_formula("G(x < X(x))", {"x"});
  const LassoCheck bad_loop = check_lasso(up, lasso(1, 0, {{"x", {0, 1, 2}}}));
  EXPECT_FALSE(bad_loop.holds);
  ASSERT_EQ(bad_loop.mismatches.size(), 1u);
  EXPECT_EQ(bad_loop.mismatches[0], "loop 0 outside [1, k]");

  const Formula lt = parse_formula("G(x < 2)", {"x"});
  const LassoCheck aperiodic = check_lasso(lt, lasso(2, 1, {{"x", {0, 1, 5}}}));
  EXPECT_FALSE(aperiodic.holds);
  ASSERT_EQ(aperiodic.mismatches.size(), 1u);
  EXPECT_EQ(aperiodic.mismatches[0], "x < 2 differs at loop-1 and k");
}

TEST(CheckLasso, ReportsClaimedTruthMismatches) {
  const Formula phi = to_pnf(parse_formula("p U (x = 1)", {"x"}));
  Witness w = lasso(2, 2, {{"x", {0, 1, 1}}});
  w.props[0] = {"p"};
  w.props[1] = {"p"};
  NaiveLasso naive(w);
  for (const auto &s : subformulae(phi)) {
    w.sub_names.push_back(to_string(s));
    std::vector<bool> row;
    for (int i = 0; i <= w.k + 1; ++i)
      row.push_back(naive.eval(s, std::min(i, w.k)));
    w.truth.push_back(row);
  }
  EXPECT_TRUE(check_lasso(phi, w, true).mismatches.empty());
  const int top = static_cast<int>(w.sub_names.size()) - 1;
  ASSERT_EQ(w.sub_names[top], to_string(phi));
  w.truth[top][1] = !w.truth[top][1];
  const LassoCheck c = check_lasso(phi, w, true);
  EXPECT_TRUE(c.holds);
  EXPECT_EQ(c.mismatches, std::vector<std::string>{to_string(phi) + "@1"});
}

// The production evaluator agrees with the naive state walk on random
// future-only formulae over random periodic lassos.
TEST(CheckLasso, AgreesWithNaiveWalk) {
  std::mt19937_64 rng(23);
  gen::GenOptions g;
  g.props = true;
  g.mod = true;
  g.temporal_depth = 3;
  int held = 0, failed = 0;
  for (int n = 0; n < 400; ++n) {
    const Formula phi = gen::random_formula(rng, g);
    const int k = 1 + static_cast<int>(rng() % 4);
    const int loop = 1 + static_cast<int>(rng() % k);
    const Witness w = gen::periodic_witness(rng, phi, k, loop, {0, 1, 2, 3});
    const bool want = NaiveLasso(w).eval(phi, 0);
    EXPECT_EQ(verify_lasso(phi, w), want) << to_string(phi) << " k=" << k << " loop=" << loop;
    (want ? held : failed)++;
  }
  EXPECT_GT(held, 40);
  EXPECT_GT(failed, 40);
}

TEST(CheckLasso, PerturbedSigmaIsRejected) {
  Witness w = lasso(3, 2, {{"x", {0, 1, 2, 3, 4}}});
  const Formula f = parse_formula("G(x < X(x) & X(x) < 5)", {"x"});
  EXPECT_TRUE(verify_lasso(f, w));
  for (int p = 0; p < 5; ++p) {
    Witness m = w;
    m.sigma["x"][p] = Value(9);
    EXPECT_FALSE(verify_lasso(f, m)) << "position " << p;
  }
}

TEST(WitnessJson, Format) {
  Witness w = lasso(1, 1, {{"x", {0, 2}}});
  w.sigma["x"][1] = Value(1, 3);
  w.props[1] = {"q", "p"};
  w.verified = true;
  const auto j = to_json(w);
  EXPECT_EQ(j["k"], 1);
  EXPECT_EQ(j["loop"], 1);
  EXPECT_EQ(j["sigma_first"], 0);
  EXPECT_EQ(j["sigma"]["x"][0], 0);
  EXPECT_EQ(j["sigma"]["x"][1], "1/3");
  EXPECT_EQ(j["props"][0].size(), 0u);
  EXPECT_EQ(j["props"][1], (nlohmann::json{"p", "q"}));
  EXPECT_EQ(j["verified"], true);
}

TEST(BruteForce, BoundedIncreasingChainIsUnsat) {
  const Formula phi = parse_formula("G(x < X(x)) & G(x < 3) & G(0 <= x)", {"x"});
  const auto r = brute_force_ksat(phi, 2, Theory{TheoryName::Int});
  EXPECT_FALSE(r.sat);
  EXPECT_EQ(r.tables, 256u);
}

TEST(BruteForce, ConstantRowIsSat) {
  const Formula phi = parse_formula("G(x = X(x)) & x = 1", {"x"});
  BruteForceOptions o;
  o.domain = {0, 1, 2};
  const auto r = brute_force_ksat(phi, 1, Theory{TheoryName::Int}, o);
  ASSERT_TRUE(r.sat);
  ASSERT_TRUE(r.witness);
  EXPECT_TRUE(r.witness->verified);
  for (int p = 0; p <= 2; ++p)
    EXPECT_EQ(r.witness->at("x", p), Value(1));
  EXPECT_TRUE(verify_lasso(phi, *r.witness));
}

TEST(BruteForce, DenseTheorySkipsTheGraphCheck) {
  // The increasing chain below 3 has no integer model but has a rational one.
  const Formula phi = parse_formula("G(x < X(x)) & G(x < 3)", {"x"});
  EXPECT_FALSE(brute_force_ksat(phi, 1, Theory{TheoryName::Int}).sat);
  EXPECT_TRUE(brute_force_ksat(phi, 1, Theory{TheoryName::Rat}).sat);
}

TEST(BruteForce, FalseEnumeratesEverythingAndFails) {
  const auto r = brute_force_ksat(f_false(), 2, Theory{TheoryName::Int});
  EXPECT_FALSE(r.sat);
  EXPECT_EQ(r.tables, 1u);
}

TEST(BruteForce, RejectsPropositionsBadBoundsAndHugeSpaces) {
  const Formula up = parse_formula("G(x < X(x))", {"x"});
  EXPECT_THROW(brute_force_ksat(parse_formula("F q", {}), 1, Theory{}), std::invalid_argument);
  EXPECT_THROW(brute_force_ksat(up, 0, Theory{}), std::invalid_argument);
  BruteForceOptions o;
  o.cap = 10;
  try {
    brute_force_ksat(up, 3, Theory{}, o);
    FAIL();
  } catch (const std::invalid_argument &e) {
    EXPECT_EQ(std::string(e.what()), "search space exceeds the cap of 10 tables");
  }
  o.cap = 20'000'000;
  o.domain.clear();
  EXPECT_THROW(brute_force_ksat(up, 1, Theory{}, o), std::invalid_argument);
}

// Every brute-force witness passes the lasso check and induces a periodic
// symbolic model.
TEST(BruteForce, WitnessesAreConsistent) {
  std::mt19937_64 rng(31);
  gen::GenOptions g;
  g.vars = {"x"};
  int sat = 0;
  for (int n = 0; n < 60; ++n) {
    const Formula phi = gen::random_formula(rng, g);
    BruteForceOptions o;
    o.domain = {0, 1, 2};
    const auto r = brute_force_ksat(phi, 2, Theory{TheoryName::Int}, o);
    if (!r.sat)
      continue;
    ++sat;
    EXPECT_TRUE(verify_lasso(phi, *r.witness)) << to_string(phi);
    EXPECT_TRUE(induced_symbolic_model(*r.witness, phi, Theory{TheoryName::Int}).periodic());
  }
  EXPECT_GT(sat, 10);
}
