#pragma once

#include "cltlb/formula.hpp"
#include "cltlb/smt.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cltlb {

enum class ValuationMode { Weak, Strong };

struct EncodeOptions {
  bool existence = true;
  ValuationMode mode = ValuationMode::Weak;
  ConstMode consts = ConstMode::Occurring;
  // Also assert the existence condition for pairs (x, x).
  bool self_pairs = false;
};

struct EncodingContext {
  Formula phi;
  int k = 1;
  Theory theory;
  EncodeOptions opts;
  Bounds b;
  std::string sort;

  std::vector<Term> terms;
  std::vector<long long> consts;
  std::vector<Formula> subs;
  std::map<std::string, int> sub_index;
  std::map<Term, std::string> term_fn;
  std::vector<std::string> pred_fn;
  // (is_until, index of psi2) -> integer symbol
  std::map<std::pair<bool, int>, std::string> j_vars;
  // (variable, modulus) -> {quotient fn prefix}; residues exist per term
  std::vector<std::pair<std::string, long long>> residue_keys;
  // Partition actually used for periodicity and the existence condition.
  VarPartition partition;

  int index_of(const Formula &f) const;

  SExpr lit(long long v) const;
  SExpr loop() const { return sym("loop"); }
  SExpr loop_minus_one() const { return app("-", {loop(), num(1)}); }

  SExpr term_at(const Term &t, const SExpr &idx) const;
  SExpr term_at(const Term &t, int i) const { return term_at(t, num(i)); }
  SExpr residue_at(const Term &t, long long c, const SExpr &idx) const;
  SExpr quotient_at(const Term &t, long long c, const SExpr &idx) const;
  // Value of variable x at absolute position pos in [lookBack, k + lookAhead].
  SExpr sigma(const std::string &var, int pos) const;
  SExpr pred_at(int sub, const SExpr &idx) const;
  SExpr pred_at(int sub, int i) const { return pred_at(sub, num(i)); }
  SExpr pred_at(const Formula &f, int i) const { return pred_at(index_of(f), i); }
};

// The partition periodicity and the existence condition range over:
// collapsed in strong mode, interval constants on request, and 0 added to
// every class over nat.
VarPartition valuation_partition(const Formula &phi, const Theory &theory,
                                 const EncodeOptions &opts);

// phi must be in positive normal form and free of propositions.
EncodingContext make_context(const Formula &phi, int k, const Theory &theory,
                             const EncodeOptions &opts = {});

std::vector<Assertion> encode_arith_constraints(const EncodingContext &ctx);
std::vector<Assertion> encode_mod_definitions(const EncodingContext &ctx);
std::vector<Assertion> encode_domain_constraints(const EncodingContext &ctx);
std::vector<Assertion> encode_prop_constraints(const EncodingContext &ctx);
std::vector<Assertion> encode_temp_constraints(const EncodingContext &ctx);
std::vector<Assertion> encode_loop_constraints(const EncodingContext &ctx);
// sv_{loop-1} = sv_k over every order relation between window terms and
// constants of a partition class, plus residues.
std::vector<Assertion> encode_periodicity_constraints(const EncodingContext &ctx);
std::vector<Assertion> encode_last_state_constraints(const EncodingContext &ctx);
std::vector<Assertion> encode_eventualities(const EncodingContext &ctx);

SmtScript build_encoding(const EncodingContext &ctx);
SmtScript build_encoding(const Formula &phi, int k, const Theory &theory,
                         const EncodeOptions &opts = {});

} // namespace cltlb
