#pragma once

#include "cltlb/encoder.hpp"
#include "cltlb/solver.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cltlb {

struct Witness {
  int k = 1;
  int loop = 1;
  // sigma[var][p - sigma_first] is the value at absolute position p.
  int sigma_first = 0;
  std::map<std::string, std::vector<Value>> sigma;
  // Claimed truth of the encoded subformulae at positions 0..k+1.
  std::vector<std::string> sub_names;
  std::vector<std::vector<bool>> truth;
  // props[i] for positions 0..k.
  std::vector<std::set<std::string>> props;
  bool verified = false;

  int sigma_last() const;
  const Value &at(const std::string &var, int pos) const;
};

// Throws std::runtime_error when the model misses a requested point.
Witness extract_witness(const SolverResult &result, const EncodingContext &ctx);

nlohmann::json to_json(const Witness &w);

// One symbolic valuation: the order type of every same-class pair of slots
// plus the residues of mod-constrained terms.
struct SymbolicValuation {
  std::vector<std::int8_t> order;
  std::vector<long long> residues;

  bool operator==(const SymbolicValuation &) const = default;
};

struct SymbolicLasso {
  int k = 1;
  int loop = 1;
  Bounds b;
  VarPartition partition;
  // slots[c] = class subjects x shifts; constants occupy a single slot.
  std::vector<std::vector<std::pair<Term, int>>> slots;
  std::vector<std::pair<Term, long long>> residue_keys;
  std::vector<SymbolicValuation> sv;

  // Sign of value(a) - value(b) for slots of class c at valuation j.
  int sign(int j, int c, int a, int b) const;
  int slot_of(int c, const Term &subject, int h) const;
  bool periodic() const;
};

// The partition follows `opts` the same way the encoder does.
SymbolicLasso induced_symbolic_model(const Witness &w, const Formula &phi, const Theory &theory,
                                     const EncodeOptions &opts = {});

struct LassoCheck {
  bool holds = false;
  // Entries "subformula@position" where the claimed truth table disagrees.
  std::vector<std::string> mismatches;
};

// Independent lasso evaluation of phi at position 0. Positions past k
// continue at w.loop. When `claimed` is set, the evaluator also compares
// every subformula in w.sub_names with w.truth at positions 0..k.
LassoCheck check_lasso(const Formula &phi, const Witness &w, bool claimed = false);
bool verify_lasso(const Formula &phi, const Witness &w);

// True when the lasso contains a forward path that stays strictly below a
// backward path infinitely often, so no arithmetic model exists.
bool check_property_c_graph(const SymbolicLasso &lasso, bool self_pairs = false);

struct BruteForceOptions {
  std::vector<long long> domain{0, 1, 2, 3};
  EncodeOptions encode;
  // Maximum number of sigma tables enumerated.
  std::uint64_t cap = 20'000'000;
};

struct BruteForceResult {
  bool sat = false;
  std::optional<Witness> witness;
  std::uint64_t tables = 0;
};

// Throws std::invalid_argument on propositions or when the cap is exceeded.
BruteForceResult brute_force_ksat(const Formula &phi, int k, const Theory &theory,
                                  const BruteForceOptions &opts = {});

} // namespace cltlb
