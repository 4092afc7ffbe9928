#pragma once

#include "cltlb/formula.hpp"

#include <map>
#include <set>
#include <string>
#include <utility>

namespace cltlb {

inline constexpr const char *kPropPrefix = "__p_";

Formula to_pnf(const Formula &f);

struct PropRemoval {
  Formula formula;
  // proposition name -> fresh variable name
  std::map<std::string, std::string> fresh;
};

// Replaces every proposition p by the atom __p_p = 1 and conjoins
// G(/\ (__p_p = 1 | __p_p = 0)). Throws if a fresh name is already a
// variable of the formula or of `taken`.
PropRemoval remove_propositions(const Formula &f,
                                const std::set<std::string> &taken = {});

struct Shifted {
  Formula formula;
  int offset = 0;
};

// Adds -lookBack to every term depth so no term looks into the past.
Shifted shift_left(const Formula &f);

Formula shift_terms(const Formula &f, int delta);

} // namespace cltlb
