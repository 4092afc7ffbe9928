#pragma once

#include "cltlb/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cltlb::testing {

// z3 when installed.
std::optional<SolverConfig> primary_solver();

// A second, different SMT solver (cvc5 or cvc4) when installed.
std::optional<SolverConfig> secondary_solver();

} // namespace cltlb::testing

#define CLTLB_REQUIRE_SOLVER(cfg)                                                          \
  auto cfg##_opt = ::cltlb::testing::primary_solver();                                     \
  if (!cfg##_opt)                                                                          \
    GTEST_SKIP() << "z3 not found on PATH";                                                \
  const ::cltlb::SolverConfig cfg = *cfg##_opt
