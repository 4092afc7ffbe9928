#pragma once

#include <cstddef>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

namespace cltlb {

struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_list = false;

  bool operator==(const SExpr &) const = default;
};

SExpr sym(std::string s);
SExpr num(long long v);
SExpr app(const std::string &head, std::vector<SExpr> args);
SExpr mk_not(SExpr e);
SExpr mk_and(std::vector<SExpr> es);
SExpr mk_or(std::vector<SExpr> es);
SExpr mk_iff(SExpr a, SExpr b);
SExpr mk_implies(SExpr a, SExpr b);

std::string to_smt(const SExpr &e);

// Parses one or more s-expressions; throws std::runtime_error on malformed text.
std::vector<SExpr> parse_sexprs(const std::string &text);

struct Decl {
  std::string name;
  std::vector<std::string> args;
  std::string ret;
};

struct Assertion {
  std::string family;
  SExpr expr;
  // Index of the subformula a row belongs to, or -1.
  int owner = -1;
};

struct SmtScript {
  std::string logic;
  std::vector<Decl> decls;
  std::vector<Assertion> assertions;
  std::vector<SExpr> get_values;
  std::vector<std::pair<std::string, std::string>> meta;

  void declare(std::string name, std::vector<std::string> args, std::string ret);
  void assert_(std::string family, SExpr e, int owner = -1);

  std::size_t count(const std::string &family) const;
  std::size_t count(const std::string &family, int owner) const;
  std::map<std::string, std::size_t> family_counts() const;
};

std::string emit_smtlib(const SmtScript &script);

} // namespace cltlb
