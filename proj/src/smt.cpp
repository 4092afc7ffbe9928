#include "cltlb/smt.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace cltlb {

SExpr sym(std::string s) {
  SExpr e;
  e.atom = std::move(s);
  return e;
}

SExpr num(long long v) {
  if (v < 0)
    return app("-", {sym(std::to_string(-v))});
  return sym(std::to_string(v));
}

SExpr app(const std::string &head, std::vector<SExpr> args) {
  SExpr e;
  e.is_list = true;
  e.list.reserve(args.size() + 1);
  e.list.push_back(sym(head));
  for (auto &a : args)
    e.list.push_back(std::move(a));
  return e;
}

SExpr mk_not(SExpr e) { return app("not", {std::move(e)}); }

SExpr mk_and(std::vector<SExpr> es) {
  if (es.empty())
    return sym("true");
  if (es.size() == 1)
    return es.front();
  return app("and", std::move(es));
}

SExpr mk_or(std::vector<SExpr> es) {
  if (es.empty())
    return sym("false");
  if (es.size() == 1)
    return es.front();
  return app("or", std::move(es));
}

SExpr mk_iff(SExpr a, SExpr b) { return app("=", {std::move(a), std::move(b)}); }
SExpr mk_implies(SExpr a, SExpr b) { return app("=>", {std::move(a), std::move(b)}); }

namespace {

void write(std::ostringstream &os, const SExpr &e) {
  if (!e.is_list) {
    os << e.atom;
    return;
  }
  os << '(';
  for (size_t i = 0; i < e.list.size(); ++i) {
    if (i)
      os << ' ';
    write(os, e.list[i]);
  }
  os << ')';
}

} // namespace

std::string to_smt(const SExpr &e) {
  std::ostringstream os;
  write(os, e);
  return os.str();
}

std::vector<SExpr> parse_sexprs(const std::string &text) {
  std::vector<SExpr> stack_top;
  std::vector<SExpr> stack;
  size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ';') {
      while (i < text.size() && text[i] != '\n')
        ++i;
    } else if (c == '(') {
      SExpr e;
      e.is_list = true;
      stack.push_back(std::move(e));
      ++i;
    } else if (c == ')') {
      if (stack.empty())
        throw std::runtime_error("unbalanced ')' in solver output");
      SExpr done = std::move(stack.back());
      stack.pop_back();
      (stack.empty() ? stack_top : stack.back().list).push_back(std::move(done));
      ++i;
    } else if (c == '"') {
      size_t j = i + 1;
      while (j < text.size() && text[j] != '"')
        ++j;
      if (j >= text.size())
        throw std::runtime_error("unterminated string in solver output");
      SExpr e = sym(text.substr(i, j - i + 1));
      (stack.empty() ? stack_top : stack.back().list).push_back(std::move(e));
      i = j + 1;
    } else if (c == '|') {
      size_t j = text.find('|', i + 1);
      if (j == std::string::npos)
        throw std::runtime_error("unterminated quoted symbol in solver output");
      SExpr e = sym(text.substr(i, j - i + 1));
      (stack.empty() ? stack_top : stack.back().list).push_back(std::move(e));
      i = j + 1;
    } else {
      size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
             text[j] != '(' && text[j] != ')')
        ++j;
      SExpr e = sym(text.substr(i, j - i));
      (stack.empty() ? stack_top : stack.back().list).push_back(std::move(e));
      i = j;
    }
  }
  if (!stack.empty())
    throw std::runtime_error("unbalanced '(' in solver output");
  return stack_top;
}

void SmtScript::declare(std::string name, std::vector<std::string> args, std::string ret) {
  decls.push_back({std::move(name), std::move(args), std::move(ret)});
}

void SmtScript::assert_(std::string family, SExpr e, int owner) {
  assertions.push_back({std::move(family), std::move(e), owner});
}

std::size_t SmtScript::count(const std::string &family) const {
  std::size_t n = 0;
  for (const auto &a : assertions)
    n += a.family == family;
  return n;
}

std::size_t SmtScript::count(const std::string &family, int owner) const {
  std::size_t n = 0;
  for (const auto &a : assertions)
    n += a.family == family && a.owner == owner;
  return n;
}

std::map<std::string, std::size_t> SmtScript::family_counts() const {
  std::map<std::string, std::size_t> out;
  for (const auto &a : assertions)
    ++out[a.family];
  return out;
}

std::string emit_smtlib(const SmtScript &script) {
  std::ostringstream os;
  for (const auto &[k, v] : script.meta)
    os << "; " << k << ": " << v << '\n';
  if (!script.logic.empty())
    os << "(set-option :produce-models true)\n(set-logic " << script.logic << ")\n";
  for (const auto &d : script.decls) {
    os << "(declare-fun " << d.name << " (";
    for (size_t i = 0; i < d.args.size(); ++i)
      os << (i ? " " : "") << d.args[i];
    os << ") " << d.ret << ")\n";
  }
  std::string family;
  for (const auto &a : script.assertions) {
    if (a.family != family) {
      family = a.family;
      os << "; " << family << '\n';
    }
    os << "(assert " << to_smt(a.expr) << ")\n";
  }
  os << "(check-sat)\n";
  if (!script.get_values.empty()) {
    os << "(get-value (";
    for (size_t i = 0; i < script.get_values.size(); ++i)
      os << (i ? " " : "") << to_smt(script.get_values[i]);
    os << "))\n";
  }
  return os.str();
}

} // namespace cltlb
