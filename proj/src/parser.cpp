#include "cltlb/parser.hpp"

#include "cltlb/rewrite.hpp"

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>

namespace cltlb {

ParseError::ParseError(std::string file, int line, int col, const std::string &msg)
    : std::runtime_error(file + ":" + std::to_string(line) + ":" + std::to_string(col) +
                         ": " + msg),
      file_(std::move(file)), line_(line), col_(col), msg_(msg) {}

namespace {

enum class Tok { Ident, Int, Str, Sym, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

const std::set<std::string> kReserved = {
    "X",     "Y",   "Z",      "U",      "S",   "R",     "T",
    "G",     "F",   "H",      "O",      "true", "false", "mod",
    "theory", "var", "formula", "option"};

std::vector<Token> lex(const std::string &text, const std::string &file) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
      while (i < text.size() && text[i] != '\n')
        advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        ++j;
      t.kind = Tok::Ident;
      t.text = text.substr(i, j - i);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
        ++j;
      t.kind = Tok::Int;
      t.text = text.substr(i, j - i);
      advance(j - i);
    } else if (c == '"') {
      size_t j = i + 1;
      while (j < text.size() && text[j] != '"' && text[j] != '\n')
        ++j;
      if (j >= text.size() || text[j] != '"')
        throw ParseError(file, line, col, "unterminated string");
      t.kind = Tok::Str;
      t.text = text.substr(i + 1, j - i - 1);
      advance(j - i + 1);
    } else {
      static const char *two[] = {"<=", ">=", "!=", "->"};
      t.kind = Tok::Sym;
      for (const char *s : two)
        if (text.compare(i, 2, s) == 0)
          t.text = s;
      if (t.text.empty()) {
        if (std::string("()<>=!&|;,+-").find(c) == std::string::npos)
          throw ParseError(file, line, col, std::string("unexpected character '") + c + "'");
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    out.push_back(t);
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

class Parser {
public:
  Parser(std::vector<Token> toks, std::string file)
      : toks_(std::move(toks)), file_(std::move(file)) {}

  ProblemFile problem() {
    ProblemFile pf;
    pf.path = file_;
    std::vector<Formula> formulas;
    while (peek().kind != Tok::End) {
      const Token &kw = peek();
      if (is_ident("theory")) {
        next();
        const Token name = expect_ident("theory name");
        auto th = Theory::from_string(name.text);
        if (!th)
          fail(name, "unknown theory '" + name.text + "'");
        pf.theory = *th;
        pf.theory_given = true;
        theory_ = *th;
        expect_sym(";");
      } else if (is_ident("var")) {
        next();
        do {
          const Token v = expect_ident("variable name");
          if (kReserved.count(v.text))
            fail(v, "'" + v.text + "' is a reserved word");
          if (v.text.rfind(kPropPrefix, 0) == 0)
            fail(v, "identifier prefix '" + std::string(kPropPrefix) + "' is reserved");
          if (!vars_.insert(v.text).second)
            fail(v, "variable '" + v.text + "' declared twice");
          pf.vars.push_back(v.text);
        } while (accept_sym(","));
        expect_sym(";");
      } else if (is_ident("formula")) {
        next();
        formulas.push_back(formula());
        expect_sym(";");
      } else if (is_ident("option")) {
        next();
        const Token key = expect_ident("option name");
        expect_sym("=");
        std::string value;
        if (accept_sym("-"))
          value = "-";
        const Token v = next();
        if (v.kind != Tok::Ident && v.kind != Tok::Int && v.kind != Tok::Str)
          fail(v, "expected option value");
        value += v.text;
        pf.options[key.text] = value;
        expect_sym(";");
      } else {
        fail(kw, "expected 'theory', 'var', 'formula' or 'option'");
      }
    }
    if (formulas.empty())
      fail(peek(), "missing 'formula' statement");
    pf.formula = f_and_all(formulas);
    check_theory();
    return pf;
  }

  Formula standalone(const std::set<std::string> &vars, const Theory &th) {
    vars_ = vars;
    theory_ = th;
    Formula f = formula();
    if (peek().kind != Tok::End)
      fail(peek(), "unexpected '" + peek().text + "' after formula");
    check_theory();
    return f;
  }

private:
  std::vector<Token> toks_;
  std::string file_;
  size_t pos_ = 0;
  std::set<std::string> vars_;
  Theory theory_;
  std::optional<Token> first_mod_;

  const Token &peek(size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1)
      ++pos_;
    return t;
  }
  [[noreturn]] void fail(const Token &t, const std::string &msg) const {
    throw ParseError(file_, t.line, t.col, msg);
  }
  bool is_ident(const char *s) const {
    return peek().kind == Tok::Ident && peek().text == s;
  }
  bool is_sym(const char *s) const { return peek().kind == Tok::Sym && peek().text == s; }
  bool accept_sym(const char *s) {
    if (!is_sym(s))
      return false;
    next();
    return true;
  }
  void expect_sym(const char *s) {
    if (!accept_sym(s))
      fail(peek(), std::string("expected '") + s + "'" +
                       (peek().kind == Tok::End ? " at end of input"
                                                : " before '" + peek().text + "'"));
  }
  Token expect_ident(const char *what) {
    if (peek().kind != Tok::Ident)
      fail(peek(), std::string("expected ") + what);
    return next();
  }

  void check_theory() const {
    if (first_mod_ && !theory_.admits_mod())
      fail(*first_mod_, "mod constraint requires discrete theory");
  }

  Formula formula() {
    Formula lhs = disjunction();
    if (accept_sym("->"))
      return f_implies(lhs, formula());
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (accept_sym("|"))
      f = f_or(f, conjunction());
    return f;
  }

  Formula conjunction() {
    Formula f = temporal();
    while (accept_sym("&"))
      f = f_and(f, temporal());
    return f;
  }

  Formula temporal() {
    Formula lhs = unary();
    if (peek().kind == Tok::Ident && peek().text.size() == 1) {
      const char c = peek().text[0];
      if (c == 'U' || c == 'S' || c == 'R' || c == 'T') {
        next();
        Formula rhs = temporal();
        switch (c) {
        case 'U':
          return f_until(lhs, rhs);
        case 'S':
          return f_since(lhs, rhs);
        case 'R':
          return f_release(lhs, rhs);
        default:
          return f_trigger(lhs, rhs);
        }
      }
    }
    return lhs;
  }

  Formula unary() {
    if (accept_sym("!"))
      return f_not(unary());
    if (peek().kind == Tok::Ident && peek().text.size() == 1) {
      const char c = peek().text[0];
      if (c == 'X' || c == 'Y') {
        if (auto atom = try_atom())
          return *atom;
      }
      switch (c) {
      case 'X':
        next();
        return f_next(unary());
      case 'Y':
        next();
        return f_prev(unary());
      case 'Z':
        next();
        return f_weak_prev(unary());
      case 'G':
        next();
        return f_globally(unary());
      case 'F':
        next();
        return f_finally(unary());
      case 'H':
        next();
        return f_historically(unary());
      case 'O':
        next();
        return f_once(unary());
      default:
        break;
      }
    }
    return primary();
  }

  Formula primary() {
    if (is_ident("true")) {
      next();
      return f_true();
    }
    if (is_ident("false")) {
      next();
      return f_false();
    }
    if (accept_sym("(")) {
      Formula f = formula();
      expect_sym(")");
      return f;
    }
    if (auto atom = try_atom())
      return *atom;
    const Token t = peek();
    if (t.kind != Tok::Ident)
      fail(t, t.kind == Tok::End ? "unexpected end of input"
                                 : "unexpected '" + t.text + "'");
    if (kReserved.count(t.text))
      fail(t, "unexpected '" + t.text + "'");
    if (vars_.count(t.text))
      fail(t, "variable '" + t.text + "' used as a proposition");
    if (t.text.rfind(kPropPrefix, 0) == 0)
      fail(t, "identifier prefix '" + std::string(kPropPrefix) + "' is reserved");
    next();
    return f_prop(t.text);
  }

  struct ParsedTerm {
    RawTerm raw;
    Token at;
    bool ok = false;
  };

  ParsedTerm term() {
    ParsedTerm out;
    out.at = peek();
    std::string ops;
    size_t parens = 0;
    while (peek().kind == Tok::Ident && (peek().text == "X" || peek().text == "Y") &&
           peek(1).kind == Tok::Sym && peek(1).text == "(") {
      ops += next().text;
      next();
      ++parens;
    }
    Token base = peek();
    if (base.kind == Tok::Int) {
      next();
      out.raw.base = Term::constant(std::stoll(base.text));
    } else if (base.kind == Tok::Sym && base.text == "-" && peek(1).kind == Tok::Int) {
      next();
      out.raw.base = Term::constant(-std::stoll(next().text));
    } else if (base.kind == Tok::Ident && !kReserved.count(base.text)) {
      next();
      out.raw.base = Term::variable(base.text);
      out.at = base;
    } else {
      return out;
    }
    if (!out.raw.base.is_const)
      out.at = base;
    for (size_t i = 0; i < parens; ++i) {
      if (!is_sym(")"))
        return out;
      next();
    }
    out.raw.ops = ops;
    out.ok = true;
    return out;
  }

  void check_declared(const ParsedTerm &t) const {
    if (!t.raw.base.is_const && !vars_.count(t.raw.base.var))
      fail(t.at, "undeclared variable '" + t.raw.base.var + "'");
  }

  std::optional<Formula> try_atom() {
    const size_t save = pos_;
    ParsedTerm lhs = term();
    const bool rel = peek().kind == Tok::Sym &&
                     (peek().text == "<" || peek().text == "<=" || peek().text == "=" ||
                      peek().text == "!=" || peek().text == ">" || peek().text == ">=");
    if (!lhs.ok || !(rel || is_ident("mod"))) {
      pos_ = save;
      return std::nullopt;
    }
    check_declared(lhs);
    const Term a = normalize_term(lhs.raw);

    if (is_ident("mod")) {
      const Token modtok = next();
      if (!first_mod_)
        first_mod_ = modtok;
      const Token c = peek();
      if (c.kind != Tok::Int)
        fail(c, "expected modulus");
      next();
      Atom at;
      at.lhs = a;
      at.modulus = std::stoll(c.text);
      if (at.modulus < 1)
        fail(c, "modulus must be at least 1");
      expect_sym("=");
      ParsedTerm rhs = term();
      if (!rhs.ok)
        fail(peek(), "expected term or constant after 'mod c ='");
      check_declared(rhs);
      const Term b = normalize_term(rhs.raw);
      if (b.is_const) {
        at.rel = Rel::ModConst;
        at.offset = b.value;
      } else {
        at.rel = Rel::ModTerm;
        at.rhs = b;
        if (is_sym("+") || is_sym("-")) {
          const bool minus = next().text == "-";
          const Token d = peek();
          if (d.kind != Tok::Int)
            fail(d, "expected integer offset");
          next();
          at.offset = minus ? -std::stoll(d.text) : std::stoll(d.text);
        }
      }
      return f_atom(at);
    }

    const std::string op = next().text;
    ParsedTerm rhs = term();
    if (!rhs.ok)
      fail(peek(), "expected term after '" + op + "'");
    check_declared(rhs);
    const Term b = normalize_term(rhs.raw);
    if (op == "<")
      return f_lt(a, b);
    if (op == "=")
      return f_eq(a, b);
    if (op == "<=")
      return f_or(f_lt(a, b), f_eq(a, b));
    if (op == ">")
      return f_lt(b, a);
    if (op == ">=")
      return f_or(f_lt(b, a), f_eq(a, b));
    return f_not(f_eq(a, b));
  }
};

} // namespace

ProblemFile parse(const std::string &text, const std::string &filename) {
  Parser p(lex(text, filename), filename);
  return p.problem();
}

ProblemFile parse_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError(path, 0, 0, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

Formula parse_formula(const std::string &text, const std::set<std::string> &vars,
                      const Theory &theory) {
  Parser p(lex(text, "<formula>"), "<formula>");
  return p.standalone(vars, theory);
}

std::string render(const Formula &f) { return to_string(f); }

std::string render(const ProblemFile &p) {
  std::ostringstream os;
  os << "theory " << p.theory.str() << ";\n";
  if (!p.vars.empty()) {
    os << "var ";
    for (size_t i = 0; i < p.vars.size(); ++i)
      os << (i ? ", " : "") << p.vars[i];
    os << ";\n";
  }
  for (const auto &[k, v] : p.options) {
    const bool bare = !v.empty() && v.find_first_of(" \t\"") == std::string::npos;
    os << "option " << k << " = " << (bare ? v : "\"" + v + "\"") << ";\n";
  }
  os << "formula " << render(p.formula) << ";\n";
  return os.str();
}

} // namespace cltlb
