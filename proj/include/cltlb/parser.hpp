#pragma once

#include "cltlb/formula.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cltlb {

class ParseError : public std::runtime_error {
public:
  ParseError(std::string file, int line, int col, const std::string &msg);

  const std::string &file() const { return file_; }
  int line() const { return line_; }
  int col() const { return col_; }
  const std::string &message() const { return msg_; }

private:
  std::string file_;
  int line_;
  int col_;
  std::string msg_;
};

struct ProblemFile {
  std::string path;
  Theory theory;
  bool theory_given = false;
  std::vector<std::string> vars;
  Formula formula;
  std::map<std::string, std::string> options;
};

ProblemFile parse(const std::string &text, const std::string &filename = "<input>");
ProblemFile parse_file(const std::string &path);

// Parses a bare formula against a set of declared variables.
Formula parse_formula(const std::string &text, const std::set<std::string> &vars,
                      const Theory &theory = Theory{});

std::string render(const Formula &f);
std::string render(const ProblemFile &p);

} // namespace cltlb
