#include "confik/dimacs.hpp"

#include "confik/error.hpp"

#include <map>
#include <sstream>

namespace confik {

std::string write_dimacs(const ClauseSet &cs) {
  std::ostringstream os;
  const VarTable &vars = cs.vars();
  for (VarId v = 0; v < vars.size(); ++v)
    os << "c " << (vars.is_auxiliary(v) ? "aux " : "var ") << v + 1 << ' ' << vars.name(v)
       << '\n';
  os << "p cnf " << vars.size() << ' ' << cs.clauses().size() << '\n';
  for (const Clause &c : cs.clauses()) {
    for (Literal l : c)
      os << (l.positive ? "" : "-") << l.var + 1 << ' ';
    os << "0\n";
  }
  return os.str();
}

namespace {

[[noreturn]] void fail(std::size_t line, const std::string &what) {
  throw Error(ErrorKind::SyntaxError, "dimacs:" + std::to_string(line) + ": " + what);
}

} // namespace

ClauseSet read_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  long num_vars = -1;
  std::map<long, std::pair<std::string, bool>> names; // id -> (name, aux)
  std::vector<Clause> clauses;
  Clause current;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head))
      continue;
    if (head == "c") {
      std::string tag, name;
      long id = 0;
      if (ls >> tag && (tag == "var" || tag == "aux") && ls >> id >> name)
        names[id] = {name, tag == "aux"};
      continue;
    }
    if (head == "%")
      break;
    if (head == "p") {
      std::string format;
      long declared_clauses = 0;
      if (num_vars >= 0)
        fail(line_no, "duplicate problem line");
      if (!(ls >> format >> num_vars >> declared_clauses) || format != "cnf" || num_vars < 0)
        fail(line_no, "malformed problem line");
      continue;
    }
    if (num_vars < 0)
      fail(line_no, "clause before the problem line");
    std::istringstream body(line);
    long lit = 0;
    std::string token;
    while (body >> token) {
      try {
        std::size_t used = 0;
        lit = std::stol(token, &used);
        if (used != token.size())
          throw std::invalid_argument(token);
      } catch (const std::exception &) {
        fail(line_no, "bad literal '" + token + "'");
      }
      if (lit == 0) {
        clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      long var = lit < 0 ? -lit : lit;
      if (var > num_vars)
        fail(line_no, "literal " + token + " exceeds declared variable count");
      current.push_back({static_cast<VarId>(var - 1), lit > 0});
    }
  }
  if (num_vars < 0)
    fail(line_no, "missing problem line");
  if (!current.empty())
    clauses.push_back(std::move(current));

  VarTable vars;
  for (long id = 1; id <= num_vars; ++id) {
    auto it = names.find(id);
    if (it == names.end()) {
      vars.add(std::to_string(id));
    } else if (it->second.second) {
      // Auxiliary names are regenerated; only the flag matters.
      vars.add_auxiliary();
    } else {
      vars.add(it->second.first);
    }
  }
  ClauseSet cs(std::move(vars));
  for (Clause &c : clauses)
    cs.add_clause(std::move(c));
  return cs;
}

} // namespace confik
