#include "confik/osd.hpp"

#include "confik/error.hpp"
#include "confik/solver.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <random>
#include <sstream>

namespace confik {

std::string_view to_string(ValueClass c) {
  switch (c) {
  case ValueClass::NonOptimal: return "non-optimal";
  case ValueClass::Settled: return "settled";
  case ValueClass::Open: return "open";
  }
  return "?";
}

OsdProblem::OsdProblem(std::vector<std::string> names, std::vector<std::vector<Value>> domains,
                       Constraint constraint, Preference precedes)
    : names_(std::move(names)), domains_(std::move(domains)),
      constraint_(std::move(constraint)), precedes_(std::move(precedes)) {
  if (names_.size() != domains_.size())
    throw Error(ErrorKind::SemanticError, "one domain per variable is required");
  for (std::size_t i = 0; i < domains_.size(); ++i)
    if (domains_[i].empty())
      throw Error(ErrorKind::SemanticError, "variable '" + names_[i] + "' has an empty domain");
  if (!constraint_)
    constraint_ = [](const Tuple &) { return true; };
  if (!precedes_)
    precedes_ = no_preference();
}

std::optional<std::size_t> OsdProblem::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end())
    return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

OsdProblem::Preference no_preference() {
  return [](const Tuple &a, const Tuple &b) { return a == b; };
}

OsdProblem::Preference subset_preference() {
  return [](const Tuple &a, const Tuple &b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] > b[i])
        return false;
    return true;
  };
}

OsdProblem::Preference
pareto_preference(std::vector<std::function<Value(const Tuple &)>> objectives) {
  return [objectives = std::move(objectives)](const Tuple &a, const Tuple &b) {
    for (const auto &f : objectives)
      if (f(a) > f(b))
        return false;
    return true;
  };
}

std::vector<Tuple> solutions(const OsdProblem &p, std::span<const Refinement> refinements) {
  std::uint64_t product = 1;
  for (const auto &d : p.domains()) {
    product *= d.size();
    if (product > kOsdEnumerationLimit)
      throw Error(ErrorKind::TooLarge, "domain product exceeds " +
                                           std::to_string(kOsdEnumerationLimit) + " tuples");
  }
  for (const Refinement &r : refinements)
    if (r.var >= p.size())
      throw Error(ErrorKind::UnknownVariable, "refinement on variable #" + std::to_string(r.var));

  std::vector<Tuple> out;
  const std::size_t n = p.size();
  std::vector<std::size_t> index(n, 0);
  Tuple t(n);
  for (std::uint64_t k = 0; k < product; ++k) {
    for (std::size_t i = 0; i < n; ++i)
      t[i] = p.domains()[i][index[i]];
    bool refined = std::all_of(refinements.begin(), refinements.end(),
                               [&](const Refinement &r) { return t[r.var] == r.value; });
    if (refined && p.satisfies(t))
      out.push_back(t);
    for (std::size_t i = n; i-- > 0;) {
      if (++index[i] < p.domains()[i].size())
        break;
      index[i] = 0;
    }
  }
  return out;
}

namespace {

std::string show(const Tuple &t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i)
    s += (i ? "," : "") + std::to_string(t[i]);
  return s + ")";
}

constexpr std::size_t kExhaustiveTransitivity = 200;
constexpr std::size_t kTransitivitySamples = 20000;

} // namespace

void verify_partial_order(const OsdProblem &p, const std::vector<Tuple> &sols) {
  for (const Tuple &a : sols)
    if (!p.precedes(a, a))
      throw Error(ErrorKind::InvalidPreference, "preference is not reflexive at " + show(a));
  for (std::size_t i = 0; i < sols.size(); ++i)
    for (std::size_t j = i + 1; j < sols.size(); ++j)
      if (p.precedes(sols[i], sols[j]) && p.precedes(sols[j], sols[i]))
        throw Error(ErrorKind::InvalidPreference, "preference is not antisymmetric: " +
                                                      show(sols[i]) + " and " + show(sols[j]) +
                                                      " precede each other");
  auto check = [&](const Tuple &a, const Tuple &b, const Tuple &c) {
    if (p.precedes(a, b) && p.precedes(b, c) && !p.precedes(a, c))
      throw Error(ErrorKind::InvalidPreference, "preference is not transitive on " + show(a) +
                                                    ", " + show(b) + ", " + show(c));
  };
  if (sols.size() <= kExhaustiveTransitivity) {
    for (const Tuple &a : sols)
      for (const Tuple &b : sols)
        if (p.precedes(a, b))
          for (const Tuple &c : sols)
            check(a, b, c);
    return;
  }
  // Deterministic spot check on larger solution sets.
  std::mt19937_64 rng(0x5eedULL);
  for (std::size_t k = 0; k < kTransitivitySamples; ++k) {
    const Tuple &a = sols[rng() % sols.size()];
    const Tuple &b = sols[rng() % sols.size()];
    const Tuple &c = sols[rng() % sols.size()];
    check(a, b, c);
  }
}

std::vector<Tuple> optimal_solutions(const OsdProblem &p, std::span<const Refinement> refinements) {
  std::vector<Tuple> sols = solutions(p, refinements);
  verify_partial_order(p, sols);
  std::vector<Tuple> out;
  for (const Tuple &a : sols) {
    bool dominated = std::any_of(sols.begin(), sols.end(), [&](const Tuple &b) {
      return b != a && p.precedes(b, a);
    });
    if (!dominated)
      out.push_back(a);
  }
  return out;
}

std::optional<std::size_t> ValueClassification::settled_index(std::size_t var) const {
  const auto &row = classes.at(var);
  auto it = std::find(row.begin(), row.end(), ValueClass::Settled);
  if (it == row.end())
    return std::nullopt;
  return static_cast<std::size_t>(it - row.begin());
}

ValueClassification classify_values(const OsdProblem &p, std::span<const Refinement> refinements) {
  std::vector<Tuple> optimal = optimal_solutions(p, refinements);
  if (optimal.empty())
    throw Error(ErrorKind::NoSolutions, "the problem has no solutions");
  ValueClassification out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::vector<ValueClass> row;
    for (Value c : p.domains()[i]) {
      auto uses = static_cast<std::size_t>(std::count_if(
          optimal.begin(), optimal.end(), [&](const Tuple &t) { return t[i] == c; }));
      row.push_back(uses == 0                ? ValueClass::NonOptimal
                    : uses == optimal.size() ? ValueClass::Settled
                                             : ValueClass::Open);
    }
    // A settled value leaves every other value non-optimal, and conversely.
    bool has_settled = std::count(row.begin(), row.end(), ValueClass::Settled) == 1;
    bool others_non_optimal =
        std::count(row.begin(), row.end(), ValueClass::NonOptimal) + 1 ==
        static_cast<std::ptrdiff_t>(row.size());
    if (has_settled != others_non_optimal)
      throw std::logic_error("value classification of '" + p.names()[i] + "' is inconsistent");
    out.classes.push_back(std::move(row));
  }
  return out;
}

OsdProblem as_boolean_osd(const ClauseSet &cs) {
  std::vector<VarId> user = cs.vars().user_vars();
  if (user.size() > kBooleanOsdLimit)
    throw Error(ErrorKind::TooLarge, std::to_string(user.size()) +
                                         " variables exceed the Boolean embedding limit of " +
                                         std::to_string(kBooleanOsdLimit));
  std::vector<std::string> names;
  for (VarId v : user)
    names.push_back(cs.vars().name(v));
  std::vector<std::vector<Value>> domains(user.size(), std::vector<Value>{0, 1});

  OsdProblem::Constraint constraint;
  if (user.size() == cs.num_vars()) {
    constraint = [cs](const Tuple &t) {
      return std::all_of(cs.clauses().begin(), cs.clauses().end(), [&](const Clause &c) {
        return std::any_of(c.begin(), c.end(),
                           [&](Literal l) { return (t[l.var] != 0) == l.positive; });
      });
    };
  } else {
    // Auxiliaries are existentially quantified: ask the solver.
    auto solver = std::make_shared<Solver>(cs);
    constraint = [solver, user](const Tuple &t) {
      std::vector<Literal> fixed;
      for (std::size_t i = 0; i < user.size(); ++i)
        fixed.push_back({user[i], t[i] != 0});
      return solver->solve(fixed).has_value();
    };
  }
  return OsdProblem(std::move(names), std::move(domains), std::move(constraint),
                    subset_preference());
}

//===----------------------------------------------------------------------===//
// Text format
//===----------------------------------------------------------------------===//

namespace {

[[noreturn]] void fail(ErrorKind kind, std::size_t line, std::size_t column,
                       const std::string &what) {
  throw Error(kind, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                        what);
}

struct Term {
  enum class Op { Const, Var, Neg, Add, Sub, Mul, Lt, Le, Gt, Ge, Eq, Ne, Not, And, Or, Implies };
  Op op = Op::Const;
  Value constant = 0;
  std::size_t var = 0;
  std::vector<Term> kids;

  Value eval(const Tuple &t) const {
    switch (op) {
    case Op::Const: return constant;
    case Op::Var: return t[var];
    case Op::Neg: return -kids[0].eval(t);
    case Op::Add: return kids[0].eval(t) + kids[1].eval(t);
    case Op::Sub: return kids[0].eval(t) - kids[1].eval(t);
    case Op::Mul: return kids[0].eval(t) * kids[1].eval(t);
    case Op::Lt: return kids[0].eval(t) < kids[1].eval(t);
    case Op::Le: return kids[0].eval(t) <= kids[1].eval(t);
    case Op::Gt: return kids[0].eval(t) > kids[1].eval(t);
    case Op::Ge: return kids[0].eval(t) >= kids[1].eval(t);
    case Op::Eq: return kids[0].eval(t) == kids[1].eval(t);
    case Op::Ne: return kids[0].eval(t) != kids[1].eval(t);
    case Op::Not: return kids[0].eval(t) == 0;
    case Op::And: return kids[0].eval(t) != 0 && kids[1].eval(t) != 0;
    case Op::Or: return kids[0].eval(t) != 0 || kids[1].eval(t) != 0;
    case Op::Implies: return kids[0].eval(t) == 0 || kids[1].eval(t) != 0;
    }
    return 0;
  }
};

Term binary(Term::Op op, Term lhs, Term rhs) {
  Term t;
  t.op = op;
  t.kids.push_back(std::move(lhs));
  t.kids.push_back(std::move(rhs));
  return t;
}

Term unary(Term::Op op, Term operand) {
  Term t;
  t.op = op;
  t.kids.push_back(std::move(operand));
  return t;
}

class TermParser {
public:
  TermParser(std::string_view text, const std::vector<std::string> &names, std::size_t line,
             std::size_t column)
      : text_(text), names_(names), line_(line), column_(column) {}

  Term parse_all() {
    Term t = parse();
    skip();
    if (pos_ < text_.size())
      error("unexpected '" + std::string(1, text_[pos_]) + "'");
    return t;
  }

  Term parse() { return parse_implies(); }

  bool accept(std::string_view token) {
    skip();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  [[noreturn]] void error(const std::string &what, ErrorKind kind = ErrorKind::SyntaxError) {
    fail(kind, line_, column_ + pos_, what);
  }

  std::size_t position() const { return pos_; }

private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  Term parse_implies() {
    Term lhs = parse_or();
    if (accept("->"))
      return binary(Term::Op::Implies, std::move(lhs), parse_implies());
    return lhs;
  }

  Term parse_or() {
    Term lhs = parse_and();
    while (accept("|"))
      lhs = binary(Term::Op::Or, std::move(lhs), parse_and());
    return lhs;
  }

  Term parse_and() {
    Term lhs = parse_not();
    while (accept("&"))
      lhs = binary(Term::Op::And, std::move(lhs), parse_not());
    return lhs;
  }

  Term parse_not() {
    skip();
    if (pos_ < text_.size() && text_[pos_] == '!' && text_.substr(pos_, 2) != "!=") {
      ++pos_;
      return unary(Term::Op::Not, parse_not());
    }
    return parse_comparison();
  }

  Term parse_comparison() {
    Term lhs = parse_sum();
    static const std::pair<std::string_view, Term::Op> ops[] = {
        {"<=", Term::Op::Le}, {">=", Term::Op::Ge}, {"==", Term::Op::Eq}, {"!=", Term::Op::Ne},
        {"<", Term::Op::Lt},  {">", Term::Op::Gt},  {"=", Term::Op::Eq}};
    for (auto [token, op] : ops)
      if (accept(token))
        return binary(op, std::move(lhs), parse_sum());
    return lhs;
  }

  Term parse_sum() {
    Term lhs = parse_product();
    for (;;) {
      skip();
      if (text_.substr(pos_, 2) == "->")
        return lhs;
      if (accept("+"))
        lhs = binary(Term::Op::Add, std::move(lhs), parse_product());
      else if (accept("-"))
        lhs = binary(Term::Op::Sub, std::move(lhs), parse_product());
      else
        return lhs;
    }
  }

  Term parse_product() {
    Term lhs = parse_factor();
    while (accept("*"))
      lhs = binary(Term::Op::Mul, std::move(lhs), parse_factor());
    return lhs;
  }

  Term parse_factor() {
    skip();
    if (pos_ >= text_.size())
      error("unexpected end of expression");
    char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return unary(Term::Op::Neg, parse_factor());
    }
    if (c == '(') {
      ++pos_;
      Term inner = parse();
      if (!accept(")"))
        error("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      Term t;
      t.constant = std::stoll(std::string(text_.substr(start, pos_ - start)));
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      auto it = std::find(names_.begin(), names_.end(), name);
      if (it == names_.end()) {
        pos_ = start;
        error("unknown variable '" + name + "'", ErrorKind::SemanticError);
      }
      Term t;
      t.op = Term::Op::Var;
      t.var = static_cast<std::size_t>(it - names_.begin());
      return t;
    }
    error("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  const std::vector<std::string> &names_;
  std::size_t line_, column_;
  std::size_t pos_ = 0;
};

std::vector<Value> parse_domain(const std::string &text, std::size_t line, std::size_t column) {
  std::string body = text;
  auto open = body.find('{'), close = body.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open)
    fail(ErrorKind::SyntaxError, line, column, "expected a domain '{...}'");
  for (std::size_t i = close + 1; i < body.size(); ++i)
    if (!std::isspace(static_cast<unsigned char>(body[i])))
      fail(ErrorKind::SyntaxError, line, column + i, "trailing text after domain");
  std::vector<Value> values;
  std::stringstream items(body.substr(open + 1, close - open - 1));
  for (std::string item; std::getline(items, item, ',');) {
    item.erase(std::remove_if(item.begin(), item.end(),
                              [](unsigned char ch) { return std::isspace(ch); }),
               item.end());
    try {
      if (auto dots = item.find(".."); dots != std::string::npos) {
        Value lo = std::stoll(item.substr(0, dots)), hi = std::stoll(item.substr(dots + 2));
        if (hi < lo)
          throw std::invalid_argument(item);
        for (Value v = lo; v <= hi; ++v)
          values.push_back(v);
      } else {
        std::size_t used = 0;
        values.push_back(std::stoll(item, &used));
        if (used != item.size())
          throw std::invalid_argument(item);
      }
    } catch (const std::exception &) {
      fail(ErrorKind::SyntaxError, line, column + open, "bad domain value '" + item + "'");
    }
  }
  if (values.empty())
    fail(ErrorKind::SemanticError, line, column + open, "empty domain");
  std::sort(values.begin(), values.end());
  if (std::adjacent_find(values.begin(), values.end()) != values.end())
    fail(ErrorKind::SemanticError, line, column + open, "repeated domain value");
  return values;
}

} // namespace

OsdProblem parse_osd(std::string_view text) {
  std::vector<std::string> names;
  std::vector<std::vector<Value>> domains;
  struct Pending {
    std::string text;
    std::size_t line, column;
  };
  std::vector<Pending> constraints;
  std::optional<Pending> prefer;

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
      line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos)
      continue;
    std::size_t kw_end = std::min(line.find_first_of(" \t", start), line.size());
    std::string keyword = line.substr(start, kw_end - start);
    std::size_t rest_at = line.find_first_not_of(" \t", kw_end);
    if (rest_at == std::string::npos)
      rest_at = line.size();
    std::string rest = line.substr(rest_at);
    std::size_t rest_col = rest_at + 1;

    if (keyword == "var") {
      std::size_t name_end = 0;
      while (name_end < rest.size() &&
             (std::isalnum(static_cast<unsigned char>(rest[name_end])) || rest[name_end] == '_'))
        ++name_end;
      if (name_end == 0 || std::isdigit(static_cast<unsigned char>(rest[0])))
        fail(ErrorKind::SyntaxError, line_no, rest_col, "expected a variable name");
      std::string name = rest.substr(0, name_end);
      if (std::find(names.begin(), names.end(), name) != names.end())
        fail(ErrorKind::SemanticError, line_no, rest_col, "duplicate variable '" + name + "'");
      std::size_t in_at = rest.find_first_not_of(" \t", name_end);
      if (in_at == std::string::npos || rest.compare(in_at, 2, "in") != 0)
        fail(ErrorKind::SyntaxError, line_no, rest_col + name_end, "expected 'in'");
      std::size_t dom_at = in_at + 2;
      domains.push_back(parse_domain(rest.substr(dom_at), line_no, rest_col + dom_at));
      names.push_back(std::move(name));
    } else if (keyword == "constraint") {
      if (rest.empty())
        fail(ErrorKind::SyntaxError, line_no, rest_col, "empty constraint");
      constraints.push_back({rest, line_no, rest_col});
    } else if (keyword == "prefer") {
      if (prefer)
        fail(ErrorKind::SemanticError, line_no, start + 1, "more than one prefer line");
      prefer = Pending{rest, line_no, rest_col};
    } else {
      fail(ErrorKind::SyntaxError, line_no, start + 1, "unknown keyword '" + keyword + "'");
    }
  }

  std::vector<Term> terms;
  for (const Pending &c : constraints)
    terms.push_back(TermParser(c.text, names, c.line, c.column).parse_all());
  OsdProblem::Constraint constraint = [terms = std::move(terms)](const Tuple &t) {
    return std::all_of(terms.begin(), terms.end(), [&](const Term &x) { return x.eval(t) != 0; });
  };

  OsdProblem::Preference preference = no_preference();
  if (prefer) {
    const std::string &p = prefer->text;
    if (p == "subset") {
      preference = subset_preference();
    } else if (p.rfind("pareto", 0) == 0) {
      TermParser parser(p, names, prefer->line, prefer->column);
      parser.accept("pareto");
      if (!parser.accept("("))
        parser.error("expected '('");
      std::vector<std::function<Value(const Tuple &)>> objectives;
      do {
        auto term = std::make_shared<Term>(parser.parse());
        objectives.push_back([term](const Tuple &t) { return term->eval(t); });
      } while (parser.accept(","));
      if (!parser.accept(")"))
        parser.error("expected ')'");
      if (parser.accept(""); parser.position() != p.size()) {
        std::string tail = p.substr(parser.position());
        if (tail.find_first_not_of(" \t") != std::string::npos)
          parser.error("trailing text after pareto(...)");
      }
      preference = pareto_preference(std::move(objectives));
    } else {
      fail(ErrorKind::SyntaxError, prefer->line, prefer->column,
           "expected 'subset' or 'pareto(...)'");
    }
  }
  if (names.empty())
    throw Error(ErrorKind::SemanticError, "no variables declared");
  return OsdProblem(std::move(names), std::move(domains), std::move(constraint),
                    std::move(preference));
}

} // namespace confik
