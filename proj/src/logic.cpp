#include "confik/logic.hpp"

#include "confik/error.hpp"
#include "confik/solver.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace confik {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::UnsatContext: return "UnsatContext";
  case ErrorKind::UnsatInput: return "UnsatInput";
  case ErrorKind::UnsatModel: return "UnsatModel";
  case ErrorKind::TooLarge: return "TooLarge";
  case ErrorKind::SyntaxError: return "SyntaxError";
  case ErrorKind::SemanticError: return "SemanticError";
  case ErrorKind::AlreadyAssigned: return "AlreadyAssigned";
  case ErrorKind::InconsistentDecision: return "InconsistentDecision";
  case ErrorKind::NotAUserDecision: return "NotAUserDecision";
  case ErrorKind::UnknownVariable: return "UnknownVariable";
  case ErrorKind::NoSolutions: return "NoSolutions";
  case ErrorKind::InvalidPreference: return "InvalidPreference";
  case ErrorKind::Usage: return "Usage";
  }
  return "Unknown";
}

//===----------------------------------------------------------------------===//
// VarTable
//===----------------------------------------------------------------------===//

VarId VarTable::insert(std::string name, bool auxiliary) {
  auto id = static_cast<VarId>(names_.size());
  auto [it, inserted] = index_.emplace(name, id);
  if (!inserted)
    throw Error(ErrorKind::SemanticError, "duplicate variable '" + name + "'");
  names_.push_back(std::move(name));
  auxiliary_.push_back(auxiliary);
  return id;
}

VarId VarTable::add(std::string name) { return insert(std::move(name), false); }

VarId VarTable::add_auxiliary() {
  std::string name;
  do {
    name = "_t" + std::to_string(aux_counter_++);
  } while (index_.count(name));
  return insert(std::move(name), true);
}

VarId VarTable::intern(std::string_view name) {
  if (auto id = find(name))
    return *id;
  return add(std::string(name));
}

std::optional<VarId> VarTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end())
    return std::nullopt;
  return it->second;
}

VarId VarTable::lookup(std::string_view name) const {
  if (auto id = find(name))
    return *id;
  throw Error(ErrorKind::UnknownVariable, "unknown variable '" + std::string(name) + "'");
}

std::size_t VarTable::user_count() const {
  return static_cast<std::size_t>(std::count(auxiliary_.begin(), auxiliary_.end(), false));
}

std::vector<VarId> VarTable::user_vars() const {
  std::vector<VarId> out;
  for (VarId v = 0; v < names_.size(); ++v)
    if (!auxiliary_[v])
      out.push_back(v);
  return out;
}

//===----------------------------------------------------------------------===//
// Expr
//===----------------------------------------------------------------------===//

Expr Expr::constant(bool value) {
  Expr e;
  e.kind_ = value ? Kind::True : Kind::False;
  return e;
}

Expr Expr::variable(VarId id) {
  Expr e;
  e.kind_ = Kind::Var;
  e.var_ = id;
  return e;
}

Expr Expr::negation(Expr operand) {
  Expr e;
  e.kind_ = Kind::Not;
  e.operands_.push_back(std::move(operand));
  return e;
}

Expr Expr::conjunction(std::vector<Expr> operands) {
  Expr e;
  e.kind_ = Kind::And;
  e.operands_ = std::move(operands);
  return e;
}

Expr Expr::disjunction(std::vector<Expr> operands) {
  Expr e;
  e.kind_ = Kind::Or;
  e.operands_ = std::move(operands);
  return e;
}

Expr Expr::implication(Expr lhs, Expr rhs) {
  Expr e;
  e.kind_ = Kind::Implies;
  e.operands_.push_back(std::move(lhs));
  e.operands_.push_back(std::move(rhs));
  return e;
}

Expr Expr::equivalence(Expr lhs, Expr rhs) {
  Expr e;
  e.kind_ = Kind::Iff;
  e.operands_.push_back(std::move(lhs));
  e.operands_.push_back(std::move(rhs));
  return e;
}

bool Expr::evaluate(const std::function<bool(VarId)> &value) const {
  switch (kind_) {
  case Kind::True: return true;
  case Kind::False: return false;
  case Kind::Var: return value(var_);
  case Kind::Not: return !operands_[0].evaluate(value);
  case Kind::And:
    return std::all_of(operands_.begin(), operands_.end(),
                       [&](const Expr &o) { return o.evaluate(value); });
  case Kind::Or:
    return std::any_of(operands_.begin(), operands_.end(),
                       [&](const Expr &o) { return o.evaluate(value); });
  case Kind::Implies:
    return !operands_[0].evaluate(value) || operands_[1].evaluate(value);
  case Kind::Iff:
    return operands_[0].evaluate(value) == operands_[1].evaluate(value);
  }
  return false;
}

void Expr::collect_vars(VarSet &out) const {
  if (kind_ == Kind::Var)
    out.insert(var_);
  for (const Expr &o : operands_)
    o.collect_vars(out);
}

namespace {

int precedence(Expr::Kind k) {
  switch (k) {
  case Expr::Kind::Iff: return 1;
  case Expr::Kind::Implies: return 2;
  case Expr::Kind::Or: return 3;
  case Expr::Kind::And: return 4;
  case Expr::Kind::Not: return 5;
  default: return 6;
  }
}

void print(std::ostream &os, const Expr &e, const VarTable &vars, int context) {
  int own = precedence(e.kind());
  bool parens = own <= context && own < 5;
  if (parens)
    os << '(';
  switch (e.kind()) {
  case Expr::Kind::True: os << "true"; break;
  case Expr::Kind::False: os << "false"; break;
  case Expr::Kind::Var: os << vars.name(e.var()); break;
  case Expr::Kind::Not:
    os << '!';
    print(os, e.operands()[0], vars, 4);
    break;
  case Expr::Kind::And:
  case Expr::Kind::Or: {
    if (e.operands().empty()) {
      os << (e.kind() == Expr::Kind::And ? "true" : "false");
      break;
    }
    const char *op = e.kind() == Expr::Kind::And ? " & " : " | ";
    for (std::size_t i = 0; i < e.operands().size(); ++i) {
      if (i)
        os << op;
      print(os, e.operands()[i], vars, own);
    }
    break;
  }
  case Expr::Kind::Implies:
    print(os, e.operands()[0], vars, own);
    os << " -> ";
    print(os, e.operands()[1], vars, own - 1);
    break;
  case Expr::Kind::Iff:
    print(os, e.operands()[0], vars, own);
    os << " <-> ";
    print(os, e.operands()[1], vars, own);
    break;
  }
  if (parens)
    os << ')';
}

} // namespace

std::string to_string(const Expr &e, const VarTable &vars) {
  std::ostringstream os;
  print(os, e, vars, 0);
  return os.str();
}

//===----------------------------------------------------------------------===//
// ClauseSet
//===----------------------------------------------------------------------===//

ClauseSet::ClauseSet(VarTable vars)
    : vars_(std::make_shared<const VarTable>(std::move(vars))) {}

ClauseSet::ClauseSet(std::shared_ptr<const VarTable> vars) : vars_(std::move(vars)) {}

bool ClauseSet::is_contradiction() const {
  return clauses_.size() == 1 && clauses_.front().empty();
}

bool ClauseSet::add_clause(Clause clause) {
  if (is_contradiction())
    return false;
  std::sort(clause.begin(), clause.end());
  clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
  for (std::size_t i = 0; i < clause.size(); ++i) {
    if (clause[i].var >= vars_->size())
      throw Error(ErrorKind::UnknownVariable,
                  "literal over unregistered variable id " + std::to_string(clause[i].var));
    if (i && clause[i].var == clause[i - 1].var)
      return false;
  }
  if (clause.empty()) {
    clauses_.assign(1, Clause{});
    seen_.clear();
    seen_.insert(Clause{});
    return true;
  }
  if (!seen_.insert(clause).second)
    return false;
  clauses_.push_back(std::move(clause));
  return true;
}

ClauseSet ClauseSet::with_units(std::span<const Literal> units) const {
  ClauseSet out = *this;
  for (Literal l : units)
    out.add_clause({l});
  return out;
}

std::uint64_t ClauseSet::fingerprint() const {
  // FNV-1a over the clause list and the variable count.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t x) {
    h ^= x;
    h *= 1099511628211ull;
  };
  mix(vars_->size());
  for (const Clause &c : clauses_) {
    for (Literal l : c)
      mix(l.code() + 1);
    mix(0);
  }
  return h;
}

//===----------------------------------------------------------------------===//
// Assignment
//===----------------------------------------------------------------------===//

Assignment Assignment::from_true_set(std::size_t num_vars, const VarSet &true_vars) {
  Assignment a(num_vars);
  for (VarId v = 0; v < num_vars; ++v)
    a.set(v, true_vars.count(v) > 0);
  return a;
}

bool Assignment::total() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const std::optional<bool> &b) { return b.has_value(); });
}

VarSet Assignment::true_set() const {
  VarSet out;
  for (VarId v = 0; v < values_.size(); ++v)
    if (values_[v] == true)
      out.insert(out.end(), v);
  return out;
}

VarSet Assignment::user_true_set(const VarTable &vars) const {
  VarSet out;
  for (VarId v = 0; v < values_.size(); ++v)
    if (values_[v] == true && !vars.is_auxiliary(v))
      out.insert(out.end(), v);
  return out;
}

bool Assignment::satisfies(Literal l) const { return values_.at(l.var) == l.positive; }

bool Assignment::satisfies(const Clause &c) const {
  return std::any_of(c.begin(), c.end(), [&](Literal l) { return satisfies(l); });
}

bool Assignment::satisfies(const ClauseSet &cs) const {
  return std::all_of(cs.clauses().begin(), cs.clauses().end(),
                     [&](const Clause &c) { return satisfies(c); });
}

bool bit_pattern_less(const VarSet &a, const VarSet &b) {
  auto ia = a.begin(), ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia != *ib)
      return *ib < *ia;
    ++ia;
    ++ib;
  }
  return ia == a.end() && ib != b.end();
}

bool bit_pattern_less(const Assignment &a, const Assignment &b) {
  for (VarId v = 0; v < std::min(a.size(), b.size()); ++v)
    if (a.get(v) != b.get(v))
      return a.get(v) < b.get(v);
  return a.size() < b.size();
}

std::string format_set(const VarSet &set, const VarTable &vars) {
  std::string out = "{";
  bool first = true;
  for (VarId v : set) {
    if (!first)
      out += ", ";
    out += vars.name(v);
    first = false;
  }
  return out + "}";
}

//===----------------------------------------------------------------------===//
// CNF conversion
//===----------------------------------------------------------------------===//

namespace {

constexpr std::size_t kDistributionCap = 16;

bool is_literal(const Expr &e) {
  return e.kind() == Expr::Kind::Var ||
         (e.kind() == Expr::Kind::Not && e.operands()[0].kind() == Expr::Kind::Var);
}

Literal as_literal(const Expr &e) {
  if (e.kind() == Expr::Kind::Var)
    return pos(e.var());
  return neg(e.operands()[0].var());
}

Expr flat(Expr::Kind kind, std::vector<Expr> parts) {
  bool is_and = kind == Expr::Kind::And;
  std::vector<Expr> kept;
  for (Expr &p : parts) {
    if (p.kind() == (is_and ? Expr::Kind::True : Expr::Kind::False))
      continue;
    if (p.kind() == (is_and ? Expr::Kind::False : Expr::Kind::True))
      return Expr::constant(!is_and);
    if (p.kind() == kind) {
      for (const Expr &q : p.operands())
        kept.push_back(q);
      continue;
    }
    kept.push_back(std::move(p));
  }
  if (kept.empty())
    return Expr::constant(is_and);
  if (kept.size() == 1)
    return std::move(kept.front());
  return is_and ? Expr::conjunction(std::move(kept)) : Expr::disjunction(std::move(kept));
}

// Negation normal form over {True, False, Var, Not Var, And, Or}.
Expr to_nnf(const Expr &e, bool negated) {
  using K = Expr::Kind;
  const auto &ops = e.operands();
  switch (e.kind()) {
  case K::True: return Expr::constant(!negated);
  case K::False: return Expr::constant(negated);
  case K::Var: return negated ? Expr::negation(e) : e;
  case K::Not: return to_nnf(ops[0], !negated);
  case K::And:
  case K::Or: {
    std::vector<Expr> parts;
    for (const Expr &o : ops)
      parts.push_back(to_nnf(o, negated));
    bool conj = (e.kind() == K::And) != negated;
    return flat(conj ? K::And : K::Or, std::move(parts));
  }
  case K::Implies:
    if (negated)
      return flat(K::And, {to_nnf(ops[0], false), to_nnf(ops[1], true)});
    return flat(K::Or, {to_nnf(ops[0], true), to_nnf(ops[1], false)});
  case K::Iff:
    if (negated)
      return flat(K::And, {flat(K::Or, {to_nnf(ops[0], false), to_nnf(ops[1], false)}),
                           flat(K::Or, {to_nnf(ops[0], true), to_nnf(ops[1], true)})});
    return flat(K::And, {flat(K::Or, {to_nnf(ops[0], true), to_nnf(ops[1], false)}),
                         flat(K::Or, {to_nnf(ops[0], false), to_nnf(ops[1], true)})});
  }
  return Expr::constant(true);
}

std::optional<std::vector<Clause>> distribute(const Expr &e) {
  using K = Expr::Kind;
  if (e.kind() == K::True)
    return std::vector<Clause>{};
  if (e.kind() == K::False)
    return std::vector<Clause>{Clause{}};
  if (is_literal(e))
    return std::vector<Clause>{Clause{as_literal(e)}};
  if (e.kind() == K::And) {
    std::vector<Clause> out;
    for (const Expr &o : e.operands()) {
      auto part = distribute(o);
      if (!part || out.size() + part->size() > kDistributionCap)
        return std::nullopt;
      out.insert(out.end(), part->begin(), part->end());
    }
    return out;
  }
  std::vector<Clause> acc{Clause{}};
  for (const Expr &o : e.operands()) {
    auto part = distribute(o);
    if (!part || acc.size() * part->size() > kDistributionCap)
      return std::nullopt;
    std::vector<Clause> next;
    for (const Clause &a : acc)
      for (const Clause &b : *part) {
        Clause c = a;
        c.insert(c.end(), b.begin(), b.end());
        next.push_back(std::move(c));
      }
    acc = std::move(next);
  }
  return acc;
}

class StructuralEncoder {
public:
  StructuralEncoder(VarTable &vars, std::vector<Clause> &out) : vars_(vars), out_(out) {}

  void emit(const Expr &e) {
    if (auto clauses = distribute(e)) {
      out_.insert(out_.end(), clauses->begin(), clauses->end());
      return;
    }
    if (e.kind() == Expr::Kind::And) {
      for (const Expr &o : e.operands())
        emit(o);
      return;
    }
    assert(e.kind() == Expr::Kind::Or);
    Clause c;
    for (const Expr &o : e.operands())
      c.push_back(literal_for(o));
    out_.push_back(std::move(c));
  }

private:
  Literal literal_for(const Expr &e) {
    if (is_literal(e))
      return as_literal(e);
    bool conj = e.kind() == Expr::Kind::And;
    assert(conj || e.kind() == Expr::Kind::Or);
    std::vector<Literal> kids;
    for (const Expr &o : e.operands())
      kids.push_back(literal_for(o));
    Literal a = pos(vars_.add_auxiliary());
    // conj: a <-> AND kids ; disj: a <-> OR kids
    Clause back{conj ? a : ~a};
    for (Literal k : kids) {
      out_.push_back(conj ? Clause{~a, k} : Clause{a, ~k});
      back.push_back(conj ? ~k : k);
    }
    out_.push_back(std::move(back));
    return a;
  }

  VarTable &vars_;
  std::vector<Clause> &out_;
};

} // namespace

ClauseSet to_cnf(const VarTable &vars, const Expr &e) {
  VarTable extended = vars;
  std::vector<Clause> raw;
  StructuralEncoder encoder(extended, raw);
  Expr nnf = to_nnf(e, false);
  if (nnf.kind() == Expr::Kind::And) {
    for (const Expr &conjunct : nnf.operands())
      encoder.emit(conjunct);
  } else {
    encoder.emit(nnf);
  }
  ClauseSet cs(std::move(extended));
  for (Clause &c : raw)
    cs.add_clause(std::move(c));
  return cs;
}

//===----------------------------------------------------------------------===//
// Satisfiability queries
//===----------------------------------------------------------------------===//

SatResult solve(const ClauseSet &cs, std::span<const Literal> assumptions) {
  Solver solver(cs);
  return solver.solve(assumptions);
}

bool entails(const ClauseSet &cs, Literal l) {
  Solver solver(cs);
  if (!solver.solve())
    throw Error(ErrorKind::UnsatContext, "entailment queried on an unsatisfiable formula");
  Literal negated = ~l;
  return !solver.solve(std::span<const Literal>(&negated, 1));
}

Assignment backbone(const ClauseSet &cs) {
  Solver solver(cs);
  SatResult first = solver.solve();
  if (!first)
    throw Error(ErrorKind::UnsatContext, "backbone queried on an unsatisfiable formula");
  const VarTable &vars = cs.vars();
  // Candidate i: the value variable i takes in every model seen so far.
  std::vector<std::optional<bool>> candidate(cs.num_vars());
  for (VarId v = 0; v < cs.num_vars(); ++v)
    if (!vars.is_auxiliary(v))
      candidate[v] = *first->get(v);

  Assignment forced(cs.num_vars());
  for (VarId v = 0; v < cs.num_vars(); ++v) {
    if (!candidate[v])
      continue;
    Literal flipped{v, !*candidate[v]};
    SatResult other = solver.solve(std::span<const Literal>(&flipped, 1));
    if (!other) {
      forced.set(v, *candidate[v]);
      continue;
    }
    for (VarId u = v; u < cs.num_vars(); ++u)
      if (candidate[u] && *other->get(u) != *candidate[u])
        candidate[u].reset();
  }
  return forced;
}

std::vector<Assignment> all_models(const ClauseSet &cs) {
  const std::size_t n = cs.num_vars();
  if (n > kAllModelsLimit)
    throw Error(ErrorKind::TooLarge, "truth-table enumeration over " + std::to_string(n) +
                                         " variables exceeds the limit of " +
                                         std::to_string(kAllModelsLimit));
  // Variable i lives at bit n-1-i so that ascending integers are ascending
  // bit patterns with variable 0 most significant.
  struct Masks {
    std::uint32_t positive = 0, negative = 0;
  };
  std::vector<Masks> masks;
  for (const Clause &c : cs.clauses()) {
    Masks m;
    for (Literal l : c)
      (l.positive ? m.positive : m.negative) |= 1u << (n - 1 - l.var);
    masks.push_back(m);
  }
  std::vector<Assignment> out;
  const std::uint64_t end = std::uint64_t{1} << n;
  for (std::uint64_t k = 0; k < end; ++k) {
    auto bits = static_cast<std::uint32_t>(k);
    bool ok = std::all_of(masks.begin(), masks.end(), [&](const Masks &m) {
      return (bits & m.positive) || (~bits & m.negative);
    });
    if (!ok)
      continue;
    Assignment a(n);
    for (VarId v = 0; v < n; ++v)
      a.set(v, (bits >> (n - 1 - v)) & 1u);
    out.push_back(std::move(a));
  }
  return out;
}

namespace {

// DPLL counter projected onto the user variables. A branch whose clauses
// are all satisfied contributes 2^(free user vars); once the user variables
// are exhausted the remaining auxiliaries only need to be satisfiable.
class ProjectedCounter {
public:
  ProjectedCounter(const ClauseSet &cs, std::uint64_t limit)
      : cs_(cs), limit_(limit), values_(cs.num_vars(), 0), user_(cs.vars().user_vars()) {}

  std::optional<std::uint64_t> run() {
    count();
    if (overflow_)
      return std::nullopt;
    return total_;
  }

private:
  int value(Literal l) const { return l.positive ? values_[l.var] : -values_[l.var]; }

  void add(std::uint64_t amount) {
    if (amount > limit_ || total_ > limit_ - amount)
      overflow_ = true;
    else
      total_ += amount;
  }

  void count() {
    if (overflow_)
      return;
    std::vector<VarId> trail;
    auto undo = [&] {
      for (VarId v : trail)
        values_[v] = 0;
    };
    bool all_satisfied = false;
    for (bool changed = true; changed;) {
      changed = false;
      all_satisfied = true;
      for (const Clause &c : cs_.clauses()) {
        int unassigned = 0;
        Literal last{};
        bool sat = false;
        for (Literal l : c) {
          int v = value(l);
          if (v > 0) {
            sat = true;
            break;
          }
          if (v == 0) {
            ++unassigned;
            last = l;
          }
        }
        if (sat)
          continue;
        if (unassigned == 0) {
          undo();
          return;
        }
        all_satisfied = false;
        if (unassigned == 1) {
          values_[last.var] = last.positive ? 1 : -1;
          trail.push_back(last.var);
          changed = true;
        }
      }
    }
    if (all_satisfied) {
      std::size_t free_vars = static_cast<std::size_t>(
          std::count_if(user_.begin(), user_.end(), [&](VarId v) { return values_[v] == 0; }));
      if (free_vars >= 63)
        overflow_ = true;
      else
        add(std::uint64_t{1} << free_vars);
      undo();
      return;
    }
    auto next = std::find_if(user_.begin(), user_.end(), [&](VarId v) { return values_[v] == 0; });
    if (next == user_.end()) {
      std::vector<Literal> fixed;
      for (VarId v : user_)
        fixed.push_back({v, values_[v] > 0});
      if (solve(cs_, fixed))
        add(1);
      undo();
      return;
    }
    for (int phase : {-1, 1}) {
      values_[*next] = static_cast<std::int8_t>(phase);
      count();
      values_[*next] = 0;
    }
    undo();
  }

  const ClauseSet &cs_;
  std::uint64_t limit_;
  std::vector<std::int8_t> values_;
  std::vector<VarId> user_;
  std::uint64_t total_ = 0;
  bool overflow_ = false;
};

} // namespace

std::optional<std::uint64_t> count_models(const ClauseSet &cs, std::uint64_t limit) {
  return ProjectedCounter(cs, limit).run();
}

} // namespace confik
