#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace confik {

using VarId = std::uint32_t;
using VarSet = std::set<VarId>;

/// Interned variable names. Ids are dense, 0..size()-1, in insertion order.
/// Auxiliary variables come from structural CNF encoding and are hidden
/// from every user-facing analysis.
class VarTable {
public:
  VarId add(std::string name);
  VarId add_auxiliary();
  /// Registers `name` only if it is not present yet.
  VarId intern(std::string_view name);

  std::optional<VarId> find(std::string_view name) const;
  /// Throws Error(UnknownVariable) when absent.
  VarId lookup(std::string_view name) const;

  const std::string &name(VarId id) const { return names_.at(id); }
  bool is_auxiliary(VarId id) const { return auxiliary_.at(id); }
  std::size_t size() const { return names_.size(); }
  std::size_t user_count() const;
  std::vector<VarId> user_vars() const;

  friend bool operator==(const VarTable &a, const VarTable &b) {
    return a.names_ == b.names_ && a.auxiliary_ == b.auxiliary_;
  }

private:
  VarId insert(std::string name, bool auxiliary);

  std::vector<std::string> names_;
  std::vector<bool> auxiliary_;
  std::unordered_map<std::string, VarId> index_;
  std::size_t aux_counter_ = 0;
};

struct Literal {
  VarId var = 0;
  bool positive = true;

  Literal operator~() const { return {var, !positive}; }
  std::uint32_t code() const { return 2 * var + (positive ? 0u : 1u); }

  auto operator<=>(const Literal &) const = default;
};

inline Literal pos(VarId v) { return {v, true}; }
inline Literal neg(VarId v) { return {v, false}; }

using Clause = std::vector<Literal>;

/// Propositional expression tree. Value type; children are owned.
class Expr {
public:
  enum class Kind { True, False, Var, Not, And, Or, Implies, Iff };

  static Expr constant(bool value);
  static Expr variable(VarId id);
  static Expr negation(Expr operand);
  static Expr conjunction(std::vector<Expr> operands);
  static Expr disjunction(std::vector<Expr> operands);
  static Expr implication(Expr lhs, Expr rhs);
  static Expr equivalence(Expr lhs, Expr rhs);

  Kind kind() const { return kind_; }
  VarId var() const { return var_; }
  const std::vector<Expr> &operands() const { return operands_; }

  bool evaluate(const std::function<bool(VarId)> &value) const;
  void collect_vars(VarSet &out) const;

  friend bool operator==(const Expr &, const Expr &) = default;

private:
  Kind kind_ = Kind::True;
  VarId var_ = 0;
  std::vector<Expr> operands_;
};

/// Renders with the constraint-expression syntax of the model format.
std::string to_string(const Expr &e, const VarTable &vars);

/// A CNF over a shared variable table.
///
/// Clauses are normalized on insertion: literals sorted and deduplicated,
/// tautologies dropped, duplicate clauses merged. Adding the empty clause
/// collapses the set to the canonical contradiction (exactly one empty
/// clause).
class ClauseSet {
public:
  ClauseSet() : ClauseSet(VarTable{}) {}
  explicit ClauseSet(VarTable vars);
  explicit ClauseSet(std::shared_ptr<const VarTable> vars);

  /// Returns false if the clause was dropped (tautology, duplicate, or the
  /// set is already a contradiction).
  bool add_clause(Clause clause);

  /// This set conjoined with the given unit literals.
  ClauseSet with_units(std::span<const Literal> units) const;

  const std::vector<Clause> &clauses() const { return clauses_; }
  const VarTable &vars() const { return *vars_; }
  const std::shared_ptr<const VarTable> &var_table() const { return vars_; }
  std::size_t num_vars() const { return vars_->size(); }
  bool is_contradiction() const;
  std::uint64_t fingerprint() const;

  friend bool operator==(const ClauseSet &a, const ClauseSet &b) {
    return a.clauses_ == b.clauses_ && (a.vars_ == b.vars_ || *a.vars_ == *b.vars_);
  }

private:
  std::shared_ptr<const VarTable> vars_;
  std::vector<Clause> clauses_;
  std::set<Clause> seen_;
};

/// Partial or total mapping of variables to truth values.
class Assignment {
public:
  Assignment() = default;
  explicit Assignment(std::size_t num_vars) : values_(num_vars) {}
  static Assignment from_true_set(std::size_t num_vars, const VarSet &true_vars);

  std::size_t size() const { return values_.size(); }
  std::optional<bool> get(VarId v) const { return values_.at(v); }
  bool is_bound(VarId v) const { return values_.at(v).has_value(); }
  void set(VarId v, bool value) { values_.at(v) = value; }
  void unset(VarId v) { values_.at(v).reset(); }
  bool total() const;

  /// Bound variables that are true.
  VarSet true_set() const;
  /// true_set() restricted to non-auxiliary variables of `vars`.
  VarSet user_true_set(const VarTable &vars) const;

  bool satisfies(Literal l) const;
  bool satisfies(const Clause &c) const;
  bool satisfies(const ClauseSet &cs) const;

  friend bool operator==(const Assignment &, const Assignment &) = default;

private:
  std::vector<std::optional<bool>> values_;
};

/// Order on true-set bit patterns: compare variable 0 first, false < true.
bool bit_pattern_less(const VarSet &a, const VarSet &b);
bool bit_pattern_less(const Assignment &a, const Assignment &b);

std::string format_set(const VarSet &set, const VarTable &vars);

/// CNF conversion. Conjuncts that distribute into a handful of clauses are
/// distributed directly; anything larger gets auxiliary variables with full
/// (two-sided) definitions so every model of the original extends uniquely.
ClauseSet to_cnf(const VarTable &vars, const Expr &e);

using SatResult = std::optional<Assignment>;

/// DPLL with unit propagation. Branches on the lowest unbound variable,
/// false first. Models are total over all variables, auxiliaries included.
SatResult solve(const ClauseSet &cs, std::span<const Literal> assumptions = {});

/// Throws Error(UnsatContext) when `cs` itself is unsatisfiable.
bool entails(const ClauseSet &cs, Literal l);

/// Forced values of the non-auxiliary variables (the backbone). Unforced
/// variables are left unbound. Throws Error(UnsatContext) on unsat input.
Assignment backbone(const ClauseSet &cs);

inline constexpr std::size_t kAllModelsLimit = 24;

/// Truth-table enumeration of every total model, in bit-pattern order.
/// Throws Error(TooLarge) above kAllModelsLimit variables.
std::vector<Assignment> all_models(const ClauseSet &cs);

/// Number of distinct models projected onto the non-auxiliary variables, or
/// nullopt when the count exceeds `limit`.
std::optional<std::uint64_t> count_models(const ClauseSet &cs, std::uint64_t limit);

} // namespace confik
