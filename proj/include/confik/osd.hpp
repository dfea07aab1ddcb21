#pragma once

#include "confik/logic.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace confik {

using Value = std::int64_t;
using Tuple = std::vector<Value>;

/// Fixes variable `var` (by position) to `value`.
struct Refinement {
  std::size_t var = 0;
  Value value = 0;
};

/// Finite-domain configuration problem with a preference order.
///
/// `precedes(a, b)` reads "a is at least as preferred as b" and must be a
/// partial order (reflexive, antisymmetric, transitive) on the solutions.
/// A solution is optimal when no *other* solution precedes it.
class OsdProblem {
public:
  using Constraint = std::function<bool(const Tuple &)>;
  using Preference = std::function<bool(const Tuple &, const Tuple &)>;

  /// Throws Error(SemanticError) on empty domains or mismatched sizes.
  OsdProblem(std::vector<std::string> names, std::vector<std::vector<Value>> domains,
             Constraint constraint, Preference precedes);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string> &names() const { return names_; }
  const std::vector<std::vector<Value>> &domains() const { return domains_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  bool satisfies(const Tuple &t) const { return constraint_(t); }
  bool precedes(const Tuple &a, const Tuple &b) const { return precedes_(a, b); }

private:
  std::vector<std::string> names_;
  std::vector<std::vector<Value>> domains_;
  Constraint constraint_;
  Preference precedes_;
};

/// Only reflexive pairs are related, so every solution is optimal.
OsdProblem::Preference no_preference();
/// Componentwise <= on values; the subset order on true-sets for 0/1 domains.
OsdProblem::Preference subset_preference();
/// a precedes b when every objective of a is <= that of b.
OsdProblem::Preference pareto_preference(std::vector<std::function<Value(const Tuple &)>> objectives);

inline constexpr std::uint64_t kOsdEnumerationLimit = 1'000'000;

/// Every tuple of the domain product that satisfies the constraint and the
/// refinements, in lexicographic domain-index order. Throws Error(TooLarge)
/// beyond kOsdEnumerationLimit tuples.
std::vector<Tuple> solutions(const OsdProblem &p, std::span<const Refinement> refinements = {});

/// The solutions no other solution precedes. Verifies the preference on the
/// solution set first and throws Error(InvalidPreference) on a violation.
std::vector<Tuple> optimal_solutions(const OsdProblem &p,
                                     std::span<const Refinement> refinements = {});

/// Throws Error(InvalidPreference) naming the violated law.
void verify_partial_order(const OsdProblem &p, const std::vector<Tuple> &solutions);

enum class ValueClass { NonOptimal, Settled, Open };
std::string_view to_string(ValueClass c);

/// classes[i][j] classifies value domains()[i][j] of variable i.
struct ValueClassification {
  std::vector<std::vector<ValueClass>> classes;

  /// The settled value of variable i, if there is one.
  std::optional<std::size_t> settled_index(std::size_t var) const;
};

/// A value is non-optimal when no optimal solution uses it and settled when
/// every optimal solution does. Throws Error(NoSolutions) and the errors of
/// optimal_solutions().
ValueClassification classify_values(const OsdProblem &p,
                                    std::span<const Refinement> refinements = {});

inline constexpr std::size_t kBooleanOsdLimit = 20;

/// Domains {0,1} (false, true) over the non-auxiliary variables, constraint
/// "extends to a model of cs", preference the subset order on true-sets.
/// Throws Error(TooLarge) above kBooleanOsdLimit variables.
OsdProblem as_boolean_osd(const ClauseSet &cs);

/// Parses the OSD text format:
///
///     var x in {0,1}
///     var n in {0..3}
///     constraint x + y + z > 0
///     prefer pareto(10*x + 5*y + 20*z, x + 2*y + 3*z)
///
/// `prefer subset` selects subset_preference(); without a prefer line there
/// is no preference. Several constraint lines are conjoined.
OsdProblem parse_osd(std::string_view text);

} // namespace confik
