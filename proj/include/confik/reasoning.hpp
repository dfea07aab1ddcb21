#pragma once

#include "confik/logic.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace confik {

/// The subset-minimal models of a clause set, as true-sets over its
/// non-auxiliary variables, sorted in bit-pattern order.
struct MinimalModelSet {
  std::vector<VarSet> models;
  std::uint64_t source = 0; // ClauseSet::fingerprint() of the input
};

struct DispensabilityReport {
  VarSet dispensable;     // false in every minimal model
  VarSet forced_true;     // entailed positively
  VarSet forced_false;    // entailed negatively; subset of dispensable
  VarSet needs_attention; // neither forced nor dispensable
};

/// Whether every variable in `deselect` can be false at once.
bool is_deselectable(const ClauseSet &cs, const VarSet &deselect);

/// Throws Error(UnsatInput) on unsatisfiable input.
MinimalModelSet enumerate_minimal_models(const ClauseSet &cs);

/// Same enumeration, but stops once more than `limit` models were found
/// and returns nullopt. Unsatisfiable input counts zero.
std::optional<std::size_t> count_minimal_models(const ClauseSet &cs, std::size_t limit);

/// Throws Error(UnsatInput) on unsatisfiable input.
DispensabilityReport dispensable_vars(const ClauseSet &cs);

inline constexpr std::size_t kBruteForceLimit = 16;

// Exhaustive oracles. Each evaluates its defining quantifier literally over
// all subsets of the non-auxiliary variables and throws Error(TooLarge) above
// kBruteForceLimit of them.

/// For every deselectable X, X stays deselectable once `v` is false.
/// Deselectability comes from the truth table.
bool dispensable_brute(const ClauseSet &cs, VarId v);
VarSet dispensable_brute_all(const ClauseSet &cs);

/// Free of negation: for every positive clause B with cs |/= B, also
/// cs |/= v | B. The empty clause is included. Entailment goes through SAT.
bool free_of_negation(const ClauseSet &cs, VarId v);
VarSet free_of_negation_all(const ClauseSet &cs);

/// Every subset-maximal deselectable set, in bit-pattern order.
std::vector<VarSet> maximal_deselectable_sets(const ClauseSet &cs);

enum class Settledness { SettledFalse, SettledTrue, Unsettled };

struct SettledStatus {
  VarSet settled_false;
  VarSet settled_true;
  VarSet unsettled;

  Settledness of(VarId v) const {
    if (settled_false.count(v))
      return Settledness::SettledFalse;
    if (settled_true.count(v))
      return Settledness::SettledTrue;
    return Settledness::Unsettled;
  }
};

/// Throws Error(UnsatInput) on unsatisfiable input.
SettledStatus settled_status(const ClauseSet &cs);

} // namespace confik
