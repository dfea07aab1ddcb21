#pragma once

#include "confik/logic.hpp"

#include <cstdint>
#include <set>
#include <span>
#include <vector>

namespace confik {

/// Reusable DPLL engine over a private copy of a clause set.
///
/// Every solve() starts from an empty trail, so clauses may be added or
/// rolled back between calls. Two watched literals, decisions on the lowest
/// unassigned variable with the negative phase first, and conflict-directed
/// backjumping without clause learning. Backjumping only skips subtrees
/// without models, so the model found is the first one in that branching
/// order.
class Solver {
public:
  explicit Solver(const ClauseSet &cs);

  struct Mark {
    std::size_t clauses = 0;
    std::size_t units = 0;
    bool empty = false;
  };

  std::size_t num_vars() const { return values_.size(); }

  void add_clause(Clause clause);
  Mark mark() const { return {clauses_.size(), units_.size(), has_empty_}; }
  /// Removes every clause added after `m` was taken.
  void rollback(const Mark &m);

  SatResult solve(std::span<const Literal> assumptions = {});

  /// Adds `clause`, which the model returned by the previous solve() or
  /// resume() must falsify, and continues that search. Returns the least
  /// model of the extended clause set, the same one a fresh solve() with
  /// the previous assumptions would find. Without a previous model it adds
  /// the clause and solves afresh.
  SatResult resume(Clause clause);

private:
  enum : std::int8_t { kFalse = -1, kUnset = 0, kTrue = 1 };

  std::int8_t value(Literal l) const {
    std::int8_t v = values_[l.var];
    return l.positive ? v : static_cast<std::int8_t>(-v);
  }
  static constexpr std::uint32_t kDecision = UINT32_MAX; // also units and assumptions
  static constexpr std::uint32_t kFlipped = UINT32_MAX - 1;

  bool enqueue(Literal l, std::uint32_t reason);
  std::set<std::uint32_t> conflict_levels();
  SatResult search(bool in_conflict);
  bool propagate();
  void cancel_until(std::size_t level);
  void attach(std::uint32_t index);
  void reset();

  std::vector<Clause> clauses_; // size >= 2, positions 0/1 watched
  std::vector<Literal> units_;
  bool has_empty_ = false;

  std::vector<std::vector<std::uint32_t>> watches_; // by literal code
  std::vector<std::int8_t> values_;
  std::vector<Literal> trail_;
  std::vector<std::size_t> trail_lim_;
  std::vector<VarId> cursor_at_level_;
  std::vector<std::uint32_t> level_;
  std::vector<std::uint32_t> reason_; // clause index, kDecision or kFlipped
  std::vector<std::set<std::uint32_t>> flip_deps_; // per level
  std::vector<char> seen_;
  std::vector<VarId> scratch_stack_, scratch_touched_;
  std::uint32_t conflict_ = 0;
  bool has_model_ = false; // the trail still holds the last model
  std::size_t qhead_ = 0;
};

} // namespace confik
