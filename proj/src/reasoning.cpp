#include "confik/reasoning.hpp"

#include "confik/error.hpp"
#include "confik/solver.hpp"

#include <algorithm>

namespace confik {

namespace {

// Enumerates minimal models by solve / shrink / block. The found model is
// shrunk by asking for a model that keeps every false variable false and
// drops at least one true one; the final model then blocks itself and all
// of its supersets. Blocking clauses live in the enumerator's own solver.
//
// The solver returns the lexicographically least model (false before true,
// lowest id first). When every user variable has a lower id than every
// auxiliary, that model is already minimal on the user variables: a proper
// subset would extend to a smaller model, and it satisfies the negative
// blocking clauses too. Shrinking is then skipped.
class MinimalModelEnumerator {
public:
  explicit MinimalModelEnumerator(const ClauseSet &cs)
      : solver_(cs), vars_(cs.vars()), user_(cs.vars().user_vars()) {
    for (VarId v = 0; v < vars_.size(); ++v)
      if (vars_.is_auxiliary(v) && !user_.empty() && v < user_.back())
        least_is_minimal_ = false;
  }

  template <typename Visit> void run(Visit &&visit) {
    SatResult found = solver_.solve();
    while (found) {
      VarSet current = found->user_true_set(vars_);
      while (!least_is_minimal_ && !current.empty()) {
        std::optional<VarSet> smaller = shrink(current);
        if (!smaller)
          break;
        current = std::move(*smaller);
      }
      if (!visit(current))
        return;
      Clause block;
      for (VarId v : current)
        block.push_back(neg(v));
      if (block.empty())
        return; // the empty model is below everything
      // The least model is what the search just found, so it is still
      // falsified by its own blocking clause and the search can go on.
      if (least_is_minimal_) {
        found = solver_.resume(std::move(block));
      } else {
        solver_.add_clause(std::move(block));
        found = solver_.solve();
      }
    }
  }

private:
  std::optional<VarSet> shrink(const VarSet &current) {
    Solver::Mark mark = solver_.mark();
    Clause drop_one;
    for (VarId v : current)
      drop_one.push_back(neg(v));
    solver_.add_clause(std::move(drop_one));
    std::vector<Literal> keep_false;
    for (VarId u : user_)
      if (!current.count(u))
        keep_false.push_back(neg(u));
    SatResult r = solver_.solve(keep_false);
    solver_.rollback(mark);
    if (!r)
      return std::nullopt;
    return r->user_true_set(vars_);
  }

  Solver solver_;
  const VarTable &vars_;
  std::vector<VarId> user_;
  bool least_is_minimal_ = true;
};

std::vector<VarId> checked_user_vars(const ClauseSet &cs) {
  std::vector<VarId> user = cs.vars().user_vars();
  if (user.size() > kBruteForceLimit)
    throw Error(ErrorKind::TooLarge, std::to_string(user.size()) +
                                         " variables exceed the brute-force limit of " +
                                         std::to_string(kBruteForceLimit));
  return user;
}

std::uint32_t bit_of(const std::vector<VarId> &user, VarId v) {
  auto it = std::find(user.begin(), user.end(), v);
  if (it == user.end())
    throw Error(ErrorKind::UnknownVariable, "variable id " + std::to_string(v) +
                                                " is not a user variable");
  return 1u << (it - user.begin());
}

VarSet to_set(const std::vector<VarId> &user, std::uint32_t mask) {
  VarSet out;
  for (std::size_t i = 0; i < user.size(); ++i)
    if (mask & (1u << i))
      out.insert(user[i]);
  return out;
}

// deselectable[X] from the truth table: some model avoids X entirely.
std::vector<bool> deselectable_table(const ClauseSet &cs, const std::vector<VarId> &user) {
  const std::uint32_t full = (1u << user.size()) - 1;
  std::vector<bool> table(std::size_t{1} << user.size(), false);
  for (const Assignment &m : all_models(cs)) {
    std::uint32_t true_mask = 0;
    for (std::size_t i = 0; i < user.size(); ++i)
      if (*m.get(user[i]))
        true_mask |= 1u << i;
    table[full & ~true_mask] = true;
  }
  for (std::size_t bit = 0; bit < user.size(); ++bit)
    for (std::uint32_t x = 0; x <= full; ++x)
      if (!(x & (1u << bit)) && table[x | (1u << bit)])
        table[x] = true;
  return table;
}

// entailed[B]: every model satisfies the positive clause over B.
std::vector<bool> entailed_positive_clauses(const ClauseSet &cs, const std::vector<VarId> &user) {
  Solver solver(cs);
  std::vector<bool> table(std::size_t{1} << user.size());
  std::vector<Literal> negated;
  for (std::uint32_t b = 0; b < table.size(); ++b) {
    negated.clear();
    for (std::size_t i = 0; i < user.size(); ++i)
      if (b & (1u << i))
        negated.push_back(neg(user[i]));
    table[b] = !solver.solve(negated);
  }
  return table;
}

} // namespace

bool is_deselectable(const ClauseSet &cs, const VarSet &deselect) {
  std::vector<Literal> assumptions;
  for (VarId v : deselect)
    assumptions.push_back(neg(v));
  return solve(cs, assumptions).has_value();
}

MinimalModelSet enumerate_minimal_models(const ClauseSet &cs) {
  if (!solve(cs))
    throw Error(ErrorKind::UnsatInput, "minimal models of an unsatisfiable formula");
  MinimalModelSet out;
  out.source = cs.fingerprint();
  MinimalModelEnumerator(cs).run([&](const VarSet &m) {
    out.models.push_back(m);
    return true;
  });
  std::sort(out.models.begin(), out.models.end(),
            [](const VarSet &a, const VarSet &b) { return bit_pattern_less(a, b); });
  return out;
}

std::optional<std::size_t> count_minimal_models(const ClauseSet &cs, std::size_t limit) {
  std::size_t count = 0;
  bool exceeded = false;
  MinimalModelEnumerator(cs).run([&](const VarSet &) {
    if (++count > limit) {
      exceeded = true;
      return false;
    }
    return true;
  });
  if (exceeded)
    return std::nullopt;
  return count;
}

DispensabilityReport dispensable_vars(const ClauseSet &cs) {
  MinimalModelSet minimal = enumerate_minimal_models(cs);
  VarSet somewhere_true;
  for (const VarSet &m : minimal.models)
    somewhere_true.insert(m.begin(), m.end());

  Assignment forced = backbone(cs);
  DispensabilityReport report;
  for (VarId v : cs.vars().user_vars()) {
    if (!somewhere_true.count(v))
      report.dispensable.insert(v);
    if (forced.get(v) == true)
      report.forced_true.insert(v);
    else if (forced.get(v) == false)
      report.forced_false.insert(v);
    else if (!report.dispensable.count(v))
      report.needs_attention.insert(v);
  }
  return report;
}

bool dispensable_brute(const ClauseSet &cs, VarId v) {
  std::vector<VarId> user = checked_user_vars(cs);
  std::uint32_t bit = bit_of(user, v);
  std::vector<bool> deselectable = deselectable_table(cs, user);
  for (std::uint32_t x = 0; x < deselectable.size(); ++x)
    if (deselectable[x] && !deselectable[x | bit])
      return false;
  return true;
}

VarSet dispensable_brute_all(const ClauseSet &cs) {
  std::vector<VarId> user = checked_user_vars(cs);
  std::vector<bool> deselectable = deselectable_table(cs, user);
  VarSet out;
  for (std::size_t i = 0; i < user.size(); ++i) {
    std::uint32_t bit = 1u << i;
    bool ok = true;
    for (std::uint32_t x = 0; ok && x < deselectable.size(); ++x)
      ok = !deselectable[x] || deselectable[x | bit];
    if (ok)
      out.insert(user[i]);
  }
  return out;
}

bool free_of_negation(const ClauseSet &cs, VarId v) {
  std::vector<VarId> user = checked_user_vars(cs);
  std::uint32_t bit = bit_of(user, v);
  std::vector<bool> entailed = entailed_positive_clauses(cs, user);
  for (std::uint32_t b = 0; b < entailed.size(); ++b)
    if (!entailed[b] && entailed[b | bit])
      return false;
  return true;
}

VarSet free_of_negation_all(const ClauseSet &cs) {
  std::vector<VarId> user = checked_user_vars(cs);
  std::vector<bool> entailed = entailed_positive_clauses(cs, user);
  VarSet out;
  for (std::size_t i = 0; i < user.size(); ++i) {
    std::uint32_t bit = 1u << i;
    bool free = true;
    for (std::uint32_t b = 0; free && b < entailed.size(); ++b)
      free = entailed[b] || !entailed[b | bit];
    if (free)
      out.insert(user[i]);
  }
  return out;
}

std::vector<VarSet> maximal_deselectable_sets(const ClauseSet &cs) {
  std::vector<VarId> user = checked_user_vars(cs);
  Solver solver(cs);
  std::vector<bool> deselectable(std::size_t{1} << user.size());
  std::vector<Literal> assumptions;
  for (std::uint32_t x = 0; x < deselectable.size(); ++x) {
    assumptions.clear();
    for (std::size_t i = 0; i < user.size(); ++i)
      if (x & (1u << i))
        assumptions.push_back(neg(user[i]));
    deselectable[x] = solver.solve(assumptions).has_value();
  }
  std::vector<VarSet> out;
  for (std::uint32_t x = 0; x < deselectable.size(); ++x) {
    if (!deselectable[x])
      continue;
    bool maximal = true;
    for (std::size_t i = 0; maximal && i < user.size(); ++i)
      if (!(x & (1u << i)) && deselectable[x | (1u << i)])
        maximal = false;
    if (maximal)
      out.push_back(to_set(user, x));
  }
  std::sort(out.begin(), out.end(),
            [](const VarSet &a, const VarSet &b) { return bit_pattern_less(a, b); });
  return out;
}

SettledStatus settled_status(const ClauseSet &cs) {
  DispensabilityReport report = dispensable_vars(cs);
  SettledStatus out;
  for (VarId v : cs.vars().user_vars()) {
    if (report.dispensable.count(v))
      out.settled_false.insert(v);
    else if (report.forced_true.count(v))
      out.settled_true.insert(v);
    else
      out.unsettled.insert(v);
  }
  return out;
}

} // namespace confik
