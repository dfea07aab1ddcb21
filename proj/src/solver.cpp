#include "confik/solver.hpp"

#include <algorithm>
#include <stdexcept>

namespace confik {

namespace {

// Sort, dedup; returns false for tautologies.
bool normalize(Clause &c) {
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i].var == c[i - 1].var)
      return false;
  return true;
}

} // namespace

Solver::Solver(const ClauseSet &cs)
    : watches_(2 * cs.num_vars()), values_(cs.num_vars(), kUnset) {
  for (const Clause &c : cs.clauses())
    add_clause(c);
}

void Solver::add_clause(Clause clause) {
  has_model_ = false;
  if (!normalize(clause))
    return;
  for (Literal l : clause)
    if (l.var >= values_.size())
      throw std::out_of_range("literal outside the variable table");
  if (clause.empty()) {
    has_empty_ = true;
  } else if (clause.size() == 1) {
    units_.push_back(clause.front());
  } else {
    clauses_.push_back(std::move(clause));
    attach(static_cast<std::uint32_t>(clauses_.size() - 1));
  }
}

void Solver::attach(std::uint32_t index) {
  const Clause &c = clauses_[index];
  watches_[c[0].code()].push_back(index);
  watches_[c[1].code()].push_back(index);
}

void Solver::rollback(const Mark &m) {
  has_model_ = false;
  while (clauses_.size() > m.clauses) {
    auto index = static_cast<std::uint32_t>(clauses_.size() - 1);
    const Clause &c = clauses_.back();
    for (int k = 0; k < 2; ++k) {
      auto &ws = watches_[c[k].code()];
      ws.erase(std::remove(ws.begin(), ws.end(), index), ws.end());
    }
    clauses_.pop_back();
  }
  units_.resize(m.units);
  has_empty_ = m.empty;
}

void Solver::reset() {
  std::fill(values_.begin(), values_.end(), kUnset);
  level_.assign(values_.size(), 0);
  reason_.assign(values_.size(), kDecision);
  trail_.clear();
  trail_lim_.clear();
  cursor_at_level_.clear();
  flip_deps_.clear();
  qhead_ = 0;
}

bool Solver::enqueue(Literal l, std::uint32_t reason) {
  std::int8_t v = value(l);
  if (v != kUnset)
    return v == kTrue;
  values_[l.var] = l.positive ? kTrue : kFalse;
  level_[l.var] = static_cast<std::uint32_t>(trail_lim_.size());
  reason_[l.var] = reason;
  trail_.push_back(l);
  return true;
}

bool Solver::propagate() {
  while (qhead_ < trail_.size()) {
    Literal falsified = ~trail_[qhead_++];
    auto &ws = watches_[falsified.code()];
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      std::uint32_t ci = ws[i++];
      Clause &c = clauses_[ci];
      if (c[0] == falsified)
        std::swap(c[0], c[1]);
      if (value(c[0]) == kTrue) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (value(c[k]) != kFalse) {
          std::swap(c[1], c[k]);
          watches_[c[1].code()].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved)
        continue;
      ws[j++] = ci;
      if (!enqueue(c[0], ci)) {
        while (i < ws.size())
          ws[j++] = ws[i++];
        ws.resize(j);
        conflict_ = ci;
        return false;
      }
    }
    ws.resize(j);
  }
  return true;
}

void Solver::cancel_until(std::size_t level) {
  if (trail_lim_.size() <= level)
    return;
  std::size_t keep = trail_lim_[level];
  for (std::size_t i = keep; i < trail_.size(); ++i)
    values_[trail_[i].var] = kUnset;
  trail_.resize(keep);
  trail_lim_.resize(level);
  qhead_ = keep;
}

// Decision levels the current conflict depends on, found by walking the
// implication graph back from the conflicting clause. Level 0 (units and
// assumptions) never counts.
std::set<std::uint32_t> Solver::conflict_levels() {
  std::set<std::uint32_t> levels;
  std::vector<VarId> &stack = scratch_stack_;
  std::vector<VarId> &touched = scratch_touched_;
  stack.clear();
  touched.clear();
  for (Literal l : clauses_[conflict_])
    stack.push_back(l.var);
  while (!stack.empty()) {
    VarId v = stack.back();
    stack.pop_back();
    if (seen_[v] || level_[v] == 0)
      continue;
    seen_[v] = 1;
    touched.push_back(v);
    if (reason_[v] == kDecision || reason_[v] == kFlipped) {
      levels.insert(level_[v]);
      continue;
    }
    for (Literal l : clauses_[reason_[v]])
      if (l.var != v)
        stack.push_back(l.var);
  }
  for (VarId v : touched)
    seen_[v] = 0;
  return levels;
}

SatResult Solver::solve(std::span<const Literal> assumptions) {
  reset();
  has_model_ = false;
  seen_.assign(values_.size(), 0);
  if (has_empty_)
    return std::nullopt;
  for (Literal u : units_)
    if (!enqueue(u, kDecision))
      return std::nullopt;
  for (Literal a : assumptions) {
    if (a.var >= values_.size())
      throw std::out_of_range("assumption outside the variable table");
    if (!enqueue(a, kDecision))
      return std::nullopt;
  }
  return search(false);
}

SatResult Solver::resume(Clause clause) {
  if (!has_model_ || !normalize(clause) || clause.size() < 2) {
    add_clause(std::move(clause));
    return solve();
  }
  for (Literal l : clause)
    if (l.var >= values_.size() || value(l) != kFalse)
      throw std::invalid_argument("resume() needs a clause falsified by the last model");
  // Watch the two literals assigned last; they are the first to be
  // unassigned by the backjump, which keeps the watch invariant.
  std::stable_sort(clause.begin(), clause.end(),
                   [&](Literal a, Literal b) { return level_[a.var] > level_[b.var]; });
  clauses_.push_back(std::move(clause));
  conflict_ = static_cast<std::uint32_t>(clauses_.size() - 1);
  attach(conflict_);
  has_model_ = false;
  return search(true);
}

// Backjumping: a failed branch is blamed on the decision levels its conflict
// depends on, and levels outside that set are skipped instead of being
// flipped in turn. Both phases of the deepest blamed decision are tried
// before moving further up; a flipped decision carries the levels that
// refuted its first phase.
SatResult Solver::search(bool in_conflict) {
  VarId cursor = 0;
  for (;;) {
    if (in_conflict || !propagate()) {
      in_conflict = false;
      std::set<std::uint32_t> blame = conflict_levels();
      for (;;) {
        if (blame.empty())
          return std::nullopt;
        std::uint32_t level = *blame.rbegin();
        blame.erase(level);
        if (reason_[trail_[trail_lim_[level - 1]].var] == kFlipped) {
          blame.insert(flip_deps_[level - 1].begin(), flip_deps_[level - 1].end());
          continue;
        }
        Literal decision = trail_[trail_lim_[level - 1]];
        cursor = cursor_at_level_[level - 1];
        cursor_at_level_.resize(level);
        flip_deps_.resize(level - 1);
        cancel_until(level - 1);
        trail_lim_.push_back(trail_.size());
        flip_deps_.push_back(std::move(blame));
        enqueue(~decision, kFlipped);
        break;
      }
      continue;
    }
    while (cursor < values_.size() && values_[cursor] != kUnset)
      ++cursor;
    if (cursor == values_.size())
      break;
    trail_lim_.push_back(trail_.size());
    cursor_at_level_.push_back(cursor);
    flip_deps_.emplace_back();
    enqueue(neg(cursor), kDecision);
  }

  has_model_ = true;
  Assignment model(values_.size());
  for (VarId v = 0; v < values_.size(); ++v)
    model.set(v, values_[v] == kTrue);
  return model;
}

} // namespace confik
