#pragma once

#include "confik/logic.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace confik {

/// Who bound a variable: the user, the entailment check, the shopping
/// principle (only ever to false), or blind completion.
enum class Origin { User, Inferred, Auto, Blind };

enum class VarStatus {
  Unassigned,
  UserTrue,
  UserFalse,
  InferredTrue,
  InferredFalse,
  AutoFalse,
  BlindTrue,
  BlindFalse,
};

std::string_view to_string(Origin origin);
std::string_view to_string(VarStatus status);

struct Decision {
  VarId var = 0;
  bool value = false;
  Origin origin = Origin::User;
  std::size_t step = 0;
  friend bool operator==(const Decision &, const Decision &) = default;
};

/// One configuration process over a fixed base formula.
///
/// Every operation below returns a new Session and leaves its argument
/// untouched. The conjunction of the base and all decision literals is
/// satisfiable at every step. Steps count mutating operations: step 0 holds
/// the inferences of the base formula, and each later step starts with the
/// decision or batch that triggered it, followed by the inferences it caused.
class Session {
public:
  const ClauseSet &base() const { return *base_; }
  const std::vector<Decision> &decisions() const { return log_; }
  const std::vector<VarId> &user_vars() const { return user_; }
  VarStatus status(VarId v) const { return status_.at(v); }
  bool is_assigned(VarId v) const { return status_.at(v) != VarStatus::Unassigned; }
  std::vector<VarId> unassigned() const;
  /// Variables that still need the user's attention after the shopping
  /// principle ran: unassigned and not dispensable. Empty until then.
  const VarSet &highlight() const { return highlight_; }
  std::size_t step() const { return step_; }
  /// User decisions dropped by the most recent retract() replay.
  const std::vector<Decision> &dropped_on_replay() const { return dropped_; }

  std::vector<Literal> decision_literals() const;
  /// The base formula conjoined with every decision literal.
  ClauseSet current() const;

  friend bool operator==(const Session &a, const Session &b) {
    return (a.base_ == b.base_ || *a.base_ == *b.base_) && a.log_ == b.log_ &&
           a.status_ == b.status_ && a.highlight_ == b.highlight_ &&
           a.highlighting_ == b.highlighting_ && a.step_ == b.step_ && a.dropped_ == b.dropped_;
  }

private:
  Session() = default;

  friend Session new_session(const ClauseSet &);
  friend Session apply_decision(const Session &, VarId, bool);
  friend Session retract(const Session &, VarId);
  friend Session shopping_principle(const Session &);
  friend Session complete_blind(const Session &);

  void record(VarId v, bool value, Origin origin);
  void infer();
  void refresh_highlight();
  void decide_in_place(VarId v, bool value);

  std::shared_ptr<const ClauseSet> base_;
  std::vector<VarId> user_;
  std::vector<Decision> log_;
  std::vector<VarStatus> status_;
  VarSet highlight_;
  bool highlighting_ = false;
  std::size_t step_ = 0;
  std::vector<Decision> dropped_;
};

/// Throws Error(UnsatModel) when the base admits no configuration.
Session new_session(const ClauseSet &cs);

/// Throws Error(UnknownVariable), Error(AlreadyAssigned), or
/// Error(InconsistentDecision); the session is never left inconsistent.
Session apply_decision(const Session &s, VarId v, bool value);

/// Removes the user decision on `v`, then replays the remaining user
/// decisions in order on a fresh session. Inferred, auto and blind
/// decisions are discarded. Throws Error(NotAUserDecision).
Session retract(const Session &s, VarId v);

/// Sets every unassigned dispensable variable to false in one batch and
/// highlights the remaining unassigned variables. Idempotent.
Session shopping_principle(const Session &s);

/// Binds every unassigned variable from one solver model of the current
/// formula. No-op on complete sessions.
Session complete_blind(const Session &s);

bool is_complete(const Session &s);

/// One `decide <name> <true|false>` line per user decision, in order.
std::string export_script(const Session &s);

/// Replays a script produced by export_script(). Blank lines and `#`
/// comments are skipped. Throws Error(SyntaxError) and the errors of
/// apply_decision().
Session replay_script(const ClauseSet &cs, std::string_view script);

} // namespace confik
