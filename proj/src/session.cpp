#include "confik/session.hpp"

#include "confik/error.hpp"
#include "confik/reasoning.hpp"

#include <sstream>

namespace confik {

std::string_view to_string(Origin origin) {
  switch (origin) {
  case Origin::User: return "user";
  case Origin::Inferred: return "inferred";
  case Origin::Auto: return "auto";
  case Origin::Blind: return "blind";
  }
  return "?";
}

std::string_view to_string(VarStatus status) {
  switch (status) {
  case VarStatus::Unassigned: return "unassigned";
  case VarStatus::UserTrue: return "user_true";
  case VarStatus::UserFalse: return "user_false";
  case VarStatus::InferredTrue: return "inferred_true";
  case VarStatus::InferredFalse: return "inferred_false";
  case VarStatus::AutoFalse: return "auto_false";
  case VarStatus::BlindTrue: return "blind_true";
  case VarStatus::BlindFalse: return "blind_false";
  }
  return "?";
}

namespace {

VarStatus status_for(Origin origin, bool value) {
  switch (origin) {
  case Origin::User: return value ? VarStatus::UserTrue : VarStatus::UserFalse;
  case Origin::Inferred: return value ? VarStatus::InferredTrue : VarStatus::InferredFalse;
  case Origin::Auto: return VarStatus::AutoFalse;
  case Origin::Blind: return value ? VarStatus::BlindTrue : VarStatus::BlindFalse;
  }
  return VarStatus::Unassigned;
}

} // namespace

std::vector<VarId> Session::unassigned() const {
  std::vector<VarId> out;
  for (VarId v : user_)
    if (status_[v] == VarStatus::Unassigned)
      out.push_back(v);
  return out;
}

std::vector<Literal> Session::decision_literals() const {
  std::vector<Literal> out;
  out.reserve(log_.size());
  for (const Decision &d : log_)
    out.push_back({d.var, d.value});
  return out;
}

ClauseSet Session::current() const { return base_->with_units(decision_literals()); }

void Session::record(VarId v, bool value, Origin origin) {
  log_.push_back({v, value, origin, step_});
  status_[v] = status_for(origin, value);
}

// Entailment is checked against one fixed formula. Adding entailed literals
// leaves the model set unchanged, so a single backbone pass is already the
// fixpoint and the result does not depend on inspection order.
void Session::infer() {
  Assignment forced = backbone(current());
  for (VarId v : user_)
    if (status_[v] == VarStatus::Unassigned && forced.is_bound(v))
      record(v, *forced.get(v), Origin::Inferred);
}

void Session::refresh_highlight() {
  highlight_.clear();
  if (!highlighting_)
    return;
  DispensabilityReport report = dispensable_vars(current());
  for (VarId v : user_)
    if (status_[v] == VarStatus::Unassigned && !report.dispensable.count(v))
      highlight_.insert(v);
}

void Session::decide_in_place(VarId v, bool value) {
  if (v >= status_.size() || base_->vars().is_auxiliary(v))
    throw Error(ErrorKind::UnknownVariable, "no user variable with id " + std::to_string(v));
  const std::string &name = base_->vars().name(v);
  if (status_[v] != VarStatus::Unassigned)
    throw Error(ErrorKind::AlreadyAssigned, "'" + name + "' is already " +
                                                std::string(to_string(status_[v])));
  std::vector<Literal> assumptions = decision_literals();
  assumptions.push_back({v, value});
  if (!solve(*base_, assumptions))
    throw Error(ErrorKind::InconsistentDecision,
                "setting '" + name + "' to " + (value ? "true" : "false") +
                    " admits no configuration");
  ++step_;
  record(v, value, Origin::User);
  infer();
}

Session new_session(const ClauseSet &cs) {
  if (!solve(cs))
    throw Error(ErrorKind::UnsatModel, "the model admits no configuration");
  Session s;
  s.base_ = std::make_shared<const ClauseSet>(cs);
  s.user_ = cs.vars().user_vars();
  s.status_.assign(cs.num_vars(), VarStatus::Unassigned);
  s.infer();
  return s;
}

Session apply_decision(const Session &s, VarId v, bool value) {
  Session next = s;
  next.dropped_.clear();
  next.decide_in_place(v, value);
  next.refresh_highlight();
  return next;
}

Session retract(const Session &s, VarId v) {
  if (v >= s.status_.size() ||
      (s.status_[v] != VarStatus::UserTrue && s.status_[v] != VarStatus::UserFalse))
    throw Error(ErrorKind::NotAUserDecision,
                "only user decisions can be retracted" +
                    (v < s.status_.size() ? " ('" + s.base_->vars().name(v) + "')" : std::string()));
  Session next;
  next.base_ = s.base_;
  next.user_ = s.user_;
  next.status_.assign(s.status_.size(), VarStatus::Unassigned);
  next.infer();
  for (const Decision &d : s.log_) {
    if (d.origin != Origin::User || d.var == v)
      continue;
    try {
      next.decide_in_place(d.var, d.value);
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::InconsistentDecision && e.kind() != ErrorKind::AlreadyAssigned)
        throw;
      next.dropped_.push_back(d);
    }
  }
  return next;
}

Session shopping_principle(const Session &s) {
  Session next = s;
  next.dropped_.clear();
  DispensabilityReport report = dispensable_vars(next.current());
  bool any = false;
  for (VarId v : next.user_) {
    if (next.status_[v] != VarStatus::Unassigned || !report.dispensable.count(v))
      continue;
    if (!any)
      ++next.step_;
    any = true;
    next.record(v, false, Origin::Auto);
  }
  if (any)
    next.infer();
  next.highlighting_ = true;
  next.refresh_highlight();
  return next;
}

Session complete_blind(const Session &s) {
  if (is_complete(s))
    return s;
  Session next = s;
  next.dropped_.clear();
  SatResult model = solve(next.current());
  if (!model)
    throw Error(ErrorKind::UnsatContext, "session constraint became unsatisfiable");
  ++next.step_;
  for (VarId v : next.unassigned())
    next.record(v, *model->get(v), Origin::Blind);
  next.refresh_highlight();
  return next;
}

bool is_complete(const Session &s) { return s.unassigned().empty(); }

std::string export_script(const Session &s) {
  std::ostringstream os;
  for (const Decision &d : s.decisions())
    if (d.origin == Origin::User)
      os << "decide " << s.base().vars().name(d.var) << ' ' << (d.value ? "true" : "false")
         << '\n';
  return os.str();
}

Session replay_script(const ClauseSet &cs, std::string_view script) {
  Session s = new_session(cs);
  std::istringstream in{std::string(script)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream words(line);
    std::string command, name, value, extra;
    if (!(words >> command))
      continue;
    if (command != "decide" || !(words >> name >> value) || (words >> extra) ||
        (value != "true" && value != "false"))
      throw Error(ErrorKind::SyntaxError,
                  "script line " + std::to_string(line_no) + ": expected 'decide <var> <true|false>'");
    s = apply_decision(s, cs.vars().lookup(name), value == "true");
  }
  return s;
}

} // namespace confik
