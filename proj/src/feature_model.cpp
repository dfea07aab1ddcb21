#include "confik/feature_model.hpp"

#include "confik/error.hpp"

#include <cctype>
#include <deque>
#include <sstream>

namespace confik {

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
  case EdgeKind::Root: return "root";
  case EdgeKind::Mandatory: return "mandatory";
  case EdgeKind::Optional: return "optional";
  case EdgeKind::GroupMember: return "member";
  }
  return "?";
}

std::string_view to_string(GroupKind kind) { return kind == GroupKind::Xor ? "xor" : "or"; }

//===----------------------------------------------------------------------===//
// FeatureModel
//===----------------------------------------------------------------------===//

FeatureModel::FeatureModel(std::string root_name) {
  vars_.add(root_name);
  features_.push_back(Feature{std::move(root_name), std::nullopt, EdgeKind::Root, std::nullopt, {}});
}

FeatureId FeatureModel::add_feature(std::string name, FeatureId parent, EdgeKind kind) {
  vars_.add(name); // throws on duplicates
  FeatureId id = features_.size();
  features_.push_back(Feature{std::move(name), parent, kind, std::nullopt, {}});
  return id;
}

FeatureId FeatureModel::add_child(FeatureId parent, std::string name, EdgeKind kind) {
  if (kind != EdgeKind::Mandatory && kind != EdgeKind::Optional)
    throw Error(ErrorKind::SemanticError, "plain children are mandatory or optional");
  FeatureId id = add_feature(std::move(name), parent, kind);
  features_.at(parent).slots.push_back({false, id});
  return id;
}

GroupId FeatureModel::add_group(FeatureId parent, GroupKind kind) {
  GroupId id = groups_.size();
  groups_.push_back(Group{kind, parent, {}});
  features_.at(parent).slots.push_back({true, id});
  return id;
}

FeatureId FeatureModel::add_group_member(GroupId group, std::string name) {
  FeatureId id = add_feature(std::move(name), groups_.at(group).parent, EdgeKind::GroupMember);
  features_[id].group = group;
  groups_[group].members.push_back(id);
  return id;
}

void FeatureModel::add_constraint(Expr constraint) {
  VarSet used;
  constraint.collect_vars(used);
  if (!used.empty() && *used.rbegin() >= features_.size())
    throw Error(ErrorKind::SemanticError, "constraint over an unknown feature");
  constraints_.push_back(std::move(constraint));
}

void FeatureModel::validate() const {
  for (const Group &g : groups_)
    if (g.members.size() < 2)
      throw Error(ErrorKind::SemanticError,
                  std::string(to_string(g.kind)) + "-group under '" + features_[g.parent].name +
                      "' needs at least two members");
}

//===----------------------------------------------------------------------===//
// Constraint expressions
//===----------------------------------------------------------------------===//

namespace {

[[noreturn]] void fail(ErrorKind kind, std::size_t line, std::size_t column,
                       const std::string &what) {
  throw Error(kind, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                        what);
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

class ExprParser {
public:
  ExprParser(std::string_view text, const VarTable &vars, std::size_t line, std::size_t column)
      : text_(text), vars_(vars), line_(line), column_(column) {}

  Expr parse() {
    Expr e = parse_iff();
    skip_space();
    if (pos_ < text_.size())
      error("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void error(const std::string &what, ErrorKind kind = ErrorKind::SyntaxError) {
    fail(kind, line_, column_ + pos_, what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  Expr parse_iff() {
    Expr lhs = parse_implies();
    while (accept("<->"))
      lhs = Expr::equivalence(std::move(lhs), parse_implies());
    return lhs;
  }

  Expr parse_implies() {
    Expr lhs = parse_or();
    if (accept("->"))
      return Expr::implication(std::move(lhs), parse_implies());
    return lhs;
  }

  Expr parse_or() {
    std::vector<Expr> parts{parse_and()};
    while (accept("|"))
      parts.push_back(parse_and());
    if (parts.size() == 1)
      return std::move(parts.front());
    return Expr::disjunction(std::move(parts));
  }

  Expr parse_and() {
    std::vector<Expr> parts{parse_unary()};
    while (accept("&"))
      parts.push_back(parse_unary());
    if (parts.size() == 1)
      return std::move(parts.front());
    return Expr::conjunction(std::move(parts));
  }

  Expr parse_unary() {
    if (accept("!"))
      return Expr::negation(parse_unary());
    if (accept("(")) {
      Expr inner = parse_iff();
      if (!accept(")"))
        error("expected ')'");
      return inner;
    }
    skip_space();
    if (pos_ >= text_.size())
      error("unexpected end of expression");
    if (!ident_start(text_[pos_]))
      error("unexpected '" + std::string(1, text_[pos_]) + "'");
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_]))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (name == "true" || name == "false")
      return Expr::constant(name == "true");
    auto id = vars_.find(name);
    if (!id || vars_.is_auxiliary(*id)) {
      pos_ = start;
      error("unknown feature '" + name + "'", ErrorKind::SemanticError);
    }
    return Expr::variable(*id);
  }

  std::string_view text_;
  const VarTable &vars_;
  std::size_t line_, column_;
  std::size_t pos_ = 0;
};

} // namespace

Expr parse_expression(std::string_view text, const VarTable &vars, std::size_t line,
                      std::size_t column) {
  return ExprParser(text, vars, line, column).parse();
}

//===----------------------------------------------------------------------===//
// Model text format
//===----------------------------------------------------------------------===//

namespace {

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::istringstream in{std::string(s)};
  for (std::string w; in >> w;)
    words.push_back(w);
  return words;
}

bool valid_name(const std::string &name) {
  if (name.empty() || !ident_start(name[0]) || name == "true" || name == "false")
    return false;
  for (char c : name)
    if (!ident_char(c))
      return false;
  return true;
}

} // namespace

FeatureModel parse_model(std::string_view text) {
  struct Frame {
    std::size_t depth;
    bool is_group;
    std::size_t index;
  };
  struct PendingConstraint {
    std::string text;
    std::size_t line, column;
  };
  struct GroupSite {
    std::size_t line, column;
  };

  std::optional<FeatureModel> fm;
  std::vector<Frame> stack;
  std::vector<PendingConstraint> constraints;
  std::vector<GroupSite> group_sites;
  std::size_t line_no = 0;

  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos)
      end = text.size();
    std::string line(text.substr(begin, end - begin));
    begin = end + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t'))
      line.pop_back();
    if (line.empty())
      continue;

    std::size_t indent = 0;
    while (indent < line.size() && line[indent] == ' ')
      ++indent;
    if (line[indent] == '\t')
      fail(ErrorKind::SyntaxError, line_no, indent + 1, "tabs are not allowed for indentation");
    if (indent % 2 != 0)
      fail(ErrorKind::SyntaxError, line_no, 1, "indentation must be a multiple of two spaces");
    std::size_t depth = indent / 2;
    std::size_t column = indent + 1;
    std::string body = line.substr(indent);
    std::vector<std::string> words = split_words(body);
    const std::string &keyword = words.front();

    if (keyword == "constraint") {
      if (depth != 0)
        fail(ErrorKind::SyntaxError, line_no, column, "constraints must not be indented");
      if (!fm)
        fail(ErrorKind::SyntaxError, line_no, column, "constraint before the root feature");
      std::size_t offset = body.find("constraint") + std::string("constraint").size();
      std::string expr = body.substr(offset);
      if (split_words(expr).empty())
        fail(ErrorKind::SyntaxError, line_no, column, "empty constraint");
      constraints.push_back({expr, line_no, column + offset});
      continue;
    }
    if (!constraints.empty())
      fail(ErrorKind::SyntaxError, line_no, column, "tree lines must precede constraint lines");

    if (keyword == "feature") {
      if (words.size() < 2)
        fail(ErrorKind::SyntaxError, line_no, column, "missing feature name");
      if (words.size() > 3)
        fail(ErrorKind::SyntaxError, line_no, column, "trailing text after feature declaration");
      const std::string &name = words[1];
      std::size_t name_col = column + body.find(name, 7);
      if (!valid_name(name))
        fail(ErrorKind::SyntaxError, line_no, name_col, "invalid feature name '" + name + "'");
      std::optional<EdgeKind> kind;
      if (words.size() == 3) {
        if (words[2] == "mandatory")
          kind = EdgeKind::Mandatory;
        else if (words[2] == "optional")
          kind = EdgeKind::Optional;
        else
          fail(ErrorKind::SyntaxError, line_no, column,
               "expected 'mandatory' or 'optional', got '" + words[2] + "'");
      }

      if (!fm) {
        if (depth != 0)
          fail(ErrorKind::SyntaxError, line_no, 1, "the root feature must not be indented");
        if (kind)
          fail(ErrorKind::SyntaxError, line_no, column, "the root feature takes no edge kind");
        fm.emplace(name);
        stack.push_back({0, false, 0});
        continue;
      }
      if (depth == 0)
        fail(ErrorKind::SyntaxError, line_no, 1, "a model has exactly one root feature");
      while (!stack.empty() && stack.back().depth >= depth)
        stack.pop_back();
      if (stack.empty() || stack.back().depth + 1 != depth)
        fail(ErrorKind::SyntaxError, line_no, 1, "bad indentation");
      const Frame parent = stack.back();
      try {
        FeatureId id;
        if (parent.is_group) {
          if (kind)
            fail(ErrorKind::SyntaxError, line_no, column,
                 "group members take no 'mandatory'/'optional' suffix");
          id = fm->add_group_member(parent.index, name);
        } else {
          id = fm->add_child(parent.index, name, kind.value_or(EdgeKind::Optional));
        }
        stack.push_back({depth, false, id});
      } catch (const Error &e) {
        if (e.kind() != ErrorKind::SemanticError)
          throw;
        fail(ErrorKind::SemanticError, line_no, name_col, "duplicate feature name '" + name + "'");
      }
      continue;
    }

    if (keyword == "xor" || keyword == "or") {
      if (words.size() != 1)
        fail(ErrorKind::SyntaxError, line_no, column, "trailing text after group keyword");
      if (!fm)
        fail(ErrorKind::SyntaxError, line_no, column, "group before the root feature");
      while (!stack.empty() && stack.back().depth >= depth)
        stack.pop_back();
      if (stack.empty() || stack.back().depth + 1 != depth)
        fail(ErrorKind::SyntaxError, line_no, 1, "bad indentation");
      if (stack.back().is_group)
        fail(ErrorKind::SyntaxError, line_no, column, "a group must sit directly under a feature");
      GroupId g = fm->add_group(stack.back().index, keyword == "xor" ? GroupKind::Xor : GroupKind::Or);
      group_sites.push_back({line_no, column});
      stack.push_back({depth, true, g});
      continue;
    }

    fail(ErrorKind::SyntaxError, line_no, column, "unknown keyword '" + keyword + "'");
  }

  if (!fm)
    fail(ErrorKind::SyntaxError, line_no ? line_no : 1, 1, "model declares no features");

  for (GroupId g = 0; g < fm->groups().size(); ++g)
    if (fm->groups()[g].members.size() < 2)
      fail(ErrorKind::SemanticError, group_sites[g].line, group_sites[g].column,
           std::string(to_string(fm->groups()[g].kind)) + "-group needs at least two members");

  for (const PendingConstraint &c : constraints)
    fm->add_constraint(parse_expression(c.text, fm->vars(), c.line, c.column));
  return std::move(*fm);
}

std::string print_model(const FeatureModel &fm) {
  std::ostringstream os;
  const auto &features = fm.features();
  auto indent = [&](std::size_t depth) { os << std::string(2 * depth, ' '); };
  auto print_feature = [&](auto &self, FeatureId id, std::size_t depth) -> void {
    const Feature &f = features[id];
    indent(depth);
    os << "feature " << f.name;
    if (f.kind == EdgeKind::Mandatory || f.kind == EdgeKind::Optional)
      os << ' ' << to_string(f.kind);
    os << '\n';
    for (const ChildSlot &slot : f.slots) {
      if (!slot.is_group) {
        self(self, slot.index, depth + 1);
        continue;
      }
      const Group &g = fm.groups()[slot.index];
      indent(depth + 1);
      os << to_string(g.kind) << '\n';
      for (FeatureId m : g.members)
        self(self, m, depth + 2);
    }
  };
  print_feature(print_feature, fm.root(), 0);
  for (const Expr &c : fm.constraints())
    os << "constraint " << to_string(c, fm.vars()) << '\n';
  return os.str();
}

//===----------------------------------------------------------------------===//
// Semantics
//===----------------------------------------------------------------------===//

Expr translate(const FeatureModel &fm) {
  auto v = [](FeatureId id) { return Expr::variable(static_cast<VarId>(id)); };
  std::vector<Expr> conjuncts{v(fm.root())};

  // Breadth-first, so the conjunct order reads top-down like the diagram.
  std::deque<FeatureId> queue{fm.root()};
  while (!queue.empty()) {
    FeatureId p = queue.front();
    queue.pop_front();
    for (const ChildSlot &slot : fm.features()[p].slots) {
      if (!slot.is_group) {
        FeatureId c = slot.index;
        if (fm.features()[c].kind == EdgeKind::Mandatory)
          conjuncts.push_back(Expr::equivalence(v(c), v(p)));
        else
          conjuncts.push_back(Expr::implication(v(c), v(p)));
        queue.push_back(c);
        continue;
      }
      const Group &g = fm.groups()[slot.index];
      std::vector<Expr> any;
      for (FeatureId m : g.members) {
        conjuncts.push_back(Expr::implication(v(m), v(p)));
        any.push_back(v(m));
      }
      conjuncts.push_back(Expr::implication(v(p), Expr::disjunction(std::move(any))));
      if (g.kind == GroupKind::Xor)
        for (std::size_t i = 0; i < g.members.size(); ++i)
          for (std::size_t j = i + 1; j < g.members.size(); ++j)
            conjuncts.push_back(Expr::implication(
                v(p), Expr::negation(Expr::conjunction({v(g.members[i]), v(g.members[j])}))));
      for (FeatureId m : g.members)
        queue.push_back(m);
    }
  }
  for (const Expr &c : fm.constraints())
    conjuncts.push_back(c);
  if (conjuncts.size() == 1)
    return conjuncts.front();
  return Expr::conjunction(std::move(conjuncts));
}

} // namespace confik
