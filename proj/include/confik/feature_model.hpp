#pragma once

#include "confik/logic.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace confik {

enum class EdgeKind { Root, Mandatory, Optional, GroupMember };
enum class GroupKind { Xor, Or };

std::string_view to_string(EdgeKind kind);
std::string_view to_string(GroupKind kind);

using FeatureId = std::size_t;
using GroupId = std::size_t;

/// A position under a feature: either a plain child or a group of children.
struct ChildSlot {
  bool is_group = false;
  std::size_t index = 0;
  friend bool operator==(const ChildSlot &, const ChildSlot &) = default;
};

struct Feature {
  std::string name;
  std::optional<FeatureId> parent;
  EdgeKind kind = EdgeKind::Root;
  std::optional<GroupId> group;
  std::vector<ChildSlot> slots;
  friend bool operator==(const Feature &, const Feature &) = default;
};

struct Group {
  GroupKind kind = GroupKind::Xor;
  FeatureId parent = 0;
  std::vector<FeatureId> members;
  friend bool operator==(const Group &, const Group &) = default;
};

/// FODA feature tree plus cross-tree constraints. Feature ids coincide with
/// variable ids in vars(), in declaration order, so the root is feature 0.
class FeatureModel {
public:
  explicit FeatureModel(std::string root_name);

  FeatureId add_child(FeatureId parent, std::string name, EdgeKind kind);
  GroupId add_group(FeatureId parent, GroupKind kind);
  FeatureId add_group_member(GroupId group, std::string name);
  void add_constraint(Expr constraint);

  /// Throws Error(SemanticError) on a group with fewer than two members.
  void validate() const;

  FeatureId root() const { return 0; }
  const std::vector<Feature> &features() const { return features_; }
  const std::vector<Group> &groups() const { return groups_; }
  const std::vector<Expr> &constraints() const { return constraints_; }
  const VarTable &vars() const { return vars_; }
  std::size_t size() const { return features_.size(); }

  friend bool operator==(const FeatureModel &, const FeatureModel &) = default;

private:
  FeatureId add_feature(std::string name, FeatureId parent, EdgeKind kind);

  std::vector<Feature> features_;
  std::vector<Group> groups_;
  std::vector<Expr> constraints_;
  VarTable vars_;
};

/// Parses the indented model format:
///
///     feature x
///       feature y mandatory
///         xor
///           feature a
///           feature b
///       feature c optional
///     constraint a -> !c
///
/// Diagnostics carry "line L, column C". Throws Error(SyntaxError) or
/// Error(SemanticError).
FeatureModel parse_model(std::string_view text);

std::string print_model(const FeatureModel &fm);

/// Parses a constraint expression over `vars`. Precedence, low to high:
/// `<->`, `->` (right-assoc), `|`, `&`, `!`. `line`/`column` locate the text
/// for diagnostics.
Expr parse_expression(std::string_view text, const VarTable &vars, std::size_t line = 1,
                      std::size_t column = 1);

/// Propositional semantics of the feature model: root selected, mandatory
/// child iff parent, optional child implies parent, group members imply the
/// parent, the parent implies some member, and for xor groups the parent
/// excludes every pair of members. Cross-tree constraints are appended.
Expr translate(const FeatureModel &fm);

} // namespace confik
