#include "confik/synth.hpp"

#include "confik/random.hpp"

#include <stdexcept>

namespace confik {

namespace {

bool on_one_path(const FeatureModel &fm, FeatureId a, FeatureId b) {
  auto ancestor = [&](FeatureId up, FeatureId down) {
    for (std::optional<FeatureId> f = down; f; f = fm.features()[*f].parent)
      if (*f == up)
        return true;
    return false;
  };
  return ancestor(a, b) || ancestor(b, a);
}

FeatureModel grow_tree(std::size_t features, Rng &rng) {
  FeatureModel fm("f0");
  auto fresh = [&] { return "f" + std::to_string(fm.size()); };
  while (fm.size() < features) {
    FeatureId parent = static_cast<FeatureId>(rng.below(fm.size()));
    int roll = static_cast<int>(rng.below(100));
    std::size_t room = features - fm.size();
    if (roll < 25) {
      fm.add_child(parent, fresh(), EdgeKind::Mandatory);
    } else if (roll < 92 || room < 2) {
      fm.add_child(parent, fresh(), EdgeKind::Optional);
    } else {
      bool is_xor = roll < 98;
      std::size_t members = 2 + rng.below(is_xor ? 3 : 2);
      members = std::min(members, room);
      GroupId g = fm.add_group(parent, is_xor ? GroupKind::Xor : GroupKind::Or);
      for (std::size_t m = 0; m < members; ++m)
        fm.add_group_member(g, fresh());
    }
  }
  return fm;
}

} // namespace

FeatureModel generate_model(std::size_t features, std::uint64_t seed) {
  if (features == 0)
    throw std::invalid_argument("a feature model needs at least one feature");
  Rng rng(seed);
  const FeatureModel tree = grow_tree(features, rng);
  const std::size_t wanted = features / 10;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    FeatureModel fm = tree;
    for (std::size_t k = 0; k < wanted && fm.size() > 2;) {
      auto a = static_cast<FeatureId>(rng.below(fm.size()));
      auto b = static_cast<FeatureId>(rng.below(fm.size()));
      if (a == b || on_one_path(fm, a, b))
        continue;
      Expr rhs = Expr::variable(static_cast<VarId>(b));
      if (rng.chance(1, 2))
        rhs = Expr::negation(std::move(rhs));
      fm.add_constraint(Expr::implication(Expr::variable(static_cast<VarId>(a)), std::move(rhs)));
      ++k;
    }
    if (solve(to_cnf(fm.vars(), translate(fm))))
      return fm;
  }
  return tree;
}

} // namespace confik
