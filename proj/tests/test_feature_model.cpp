#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "confik/error.hpp"
#include "confik/feature_model.hpp"
#include "support.hpp"

#include <functional>
#include <sstream>

using namespace confik;
using namespace confik::testing;

namespace {

ErrorKind kind_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Usage;
}

std::string message_of(std::string_view text) {
  try {
    parse_model(text);
  } catch (const Error &e) {
    return e.what();
  }
  return "";
}

std::vector<VarSet> projected_models(const FeatureModel &fm) {
  ClauseSet cs = to_cnf(fm.vars(), translate(fm));
  std::vector<VarSet> out;
  for (const Assignment &a : all_models(cs))
    out.push_back(a.user_true_set(cs.vars()));
  std::sort(out.begin(), out.end());
  return out;
}

/// Enumerates valid feature combinations straight from the tree rules.
std::vector<VarSet> tree_semantics(const FeatureModel &fm) {
  std::size_t n = fm.size();
  std::vector<VarSet> out;
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    auto on = [&](FeatureId f) { return (bits >> f & 1) != 0; };
    bool ok = on(fm.root());
    for (FeatureId f = 1; f < n && ok; ++f) {
      const Feature &ft = fm.features()[f];
      if (on(f) && !on(*ft.parent))
        ok = false;
      if (ft.kind == EdgeKind::Mandatory && on(*ft.parent) && !on(f))
        ok = false;
    }
    for (const Group &g : fm.groups()) {
      if (!ok || !on(g.parent))
        continue;
      std::size_t count = 0;
      for (FeatureId m : g.members)
        count += on(m);
      if (count == 0 || (g.kind == GroupKind::Xor && count > 1))
        ok = false;
    }
    if (ok)
      for (const Expr &c : fm.constraints())
        ok = ok && c.evaluate([&](VarId v) { return on(v); });
    if (ok) {
      VarSet s;
      for (FeatureId f = 0; f < n; ++f)
        if (on(f))
          s.insert(static_cast<VarId>(f));
      out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

FeatureModel random_model(std::mt19937_64 &rng, std::size_t target) {
  FeatureModel fm("f0");
  std::size_t next = 1;
  while (fm.size() < target) {
    FeatureId parent = below(rng, fm.size());
    switch (below(rng, 4)) {
    case 0: fm.add_child(parent, "f" + std::to_string(next++), EdgeKind::Mandatory); break;
    case 1: fm.add_child(parent, "f" + std::to_string(next++), EdgeKind::Optional); break;
    default: {
      GroupId g = fm.add_group(parent, below(rng, 2) ? GroupKind::Xor : GroupKind::Or);
      std::size_t members = 2 + below(rng, 2);
      for (std::size_t m = 0; m < members; ++m)
        fm.add_group_member(g, "f" + std::to_string(next++));
    }
    }
  }
  for (std::size_t k = below(rng, 3); k > 0; --k) {
    VarId a = static_cast<VarId>(below(rng, fm.size()));
    VarId b = static_cast<VarId>(below(rng, fm.size()));
    Expr rhs = below(rng, 2) ? Expr::variable(b) : Expr::negation(Expr::variable(b));
    fm.add_constraint(Expr::implication(Expr::variable(a), rhs));
  }
  return fm;
}

} // namespace

TEST_CASE("parse the example model") {
  FeatureModel fm = parse_model(kExampleModel);
  REQUIRE(fm.size() == 6);
  std::vector<std::string> names;
  for (const Feature &f : fm.features())
    names.push_back(f.name);
  CHECK(names == std::vector<std::string>{"x", "y", "a", "b", "c", "d"});
  CHECK(fm.features()[0].kind == EdgeKind::Root);
  CHECK(fm.features()[1].kind == EdgeKind::Mandatory);
  CHECK(fm.features()[1].parent == 0);
  CHECK(fm.features()[4].kind == EdgeKind::Optional);
  CHECK(fm.features()[5].kind == EdgeKind::Optional);
  REQUIRE(fm.groups().size() == 1);
  CHECK(fm.groups()[0].kind == GroupKind::Xor);
  CHECK(fm.groups()[0].parent == 1);
  CHECK(fm.groups()[0].members == std::vector<FeatureId>{2, 3});
  CHECK(fm.features()[2].kind == EdgeKind::GroupMember);
  CHECK(fm.features()[2].group == 0);
  CHECK(fm.constraints().empty());
}

TEST_CASE("translate reproduces the textbook conjuncts") {
  FeatureModel fm = parse_model(kExampleModel);
  auto v = [](VarId id) { return Expr::variable(id); };
  const VarId x = 0, y = 1, a = 2, b = 3, c = 4, d = 5;
  Expr expected = Expr::conjunction({
      v(x),
      Expr::equivalence(v(y), v(x)),
      Expr::implication(v(c), v(x)),
      Expr::implication(v(d), v(x)),
      Expr::implication(v(a), v(y)),
      Expr::implication(v(b), v(y)),
      Expr::implication(v(y), Expr::disjunction({v(a), v(b)})),
      Expr::implication(v(y), Expr::negation(Expr::conjunction({v(a), v(b)}))),
  });
  CHECK(translate(fm) == expected);
}

TEST_CASE("lone root") {
  FeatureModel fm = parse_model("feature r\n");
  CHECK(fm.size() == 1);
  CHECK(translate(fm) == Expr::variable(0));
  CHECK(projected_models(fm) == std::vector<VarSet>{{0}});
}

TEST_CASE("three-member xor group") {
  FeatureModel fm = parse_model("feature r\n  xor\n    feature a\n    feature b\n    feature c\n");
  CHECK(projected_models(fm) == std::vector<VarSet>{{0, 1}, {0, 2}, {0, 3}});
}

TEST_CASE("or group omits the exclusions") {
  FeatureModel fm = parse_model("feature r\n  or\n    feature a\n    feature b\n");
  CHECK(projected_models(fm) == std::vector<VarSet>{{0, 1}, {0, 1, 2}, {0, 2}});
}

TEST_CASE("cross-tree constraints") {
  FeatureModel fm = parse_model(std::string(kExampleModel) + "constraint a -> !d\n");
  REQUIRE(fm.constraints().size() == 1);
  auto models = projected_models(fm);
  CHECK(models.size() == 6);
  CHECK(models == tree_semantics(fm));
}

TEST_CASE("comments and blank lines") {
  FeatureModel fm = parse_model("# header\nfeature r   # root\n\n  feature s mandatory\n");
  CHECK(fm.size() == 2);
  CHECK(fm.features()[1].kind == EdgeKind::Mandatory);
}

TEST_CASE("diagnostics") {
  CHECK(kind_of([] { parse_model("feature r\n  xor\n    feature a\n"); }) ==
        ErrorKind::SemanticError);
  CHECK(kind_of([] { parse_model("feature r\n  feature r\n"); }) == ErrorKind::SemanticError);
  CHECK(kind_of([] { parse_model("feature r\n   feature a\n"); }) == ErrorKind::SyntaxError);
  CHECK(kind_of([] { parse_model("feature r\n\tfeature a\n"); }) == ErrorKind::SyntaxError);
  CHECK(kind_of([] { parse_model("feature r\n    feature a\n"); }) == ErrorKind::SyntaxError);
  CHECK(kind_of([] { parse_model("feature r\nfeature s\n"); }) == ErrorKind::SyntaxError);
  CHECK(kind_of([] { parse_model("feature r\n  feature a sometimes\n"); }) ==
        ErrorKind::SyntaxError);
  CHECK(kind_of([] { parse_model("feature r\n  feature a\nconstraint a -> q\n"); }) ==
        ErrorKind::SemanticError);
  CHECK(kind_of([] { parse_model("feature r\n  feature a\nconstraint a -> \n"); }) ==
        ErrorKind::SyntaxError);
  CHECK(kind_of([] { parse_model(""); }) == ErrorKind::SyntaxError);
  CHECK(message_of("feature r\n   feature a\n").rfind("line 2, column", 0) == 0);
  CHECK(message_of("feature r\n  feature a\nconstraint a -> q\n") ==
        "line 3, column 17: unknown feature 'q'");
}

TEST_CASE("expression parser precedence") {
  VarTable t;
  for (auto n : {"a", "b", "c"})
    t.add(n);
  auto v = [](VarId id) { return Expr::variable(id); };
  CHECK(parse_expression("a -> b -> c", t) ==
        Expr::implication(v(0), Expr::implication(v(1), v(2))));
  CHECK(parse_expression("a | b & c", t) ==
        Expr::disjunction({v(0), Expr::conjunction({v(1), v(2)})}));
  CHECK(parse_expression("a <-> b -> c", t) ==
        Expr::equivalence(v(0), Expr::implication(v(1), v(2))));
  CHECK(parse_expression("!a & b", t) == Expr::conjunction({Expr::negation(v(0)), v(1)}));
  CHECK(parse_expression("!(a & b)", t) == Expr::negation(Expr::conjunction({v(0), v(1)})));
}

TEST_CASE("property: print and parse round trip") {
  std::mt19937_64 rng(404);
  for (int round = 0; round < 200; ++round) {
    FeatureModel fm = random_model(rng, 1 + below(rng, 12));
    std::string text = print_model(fm);
    FeatureModel back = parse_model(text);
    // Ids follow declaration order, so compare by name.
    CHECK(print_model(back) == text);
    CHECK(parse_model(print_model(back)) == back);
    REQUIRE(back.size() == fm.size());
    for (const Feature &f : fm.features()) {
      const Feature &g = back.features()[back.vars().lookup(f.name)];
      CHECK(g.kind == f.kind);
      CHECK(g.parent.has_value() == f.parent.has_value());
      if (f.parent && g.parent)
        CHECK(back.features()[*g.parent].name == fm.features()[*f.parent].name);
      CHECK(g.group.has_value() == f.group.has_value());
      if (f.group && g.group)
        CHECK(back.groups()[*g.group].kind == fm.groups()[*f.group].kind);
    }
    CHECK(back.groups().size() == fm.groups().size());
    CHECK(back.constraints().size() == fm.constraints().size());
  }
}

TEST_CASE("property: translation matches the tree semantics") {
  std::mt19937_64 rng(505);
  for (int round = 0; round < 200; ++round) {
    FeatureModel fm = random_model(rng, 1 + below(rng, 11));
    ClauseSet cs = to_cnf(fm.vars(), translate(fm));
    CHECK(cs.vars().user_count() == fm.size());
    VarSet used;
    translate(fm).collect_vars(used);
    CHECK((used.empty() || *used.rbegin() < fm.size()));
    CHECK(projected_models(fm) == tree_semantics(fm));
  }
}
