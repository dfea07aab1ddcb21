#pragma once

#include "confik/feature_model.hpp"
#include "confik/logic.hpp"

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace confik::testing {

inline constexpr std::string_view kExampleModel = R"(feature x
  feature y mandatory
    xor
      feature a
      feature b
  feature c optional
  feature d optional
)";

/// ClauseSet of `formula` over exactly `names`, in that id order.
inline ClauseSet cnf(std::string_view formula, std::initializer_list<std::string_view> names) {
  VarTable vars;
  for (auto n : names)
    vars.add(std::string(n));
  return to_cnf(vars, parse_expression(formula, vars));
}

inline ClauseSet example_cnf() { return to_cnf(parse_model(kExampleModel).vars(), translate(parse_model(kExampleModel))); }

inline VarSet ids(const ClauseSet &cs, std::initializer_list<std::string_view> names) {
  VarSet out;
  for (auto n : names)
    out.insert(cs.vars().lookup(n));
  return out;
}

inline std::vector<VarSet> id_sets(const ClauseSet &cs,
                                   std::initializer_list<std::initializer_list<std::string_view>> sets) {
  std::vector<VarSet> out;
  for (auto s : sets)
    out.push_back(ids(cs, s));
  return out;
}

inline std::uint64_t below(std::mt19937_64 &rng, std::uint64_t n) { return rng() % n; }

/// Random CNF over `num_vars` named v0..v{n-1}. Clause lengths 1..3 with a
/// bias towards short positive clauses so minimal models are non-trivial.
inline ClauseSet random_cnf(std::mt19937_64 &rng, std::size_t num_vars, std::size_t num_clauses) {
  VarTable vars;
  for (std::size_t i = 0; i < num_vars; ++i)
    vars.add("v" + std::to_string(i));
  ClauseSet cs(std::move(vars));
  for (std::size_t k = 0; k < num_clauses; ++k) {
    std::size_t len = 1 + below(rng, 3);
    if (len == 1 && below(rng, 3) != 0)
      len = 2;
    Clause c;
    for (std::size_t j = 0; j < len; ++j)
      c.push_back({static_cast<VarId>(below(rng, num_vars)), below(rng, 5) < 3});
    cs.add_clause(std::move(c));
  }
  return cs;
}

/// Random satisfiable CNF with 2..max_vars variables.
inline ClauseSet random_sat_cnf(std::mt19937_64 &rng, std::size_t max_vars) {
  for (;;) {
    std::size_t n = 2 + below(rng, max_vars - 1);
    ClauseSet cs = random_cnf(rng, n, below(rng, 2 * n + 1));
    if (solve(cs))
      return cs;
  }
}

/// Minimal true-sets by filtering the truth table, bit-pattern ordered. A
/// model is minimal when no model lies strictly below it; "some model lies
/// below mask" is tabulated by a subset-sum sweep over the user variables.
inline std::vector<VarSet> brute_minimal_models(const ClauseSet &cs) {
  std::vector<VarId> user = cs.vars().user_vars();
  std::size_t n = user.size();
  std::vector<std::size_t> slot(cs.num_vars(), n);
  for (std::size_t i = 0; i < n; ++i)
    slot[user[i]] = i;
  std::vector<char> is_model(std::size_t{1} << n, 0);
  for (const Assignment &a : all_models(cs)) {
    std::size_t mask = 0;
    for (VarId v : a.user_true_set(cs.vars()))
      mask |= std::size_t{1} << slot[v];
    is_model[mask] = 1;
  }
  std::vector<char> below_or_at = is_model;
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t mask = 0; mask < below_or_at.size(); ++mask)
      if (mask >> b & 1)
        below_or_at[mask] |= below_or_at[mask ^ (std::size_t{1} << b)];
  std::vector<VarSet> out;
  for (std::size_t mask = 0; mask < is_model.size(); ++mask) {
    if (!is_model[mask])
      continue;
    bool minimal = true;
    for (std::size_t b = 0; b < n && minimal; ++b)
      if (mask >> b & 1)
        minimal = !below_or_at[mask ^ (std::size_t{1} << b)];
    if (minimal) {
      VarSet s;
      for (std::size_t b = 0; b < n; ++b)
        if (mask >> b & 1)
          s.insert(user[b]);
      out.push_back(std::move(s));
    }
  }
  std::sort(out.begin(), out.end(), [](const VarSet &a, const VarSet &b) {
    return bit_pattern_less(a, b);
  });
  return out;
}

} // namespace confik::testing
