#pragma once

#include "confik/feature_model.hpp"

#include <cstdint>

namespace confik {

/// Random feature model with `features` features grown as a random
/// recursive tree: each step attaches to a uniformly chosen existing feature
/// either a mandatory child (25%), an optional child (67%), an xor-group of
/// 2-4 members (6%) or an or-group of 2-3 members (2%), truncated at
/// `features`. Roughly one feature in five ends up in a group. About one
/// cross-tree constraint per ten features follows, each a requires (a -> b)
/// or excludes (a -> !b) between features that are not on one root path.
/// Constraint sets that leave the model without products are redrawn.
/// Deterministic in `seed`.
FeatureModel generate_model(std::size_t features, std::uint64_t seed);

} // namespace confik
