#pragma once

#include <map>
#include <optional>
#include <vector>

#include "qg/arena.hpp"
#include "qg/objectives.hpp"
#include "qg/strategy.hpp"

namespace qg {

// Game values on a finite arena. MP is the mean payoff (limsup and liminf
// coincide on finite arenas); TP is the limsup of the total payoff.
struct ValueMap {
    PayoffKind family = PayoffKind::MP;
    std::map<VertexId, Extended> values;
    // Memoryless Player 1 strategy achieving the value from every vertex (MP only;
    // TP witnesses depend on the starting total, see tp_witness).
    std::optional<Strategy> witness;

    [[nodiscard]] const Extended& at(const VertexId& v) const;
};

ValueMap solve_values(const ExplicitArena& arena, PayoffKind family);

// Witness for limsup(r + TP) >= 0 from v, for any (v, r) with r + Val(v) >= 0.
Strategy tp_witness(const ExplicitArena& arena, const VertexId& v, const Weight& r);

// Vertices from which Player 1 wins MP >= 0.
std::vector<VertexId> mp_winning_region(const ValueMap& mp);

struct SafeStrategy {
    Strategy strategy; // memoryless, one exact move per Player 1 vertex
    ValueMap tp;

    // (v, r) is in the winning region for limsup(r + TP) >= 0.
    [[nodiscard]] bool in_region(const VertexId& v, const Weight& r) const;
};

// Argmax of weight + value of the target, ties broken by edge order.
SafeStrategy sigma_safe(const ExplicitArena& arena);
SafeStrategy sigma_safe(const ExplicitArena& arena, const ValueMap& tp);

// max over memoryless Player 1 strategies of min over memoryless Player 2
// strategies of the lasso payoff, for every vertex. Exponential; meant for
// arenas with a handful of vertices.
ValueMap brute_force_values(const ExplicitArena& arena, PayoffKind family, std::size_t max_profiles = 1u << 16);

} // namespace qg
