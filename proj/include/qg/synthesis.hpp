#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qg/arena.hpp"
#include "qg/engine.hpp"
#include "qg/objectives.hpp"
#include "qg/strategy.hpp"

namespace qg {

// Compares two equal-length prefixes; nullopt means "incomparable".
using PrefixComparator = std::function<std::optional<Order>(const PrefixState&, const PrefixState&)>;

PrefixComparator default_comparator(const OpenSub& o);

// Step-counter strategy that at (v, s) plays what `sigma_prime` plays after the
// least (for the comparator, then lexicographically) sigma_prime-consistent
// history of length s ending in v. Covers steps below `depth`.
Strategy sc_from_strategy(const Arena& arena, const VertexId& v0, const Strategy& sigma_prime, const OpenSub& o,
                          std::size_t depth, const PrefixComparator& cmp = {},
                          std::size_t node_cap = default_node_cap());

// A sigma-consistent history with no sigma_prime-consistent history of the
// same length and endpoint below it, if there is one within `depth`.
std::optional<History> domination_gap(const Arena& arena, const VertexId& v0, const Strategy& sigma,
                                      const Strategy& sigma_prime, const OpenSub& o, std::size_t depth,
                                      std::size_t node_cap = default_node_cap());

struct SynthCaps {
    std::size_t max_depth = 400;
    std::size_t node_cap = default_node_cap();
};

struct SynthReport {
    struct Level {
        std::int64_t m = 0;        // index of the open set (TPsupGE0(m) for the 1-bit construction)
        std::string open_set;
        std::size_t koenig = 0;    // first level at which the intermediate strategy satisfied it
        std::size_t k = 0;         // scheduled k_m
        std::size_t recheck = 0;   // first level at which the final strategy satisfies it
        bool certified = false;
    };

    std::vector<Level> levels;
    std::optional<Strategy> strategy; // the fixed table
    bool region_ok = false;
    std::optional<History> region_violation;
    std::size_t region_depth = 0; // explored up to this level
    bool complete = false;        // every requested level was scheduled
    std::string note;

    [[nodiscard]] bool certified() const;
    [[nodiscard]] std::string str() const;
};

// Fixes a step-counter strategy bubble by bubble: the first `m_max` open sets of
// `decomposition` are each satisfied by the scheduled level, and no consistent
// history up to the last level leaves `winning`. `oracle` must win from every
// vertex of `winning` after any history (prefix-independent objective).
SynthReport bubble_synthesize(const Arena& arena, const VertexId& v0, const Decomposition& decomposition,
                              std::size_t m_max, const Strategy& oracle,
                              const std::function<bool(const VertexId&)>& winning, const SynthCaps& caps = {});

// Step counter plus one bit for limsup TP >= 0. `oracle` must win from every
// (vertex, running total) in the region after any history; `safe` must keep the
// play inside it.
SynthReport sc1bit_synthesize(const Arena& arena, const VertexId& v0, std::size_t bubbles, const Strategy& oracle,
                              const Strategy& safe,
                              const std::function<bool(const VertexId&, const Weight&)>& region,
                              const SynthCaps& caps = {});

} // namespace qg
