#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qg/arena.hpp"
#include "qg/objectives.hpp"
#include "qg/strategy.hpp"

namespace qg {

using ZooParams = std::map<std::string, std::int64_t>;

struct ZooEntry {
    std::string name;
    ZooParams params;
    std::string provenance;
    Arena arena;
    // Names accepted by `strategy`; parametrised refs such as `sigma_3` or
    // `random_fm?seed=7&K=3` are listed by their stem.
    std::vector<std::string> strategies{};
    std::function<Strategy(std::string_view ref)> strategy{};
    // Winning region for the entry's headline prefix-independent objective.
    std::function<bool(const VertexId&)> winning{};
    // Vertex value for TP-limsup; (v, r) is in the winning region iff r + value(v) >= 0.
    std::function<Extended(const VertexId&)> tp_value{};
    // Memoryless strategy that keeps (v, r) inside that region.
    std::function<Strategy()> safe{};

    [[nodiscard]] std::string uri() const;
    [[nodiscard]] bool has_strategy(std::string_view ref) const;
    [[nodiscard]] bool in_winning_prime(const VertexId& v, const Weight& r) const;
};

struct ZooInfo {
    std::string name;
    std::string params; // e.g. "B=10"
    std::string provenance;
};

std::vector<ZooInfo> zoo_list();
ZooEntry make_zoo(std::string_view name, const ZooParams& params = {});

bool is_zoo_uri(std::string_view text);
// `zoo:a4`, `zoo:bitarena?rounds=5&unit=1`
ZooEntry zoo_from_uri(std::string_view uri);

// Loads a zoo URI or an arena file.
Arena load_arena(std::string_view source);

// Finite-memory strategy on A4/A3 vertex names that delays `delays` times and then exits.
Strategy delay_then_exit(std::string_view delay_class, std::int64_t delays, std::string name);

// Seeded random name-uniform finite-memory Player 1 strategy for A4 with `states` states.
Strategy random_a4_strategy(std::uint64_t seed, std::int64_t states);

// Seeded random step-counter table on A3 (decisions at t for steps below `horizon`).
Strategy random_a3_table(std::uint64_t seed, std::int64_t horizon);

// Seeded step-counter table with a uniformly random move at every (Player 1
// vertex, step) reachable from the root before `horizon`.
Strategy random_step_counter(const Arena& arena, std::uint64_t seed, std::int64_t horizon,
                             std::size_t max_entries = 200000);

} // namespace qg
