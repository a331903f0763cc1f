#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qg/arena.hpp"
#include "qg/objectives.hpp"
#include "qg/strategy.hpp"

namespace qg {

// Default 10^6; the QG_NODE_CAP environment variable overrides it.
std::size_t default_node_cap();

struct PlayRecord {
    enum class End { Horizon, Sink };

    VertexId origin;
    std::vector<Edge> edges;
    std::vector<Weight> tp; // after each step
    std::vector<Weight> mp;
    std::vector<Memory> mem1; // memory after each step
    std::vector<Memory> mem2;
    End end = End::Horizon;

    [[nodiscard]] History history() const { return History{origin, edges}; }
    [[nodiscard]] Weight final_tp() const { return tp.empty() ? Weight{0} : tp.back(); }
    [[nodiscard]] const VertexId& last() const { return edges.empty() ? origin : edges.back().to; }
    [[nodiscard]] std::string csv() const;
};

// Plays both strategies against each other for `horizon` steps, stopping early
// once a sink (weight-0 self-loop) is reached.
PlayRecord play(const Arena& arena, const VertexId& v0, const Strategy& p1, const Strategy& p2, std::size_t horizon);

struct ConsistentTree {
    std::vector<std::vector<History>> levels;
    bool partial = false; // node cap reached

    [[nodiscard]] std::vector<std::size_t> widths() const;
};

// Every history from v0 of length <= depth consistent with `s`; the opponent's
// branches are kept in full.
ConsistentTree explore_consistent(const Arena& arena, const VertexId& v0, const Strategy& s, std::size_t depth,
                                  std::size_t node_cap = default_node_cap());

// Histories of one level, merged when nothing that matters for the future
// differs: same endpoint, same strategy memory, same running total and the
// same satisfaction status for the tracked open set. Each class keeps its
// lexicographically least member.
struct FrontierNode {
    History rep;
    Memory memory;
    PrefixState state;
    std::uint64_t count = 1;
};

class LevelFrontier {
public:
    // Without a tracked open set `satisfied` stays false.
    LevelFrontier(Arena arena, const VertexId& v0, Strategy s, std::optional<OpenSub> tracked = std::nullopt);

    [[nodiscard]] std::size_t level() const { return level_; }
    [[nodiscard]] const std::vector<FrontierNode>& nodes() const { return nodes_; }
    [[nodiscard]] bool all_satisfied() const;
    [[nodiscard]] std::uint64_t histories() const;
    [[nodiscard]] const Strategy& strategy() const { return strategy_; }
    [[nodiscard]] const Arena& arena() const { return arena_; }

    // Moves to the next level. Throws if the node cap is exceeded.
    void advance(std::size_t node_cap = default_node_cap());

private:
    Arena arena_;
    Strategy strategy_;
    std::optional<OpenSub> tracked_;
    std::size_t level_ = 0;
    std::vector<FrontierNode> nodes_;
};

struct KoenigResult {
    enum class Status { Bound, Inconclusive, Refuted };

    Status status = Status::Inconclusive;
    std::size_t level = 0;              // the bound, or the deepest level explored
    std::optional<History> lasso;       // refuting play prefix: stem followed by one cycle
    std::size_t cycle_start = 0;        // index into lasso where the cycle starts
    std::vector<std::size_t> widths;    // merged classes per level
    std::string note;
};

std::string to_string(KoenigResult::Status s);

KoenigResult koenig_bound(const Arena& arena, const VertexId& v0, const Strategy& s, const OpenSub& o,
                          std::size_t max_depth, std::size_t node_cap = default_node_cap());

// True when `h` repeats a (vertex, memory) pair such that the open set can never
// fire along the repeated cycle. Fills the cycle start.
bool refuting_lasso(const Arena& arena, const Strategy& s, const OpenSub& o, const History& h,
                    std::size_t& cycle_start);

} // namespace qg
