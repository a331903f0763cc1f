#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qg/arena.hpp"
#include "qg/arena_io.hpp"
#include "qg/objectives.hpp"
#include "qg/strategy.hpp"
#include "qg/zoo.hpp"

namespace qgtest {

using namespace qg;

// Random finite arena: n vertices x0..x{n-1}, out-degree 1 or 2 (distinct
// targets), integer weights in [-w, w], random owners, start x0.
inline ExplicitArena random_arena(std::uint64_t seed, std::size_t max_vertices = 6, std::int64_t w = 2)
{
    std::mt19937_64 rng{seed};
    const std::size_t n = 2 + rng() % (max_vertices - 1);
    ExplicitArena a{"random" + std::to_string(seed)};
    auto vx = [](std::size_t i) { return VertexId{"x", {static_cast<std::int64_t>(i)}}; };
    for (std::size_t i = 0; i < n; ++i)
        a.add_vertex(vx(i), rng() % 2 ? Player::One : Player::Two);
    std::uniform_int_distribution<std::int64_t> weight{-w, w};
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t deg = 1 + rng() % 2;
        std::set<std::size_t> targets;
        while (targets.size() < deg)
            targets.insert(rng() % n);
        for (auto t : targets)
            a.add_edge(Edge{vx(i), Weight{weight(rng)}, vx(t)});
    }
    a.set_start(vx(0));
    return a;
}

// A4 restricted to indices <= k: vertices whose t-index they lead to stays within k.
inline ExplicitArena a4_truncation(std::int64_t k)
{
    auto z = make_zoo("a4");
    auto keep = [k](const VertexId& v) {
        const auto& n = v.name();
        const auto& p = v.params();
        if (n == "r0")
            return true;
        if (n == "s" || n == "t")
            return p[0] <= k;
        if (n == "e")
            return p[0] <= k;
        if (n == "g" || n == "d")
            return p[0] + p[1] <= k;
        return false;
    };
    ExplicitArena out{"a4_upto_" + std::to_string(k)};
    std::vector<VertexId> todo{z.arena.root()};
    std::set<VertexId> seen{z.arena.root()};
    while (!todo.empty()) {
        auto v = todo.back();
        todo.pop_back();
        auto x = z.arena.expand(v);
        out.add_vertex(v, x->owner);
        for (const auto& e : x->edges) {
            if (!keep(e.to))
                continue;
            out.add_edge(e);
            if (seen.insert(e.to).second)
                todo.push_back(e.to);
        }
    }
    out.set_start(z.arena.root());
    return out;
}

// Player 2 strategy for A4 that climbs gadget g[i,.] up to climbs(i) and enters at `entry`.
inline Strategy a4_p2(std::int64_t entry, std::function<std::int64_t(std::int64_t)> climbs)
{
    return make_scripted(
        "a4_p2", Player::Two, Memory{}, [](const Memory& m, const Edge&) { return m; },
        [entry, climbs](const Memory&, const VertexId& v, std::span<const Edge> out) {
            auto pick = [&](const char* name) {
                for (const auto& e : out)
                    if (e.to.name() == name)
                        return e;
                return out.front();
            };
            if (v.name() == "s")
                return v.param(0) >= entry ? pick("e") : pick("s");
            if (v.name() == "g")
                return v.param(1) >= climbs(v.param(0)) ? pick("d") : pick("g");
            return out.front();
        });
}

// Reads the limits of a lasso off an unrolled simulation of `steps` steps:
// TP from the last two periods of partial sums, MP from the last period's mean.
inline bool simulate_lasso(const Objective& o, const Lasso& l, std::size_t steps = 10000)
{
    const std::size_t p = l.cycle.size();
    std::vector<Weight> sums;
    sums.reserve(steps);
    Weight running;
    for (std::size_t n = 0; n < steps; ++n) {
        const Weight& c = n < l.prefix.size() ? l.prefix[n] : l.cycle[(n - l.prefix.size()) % p];
        running += c;
        sums.push_back(running);
    }
    auto cmp = [&](const Extended& x) {
        if (o.threshold.kind() == Extended::Kind::PosInf)
            return o.relation == Relation::GreaterEq && x.kind() == Extended::Kind::PosInf;
        if (o.threshold.kind() == Extended::Kind::NegInf)
            return o.relation == Relation::GreaterEq || x.kind() != Extended::Kind::NegInf;
        return o.relation == Relation::Greater ? x > o.threshold : x >= o.threshold;
    };
    if (o.kind == PayoffKind::MP) {
        Weight mean = (sums[steps - 1] - sums[steps - 1 - p]) / Weight{static_cast<std::int64_t>(p)};
        return cmp(Extended{mean});
    }
    Weight hi_a = sums[steps - 2 * p], lo_a = hi_a, hi_b = sums[steps - p], lo_b = hi_b;
    for (std::size_t n = steps - 2 * p; n < steps - p; ++n) {
        hi_a = std::max(hi_a, sums[n]);
        lo_a = std::min(lo_a, sums[n]);
    }
    for (std::size_t n = steps - p; n < steps; ++n) {
        hi_b = std::max(hi_b, sums[n]);
        lo_b = std::min(lo_b, sums[n]);
    }
    Extended limit;
    if (hi_b > hi_a)
        limit = Extended::pos_inf();
    else if (hi_b < hi_a)
        limit = Extended::neg_inf();
    else
        limit = o.mode == Mode::Limsup ? Extended{hi_b} : Extended{lo_b};
    return cmp(limit);
}

inline Lasso random_lasso(std::mt19937_64& rng, std::int64_t w = 3)
{
    std::uniform_int_distribution<std::int64_t> weight{-w, w};
    Lasso l;
    const auto pre = rng() % 5;
    const auto cyc = 1 + rng() % 5;
    for (std::size_t i = 0; i < pre; ++i)
        l.prefix.emplace_back(weight(rng));
    for (std::size_t i = 0; i < cyc; ++i)
        l.cycle.emplace_back(weight(rng));
    // bias towards zero-sum cycles, where the limits depend on the partial sums
    if (rng() % 2) {
        Weight sum;
        for (const auto& c : l.cycle)
            sum += c;
        l.cycle.push_back(-sum);
    }
    return l;
}

inline std::vector<Weight> random_word(std::mt19937_64& rng, std::size_t n, std::int64_t w = 2)
{
    std::uniform_int_distribution<std::int64_t> weight{-w, w};
    std::vector<Weight> out;
    for (std::size_t i = 0; i < n; ++i)
        out.emplace_back(weight(rng));
    return out;
}

} // namespace qgtest
