#include "qg/synthesis.hpp"

#include <map>
#include <sstream>
#include <tuple>

#include "qg/error.hpp"

namespace qg {

PrefixComparator default_comparator(const OpenSub& o)
{
    return [o](const PrefixState& a, const PrefixState& b) -> std::optional<Order> { return prefix_compare(o, a, b); };
}

namespace {

// Index of the least node ending in v, or nullopt.
std::optional<std::size_t> least_node(const std::vector<FrontierNode>& nodes, const VertexId& v,
                                      const PrefixComparator& cmp)
{
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].rep.to() != v)
            continue;
        if (!best) {
            best = i;
            continue;
        }
        const auto& cur = nodes[*best];
        auto order = cmp(nodes[i].state, cur.state);
        if (!order)
            throw DomainError("incomparable prefixes " + nodes[i].rep.str() + " and " + cur.rep.str());
        if (*order == Order::LE || (*order == Order::Both && nodes[i].rep < cur.rep))
            best = i;
    }
    return best;
}

Strategy table_strategy(StepCounterTable table) { return make_step_counter("synthesized", Player::One, std::move(table)); }

// First level <= max_depth at which every history consistent with s satisfies o.
std::optional<std::size_t> recheck_level(const Arena& arena, const VertexId& v0, const Strategy& s, const OpenSub& o,
                                         std::size_t max_depth, std::size_t node_cap)
{
    auto kb = koenig_bound(arena, v0, s, o, max_depth, node_cap);
    if (kb.status != KoenigResult::Status::Bound)
        return std::nullopt;
    return kb.level;
}

} // namespace

Strategy sc_from_strategy(const Arena& arena, const VertexId& v0, const Strategy& sigma_prime, const OpenSub& o,
                          std::size_t depth, const PrefixComparator& cmp_in, std::size_t node_cap)
{
    if (sigma_prime.player() != Player::One)
        throw DomainError("sc_from_strategy needs a Player 1 strategy");
    const PrefixComparator cmp = cmp_in ? cmp_in : default_comparator(o);
    StepCounterTable table;
    table.horizon = static_cast<std::int64_t>(depth);
    LevelFrontier frontier{arena, v0, sigma_prime, o};
    for (std::size_t s = 0; s < depth; ++s) {
        std::map<VertexId, bool> seen;
        for (const auto& node : frontier.nodes()) {
            const VertexId& v = node.rep.to();
            if (seen[v])
                continue;
            seen[v] = true;
            auto x = arena.expand(v);
            if (x->owner != Player::One)
                continue;
            auto best = least_node(frontier.nodes(), v, cmp);
            const auto& min = frontier.nodes()[*best];
            table.moves[{v, static_cast<std::int64_t>(s)}] = sigma_prime.choose(min.memory, v, x->edges);
        }
        if (s + 1 < depth)
            frontier.advance(node_cap);
    }
    return make_step_counter("sc_of_" + sigma_prime.name(), Player::One, std::move(table));
}

std::optional<History> domination_gap(const Arena& arena, const VertexId& v0, const Strategy& sigma,
                                      const Strategy& sigma_prime, const OpenSub& o, std::size_t depth,
                                      std::size_t node_cap)
{
    LevelFrontier f{arena, v0, sigma, o};
    LevelFrontier g{arena, v0, sigma_prime, o};
    for (std::size_t level = 0;; ++level) {
        for (const auto& node : f.nodes()) {
            bool covered = false;
            for (const auto& other : g.nodes()) {
                if (other.rep.to() != node.rep.to())
                    continue;
                auto order = prefix_compare(o, other.state, node.state);
                if (order == Order::LE || order == Order::Both) {
                    covered = true;
                    break;
                }
            }
            if (!covered)
                return node.rep;
        }
        if (level == depth)
            return std::nullopt;
        f.advance(node_cap);
        g.advance(node_cap);
    }
}

bool SynthReport::certified() const
{
    if (!complete || !region_ok || !strategy)
        return false;
    for (const auto& l : levels)
        if (!l.certified)
            return false;
    return true;
}

std::string SynthReport::str() const
{
    std::ostringstream out;
    out << "status " << (certified() ? "certified" : complete ? "uncertified" : "partial") << "\n";
    for (const auto& l : levels)
        out << "level m=" << l.m << " open=" << l.open_set << " koenig=" << l.koenig << " k=" << l.k
            << " recheck=" << l.recheck << " certified=" << (l.certified ? "yes" : "no") << "\n";
    out << "region " << (region_ok ? "preserved" : "violated") << " depth=" << region_depth << "\n";
    if (region_violation)
        out << "violation " << region_violation->str() << "\n";
    if (!note.empty())
        out << "note " << note << "\n";
    return out.str();
}

SynthReport bubble_synthesize(const Arena& arena, const VertexId& v0, const Decomposition& decomposition,
                              std::size_t m_max, const Strategy& oracle,
                              const std::function<bool(const VertexId&)>& winning, const SynthCaps& caps)
{
    if (!decomposition.supported())
        throw DomainError("objective has no open decomposition: " + decomposition.reason());
    if (!winning(v0))
        throw DomainError("start vertex " + v0.str() + " is not in the winning region");
    SynthReport report;
    StepCounterTable table;
    std::size_t k = 0;
    for (std::size_t m = 0; m < m_max; ++m) {
        const OpenSub o = decomposition.at(m);
        table.horizon = static_cast<std::int64_t>(k);
        Strategy sigma_prime = make_composite(table_strategy(table), static_cast<std::int64_t>(k), oracle);
        auto kb = koenig_bound(arena, v0, sigma_prime, o, caps.max_depth, caps.node_cap);
        if (kb.status != KoenigResult::Status::Bound) {
            report.note = "open set " + o.str() + ": " + to_string(kb.status) + " (" + kb.note + ")";
            break;
        }
        const std::size_t next = std::max(kb.level, k + 1);
        Strategy sc = sc_from_strategy(arena, v0, sigma_prime, o, next, {}, caps.node_cap);
        for (const auto& [key, e] : sc.as<StepCounterTable>()->moves)
            if (key.second >= static_cast<std::int64_t>(k))
                table.moves[key] = e;
        k = next;
        report.levels.push_back(SynthReport::Level{static_cast<std::int64_t>(m + 1), o.str(), kb.level, k, 0, false});
    }
    report.complete = report.levels.size() == m_max;
    table.horizon = static_cast<std::int64_t>(k);
    Strategy sigma = table_strategy(table);
    report.strategy = sigma;
    for (auto& l : report.levels) {
        auto level = recheck_level(arena, v0, sigma, decomposition.at(static_cast<std::size_t>(l.m - 1)), l.k,
                                   caps.node_cap);
        l.recheck = level.value_or(0);
        l.certified = level && *level <= l.k;
    }
    // Region check on every consistent history up to the last level.
    report.region_ok = true;
    LevelFrontier f{arena, v0, sigma};
    for (std::size_t level = 0;; ++level) {
        for (const auto& node : f.nodes())
            if (!winning(node.rep.to())) {
                report.region_ok = false;
                report.region_violation = node.rep;
                break;
            }
        report.region_depth = level;
        if (!report.region_ok || level == k)
            break;
        f.advance(caps.node_cap);
    }
    return report;
}

namespace {

struct BitNode {
    History rep;
    std::int64_t bit = 0;
    PrefixState state;
};

} // namespace

SynthReport sc1bit_synthesize(const Arena& arena, const VertexId& v0, std::size_t bubbles, const Strategy& oracle,
                              const Strategy& safe,
                              const std::function<bool(const VertexId&, const Weight&)>& region,
                              const SynthCaps& caps)
{
    if (!region(v0, Weight{0}))
        throw DomainError("start vertex " + v0.str() + " with total 0 is not in the winning region");
    SynthReport report;
    StepCounterPlusK table;
    table.modes = 2;
    std::size_t k = 0;
    std::vector<BitNode> nodes{BitNode{History{v0}, 0, PrefixState{}}};
    auto fail = [&](const History& h, std::string why) {
        report.region_ok = false;
        report.region_violation = h;
        report.note = std::move(why);
    };
    report.region_ok = true;
    for (std::size_t b = 0; b < bubbles && report.region_ok; ++b) {
        const auto m = static_cast<std::int64_t>(k + 1);
        const OpenSub o = OpenSub::tp_sup(m);
        const auto cmp = default_comparator(o);
        table.horizon = static_cast<std::int64_t>(k);
        Strategy fixed = make_step_counter_plus("synthesized", Player::One, table);
        Strategy sigma_prime = make_composite(fixed, static_cast<std::int64_t>(k), oracle);
        LevelFrontier mimic{arena, v0, sigma_prime, o};
        for (std::size_t s = 0; s < k; ++s)
            mimic.advance(caps.node_cap);
        for (auto& n : nodes) {
            n.state.satisfied = false;
            n.bit = 0;
        }
        std::optional<std::size_t> done;
        for (std::size_t s = k;; ++s) {
            for (const auto& n : nodes)
                if (!region(n.rep.to(), n.state.tp)) {
                    fail(n.rep, "history leaves the region at level " + std::to_string(s));
                    break;
                }
            if (!report.region_ok)
                break;
            bool all = s >= static_cast<std::size_t>(m);
            for (const auto& n : nodes)
                all = all && n.state.satisfied;
            if (all) {
                done = s;
                break;
            }
            if (s >= caps.max_depth) {
                report.note = "bubble " + std::to_string(b + 1) + ": depth cap " + std::to_string(caps.max_depth) +
                              " reached with unsatisfied histories";
                break;
            }
            const auto step = static_cast<std::int64_t>(s);
            // Decisions for this level.
            for (const auto& n : nodes) {
                const VertexId& v = n.rep.to();
                auto x = arena.expand(v);
                if (n.bit == 1) {
                    if (x->owner == Player::One && !table.moves.contains({v, step, 1}))
                        table.moves[{v, step, 1}] = safe.choose(memory_after(safe, n.rep), v, x->edges);
                    continue;
                }
                if (x->owner == Player::One && table.moves.contains({v, step, 0}))
                    continue;
                auto best = least_node(mimic.nodes(), v, cmp);
                if (!best) {
                    fail(n.rep, "no history of the intermediate strategy to mimic at level " + std::to_string(s));
                    break;
                }
                // The bit flips on any edge, either player's, that completes the open set
                // after the least mimicked history.
                const auto& h = mimic.nodes()[*best];
                auto flip = [&](const Edge& e) {
                    PrefixState after = h.state;
                    after.push(o, e.weight);
                    if (after.satisfied)
                        table.edge_updates[{step, 0, e}] = 1;
                };
                if (x->owner == Player::One) {
                    Edge e = sigma_prime.choose(h.memory, v, x->edges);
                    table.moves[{v, step, 0}] = e;
                    flip(e);
                } else {
                    for (const auto& e : x->edges)
                        flip(e);
                }
            }
            if (!report.region_ok)
                break;
            table.horizon = step + 1;
            // Advance both frontiers.
            std::map<std::tuple<VertexId, std::int64_t, bool, Weight>, BitNode> next;
            for (const auto& n : nodes) {
                const VertexId& v = n.rep.to();
                auto x = arena.expand(v);
                const Memory mem{step, n.bit};
                auto push = [&](const Edge& e) {
                    BitNode child{n.rep.extended(e), table.update(mem, e)[1], n.state};
                    child.state.push(o, e.weight);
                    std::tuple key{e.to, child.bit, child.state.satisfied, child.state.tp};
                    auto it = next.find(key);
                    if (it == next.end())
                        next.emplace(std::move(key), std::move(child));
                    else if (child.rep < it->second.rep)
                        it->second.rep = child.rep;
                };
                if (x->owner == Player::One)
                    push(table.choose(mem, v, x->edges));
                else
                    for (const auto& e : x->edges)
                        push(e);
            }
            if (next.size() > caps.node_cap)
                throw DomainError("node cap of " + std::to_string(caps.node_cap) + " exceeded at level " +
                                  std::to_string(s + 1));
            nodes.clear();
            for (auto& [key, n] : next)
                nodes.push_back(std::move(n));
            mimic.advance(caps.node_cap);
        }
        if (!done)
            break;
        table.resets.insert(static_cast<std::int64_t>(*done) - 1);
        k = *done;
        report.levels.push_back(SynthReport::Level{m, o.str(), *done, k, 0, false});
    }
    report.complete = report.levels.size() == bubbles;
    table.horizon = static_cast<std::int64_t>(k);
    Strategy sigma = make_step_counter_plus("sc1bit", Player::One, table);
    report.strategy = sigma;
    for (auto& l : report.levels) {
        auto level = recheck_level(arena, v0, sigma, OpenSub::tp_sup(l.m), l.k, caps.node_cap);
        l.recheck = level.value_or(0);
        l.certified = level && *level <= l.k;
    }
    if (report.region_ok) {
        LevelFrontier f{arena, v0, sigma};
        for (std::size_t level = 0;; ++level) {
            for (const auto& node : f.nodes())
                if (!region(node.rep.to(), node.state.tp)) {
                    fail(node.rep, "final strategy leaves the region at level " + std::to_string(level));
                    break;
                }
            report.region_depth = level;
            if (!report.region_ok || level == k)
                break;
            f.advance(caps.node_cap);
        }
    }
    return report;
}

} // namespace qg
