#include "qg/engine.hpp"

#include <cstdlib>
#include <map>
#include <sstream>
#include <tuple>

#include "qg/error.hpp"

namespace qg {

std::size_t default_node_cap()
{
    if (const char* env = std::getenv("QG_NODE_CAP")) {
        try {
            auto v = std::stoull(env);
            if (v > 0)
                return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return 1'000'000;
}

// ---- play -------------------------------------------------------------------

std::string PlayRecord::csv() const
{
    std::ostringstream out;
    out << "step,from,to,weight,tp,mp,mem1,mem2\n";
    for (std::size_t i = 0; i < edges.size(); ++i)
        out << i + 1 << ',' << edges[i].from.str() << ',' << edges[i].to.str() << ',' << edges[i].weight.str() << ','
            << tp[i].str() << ',' << mp[i].str() << ',' << memory_str(mem1[i]) << ',' << memory_str(mem2[i]) << '\n';
    return out.str();
}

PlayRecord play(const Arena& arena, const VertexId& v0, const Strategy& p1, const Strategy& p2, std::size_t horizon)
{
    if (p1.player() != Player::One || p2.player() != Player::Two)
        throw DomainError("play needs a Player 1 and a Player 2 strategy");
    PlayRecord r;
    r.origin = v0;
    Memory m1 = p1.initial();
    Memory m2 = p2.initial();
    VertexId cur = v0;
    Weight tp;
    for (std::size_t step = 0; step < horizon; ++step) {
        auto x = arena.expand(cur);
        if (is_sink(cur, *x)) {
            r.end = PlayRecord::End::Sink;
            return r;
        }
        const bool first = x->owner == Player::One;
        Edge e;
        try {
            e = first ? p1.choose(m1, cur, x->edges) : p2.choose(m2, cur, x->edges);
        } catch (const HorizonExceeded&) {
            throw;
        } catch (const DomainError& ex) {
            throw DomainError("step " + std::to_string(step) + ": " + ex.what());
        }
        m1 = p1.update(m1, e);
        m2 = p2.update(m2, e);
        tp += e.weight;
        r.tp.push_back(tp);
        r.mp.push_back(tp / Weight{static_cast<std::int64_t>(step + 1)});
        r.mem1.push_back(m1);
        r.mem2.push_back(m2);
        cur = e.to;
        r.edges.push_back(std::move(e));
    }
    if (arena.sink(cur))
        r.end = PlayRecord::End::Sink;
    return r;
}

// ---- explicit exploration ---------------------------------------------------

std::vector<std::size_t> ConsistentTree::widths() const
{
    std::vector<std::size_t> w;
    for (const auto& l : levels)
        w.push_back(l.size());
    return w;
}

ConsistentTree explore_consistent(const Arena& arena, const VertexId& v0, const Strategy& s, std::size_t depth,
                                  std::size_t node_cap)
{
    ConsistentTree tree;
    std::vector<std::pair<History, Memory>> level{{History{v0}, s.initial()}};
    tree.levels.push_back({History{v0}});
    std::size_t total = 1;
    for (std::size_t d = 0; d < depth; ++d) {
        std::vector<std::pair<History, Memory>> next;
        for (const auto& [h, m] : level) {
            auto x = arena.expand(h.to());
            if (x->owner == s.player()) {
                Edge e = s.choose(m, h.to(), x->edges);
                next.emplace_back(h.extended(e), s.update(m, e));
            } else {
                for (const auto& e : x->edges)
                    next.emplace_back(h.extended(e), s.update(m, e));
            }
            if (total + next.size() > node_cap) {
                tree.partial = true;
                break;
            }
        }
        total += next.size();
        std::vector<History> hs;
        hs.reserve(next.size());
        for (const auto& [h, m] : next)
            hs.push_back(h);
        tree.levels.push_back(std::move(hs));
        if (tree.partial)
            break;
        level = std::move(next);
    }
    return tree;
}

// ---- merged frontier --------------------------------------------------------

LevelFrontier::LevelFrontier(Arena arena, const VertexId& v0, Strategy s, std::optional<OpenSub> tracked)
    : arena_{std::move(arena)}, strategy_{std::move(s)}, tracked_{std::move(tracked)}
{
    nodes_.push_back(FrontierNode{History{v0}, strategy_.initial(), PrefixState{}, 1});
}

bool LevelFrontier::all_satisfied() const
{
    for (const auto& n : nodes_)
        if (!n.state.satisfied)
            return false;
    return true;
}

std::uint64_t LevelFrontier::histories() const
{
    std::uint64_t total = 0;
    for (const auto& n : nodes_)
        total = total + n.count < total ? UINT64_MAX : total + n.count;
    return total;
}

void LevelFrontier::advance(std::size_t node_cap)
{
    using Key = std::tuple<VertexId, Memory, bool, Weight>;
    std::map<Key, FrontierNode> next;
    for (const auto& node : nodes_) {
        const VertexId& v = node.rep.to();
        auto x = arena_.expand(v);
        auto step = [&](const Edge& e) {
            PrefixState st = node.state;
            if (tracked_) {
                st.push(*tracked_, e.weight);
            } else {
                ++st.length;
                st.tp += e.weight;
            }
            Memory mem = strategy_.update(node.memory, e);
            Key key{e.to, mem, st.satisfied, st.tp};
            auto it = next.find(key);
            if (it == next.end()) {
                next.emplace(std::move(key), FrontierNode{node.rep.extended(e), std::move(mem), st, node.count});
                if (next.size() > node_cap)
                    throw DomainError("node cap of " + std::to_string(node_cap) + " exceeded at level " +
                                      std::to_string(level_ + 1));
                return;
            }
            auto& existing = it->second;
            existing.count = existing.count + node.count < existing.count ? UINT64_MAX : existing.count + node.count;
            History cand = node.rep.extended(e);
            if (cand < existing.rep)
                existing.rep = std::move(cand);
        };
        if (x->owner == strategy_.player())
            step(strategy_.choose(node.memory, v, x->edges));
        else
            for (const auto& e : x->edges)
                step(e);
    }
    nodes_.clear();
    nodes_.reserve(next.size());
    for (auto& [key, node] : next)
        nodes_.push_back(std::move(node));
    ++level_;
}

// ---- Koenig bound -----------------------------------------------------------

std::string to_string(KoenigResult::Status s)
{
    switch (s) {
    case KoenigResult::Status::Bound:
        return "bound";
    case KoenigResult::Status::Inconclusive:
        return "inconclusive";
    case KoenigResult::Status::Refuted:
        return "refuted";
    }
    return "?";
}

bool refuting_lasso(const Arena& arena, const Strategy& s, const OpenSub& o, const History& h,
                    std::size_t& cycle_start)
{
    (void)arena;
    const auto& edges = h.edges();
    const std::size_t n = edges.size();
    if (n == 0)
        return false;
    std::vector<Memory> mem{s.initial()};
    std::vector<Weight> tp{Weight{0}};
    for (const auto& e : edges) {
        mem.push_back(s.update(mem.back(), e));
        tp.push_back(tp.back() + e.weight);
    }
    PrefixState st;
    for (const auto& e : edges)
        st.push(o, e.weight);
    if (st.satisfied)
        return false;
    for (std::size_t t = 0; t < n; ++t) {
        const VertexId& vt = t == 0 ? h.origin() : edges[t - 1].to;
        if (vt != h.to() || mem[t] != mem[n])
            continue;
        bool never = true;
        if (auto first = o.potential(t, tp[t])) {
            auto last = o.potential(n, tp[n]);
            if (*last - *first > Weight{0})
                continue;
            for (std::size_t j = t + 1; j <= n && never; ++j)
                never = o.potential(j, tp[j])->sign() < 0;
        } else {
            for (std::size_t j = t; j < n && never; ++j)
                never = edges[j].weight != Weight{o.colour()};
        }
        if (never) {
            cycle_start = t;
            return true;
        }
    }
    return false;
}

KoenigResult koenig_bound(const Arena& arena, const VertexId& v0, const Strategy& s, const OpenSub& o,
                          std::size_t max_depth, std::size_t node_cap)
{
    KoenigResult result;
    LevelFrontier frontier{arena, v0, s, o};
    const bool memory_repeats = !s.step_counter_based() && s.kind() != StrategyKind::Composite;
    for (std::size_t level = 0;; ++level) {
        result.widths.push_back(frontier.nodes().size());
        result.level = level;
        if (frontier.all_satisfied()) {
            result.status = KoenigResult::Status::Bound;
            return result;
        }
        if (memory_repeats) {
            for (const auto& node : frontier.nodes()) {
                std::size_t start = 0;
                if (!node.state.satisfied && refuting_lasso(arena, s, o, node.rep, start)) {
                    result.status = KoenigResult::Status::Refuted;
                    result.lasso = node.rep;
                    result.cycle_start = start;
                    return result;
                }
            }
        }
        if (level == max_depth)
            break;
        try {
            frontier.advance(node_cap);
        } catch (const DomainError& ex) {
            result.note = ex.what();
            return result;
        }
    }
    result.note = "depth " + std::to_string(max_depth) + " reached with unsatisfied histories";
    return result;
}

} // namespace qg
