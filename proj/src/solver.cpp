#include "qg/solver.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "qg/error.hpp"

namespace qg {

namespace {

// Integer copy of a finite arena: weights multiplied by the lcm of their denominators.
struct Scaled {
    std::vector<VertexId> ids;
    std::map<VertexId, int> index;
    std::vector<Player> owner;
    std::vector<std::vector<Edge>> edges;               // canonical order
    std::vector<std::vector<std::pair<int, std::int64_t>>> out; // (target, scaled weight)
    std::int64_t scale = 1;
    std::int64_t wmax = 0;

    [[nodiscard]] int n() const { return static_cast<int>(ids.size()); }
};

Scaled scale_arena(const ExplicitArena& arena)
{
    Scaled s;
    if (arena.vertex_count() == 0)
        throw DomainError("solver: empty arena");
    for (const auto& [v, node] : arena.nodes()) {
        s.index[v] = s.n();
        s.ids.push_back(v);
        s.owner.push_back(node.owner);
        auto edges = node.edges;
        if (edges.empty())
            throw DomainError("solver: vertex " + v.str() + " has no outgoing edge");
        std::sort(edges.begin(), edges.end());
        s.edges.push_back(std::move(edges));
    }
    std::int64_t lcm = 1;
    for (const auto& es : s.edges)
        for (const auto& e : es) {
            if (!e.weight.is_small())
                throw DomainError("solver: weight " + e.weight.str() + " is too large");
            lcm = std::lcm(lcm, e.weight.small_den());
            if (lcm > (1 << 20))
                throw DomainError("solver: weight denominators are too large");
        }
    s.scale = lcm;
    for (const auto& es : s.edges) {
        std::vector<std::pair<int, std::int64_t>> out;
        for (const auto& e : es) {
            auto it = s.index.find(e.to);
            if (it == s.index.end())
                throw DomainError("solver: edge to unknown vertex " + e.to.str());
            const auto w = e.weight.small_num() * (lcm / e.weight.small_den());
            if (w > (1 << 20) || w < -(1 << 20))
                throw DomainError("solver: weight " + e.weight.str() + " is too large");
            s.wmax = std::max(s.wmax, w < 0 ? -w : w);
            out.emplace_back(it->second, w);
        }
        s.out.push_back(std::move(out));
    }
    return s;
}

struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;
};

// Nearest fraction with denominator at most n to x / k.
Fraction nearest(std::int64_t x, std::int64_t k, std::int64_t n)
{
    Fraction best;
    __int128 best_err_num = -1;
    __int128 best_err_den = 1;
    for (std::int64_t q = 1; q <= n; ++q) {
        // p = round(x * q / k)
        __int128 scaled = static_cast<__int128>(x) * q;
        __int128 p = scaled >= 0 ? (2 * scaled + k) / (2 * k) : -((-2 * scaled + k) / (2 * k));
        // error = |x/k - p/q| = |x q - p k| / (k q)
        __int128 err = scaled - p * k;
        if (err < 0)
            err = -err;
        __int128 den = static_cast<__int128>(k) * q;
        if (best_err_num < 0 || err * best_err_den < best_err_num * den) {
            best_err_num = err;
            best_err_den = den;
            best = Fraction{static_cast<std::int64_t>(p), q};
        }
    }
    auto g = std::gcd(best.num, best.den);
    return Fraction{best.num / g, best.den / g};
}

struct MpSolution {
    std::vector<Fraction> value; // in scaled units
    std::vector<int> choice;     // Player 1 edge index, -1 for Player 2
};

MpSolution solve_mp(const Scaled& s)
{
    const std::int64_t n = s.n();
    const std::int64_t w = std::max<std::int64_t>(s.wmax, 1);
    const std::int64_t k = 4 * n * n * n * w + 1;
    std::size_t edge_count = 0;
    for (const auto& o : s.out)
        edge_count += o.size();
    if (static_cast<double>(k) * static_cast<double>(edge_count) > 2e9)
        throw DomainError("solver: arena too large for value iteration");
    std::vector<std::int64_t> cur(n, 0), next(n, 0);
    for (std::int64_t step = 0; step < k; ++step) {
        for (int u = 0; u < n; ++u) {
            const bool max = s.owner[u] == Player::One;
            std::int64_t best = 0;
            bool first = true;
            for (const auto& [to, wt] : s.out[u]) {
                auto cand = wt + cur[to];
                if (first || (max ? cand > best : cand < best))
                    best = cand;
                first = false;
            }
            next[u] = best;
        }
        std::swap(cur, next);
    }
    MpSolution sol;
    for (int u = 0; u < n; ++u)
        sol.value.push_back(nearest(cur[u], k, n));

    // Player 1 witness: within each value class, an energy game for weights
    // w - value; the least credits tell which edges keep the energy up.
    sol.choice.assign(n, -1);
    auto cmp = [&](int a, int b) {
        return static_cast<__int128>(sol.value[a].num) * sol.value[b].den <=>
               static_cast<__int128>(sol.value[b].num) * sol.value[a].den;
    };
    std::vector<bool> done(n, false);
    for (int root = 0; root < n; ++root) {
        if (done[root])
            continue;
        std::vector<int> cls;
        for (int u = 0; u < n; ++u)
            if (!done[u] && cmp(u, root) == 0) {
                cls.push_back(u);
                done[u] = true;
            }
        const auto p = sol.value[root].num;
        const auto q = sol.value[root].den;
        std::vector<std::int64_t> credit(n, 0);
        const std::int64_t bound = (n + 1) * (q * w + (p < 0 ? -p : p) + 1);
        bool changed = true;
        while (changed) {
            changed = false;
            for (int u : cls) {
                const bool max = s.owner[u] == Player::One;
                std::int64_t need = max ? INT64_MAX : 0;
                for (const auto& [to, wt] : s.out[u]) {
                    const auto c = cmp(to, root);
                    std::int64_t cand;
                    if (c == 0)
                        cand = credit[to] - (q * wt - p);
                    else if (!max && c > 0)
                        cand = 0;
                    else
                        continue;
                    need = max ? std::min(need, cand) : std::max(need, cand);
                }
                if (need == INT64_MAX)
                    throw DomainError("solver: inconsistent mean-payoff values at " + s.ids[u].str());
                need = std::max<std::int64_t>(need, 0);
                if (need > credit[u]) {
                    credit[u] = need;
                    changed = true;
                    if (need > bound)
                        throw DomainError("solver: energy credits diverge at " + s.ids[u].str());
                }
            }
        }
        for (int u : cls) {
            if (s.owner[u] != Player::One)
                continue;
            std::int64_t best = INT64_MAX;
            for (std::size_t i = 0; i < s.out[u].size(); ++i) {
                const auto& [to, wt] = s.out[u][i];
                if (cmp(to, root) != 0)
                    continue;
                const auto cand = credit[to] - (q * wt - p);
                if (cand < best) {
                    best = cand;
                    sol.choice[u] = static_cast<int>(i);
                }
            }
        }
    }
    return sol;
}

Weight unscale(const Fraction& f, std::int64_t scale) { return Weight{f.num, f.den * scale}; }

// Buchi product for limsup TP >= 0 on the mean-payoff-0 part, with the running
// total clamped to [-L-1, L]; above the range Player 1 wins, below she loses.
struct TpProduct {
    const Scaled* s = nullptr;
    std::vector<int> sign; // of the mean-payoff value
    std::int64_t L = 0;
    int slots = 0;
    int win = 0, lose = 0;

    [[nodiscard]] int id(int v, std::int64_t c) const { return v * slots + static_cast<int>(c + L + 1); }
    [[nodiscard]] int size() const { return lose + 1; }
    [[nodiscard]] int step(int v, std::int64_t c, int edge) const
    {
        const auto& [to, wt] = s->out[v][edge];
        if (sign[to] > 0)
            return win;
        if (sign[to] < 0)
            return lose;
        const auto next = c + wt;
        if (next > L)
            return win;
        if (next < -L - 1)
            return lose;
        return id(to, next);
    }
};

struct TpSolution {
    TpProduct product;
    std::vector<bool> winning;
    std::vector<int> choice; // Player 1 edge index per product state
};

TpSolution solve_tp_product(const Scaled& s, const MpSolution& mp)
{
    TpSolution sol;
    auto& P = sol.product;
    P.s = &s;
    for (const auto& f : mp.value)
        P.sign.push_back(f.num > 0 ? 1 : f.num < 0 ? -1 : 0);
    P.L = static_cast<std::int64_t>(s.n()) * std::max<std::int64_t>(s.wmax, 1);
    P.slots = static_cast<int>(2 * P.L + 2);
    P.win = s.n() * P.slots;
    P.lose = P.win + 1;
    const int N = P.size();
    std::vector<std::vector<int>> succ(N), pred(N);
    std::vector<Player> owner(N, Player::One);
    std::vector<bool> accepting(N, false);
    std::vector<bool> used(N, false);
    for (int v = 0; v < s.n(); ++v) {
        if (P.sign[v] != 0)
            continue;
        for (std::int64_t c = -P.L - 1; c <= P.L; ++c) {
            const int x = P.id(v, c);
            used[x] = true;
            owner[x] = s.owner[v];
            accepting[x] = c >= 0;
            for (int e = 0; e < static_cast<int>(s.out[v].size()); ++e)
                succ[x].push_back(P.step(v, c, e));
        }
    }
    used[P.win] = used[P.lose] = true;
    accepting[P.win] = true;
    succ[P.win] = {P.win};
    succ[P.lose] = {P.lose};
    for (int x = 0; x < N; ++x)
        for (int y : succ[x])
            pred[y].push_back(x);

    std::vector<bool> alive = used;
    std::vector<int> choice(N, -1);
    auto attractor = [&](Player player, const std::vector<bool>& target, bool record) {
        std::vector<bool> in(N, false);
        std::vector<int> count(N, 0);
        std::deque<int> queue;
        for (int x = 0; x < N; ++x) {
            if (!alive[x])
                continue;
            for (int y : succ[x])
                count[x] += alive[y] ? 1 : 0;
            if (target[x]) {
                in[x] = true;
                queue.push_back(x);
            }
        }
        while (!queue.empty()) {
            const int y = queue.front();
            queue.pop_front();
            for (int x : pred[y]) {
                if (!alive[x] || in[x])
                    continue;
                if (owner[x] == player) {
                    in[x] = true;
                    if (record && player == Player::One) {
                        const auto& sx = succ[x];
                        choice[x] = static_cast<int>(std::find(sx.begin(), sx.end(), y) - sx.begin());
                    }
                    queue.push_back(x);
                } else if (--count[x] == 0) {
                    in[x] = true;
                    queue.push_back(x);
                }
            }
        }
        return in;
    };
    while (true) {
        std::vector<bool> target(N, false);
        for (int x = 0; x < N; ++x)
            target[x] = alive[x] && accepting[x];
        std::fill(choice.begin(), choice.end(), -1);
        auto attracted = attractor(Player::One, target, true);
        std::vector<bool> trap(N, false);
        bool any = false;
        for (int x = 0; x < N; ++x)
            if (alive[x] && !attracted[x]) {
                trap[x] = true;
                any = true;
            }
        if (!any)
            break;
        auto lost = attractor(Player::Two, trap, false);
        for (int x = 0; x < N; ++x)
            if (lost[x])
                alive[x] = false;
    }
    // Accepting Player 1 states stay inside the region.
    for (int x = 0; x < N; ++x) {
        if (!alive[x] || owner[x] != Player::One || choice[x] >= 0)
            continue;
        for (std::size_t e = 0; e < succ[x].size(); ++e)
            if (alive[succ[x][e]]) {
                choice[x] = static_cast<int>(e);
                break;
            }
    }
    sol.winning = std::move(alive);
    sol.choice = std::move(choice);
    return sol;
}

struct TpAll {
    Scaled scaled;
    MpSolution mp;
    TpSolution tp;
    std::vector<Extended> value; // unscaled
};

std::shared_ptr<TpAll> solve_tp_all(const ExplicitArena& arena)
{
    auto all = std::make_shared<TpAll>();
    all->scaled = scale_arena(arena);
    all->mp = solve_mp(all->scaled);
    all->tp = solve_tp_product(all->scaled, all->mp);
    all->tp.product.s = &all->scaled;
    const auto& P = all->tp.product;
    for (int v = 0; v < all->scaled.n(); ++v) {
        if (P.sign[v] > 0) {
            all->value.push_back(Extended::pos_inf());
            continue;
        }
        if (P.sign[v] < 0) {
            all->value.push_back(Extended::neg_inf());
            continue;
        }
        std::optional<std::int64_t> least;
        for (std::int64_t c = -P.L - 1; c <= P.L && !least; ++c)
            if (all->tp.winning[P.id(v, c)])
                least = c;
        if (!least)
            throw DomainError("solver: no winning total at " + all->scaled.ids[v].str());
        all->value.push_back(Weight{-*least, all->scaled.scale});
    }
    return all;
}

Extended plus(const Weight& w, const Extended& x)
{
    if (!x.finite())
        return x;
    return Extended{w + x.value()};
}

} // namespace

const Extended& ValueMap::at(const VertexId& v) const
{
    auto it = values.find(v);
    if (it == values.end())
        throw DomainError("no value for vertex " + v.str());
    return it->second;
}

ValueMap solve_values(const ExplicitArena& arena, PayoffKind family)
{
    ValueMap out;
    out.family = family;
    if (family == PayoffKind::MP) {
        auto s = scale_arena(arena);
        auto mp = solve_mp(s);
        MemorylessTable table;
        table.fallback = Fallback::Error;
        for (int v = 0; v < s.n(); ++v) {
            out.values.emplace(s.ids[v], Extended{unscale(mp.value[v], s.scale)});
            if (mp.choice[v] >= 0)
                table.moves.emplace(s.ids[v], s.edges[v][mp.choice[v]]);
        }
        out.witness = make_memoryless("mp_optimal", Player::One, std::move(table));
        return out;
    }
    auto all = solve_tp_all(arena);
    for (int v = 0; v < all->scaled.n(); ++v)
        out.values.emplace(all->scaled.ids[v], all->value[v]);
    return out;
}

Strategy tp_witness(const ExplicitArena& arena, const VertexId& v, const Weight& r)
{
    auto all = solve_tp_all(arena);
    auto it = all->scaled.index.find(v);
    if (it == all->scaled.index.end())
        throw DomainError("tp_witness: unknown vertex " + v.str());
    const auto& P = all->tp.product;
    // Counter in scaled units; r + TP >= 0 iff ceil(r * scale) + scaled TP >= 0.
    mpq_class scaled_r = r.to_mpq() * all->scaled.scale;
    mpz_class c0 = scaled_r.get_num() / scaled_r.get_den();
    if (c0 * scaled_r.get_den() < scaled_r.get_num())
        ++c0;
    const std::int64_t hi = P.L + 1, lo = -P.L - 2;
    std::int64_t start = c0 > hi ? hi : c0 < lo ? lo : c0.get_si();
    auto update = [all, hi, lo](const Memory& m, const Edge& e) {
        if (m[0] >= hi || m[0] <= lo)
            return m;
        auto w = e.weight * Weight{all->scaled.scale};
        auto next = m[0] + w.small_num();
        return Memory{std::clamp(next, lo, hi)};
    };
    auto choose = [all, hi, lo](const Memory& m, const VertexId& u, std::span<const Edge> out) {
        const auto& S = all->scaled;
        const auto& Pr = all->tp.product;
        auto idx = S.index.find(u);
        if (idx == S.index.end())
            return out.front();
        const int x = idx->second;
        int edge = -1;
        if (Pr.sign[x] > 0 || (Pr.sign[x] == 0 && m[0] >= hi))
            edge = all->mp.choice[x];
        else if (Pr.sign[x] == 0 && m[0] > lo)
            edge = all->tp.choice[Pr.id(x, m[0])];
        if (edge < 0)
            return out.front();
        return S.edges[x][edge];
    };
    return make_scripted("tp_witness", Player::One, Memory{start}, update, choose);
}

std::vector<VertexId> mp_winning_region(const ValueMap& mp)
{
    std::vector<VertexId> out;
    for (const auto& [v, val] : mp.values)
        if (val >= Extended{Weight{0}})
            out.push_back(v);
    return out;
}

bool SafeStrategy::in_region(const VertexId& v, const Weight& r) const
{
    const auto& val = tp.at(v);
    if (val.kind() == Extended::Kind::PosInf)
        return true;
    if (val.kind() == Extended::Kind::NegInf)
        return false;
    return (r + val.value()).sign() >= 0;
}

SafeStrategy sigma_safe(const ExplicitArena& arena) { return sigma_safe(arena, solve_values(arena, PayoffKind::TP)); }

SafeStrategy sigma_safe(const ExplicitArena& arena, const ValueMap& tp)
{
    MemorylessTable table;
    for (const auto& [v, node] : arena.nodes()) {
        if (node.owner != Player::One)
            continue;
        auto edges = node.edges;
        std::sort(edges.begin(), edges.end());
        std::optional<Extended> best;
        for (const auto& e : edges) {
            auto score = plus(e.weight, tp.at(e.to));
            if (!best || score > *best) {
                best = score;
                table.moves[v] = e;
            }
        }
    }
    return SafeStrategy{make_memoryless("sigma_safe", Player::One, std::move(table)), tp};
}

ValueMap brute_force_values(const ExplicitArena& arena, PayoffKind family, std::size_t max_profiles)
{
    auto s = scale_arena(arena);
    std::vector<int> mine, theirs;
    double profiles = 1;
    for (int v = 0; v < s.n(); ++v) {
        (s.owner[v] == Player::One ? mine : theirs).push_back(v);
        profiles *= static_cast<double>(s.out[v].size());
    }
    if (profiles > static_cast<double>(max_profiles))
        throw DomainError("brute force: too many memoryless profiles");
    std::vector<int> pick(s.n(), 0);
    auto advance = [&](const std::vector<int>& owned) {
        for (int v : owned) {
            if (++pick[v] < static_cast<int>(s.out[v].size()))
                return true;
            pick[v] = 0;
        }
        return false;
    };
    auto lasso_value = [&](int start) {
        std::vector<int> seen(s.n(), -1);
        std::vector<Weight> word;
        int v = start;
        while (seen[v] < 0) {
            seen[v] = static_cast<int>(word.size());
            word.push_back(s.edges[v][pick[v]].weight);
            v = s.out[v][pick[v]].first;
        }
        Lasso l;
        l.prefix.assign(word.begin(), word.begin() + seen[v]);
        l.cycle.assign(word.begin() + seen[v], word.end());
        return lasso_limit(family, Mode::Limsup, l);
    };
    std::vector<std::optional<Extended>> best(s.n());
    for (bool more1 = true; more1; more1 = advance(mine)) {
        std::vector<std::optional<Extended>> worst(s.n());
        for (bool more2 = true; more2; more2 = advance(theirs))
            for (int v = 0; v < s.n(); ++v) {
                auto val = lasso_value(v);
                if (!worst[v] || val < *worst[v])
                    worst[v] = val;
            }
        for (int v = 0; v < s.n(); ++v)
            if (!best[v] || *worst[v] > *best[v])
                best[v] = worst[v];
    }
    ValueMap out;
    out.family = family;
    for (int v = 0; v < s.n(); ++v)
        out.values.emplace(s.ids[v], *best[v]);
    return out;
}

} // namespace qg
