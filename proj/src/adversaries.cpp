#include "qg/adversaries.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "qg/error.hpp"

namespace qg {

namespace {

using nlohmann::json;

std::vector<std::int64_t> int_list(const json& plan, const char* key)
{
    if (!plan.contains(key) || !plan[key].is_array() || plan[key].empty())
        throw ParseError(std::string{"plan needs a non-empty list '"} + key + "'");
    return plan[key].get<std::vector<std::int64_t>>();
}

std::int64_t int_field(const json& plan, const char* key)
{
    if (!plan.contains(key) || !plan[key].is_number_integer())
        throw ParseError(std::string{"plan needs an integer '"} + key + "'");
    return plan[key].get<std::int64_t>();
}

const Edge& edge_to(std::span<const Edge> out, const std::function<bool(const VertexId&)>& pred)
{
    for (const auto& e : out)
        if (pred(e.to))
            return e;
    return out.front();
}

std::int64_t pick(const std::vector<std::int64_t>& xs, std::int64_t r)
{
    return xs[static_cast<std::size_t>(std::min<std::int64_t>(r, static_cast<std::int64_t>(xs.size()) - 1))];
}

Strategy p2_scripted(std::string name, Memory init, Scripted::Update update, Scripted::Choose choose)
{
    return make_scripted(std::move(name), Player::Two, std::move(init), std::move(update), std::move(choose));
}

Memory keep(const Memory& m, const Edge&) { return m; }

// Positions (number of edges played) at which the play sits at a round vertex.
std::vector<std::size_t> positions_at(const PlayRecord& r, const std::function<bool(const VertexId&)>& pred)
{
    std::vector<std::size_t> out;
    if (pred(r.origin))
        out.push_back(0);
    for (std::size_t i = 0; i < r.edges.size(); ++i)
        if (pred(r.edges[i].to))
            out.push_back(i + 1);
    return out;
}

Weight tp_at(const PlayRecord& r, std::size_t pos) { return pos == 0 ? Weight{0} : r.tp[pos - 1]; }

Certificate base_certificate(Certificate::Variant v, const ZooEntry& z, const P1Input& p1, const json& plan,
                             std::size_t horizon, std::string objective)
{
    Certificate c;
    c.variant = v;
    c.arena = z.uri();
    c.start = z.arena.root().str();
    c.p1 = p1.ref;
    c.p2 = plan;
    c.horizon = horizon;
    c.objective = std::move(objective);
    return c;
}

void require_step_counter(const Strategy& s, const std::string& arena)
{
    if (s.player() != Player::One)
        throw DomainError("expected a Player 1 strategy");
    if (!s.step_counter_based())
        throw DomainError("strategy " + s.name() + " (" + to_string(s.kind()) +
                          ") is not a step-counter strategy; the " + arena + " adversary needs one");
}

Memory state_memory(const Strategy& s, std::int64_t m)
{
    if (s.kind() == StrategyKind::Memoryless)
        return Memory{};
    return Memory{m};
}

std::int64_t memory_state(const Memory& m) { return m.empty() ? 0 : m[0]; }

} // namespace

// ---- plans ------------------------------------------------------------------

Strategy plan_strategy(const json& plan, const ZooEntry* zoo)
{
    if (!plan.is_object() || !plan.contains("kind") || !plan["kind"].is_string())
        throw ParseError("plan needs a 'kind'");
    const auto kind = plan["kind"].get<std::string>();
    if (kind == "first_edge")
        return first_edge_strategy(Player::Two);
    if (kind == "named") {
        if (!zoo)
            throw DomainError("named plans need a zoo arena");
        auto s = zoo->strategy(plan.value("name", std::string{}));
        if (s.player() != Player::Two)
            throw DomainError("plan strategy " + s.name() + " belongs to Player 1");
        return s;
    }
    if (kind == "table") {
        auto s = parse_strategy(plan.value("text", std::string{}));
        if (s.player() != Player::Two)
            throw DomainError("plan strategy " + s.name() + " belongs to Player 1");
        return s;
    }
    if (kind == "a4_route") {
        const auto entry = int_field(plan, "entry");
        auto route = int_list(plan, "route");
        const auto gap = int_field(plan, "gap");
        if (entry < 0 || gap < 1)
            throw ParseError("a4_route needs entry >= 0 and gap >= 1");
        std::vector<std::int64_t> seq{entry};
        for (auto x : route) {
            if (x <= seq.back())
                throw ParseError("a4_route indices must increase");
            seq.push_back(x);
        }
        auto next_after = [seq, gap](std::int64_t i) {
            auto it = std::upper_bound(seq.begin(), seq.end(), i);
            if (it != seq.end())
                return *it;
            const auto last = seq.back();
            return last + ((i - last) / gap + 1) * gap;
        };
        return p2_scripted("a4_route", Memory{}, keep,
                           [entry, next_after](const Memory&, const VertexId& v, std::span<const Edge> out) {
                               if (v.name() == "s" && v.param(0) >= 0) {
                                   const bool enter = v.param(0) >= entry;
                                   return edge_to(out, [&](const VertexId& w) { return (w.name() == "e") == enter; });
                               }
                               if (v.name() == "g") {
                                   const bool drop = v.param(0) + v.param(1) >= next_after(v.param(0));
                                   return edge_to(out, [&](const VertexId& w) { return (w.name() == "d") == drop; });
                               }
                               return out.front();
                           });
    }
    if (kind == "a3_entry") {
        const auto entry = int_field(plan, "entry");
        return p2_scripted("a3_entry", Memory{}, keep,
                           [entry](const Memory&, const VertexId& v, std::span<const Edge> out) {
                               if (v.name() != "s")
                                   return out.front();
                               const bool enter = v.param(0) >= entry;
                               return edge_to(out, [&](const VertexId& w) { return (w.name() != "s") == enter; });
                           });
    }
    if (kind == "a1_rounds") {
        auto picks = int_list(plan, "picks");
        return p2_scripted(
            "a1_rounds", Memory{0},
            [](const Memory& m, const Edge& e) { return e.from.name() == "s" ? Memory{m[0] + 1} : m; },
            [picks](const Memory& m, const VertexId& v, std::span<const Edge> out) {
                if (v.name() != "s")
                    return out.front();
                const Weight w{-pick(picks, m[0])};
                for (const auto& e : out)
                    if (e.weight == w)
                        return e;
                throw DomainError("a1_rounds: no edge of weight " + w.str() + " at " + v.str());
            });
    }
    if (kind == "a2_climbs") {
        auto climbs = int_list(plan, "climbs");
        return p2_scripted("a2_climbs", Memory{}, keep,
                           [climbs](const Memory&, const VertexId& v, std::span<const Edge> out) {
                               if (v.name() != "a")
                                   return out.front();
                               const bool drop = v.param(1) >= std::max<std::int64_t>(1, pick(climbs, v.param(0)));
                               return edge_to(out, [&](const VertexId& w) { return (w.name() == "b") == drop; });
                           });
    }
    if (kind == "buchib_lengths") {
        auto lengths = int_list(plan, "lengths");
        return p2_scripted(
            "buchib_lengths", Memory{0},
            [](const Memory& m, const Edge& e) { return e.from.name() == "u" ? Memory{m[0] + 1} : m; },
            [lengths](const Memory& m, const VertexId& v, std::span<const Edge> out) {
                if (v.name() != "u")
                    return out.front();
                const auto l = pick(lengths, m[0]);
                return edge_to(out, [&](const VertexId& w) {
                    return l <= 1 ? w.name() == "v" : w.name() == "c" && w.param(0) == l;
                });
            });
    }
    throw ParseError("unknown plan kind '" + kind + "'");
}

// ---- Ramsey labels ------------------------------------------------------------

json RamseyLabel::to_json() const
{
    std::vector<int> e;
    for (bool b : exits)
        e.push_back(b ? 1 : 0);
    return json{{"exits", e}, {"next", next}};
}

RamseyLabel RamseyLabel::from_json(const json& j)
{
    RamseyLabel l;
    for (int b : j.at("exits").get<std::vector<int>>())
        l.exits.push_back(b != 0);
    l.next = j.at("next").get<std::vector<std::int64_t>>();
    return l;
}

std::int64_t memory_states(const Strategy& s)
{
    if (s.kind() == StrategyKind::Memoryless)
        return 1;
    if (const auto* t = s.as<FiniteMemoryTable>())
        return t->states;
    throw DomainError("strategy " + s.name() + " (" + to_string(s.kind()) + ") is not a finite-memory strategy");
}

RamseyLabel ramsey_label(const Arena& a4, const Strategy& s, std::int64_t i, std::int64_t j)
{
    if (i < 0 || j < 1)
        throw DomainError("ramsey_label needs i >= 0 and j >= 1");
    const auto K = memory_states(s);
    RamseyLabel label;
    const VertexId t{"t", {i}};
    auto at_t = a4.expand(t);
    for (std::int64_t m = 0; m < K; ++m) {
        Memory mem = state_memory(s, m);
        label.exits.push_back(s.choose(mem, t, at_t->edges).to.name() == "r0");
        VertexId cur = t;
        const VertexId goal{"t", {i + j}};
        do {
            auto x = a4.expand(cur);
            const Edge* e = &x->edges.front();
            if (cur.name() == "t")
                e = &edge_to(x->edges, [](const VertexId& w) { return w.name() == "g"; });
            else if (cur.name() == "g")
                e = &edge_to(x->edges,
                             [&](const VertexId& w) { return (w.name() == "d") == (cur.param(1) >= j); });
            mem = s.update(mem, *e);
            cur = e->to;
        } while (cur != goal);
        label.next.push_back(memory_state(mem));
    }
    return label;
}

bool gap_uniform(const Strategy& s)
{
    if (const auto* t = s.as<MemorylessTable>()) {
        if (!t->moves.empty())
            return false;
        for (const auto& [from, cm] : t->class_moves)
            if (cm.weight)
                return false;
        return true;
    }
    if (const auto* t = s.as<FiniteMemoryTable>()) {
        if (!t->moves.empty() || !t->edge_updates.empty())
            return false;
        for (const auto& [key, cm] : t->class_moves)
            if (cm.weight)
                return false;
        for (const auto& [from, pattern, to] : t->pattern_updates)
            if (!pattern.by_name)
                return false;
        return true;
    }
    return false;
}

json AdversaryPlan::to_json() const
{
    return json{{"kind", "a4_route"}, {"entry", entry}, {"route", route}, {"gap", gap}};
}

std::string to_string(AdversaryResult::Status s)
{
    switch (s) {
    case AdversaryResult::Status::Defeated:
        return "defeated";
    case AdversaryResult::Status::Partial:
        return "partial";
    case AdversaryResult::Status::Inconclusive:
        return "inconclusive";
    case AdversaryResult::Status::Failed:
        return "failed";
    }
    return "?";
}

std::optional<AdversaryPlan> find_ramsey_plan(const Arena& a4, const Strategy& s, std::size_t window)
{
    const auto K = memory_states(s);
    const bool uniform = gap_uniform(s);
    const auto W = static_cast<std::int64_t>(window);
    const std::size_t size = static_cast<std::size_t>(K) + 2;
    std::map<std::pair<std::int64_t, std::int64_t>, RamseyLabel> cache;
    auto label = [&](std::int64_t a, std::int64_t b) -> const RamseyLabel& {
        std::pair key{uniform ? 0 : a, b - a};
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, ramsey_label(a4, s, uniform ? K : a, b - a)).first;
        return it->second;
    };
    std::size_t budget = 2'000'000;
    std::vector<std::int64_t> chosen;
    RamseyLabel target;
    std::function<bool()> extend = [&]() -> bool {
        if (chosen.size() == size)
            return true;
        for (std::int64_t c = chosen.back() + 2; c <= W; ++c) {
            if (budget == 0)
                return false;
            bool ok = true;
            for (std::size_t x = 0; x < chosen.size() && ok; ++x) {
                --budget;
                const auto& l = label(chosen[x], c);
                if (chosen.size() == 1)
                    target = l;
                ok = l == target;
            }
            if (!ok)
                continue;
            chosen.push_back(c);
            if (extend())
                return true;
            chosen.pop_back();
        }
        return false;
    };
    const std::int64_t last_start = uniform ? K : W;
    for (std::int64_t l0 = K; l0 <= last_start && budget > 0; ++l0) {
        chosen = {l0};
        if (extend()) {
            AdversaryPlan plan;
            plan.entry = chosen.front();
            plan.route.assign(chosen.begin() + 1, chosen.end());
            plan.gap = chosen[1] - chosen[0];
            plan.clique = chosen;
            plan.label = target;
            plan.window = window;
            plan.uniform = uniform;
            return plan;
        }
    }
    return std::nullopt;
}

AdversaryResult ramsey_adversary(const ZooEntry& a4, const P1Input& p1, std::size_t window, std::size_t horizon)
{
    if (a4.name != "a4" && a4.name != "a4guarded")
        throw DomainError("the Ramsey adversary works on zoo:a4 and zoo:a4guarded, not " + a4.name);
    const bool guarded = a4.name == "a4guarded";
    const Strategy& s = p1.strategy;
    const auto K = memory_states(s);
    AdversaryResult result;
    auto plan = find_ramsey_plan(a4.arena, s, window);
    if (!plan) {
        result.status = AdversaryResult::Status::Inconclusive;
        result.note = "no monochromatic index clique of size " + std::to_string(K + 2) + " within window " +
                      std::to_string(window) + "; try a larger window";
        return result;
    }
    result.ramsey = plan;
    result.plan = plan->to_json();
    // Enough rounds for the memory at round starts to repeat twice after the route.
    const std::size_t rounds = plan->route.size() + 2 * static_cast<std::size_t>(K) + 4;
    std::size_t needed = 3 * static_cast<std::size_t>(plan->entry + 1) + (guarded ? 1 : 0) + 1;
    {
        std::int64_t at = plan->entry;
        for (std::size_t r = 0; r < rounds; ++r) {
            const auto next = r < plan->route.size() ? plan->route[r] : at + plan->gap;
            needed += 3 * static_cast<std::size_t>(next - at);
            at = next;
        }
    }
    horizon = std::max(horizon, needed);
    Strategy p2 = plan_strategy(result.plan, &a4);
    auto rec = play(a4.arena, a4.arena.root(), s, p2, horizon);
    const std::string objective = guarded ? "tp:liminf:>:0" : "tp:liminf:>=:0";
    json clique{{"indices", plan->clique}, {"label", plan->label.to_json()}};
    if (rec.end == PlayRecord::End::Sink) {
        std::int64_t delays = 0;
        for (const auto& e : rec.edges)
            delays += e.from.name() == "t" && e.to.name() == "g" ? 1 : 0;
        const std::int64_t offset = guarded ? 0 : -1;
        const std::int64_t threshold = guarded ? 1 : 0;
        auto c = base_certificate(Certificate::Variant::EarlyExitNegative, a4, p1, result.plan, horizon, objective);
        c.claim = {{"final_tp", weight_json(rec.final_tp())}, {"threshold", threshold}, {"entry", plan->entry},
                   {"delays", delays}, {"offset", offset}, {"clique", clique}};
        result.status = rec.final_tp() < Weight{threshold} ? AdversaryResult::Status::Defeated
                                                            : AdversaryResult::Status::Failed;
        if (result.status == AdversaryResult::Status::Failed)
            result.note = "strategy exited after " + std::to_string(delays) + " delays with TP " +
                          rec.final_tp().str();
        result.certificate = std::move(c);
        result.play = std::move(rec);
        return result;
    }
    auto starts = positions_at(rec, [](const VertexId& v) { return v.name() == "t"; });
    std::vector<Memory> mem;
    for (auto p : starts)
        mem.push_back(p == 0 ? s.initial() : rec.mem1[p - 1]);
    std::optional<std::pair<std::size_t, std::size_t>> cycle;
    for (std::size_t c = plan->route.size(); c < mem.size() && !cycle; ++c)
        for (std::size_t p = 1; c + 2 * p < mem.size() && !cycle; ++p) {
            bool periodic = true;
            for (std::size_t r = c; r + p < mem.size() && periodic; ++r)
                periodic = mem[r] == mem[r + p];
            if (periodic)
                cycle = {c, p};
        }
    if (!cycle) {
        result.status = AdversaryResult::Status::Inconclusive;
        result.note = "no repeated memory state at round starts within the horizon";
        result.play = std::move(rec);
        return result;
    }
    std::int64_t elevation = plan->gap;
    for (auto x : plan->route)
        (void)x;
    for (std::size_t i = 1; i < plan->clique.size(); ++i)
        elevation = std::max(elevation, plan->clique[i] - plan->clique[i - 1]);
    auto c = base_certificate(Certificate::Variant::Divergence, a4, p1, result.plan, horizon, objective);
    c.claim = {{"round_vertex", "t"},   {"round_starts", starts}, {"cycle_start", cycle->first},
               {"period", cycle->second}, {"decrease", 1},        {"elevation", elevation},
               {"clique", clique}};
    result.status = AdversaryResult::Status::Defeated;
    result.certificate = std::move(c);
    result.play = std::move(rec);
    return result;
}

// ---- outbidding finite memory -----------------------------------------------------

namespace {

AdversaryResult defeat_a1prime(const ZooEntry& z, const P1Input& p1, std::size_t rounds)
{
    const Strategy& s = p1.strategy;
    (void)memory_states(s);
    const auto B = z.params.at("B");
    const VertexId sv{"s"}, tv{"t"};
    auto at_s = z.arena.expand(sv);
    auto at_t = z.arena.expand(tv);
    std::set<Memory> seen{s.initial()};
    std::vector<Memory> todo{s.initial()};
    std::int64_t f = 0;
    while (!todo.empty()) {
        Memory m = todo.back();
        todo.pop_back();
        for (const auto& bid : at_s->edges) {
            Memory m1 = s.update(m, bid);
            Edge answer = s.choose(m1, tv, at_t->edges);
            f = std::max(f, answer.weight.small_num());
            Memory m2 = s.update(m1, answer);
            if (seen.insert(m2).second)
                todo.push_back(m2);
            if (seen.size() > 100000)
                throw DomainError("strategy memory does not stay finite");
        }
    }
    AdversaryResult result;
    // The cap binds as soon as the outbidding pick reaches the largest bid.
    const bool capped = f + 1 >= B;
    const std::int64_t bid = std::min(f + 1, B);
    result.plan = json{{"kind", "a1_rounds"}, {"picks", {bid}}};
    const std::size_t horizon = 2 * rounds;
    auto rec = play(z.arena, sv, s, plan_strategy(result.plan, &z), horizon);
    auto starts = positions_at(rec, [](const VertexId& v) { return v.name() == "s"; });
    std::optional<Weight> worst;
    for (std::size_t r = 0; r + 1 < starts.size(); ++r) {
        auto drop = tp_at(rec, starts[r]) - tp_at(rec, starts[r + 1]);
        if (!worst || drop < *worst)
            worst = drop;
    }
    auto c = base_certificate(Certificate::Variant::RoundDecrease, z, p1, result.plan, horizon, "mp:limsup:>=:0");
    c.claim = {{"round_vertex", "s"}, {"round_starts", starts}, {"largest_answer", f}};
    if (!capped) {
        c.claim["decrease"] = 1;
        c.claim["mp_bound"] = "-1/2";
        result.status = AdversaryResult::Status::Defeated;
    } else {
        c.claim["decrease"] = worst && worst->sign() > 0 ? worst->small_num() : 0;
        c.claim["partial"] = true;
        result.status = AdversaryResult::Status::Partial;
        result.note = "truncation binds: the strategy answers up to " + std::to_string(f) + " and bids stop at " +
                      std::to_string(B);
    }
    result.certificate = std::move(c);
    result.play = std::move(rec);
    return result;
}

AdversaryResult defeat_a2(const ZooEntry& z, const P1Input& p1, std::size_t rounds)
{
    const Strategy& s = p1.strategy;
    (void)memory_states(s);
    constexpr std::int64_t descent_cap = 4096;
    constexpr std::int64_t climb_cap = 4096;
    const Arena& arena = z.arena;
    // Descent length of Player 1 from b[i,0] with memory m; nullopt if she does not leave within the cap.
    auto descent = [&](std::int64_t i, Memory m) -> std::pair<std::optional<std::int64_t>, Memory> {
        for (std::int64_t d = 0; d < descent_cap; ++d) {
            const VertexId b{"b", {i, d}};
            auto x = arena.expand(b);
            Edge e = s.choose(m, b, x->edges);
            m = s.update(m, e);
            if (e.to.name() == "a")
                return {d, m};
        }
        return {std::nullopt, m};
    };
    std::vector<std::int64_t> climbs;
    std::vector<std::int64_t> answers;
    Memory m = s.initial();
    bool endless = false;
    std::int64_t f_max = 0;
    std::size_t steps = 0;
    for (std::size_t i = 0; i < rounds && !endless; ++i) {
        const auto ii = static_cast<std::int64_t>(i);
        Memory climb = m;
        std::optional<std::int64_t> chosen;
        std::int64_t f = 0;
        Memory after;
        std::optional<std::int64_t> reply;
        for (std::int64_t j = 1; j <= climb_cap; ++j) {
            climb = s.update(climb, Edge{VertexId{"a", {ii, j - 1}}, Weight{1}, VertexId{"a", {ii, j}}});
            Memory dropped = s.update(climb, Edge{VertexId{"a", {ii, j}}, Weight{-2 * j}, VertexId{"b", {ii, 0}}});
            auto [d, mem] = descent(ii, dropped);
            if (d)
                f = std::max(f, *d);
            if (!chosen && (!d || *d <= j - 1)) {
                chosen = j;
                after = mem;
                reply = d;
            }
            if (chosen && j >= 32)
                break;
        }
        if (!chosen)
            throw DomainError("no climb up to " + std::to_string(climb_cap) + " outbids the strategy");
        f_max = std::max(f_max, f);
        climbs.push_back(*chosen);
        m = after;
        if (!reply) {
            endless = true;
            steps += static_cast<std::size_t>(*chosen) + 1 + 200;
        } else {
            answers.push_back(*reply);
            steps += static_cast<std::size_t>(*chosen) + 1 + static_cast<std::size_t>(*reply) + 1;
        }
    }
    AdversaryResult result;
    result.plan = json{{"kind", "a2_climbs"}, {"climbs", climbs}};
    auto rec = play(arena, arena.root(), s, plan_strategy(result.plan, &z), steps);
    if (endless) {
        // The last drop position: Player 1 keeps descending from there on.
        std::size_t from = 0;
        for (std::size_t i = 0; i < rec.edges.size(); ++i)
            if (rec.edges[i].from.name() == "a" && rec.edges[i].to.name() == "b")
                from = i + 1;
        auto c = base_certificate(Certificate::Variant::Stagnation, z, p1, result.plan, steps, "mp:limsup:>=:0");
        c.claim = {{"from_step", from}, {"bound", weight_json(tp_at(rec, from))}};
        result.certificate = std::move(c);
        result.status = AdversaryResult::Status::Defeated;
        result.note = "the strategy never leaves the descent chain within " + std::to_string(descent_cap) + " steps";
    } else {
        auto starts = positions_at(rec, [](const VertexId& v) { return v.name() == "a" && v.param(1) == 0; });
        auto c = base_certificate(Certificate::Variant::RoundDecrease, z, p1, result.plan, steps, "mp:limsup:>=:0");
        c.claim = {{"round_vertex", "a"}, {"round_param", {1, 0}}, {"round_starts", starts}, {"decrease", 1},
                   {"largest_answer", f_max}};
        result.certificate = std::move(c);
        result.status = AdversaryResult::Status::Defeated;
    }
    result.play = std::move(rec);
    return result;
}

} // namespace

AdversaryResult defeat_fm_match(const ZooEntry& arena, const P1Input& p1, std::size_t rounds)
{
    if (arena.name == "a1prime")
        return defeat_a1prime(arena, p1, rounds);
    if (arena.name == "a2")
        return defeat_a2(arena, p1, rounds);
    throw DomainError("defeat_fm_match works on zoo:a1prime and zoo:a2, not " + arena.name);
}

// ---- step counters -------------------------------------------------------------

AdversaryResult defeat_sc_on_a3(const ZooEntry& a3, const P1Input& p1, std::size_t horizon)
{
    if (a3.name != "a3")
        throw DomainError("defeat_sc_on_a3 needs zoo:a3");
    const Strategy& s = p1.strategy;
    require_step_counter(s, "A3");
    AdversaryResult result;
    if (horizon < 2) {
        result.status = AdversaryResult::Status::Inconclusive;
        result.note = "horizon " + std::to_string(horizon) + " covers no decision at a t vertex";
        return result;
    }
    // t_i is only ever reached at step 3i+1, so one history per t_i settles the decision.
    std::optional<std::int64_t> exit_at;
    for (std::int64_t i = 0; 3 * i + 1 < static_cast<std::int64_t>(horizon) && !exit_at; ++i) {
        json entry{{"kind", "a3_entry"}, {"entry", i}};
        auto rec = play(a3.arena, a3.arena.root(), s, plan_strategy(entry, &a3), static_cast<std::size_t>(3 * i + 1));
        if (decide(s, a3.arena, rec.history()).to.name() == "r0")
            exit_at = i;
    }
    const std::int64_t entry = exit_at.value_or(0);
    result.plan = json{{"kind", "a3_entry"}, {"entry", entry}};
    auto rec = play(a3.arena, a3.arena.root(), s, plan_strategy(result.plan, &a3), horizon);
    if (exit_at) {
        auto c = base_certificate(Certificate::Variant::EarlyExitNegative, a3, p1, result.plan, horizon,
                                  "tp:liminf:>=:0");
        c.claim = {{"final_tp", weight_json(rec.final_tp())}, {"threshold", 0}};
        result.status = rec.end == PlayRecord::End::Sink && rec.final_tp().sign() < 0
                            ? AdversaryResult::Status::Defeated
                            : AdversaryResult::Status::Failed;
        result.certificate = std::move(c);
    } else {
        auto c = base_certificate(Certificate::Variant::Stagnation, a3, p1, result.plan, horizon, "tp:liminf:>=:0");
        c.claim = {{"from_step", 1}, {"bound", "-1"}};
        result.status = AdversaryResult::Status::Defeated;
        result.note = "no exit decision within the horizon";
        result.certificate = std::move(c);
    }
    result.play = std::move(rec);
    return result;
}

AdversaryResult defeat_sc_buchi(const ZooEntry& buchib, const P1Input& p1, std::size_t horizon)
{
    if (buchib.name != "buchib")
        throw DomainError("defeat_sc_buchi needs zoo:buchib");
    const Strategy& s = p1.strategy;
    require_step_counter(s, "BuchiB");
    const auto B = buchib.params.at("B");
    const Arena& arena = buchib.arena;
    const VertexId v{"v"}, u{"u"};
    auto path = [&](std::int64_t l) {
        std::vector<Edge> out;
        if (l == 1) {
            out.push_back(Edge{u, Weight{0}, v});
            return out;
        }
        VertexId cur = u;
        for (std::int64_t k = 1; k < l; ++k) {
            VertexId next{"c", {l, k}};
            out.push_back(Edge{cur, Weight{0}, next});
            cur = next;
        }
        out.push_back(Edge{cur, Weight{0}, v});
        return out;
    };
    std::vector<std::int64_t> lengths;
    std::vector<std::size_t> blocked;
    Memory m = s.initial();
    std::size_t pos = 0;
    VertexId cur = v;
    while (pos < horizon) {
        if (cur == v) {
            auto x = arena.expand(v);
            Edge e = s.choose(m, v, x->edges);
            m = s.update(m, e);
            cur = e.to;
            ++pos;
            continue;
        }
        std::optional<std::int64_t> chosen;
        for (std::int64_t l = 1; l <= B && !chosen; ++l) {
            Memory probe = m;
            for (const auto& e : path(l))
                probe = s.update(probe, e);
            auto x = arena.expand(v);
            if (s.choose(probe, v, x->edges).to == u)
                chosen = l;
        }
        if (!chosen) {
            blocked.push_back(pos);
            chosen = 1;
        }
        lengths.push_back(*chosen);
        for (const auto& e : path(*chosen))
            m = s.update(m, e);
        pos += static_cast<std::size_t>(*chosen);
        cur = v;
    }
    AdversaryResult result;
    if (lengths.empty())
        lengths.push_back(1);
    result.plan = json{{"kind", "buchib_lengths"}, {"lengths", lengths}};
    auto rec = play(arena, v, s, plan_strategy(result.plan, &buchib), horizon);
    std::int64_t last[2] = {-1, -1};
    for (std::size_t i = 0; i < rec.edges.size(); ++i)
        last[rec.edges[i].weight == Weight{1} ? 1 : 0] = static_cast<std::int64_t>(i);
    const int colour = last[0] <= last[1] ? 0 : 1;
    const auto from = static_cast<std::size_t>(last[colour] + 1);
    result.play = std::move(rec);
    if (from > horizon / 2) {
        result.status = AdversaryResult::Status::Inconclusive;
        result.note = "both colours recur within the horizon";
        if (!blocked.empty())
            result.note += "; no word length up to B=" + std::to_string(B) + " reaches an exit step from step " +
                           std::to_string(blocked.front());
        return result;
    }
    auto c = base_certificate(Certificate::Variant::ColourStarvation, buchib, p1, result.plan, horizon, "buchi-all:2");
    c.claim = {{"colour", colour}, {"from_edge", from}};
    result.certificate = std::move(c);
    result.status = AdversaryResult::Status::Defeated;
    return result;
}

AdversaryResult defeat_sc_bitarena(const ZooEntry& bitarena, const P1Input& p1, std::size_t horizon)
{
    if (bitarena.name != "bitarena" || bitarena.params.contains("rounds") || bitarena.params.contains("unit"))
        throw DomainError("defeat_sc_bitarena needs the unbounded compact zoo:bitarena");
    const Strategy& s = p1.strategy;
    require_step_counter(s, "bit arena");
    const Arena& arena = bitarena.arena;
    AdversaryResult result;
    const json hold{{"kind", "named"}, {"name", "allzero"}};
    auto quiet = play(arena, arena.root(), s, plan_strategy(hold, &bitarena), horizon);
    bool spikes = false;
    for (const auto& e : quiet.edges)
        spikes = spikes || (e.from.name() == "u" && e.to.name() == "spike_u");
    if (!spikes) {
        result.plan = hold;
        auto c = base_certificate(Certificate::Variant::Stagnation, bitarena, p1, hold, horizon, "tp:limsup:>=:0");
        c.claim = {{"from_step", 1}, {"bound", "-1"}};
        result.certificate = std::move(c);
        result.status = AdversaryResult::Status::Defeated;
        result.play = std::move(quiet);
        return result;
    }
    result.plan = json{{"kind", "named"}, {"name", "allspike"}};
    auto rec = play(arena, arena.root(), s, plan_strategy(result.plan, &bitarena), horizon);
    std::int64_t first_spike = -1;
    for (const auto& e : rec.edges)
        if (e.from.name() == "u" && e.to.name() == "spike_u") {
            first_spike = e.from.param(0);
            break;
        }
    auto starts = positions_at(rec, [](const VertexId& v) { return v.name() == "v" && v.param(0) >= 1; });
    auto c = base_certificate(Certificate::Variant::RoundDecrease, bitarena, p1, result.plan, horizon,
                              "tp:limsup:>=:0");
    c.claim = {{"round_vertex", "v"}, {"round_param_min", {0, 1}}, {"round_starts", starts}, {"decrease", 1}};
    if (first_spike >= 1) {
        c.claim["peak_bound"] = "-1";
        c.claim["from_round"] = first_spike;
    }
    result.certificate = std::move(c);
    result.status = first_spike >= 1 ? AdversaryResult::Status::Defeated : AdversaryResult::Status::Partial;
    if (first_spike < 1)
        result.note = "the strategy spikes only against all-zero play";
    result.play = std::move(rec);
    return result;
}

AdversaryResult defeat(const ZooEntry& arena, const P1Input& p1, const DefeatOptions& options)
{
    const auto& n = arena.name;
    if (n == "a4" || n == "a4guarded")
        return ramsey_adversary(arena, p1, options.window, options.horizon);
    if (n == "a3")
        return defeat_sc_on_a3(arena, p1, options.horizon ? options.horizon : 200);
    if (n == "a1prime" || n == "a2")
        return defeat_fm_match(arena, p1, options.rounds);
    if (n == "buchib")
        return defeat_sc_buchi(arena, p1, options.horizon ? options.horizon : 200);
    if (n == "bitarena")
        return defeat_sc_bitarena(arena, p1, options.horizon ? options.horizon : 4 * 20 + 1);
    throw DomainError("no adversary for zoo:" + n);
}

} // namespace qg
