#include "qg/zoo.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "qg/arena_io.hpp"
#include "qg/error.hpp"

namespace qg {

namespace {

VertexId vx(const char* name) { return VertexId{name}; }
VertexId vx(const char* name, std::initializer_list<std::int64_t> params) { return VertexId{name, params}; }

Expansion expansion(Player owner, std::vector<Edge> edges)
{
    std::sort(edges.begin(), edges.end());
    return Expansion{owner, std::move(edges)};
}

Expansion sink_loop(const VertexId& v, Player owner = Player::One)
{
    return Expansion{owner, {Edge{v, Weight{0}, v}}};
}

[[noreturn]] void unknown_vertex(const VertexId& v, const std::string& arena)
{
    throw DomainError("vertex " + v.str() + " is not part of " + arena);
}

std::int64_t param(const ZooParams& params, const std::string& key, std::int64_t fallback)
{
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void check_keys(const ZooParams& params, std::initializer_list<const char*> allowed, const std::string& name)
{
    for (const auto& [key, value] : params) {
        bool ok = false;
        for (const char* a : allowed)
            ok = ok || key == a;
        if (!ok)
            throw DomainError("zoo entry " + name + " has no parameter '" + key + "'");
    }
}

// "name?k=v&k2=v2"
std::pair<std::string, ZooParams> split_ref(std::string_view ref)
{
    ZooParams params;
    auto q = ref.find('?');
    std::string name{ref.substr(0, q)};
    if (q == std::string_view::npos)
        return {name, params};
    std::string rest{ref.substr(q + 1)};
    std::istringstream in{rest};
    std::string kv;
    while (std::getline(in, kv, '&')) {
        if (kv.empty())
            continue;
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw DomainError("malformed parameter '" + kv + "' in " + std::string{ref});
        try {
            std::size_t used = 0;
            auto value = std::stoll(kv.substr(eq + 1), &used);
            if (used != kv.size() - eq - 1)
                throw std::invalid_argument("trailing");
            params[kv.substr(0, eq)] = value;
        } catch (const std::exception&) {
            throw DomainError("parameter '" + kv + "' needs an integer value");
        }
    }
    return {name, params};
}

std::int64_t as_int(const Weight& w) { return w.small_num(); }

[[noreturn]] void unknown_strategy(std::string_view ref, const std::string& arena)
{
    throw DomainError("zoo entry " + arena + " has no strategy '" + std::string{ref} + "'");
}

Strategy class_memoryless(std::string name, Player player, std::map<std::string, std::string> moves)
{
    MemorylessTable t;
    for (auto& [from, to] : moves)
        t.class_moves[from] = ClassMove{to, std::nullopt};
    return make_memoryless(std::move(name), player, std::move(t));
}

// ---- A1 / A1' -----------------------------------------------------------------

Strategy match_plus_one(const char* p2_vertex, const char* p1_vertex)
{
    std::string from{p2_vertex};
    std::string at{p1_vertex};
    return make_scripted(
        "match_plus_one", Player::One, Memory{0},
        [from](const Memory& m, const Edge& e) {
            if (e.from.name() == from)
                return Memory{-as_int(e.weight)};
            return m;
        },
        [at](const Memory& m, const VertexId& v, std::span<const Edge> out) {
            if (v.name() == at) {
                for (const auto& e : out)
                    if (e.weight == Weight{m[0] + 1})
                        return e;
                return out.back();
            }
            return out.front();
        });
}

ZooEntry make_a1(const ZooParams& params, bool repeated)
{
    const std::string name = repeated ? "a1prime" : "a1";
    check_keys(params, {"B"}, name);
    const std::int64_t B = param(params, "B", 10);
    if (B < 1 || B > 100000)
        throw DomainError(name + ": B must be in [1, 100000]");
    auto expand = [B, repeated, name](const VertexId& v) -> Expansion {
        if (!v.params().empty())
            unknown_vertex(v, name);
        std::vector<Edge> edges;
        if (v.name() == "s") {
            for (std::int64_t j = 1; j <= B; ++j)
                edges.push_back(Edge{v, Weight{-j}, vx("t")});
            return expansion(Player::Two, std::move(edges));
        }
        if (v.name() == "t") {
            for (std::int64_t j = 1; j <= B + 1; ++j)
                edges.push_back(Edge{v, Weight{j}, repeated ? vx("s") : vx("q")});
            return expansion(Player::One, std::move(edges));
        }
        if (v.name() == "q" && !repeated)
            return sink_loop(v);
        unknown_vertex(v, name);
    };
    ZooEntry z{.name = name,
               .params = {{"B", B}},
               .provenance = repeated ? "Repeated rounds: Player 2 picks -1..-B, Player 1 answers +1..+(B+1). "
                                        "Every step-counter/finite-memory strategy loses MP-limsup>=0 once "
                                        "Player 2 outbids its maximum (truncated at B)."
                                      : "One round: Player 2 picks -1..-B, Player 1 answers +1..+(B+1) into a "
                                        "zero loop. Answering i+1 to -i wins every TP objective at threshold 0.",
               .arena = Arena{name, {vx("s")}, expand, static_cast<std::size_t>(B + 1)},
               .strategies = {"match_plus_one"}};
    z.strategy = [name](std::string_view ref) -> Strategy {
        if (ref == "match_plus_one")
            return match_plus_one("s", "t");
        unknown_strategy(ref, name);
    };
    return z;
}

// ---- A2 ---------------------------------------------------------------------------

ZooEntry make_a2(const ZooParams& params)
{
    check_keys(params, {}, "a2");
    auto expand = [](const VertexId& v) -> Expansion {
        const auto& p = v.params();
        if (p.size() != 2 || p[0] < 0 || p[1] < 0)
            unknown_vertex(v, "a2");
        const auto i = p[0], j = p[1];
        if (v.name() == "a") {
            std::vector<Edge> edges{Edge{v, Weight{1}, vx("a", {i, j + 1})}};
            if (j >= 1)
                edges.push_back(Edge{v, Weight{-2 * j}, vx("b", {i, 0})});
            return expansion(Player::Two, std::move(edges));
        }
        if (v.name() == "b") {
            std::vector<Edge> edges{Edge{v, Weight{-1}, vx("b", {i, j + 1})}};
            if (j >= 1)
                edges.push_back(Edge{v, Weight{2 * j}, vx("a", {i + 1, 0})});
            return expansion(Player::One, std::move(edges));
        }
        unknown_vertex(v, "a2");
    };
    auto adaptive = [] {
        return make_scripted(
            "adaptive", Player::One, Memory{0},
            [](const Memory& m, const Edge& e) {
                if (e.from.name() == "a" && e.to.name() == "b")
                    return Memory{e.from.param(1)};
                return m;
            },
            [](const Memory& m, const VertexId& v, std::span<const Edge> out) {
                const bool leave = v.param(1) >= m[0] + 1;
                for (const auto& e : out)
                    if ((e.to.name() == "a") == leave)
                        return e;
                return out.front();
            });
    };
    ZooEntry z{.name = "a2",
               .params = {},
               .provenance = "Acyclic unfolding of the repeated bidding game: Player 2 climbs a +1 chain and "
                             "pays -2j, Player 1 descends a -1 chain and collects +2j. Finite memory cannot "
                             "bound Player 2's bid; a step counter can.",
               .arena = Arena{"a2", {vx("a", {0, 0})}, expand, 2},
               .strategies = {"adaptive", "match_plus_one"}};
    z.strategy = [adaptive](std::string_view ref) -> Strategy {
        if (ref == "adaptive" || ref == "match_plus_one")
            return adaptive().renamed(std::string{ref});
        unknown_strategy(ref, "a2");
    };
    z.winning = [](const VertexId&) { return true; };
    return z;
}

// ---- A3 ---------------------------------------------------------------------------

ZooEntry make_a3(const ZooParams& params)
{
    check_keys(params, {}, "a3");
    auto expand = [](const VertexId& v) -> Expansion {
        const auto& p = v.params();
        const auto& n = v.name();
        if (n == "r0" && p.empty())
            return sink_loop(v);
        if (n == "s" && p.size() == 1 && p[0] >= 0) {
            const auto i = p[0];
            VertexId entry = i == 0 ? vx("t", {0}) : vx("e", {i, 1});
            return expansion(Player::Two, {Edge{v, Weight{1}, vx("s", {i + 1})}, Edge{v, Weight{-1}, entry}});
        }
        if (n == "e" && p.size() == 2 && p[0] >= 1 && p[1] >= 1 && p[1] <= 2 * p[0]) {
            const auto i = p[0], l = p[1];
            VertexId next = l == 2 * i ? vx("t", {i}) : vx("e", {i, l + 1});
            return expansion(Player::Two, {Edge{v, Weight{-1}, next}});
        }
        if (n == "t" && p.size() == 1 && p[0] >= 0) {
            const auto i = p[0];
            return expansion(Player::One, {Edge{v, Weight{0}, vx("dl", {i, 1})}, Edge{v, Weight{i}, vx("r0")}});
        }
        if (n == "dl" && p.size() == 2 && p[0] >= 0 && (p[1] == 1 || p[1] == 2)) {
            VertexId next = p[1] == 1 ? vx("dl", {p[0], 2}) : vx("t", {p[0] + 1});
            return expansion(Player::One, {Edge{v, Weight{0}, next}});
        }
        unknown_vertex(v, "a3");
    };
    ZooEntry z{.name = "a3",
               .params = {},
               .provenance = "Equal-length entries: s_i leads to t_i through 2i+1 edges of weight -1 (s chain "
                             "+1), so every history to t_i has length 3i+1 and TP >= -i-1. Delays are three "
                             "0-edges, exiting from t_i pays i. Delay twice then exit wins; no step-counter "
                             "strategy does.",
               .arena = Arena{"a3", {vx("s", {0})}, expand, 2},
               .strategies = {"delay_twice_exit", "always_delay", "random_sc"}};
    z.strategy = [](std::string_view ref) -> Strategy {
        auto [name, p] = split_ref(ref);
        if (name == "delay_twice_exit" && p.empty())
            return delay_then_exit("dl", 2, "delay_twice_exit");
        if (name == "always_delay" && p.empty())
            return class_memoryless("always_delay", Player::One, {{"t", "dl"}});
        if (name == "random_sc")
            return random_a3_table(static_cast<std::uint64_t>(param(p, "seed", 0)), param(p, "horizon", 200));
        unknown_strategy(ref, "a3");
    };
    return z;
}

// ---- A4 ---------------------------------------------------------------------------

Expansion a4_expand(const VertexId& v, bool guarded)
{
    const auto& p = v.params();
    const auto& n = v.name();
    const char* arena = guarded ? "a4guarded" : "a4";
    if (n == "r0" && p.empty())
        return sink_loop(v);
    if (n == "s" && p.size() == 1) {
        const auto i = p[0];
        if (i == -1 && guarded)
            return expansion(Player::Two, {Edge{v, Weight{1}, vx("s", {0})}});
        if (i >= 0)
            return expansion(Player::Two, {Edge{v, Weight{0}, vx("s", {i + 1})}, Edge{v, Weight{0}, vx("e", {i, 1})}});
    }
    if (n == "e" && p.size() == 2 && p[0] >= 0 && p[1] >= 1 && p[1] <= 2 * p[0] + 2) {
        const auto i = p[0], l = p[1];
        VertexId next = l == 2 * i + 2 ? vx("t", {i}) : vx("e", {i, l + 1});
        return expansion(Player::Two, {Edge{v, Weight{-1}, next}});
    }
    if (n == "t" && p.size() == 1 && p[0] >= 0) {
        const auto i = p[0];
        return expansion(Player::One, {Edge{v, Weight{1}, vx("g", {i, 1})}, Edge{v, Weight{i + 1}, vx("r0")}});
    }
    if (n == "g" && p.size() == 2 && p[0] >= 0 && p[1] >= 1) {
        const auto i = p[0], j = p[1];
        return expansion(Player::Two,
                         {Edge{v, Weight{1}, vx("g", {i, j + 1})}, Edge{v, Weight{0}, vx("d", {i, j, 1})}});
    }
    if (n == "d" && p.size() == 3 && p[0] >= 0 && p[1] >= 1 && p[2] >= 1 && p[2] <= 2 * p[1] - 1) {
        const auto i = p[0], j = p[1], l = p[2];
        VertexId next = l == 2 * j - 1 ? vx("t", {i + j}) : vx("d", {i, j, l + 1});
        return expansion(Player::Two, {Edge{v, Weight{-1}, next}});
    }
    unknown_vertex(v, arena);
}

Strategy a4_adaptive()
{
    // memory: [delays still owed, delays made]; -1 owed until Player 2 enters.
    return make_scripted(
        "adaptive", Player::One, Memory{-1, 0},
        [](const Memory& m, const Edge& e) {
            if (e.from.name() == "s" && e.to.name() == "e")
                return Memory{e.from.param(0) + 1, 0};
            if (e.from.name() == "t" && e.to.name() == "g")
                return Memory{m[0], m[1] + 1};
            return m;
        },
        [](const Memory& m, const VertexId& v, std::span<const Edge> out) {
            if (v.name() != "t")
                return out.front();
            const bool exit = m[0] >= 0 && m[1] >= m[0];
            for (const auto& e : out)
                if ((e.to.name() == "r0") == exit)
                    return e;
            return out.front();
        });
}

ZooEntry make_a4(const ZooParams& params, bool guarded)
{
    const std::string name = guarded ? "a4guarded" : "a4";
    check_keys(params, {}, name);
    ZooEntry z{.name = name,
               .params = {},
               .provenance = guarded ? "Delay-gadget arena behind an extra +1 edge s[-1] -> s[0], so that never "
                                       "entering is won for TP-liminf>0 as well."
                                     : "Delay-gadget arena: entry s_k -> t_k has length 2k+3 and payoff -2(k+1); a "
                                       "gadget t_i -> t_{i+j} has length 3j and payoff -j+1; exiting t_i pays "
                                       "i+1. Every path s_0 -> t_k has length 3(k+1). The adaptive strategy wins "
                                       "TP-liminf>=0; no finite-memory + step-counter strategy does.",
               .arena = Arena{name, {guarded ? vx("s", {-1}) : vx("s", {0})},
                              [guarded](const VertexId& v) { return a4_expand(v, guarded); }, 2},
               .strategies = {"adaptive", "delay_twice_exit", "sigma_k", "always_delay", "random_fm"}};
    z.strategy = [name](std::string_view ref) -> Strategy {
        auto [stem, p] = split_ref(ref);
        if (stem == "adaptive" && p.empty())
            return a4_adaptive();
        if (stem == "delay_twice_exit" && p.empty())
            return delay_then_exit("g", 2, "delay_twice_exit");
        if (stem == "always_delay" && p.empty())
            return class_memoryless("always_delay", Player::One, {{"t", "g"}});
        if (stem.rfind("sigma_", 0) == 0 && p.empty()) {
            try {
                auto k = std::stoll(stem.substr(6));
                if (k >= 0 && k < 100000)
                    return delay_then_exit("g", k, stem);
            } catch (const std::exception&) {
            }
        }
        if (stem == "random_fm")
            return random_a4_strategy(static_cast<std::uint64_t>(param(p, "seed", 0)), param(p, "K", 2));
        unknown_strategy(ref, name);
    };
    return z;
}

// ---- bit arena ----------------------------------------------------------------

struct BitShape {
    std::int64_t rounds = 0; // 0: unbounded
    bool unit = false;
};

// Weight of step l (1-based) on a spike path of round i in unit form: i steps up, i+1 down.
std::int64_t unit_spike_weight(std::int64_t i, std::int64_t l) { return l <= i ? 1 : -1; }

Expansion bit_expand(const VertexId& v, BitShape shape)
{
    const auto& p = v.params();
    const auto& n = v.name();
    auto round_vertex = [&](bool upper, std::int64_t i) { return upper ? vx("u", {i}) : vx("v", {i}); };
    if (n == "v" && p.size() == 1 && p[0] >= 0) {
        const auto i = p[0];
        if (i == 0)
            return expansion(Player::Two, {Edge{v, Weight{-1}, vx("v", {1})}});
        if (shape.rounds > 0 && i > shape.rounds)
            return sink_loop(v, Player::Two);
    }
    for (bool upper : {false, true}) {
        const std::string side = upper ? "u" : "v";
        const Player owner = upper ? Player::One : Player::Two;
        const std::string hold = "hold_" + side;
        const std::string spike = "spike_" + side;
        // Round vertices.
        if (n == side && p.size() == 1 && p[0] >= 1 && (shape.rounds == 0 || p[0] <= shape.rounds)) {
            const auto i = p[0];
            if (!shape.unit)
                return expansion(owner, {Edge{v, Weight{0}, VertexId{hold, {i}}}, Edge{v, Weight{i}, VertexId{spike, {i}}}});
            return expansion(owner, {Edge{v, Weight{0}, VertexId{hold, {i, 1}}}, Edge{v, Weight{1}, VertexId{spike, {i, 1}}}});
        }
        const VertexId after = upper ? round_vertex(false, p.empty() ? 0 : p[0] + 1) : round_vertex(true, p.empty() ? 0 : p[0]);
        if (!shape.unit && p.size() == 1 && p[0] >= 1 && (shape.rounds == 0 || p[0] <= shape.rounds)) {
            if (n == hold)
                return expansion(owner, {Edge{v, Weight{0}, after}});
            if (n == spike)
                return expansion(owner, {Edge{v, Weight{-p[0] - 1}, after}});
        }
        if (shape.unit && p.size() == 2 && p[0] >= 1 && (shape.rounds == 0 || p[0] <= shape.rounds) && p[1] >= 1 &&
            p[1] <= 2 * p[0]) {
            const auto i = p[0], l = p[1];
            if (n == hold) {
                VertexId next = l == 2 * i ? after : VertexId{hold, {i, l + 1}};
                return expansion(owner, {Edge{v, Weight{0}, next}});
            }
            if (n == spike) {
                VertexId next = l == 2 * i ? after : VertexId{spike, {i, l + 1}};
                return expansion(owner, {Edge{v, Weight{unit_spike_weight(i, l + 1)}, next}});
            }
        }
    }
    unknown_vertex(v, "bitarena");
}

// Value of limsup TP from each vertex of the unbounded bit arena.
Extended bit_value(const VertexId& v, BitShape shape)
{
    const auto& n = v.name();
    const auto& p = v.params();
    if (n == "v")
        return Weight{p[0]};
    if (n == "u" || n == "hold_v" || n == "hold_u")
        return Weight{p[0] + 1};
    if (n == "spike_v" || n == "spike_u") {
        const auto i = p[0];
        if (!shape.unit)
            return Weight{0};
        const auto l = p[1];
        const auto climbed = l <= i ? l : 2 * i - l;
        return Weight{i - climbed};
    }
    throw DomainError("no value for " + v.str());
}

Strategy bit_opposite()
{
    FiniteMemoryTable t;
    t.states = 2;
    t.class_moves[{"u", 0}] = ClassMove{"spike_u", std::nullopt};
    t.class_moves[{"u", 1}] = ClassMove{"hold_u", std::nullopt};
    for (std::int64_t s : {0, 1}) {
        t.pattern_updates.emplace_back(s, EdgePattern::names("v", "hold_v"), 0);
        t.pattern_updates.emplace_back(s, EdgePattern::names("v", "spike_v"), 1);
    }
    return make_finite_memory("opposite", Player::One, std::move(t));
}

// Spikes at u_i exactly when the current sum allows it without dropping below -(i+1) at v_{i+1}.
Strategy bit_threshold()
{
    return make_scripted(
        "threshold", Player::One, Memory{0},
        [](const Memory& m, const Edge& e) { return Memory{m[0] + as_int(e.weight)}; },
        [](const Memory& m, const VertexId& v, std::span<const Edge> out) {
            if (v.name() != "u")
                return out.front();
            const bool spike = m[0] >= -v.param(0);
            for (const auto& e : out)
                if ((e.to.name() == "spike_u") == spike)
                    return e;
            return out.front();
        });
}

ZooEntry make_bitarena(const ZooParams& params)
{
    check_keys(params, {"rounds", "unit"}, "bitarena");
    BitShape shape{param(params, "rounds", 0), param(params, "unit", 0) != 0};
    if (shape.rounds < 0 || shape.rounds > 100000)
        throw DomainError("bitarena: rounds must be in [0, 100000]");
    ZooParams kept;
    if (shape.rounds > 0)
        kept["rounds"] = shape.rounds;
    if (shape.unit)
        kept["unit"] = 1;
    ZooEntry z{.name = "bitarena",
               .params = kept,
               .provenance = "Round i: Player 2 at v_i, then Player 1 at u_i, each holds (0) or spikes (i then "
                             "-i-1); v_0 -> v_1 costs 1. Playing the opposite of Player 2 wins TP-limsup>=0 "
                             "with one bit; (v_i, -i) is winning, (v_i, -i-1) is not; no step-counter strategy "
                             "wins.",
               .arena = Arena{"bitarena", {vx("v", {0})}, [shape](const VertexId& v) { return bit_expand(v, shape); }, 2},
               .strategies = {"opposite", "threshold", "safe", "allzero", "allspike"}};
    z.strategy = [](std::string_view ref) -> Strategy {
        if (ref == "opposite")
            return bit_opposite();
        if (ref == "threshold")
            return bit_threshold();
        if (ref == "safe")
            return class_memoryless("safe", Player::One, {{"u", "hold_u"}});
        if (ref == "allzero")
            return class_memoryless("allzero", Player::Two, {{"v", "hold_v"}});
        if (ref == "allspike")
            return class_memoryless("allspike", Player::Two, {{"v", "spike_v"}});
        unknown_strategy(ref, "bitarena");
    };
    if (shape.rounds == 0) {
        z.tp_value = [shape](const VertexId& v) { return bit_value(v, shape); };
        z.safe = [] { return class_memoryless("safe", Player::One, {{"u", "hold_u"}}); };
    }
    return z;
}

// ---- Buchi examples -------------------------------------------------------------

ZooEntry make_buchia(const ZooParams& params)
{
    check_keys(params, {"k"}, "buchia");
    const std::int64_t k = param(params, "k", 4);
    if (k < 2 || k > 10000)
        throw DomainError("buchia: k must be in [2, 10000]");
    auto expand = [k](const VertexId& v) -> Expansion {
        if (v.name() != "x" || v.params().size() != 1 || v.param(0) < 0 || v.param(0) >= k)
            unknown_vertex(v, "buchia");
        const auto i = v.param(0);
        std::vector<Edge> edges;
        if (i + 1 < k)
            edges.push_back(Edge{v, Weight{0}, vx("x", {i + 1})});
        if (i >= 1)
            edges.push_back(Edge{v, Weight{i}, vx("x", {0})});
        return expansion(Player::One, std::move(edges));
    };
    ZooEntry z{.name = "buchia",
               .params = {{"k", k}},
               .provenance = "Colour i is only produced by walking out to x_i and dropping back; seeing all "
                             "colours needs ever longer walks, so with unboundedly many colours no finite "
                             "memory suffices (truncated to k colours).",
               .arena = Arena{"buchia", {vx("x", {0})}, expand, 2},
               .strategies = {"round_robin"}};
    z.strategy = [k](std::string_view ref) -> Strategy {
        if (ref != "round_robin")
            unknown_strategy(ref, "buchia");
        return make_scripted(
            "round_robin", Player::One, Memory{1},
            [k](const Memory& m, const Edge& e) {
                if (e.to.param(0) == 0)
                    return Memory{m[0] % (k - 1) + 1};
                return m;
            },
            [](const Memory& m, const VertexId& v, std::span<const Edge> out) {
                const bool drop = v.param(0) >= m[0];
                for (const auto& e : out)
                    if ((e.to.param(0) == 0) == drop)
                        return e;
                return out.front();
            });
    };
    z.winning = [](const VertexId&) { return true; };
    return z;
}

ZooEntry make_buchib(const ZooParams& params)
{
    check_keys(params, {"B"}, "buchib");
    const std::int64_t B = param(params, "B", 4);
    if (B < 1 || B > 100000)
        throw DomainError("buchib: B must be in [1, 100000]");
    auto expand = [B](const VertexId& v) -> Expansion {
        const auto& n = v.name();
        const auto& p = v.params();
        if (n == "v" && p.empty())
            return expansion(Player::One, {Edge{v, Weight{1}, v}, Edge{v, Weight{0}, vx("u")}});
        if (n == "u" && p.empty()) {
            std::vector<Edge> edges{Edge{v, Weight{0}, vx("v")}};
            for (std::int64_t l = 2; l <= B; ++l)
                edges.push_back(Edge{v, Weight{0}, vx("c", {l, 1})});
            return expansion(Player::Two, std::move(edges));
        }
        if (n == "c" && p.size() == 2 && p[0] >= 2 && p[0] <= B && p[1] >= 1 && p[1] < p[0]) {
            VertexId next = p[1] == p[0] - 1 ? vx("v") : vx("c", {p[0], p[1] + 1});
            return expansion(Player::Two, {Edge{v, Weight{0}, next}});
        }
        unknown_vertex(v, "buchib");
    };
    ZooEntry z{.name = "buchib",
               .params = {{"B", B}},
               .provenance = "Two colours: at v Player 1 loops (colour 1) or leaves (colour 0), and Player 2 "
                             "returns after a colour-0 word of length 1..B. Looping once then leaving wins; "
                             "Player 2 can steer arrivals onto the steps where a step-counter strategy leaves.",
               .arena = Arena{"buchib", {vx("v")}, expand, static_cast<std::size_t>(B)},
               .strategies = {"alternating"}};
    z.strategy = [](std::string_view ref) -> Strategy {
        if (ref != "alternating")
            unknown_strategy(ref, "buchib");
        FiniteMemoryTable t;
        t.states = 2;
        t.class_moves[{"v", 0}] = ClassMove{"v", std::nullopt};
        t.class_moves[{"v", 1}] = ClassMove{"u", std::nullopt};
        t.pattern_updates.emplace_back(0, EdgePattern::names("v", "v"), 1);
        t.pattern_updates.emplace_back(1, EdgePattern::names("v", "u"), 0);
        return make_finite_memory("alternating", Player::One, std::move(t));
    };
    z.winning = [](const VertexId&) { return true; };
    return z;
}

// ---- non-uniform example ------------------------------------------------------------

ZooEntry make_nonuniform(const ZooParams& params)
{
    check_keys(params, {"N"}, "nonuniform");
    const std::int64_t N = param(params, "N", 5);
    if (N < 1 || N > 100000)
        throw DomainError("nonuniform: N must be in [1, 100000]");
    auto expand = [N](const VertexId& v) -> Expansion {
        const auto& n = v.name();
        const auto& p = v.params();
        if (n == "r0" && p.empty())
            return sink_loop(v);
        if (n == "s" && p.size() == 1 && p[0] >= 0 && p[0] < N)
            return expansion(Player::Two, {Edge{v, Weight{-p[0]}, vx("t", {0})}});
        if (n == "t" && p.size() == 1 && p[0] >= 0)
            return expansion(Player::One, {Edge{v, Weight{0}, vx("t", {p[0] + 1})}, Edge{v, Weight{p[0]}, vx("r0")}});
        unknown_vertex(v, "nonuniform");
    };
    std::vector<VertexId> starts;
    for (std::int64_t i = 0; i < N; ++i)
        starts.push_back(vx("s", {i}));
    ZooEntry z{.name = "nonuniform",
               .params = {{"N", N}},
               .provenance = "Starts s_i pay -i and meet on one corridor t_0, t_1, ...; exiting at t_j pays j. "
                             "From s_i Player 1 must exit at some j >= i, but t_j is reached at the same step "
                             "from every start, so no step-counter + 1-bit strategy wins from all starts.",
               .arena = Arena{"nonuniform", starts, expand, 2},
               .strategies = {"adaptive", "exit_at"}};
    z.strategy = [](std::string_view ref) -> Strategy {
        auto [stem, p] = split_ref(ref);
        if (stem == "adaptive" && p.empty())
            return make_scripted(
                "adaptive", Player::One, Memory{0},
                [](const Memory& m, const Edge& e) {
                    if (e.from.name() == "s")
                        return Memory{e.from.param(0)};
                    return m;
                },
                [](const Memory& m, const VertexId& v, std::span<const Edge> out) {
                    const bool exit = v.param(0) >= m[0];
                    for (const auto& e : out)
                        if ((e.to.name() == "r0") == exit)
                            return e;
                    return out.front();
                });
        if (stem == "exit_at") {
            const auto j = param(p, "j", 0);
            return make_scripted(
                "exit_at?j=" + std::to_string(j), Player::One, Memory{},
                [](const Memory& m, const Edge&) { return m; },
                [j](const Memory&, const VertexId& v, std::span<const Edge> out) {
                    const bool exit = v.param(0) >= j;
                    for (const auto& e : out)
                        if ((e.to.name() == "r0") == exit)
                            return e;
                    return out.front();
                });
        }
        unknown_strategy(ref, "nonuniform");
    };
    return z;
}

} // namespace

// ---- public helpers -------------------------------------------------------------

std::string ZooEntry::uri() const
{
    std::string out = "zoo:" + name;
    char sep = '?';
    for (const auto& [k, v] : params) {
        out += sep + k + "=" + std::to_string(v);
        sep = '&';
    }
    return out;
}

bool ZooEntry::has_strategy(std::string_view ref) const
{
    if (!strategy)
        return false;
    try {
        (void)strategy(ref);
        return true;
    } catch (const DomainError&) {
        return false;
    }
}

bool ZooEntry::in_winning_prime(const VertexId& v, const Weight& r) const
{
    if (!tp_value)
        throw DomainError("zoo entry " + name + " has no closed-form TP value");
    Extended val = tp_value(v);
    if (val.kind() == Extended::Kind::PosInf)
        return true;
    if (val.kind() == Extended::Kind::NegInf)
        return false;
    return (r + val.value()).sign() >= 0;
}

std::vector<ZooInfo> zoo_list()
{
    std::vector<ZooInfo> out;
    for (const auto& [name, params] : std::vector<std::pair<std::string, std::string>>{
             {"a1", "B=10"},
             {"a1prime", "B=10"},
             {"a2", ""},
             {"a3", ""},
             {"a4", ""},
             {"a4guarded", ""},
             {"bitarena", "rounds=0 (unbounded), unit=0"},
             {"buchia", "k=4"},
             {"buchib", "B=4"},
             {"nonuniform", "N=5"}})
        out.push_back(ZooInfo{name, params, make_zoo(name).provenance});
    return out;
}

ZooEntry make_zoo(std::string_view name, const ZooParams& params)
{
    if (name == "a1")
        return make_a1(params, false);
    if (name == "a1prime")
        return make_a1(params, true);
    if (name == "a2")
        return make_a2(params);
    if (name == "a3")
        return make_a3(params);
    if (name == "a4")
        return make_a4(params, false);
    if (name == "a4guarded")
        return make_a4(params, true);
    if (name == "bitarena")
        return make_bitarena(params);
    if (name == "buchia")
        return make_buchia(params);
    if (name == "buchib")
        return make_buchib(params);
    if (name == "nonuniform")
        return make_nonuniform(params);
    throw DomainError("unknown zoo entry '" + std::string{name} + "'");
}

bool is_zoo_uri(std::string_view text) { return text.rfind("zoo:", 0) == 0; }

ZooEntry zoo_from_uri(std::string_view uri)
{
    if (!is_zoo_uri(uri))
        throw DomainError("not a zoo URI: " + std::string{uri});
    auto [name, params] = split_ref(uri.substr(4));
    return make_zoo(name, params);
}

Arena load_arena(std::string_view source)
{
    if (is_zoo_uri(source))
        return zoo_from_uri(source).arena;
    std::ifstream in{std::string{source}};
    if (!in)
        throw DomainError("cannot read arena file " + std::string{source});
    std::stringstream buf;
    buf << in.rdbuf();
    return Arena{parse_arena(buf.str())};
}

Strategy delay_then_exit(std::string_view delay_class, std::int64_t delays, std::string name)
{
    FiniteMemoryTable t;
    t.states = delays + 1;
    for (std::int64_t s = 0; s < delays; ++s) {
        t.class_moves[{"t", s}] = ClassMove{std::string{delay_class}, std::nullopt};
        t.pattern_updates.emplace_back(s, EdgePattern::names("t", std::string{delay_class}), s + 1);
    }
    t.class_moves[{"t", delays}] = ClassMove{"r0", std::nullopt};
    return make_finite_memory(std::move(name), Player::One, std::move(t));
}

Strategy random_a4_strategy(std::uint64_t seed, std::int64_t states)
{
    if (states < 1 || states > 64)
        throw DomainError("random_fm: K must be in [1, 64]");
    std::mt19937_64 rng{seed};
    FiniteMemoryTable t;
    t.states = states;
    std::uniform_int_distribution<std::int64_t> any_state{0, states - 1};
    std::bernoulli_distribution exits{0.35};
    for (std::int64_t s = 0; s < states; ++s)
        t.class_moves[{"t", s}] = ClassMove{exits(rng) ? "r0" : "g", std::nullopt};
    static const std::pair<const char*, const char*> classes[] = {
        {"s", "s"}, {"s", "e"}, {"e", "e"}, {"e", "t"}, {"t", "g"}, {"g", "g"}, {"g", "d"}, {"d", "d"}, {"d", "t"}};
    std::bernoulli_distribution keeps{0.4};
    for (std::int64_t s = 0; s < states; ++s)
        for (const auto& [from, to] : classes) {
            auto next = keeps(rng) ? s : any_state(rng);
            if (next != s)
                t.pattern_updates.emplace_back(s, EdgePattern::names(from, to), next);
        }
    return make_finite_memory("random_fm?seed=" + std::to_string(seed) + "&K=" + std::to_string(states), Player::One,
                              std::move(t));
}

Strategy random_a3_table(std::uint64_t seed, std::int64_t horizon)
{
    if (horizon < 1)
        throw DomainError("random_sc: horizon must be positive");
    std::mt19937_64 rng{seed};
    static const double rates[] = {0.0, 0.05, 0.15, 0.4};
    std::bernoulli_distribution exits{rates[rng() % 4]};
    StepCounterTable t;
    t.horizon = horizon;
    // t_i is reached at step 3i+1 from s_0.
    for (std::int64_t i = 0; 3 * i + 1 < horizon; ++i) {
        VertexId v = vx("t", {i});
        const bool exit = exits(rng);
        t.moves[{v, 3 * i + 1}] =
            exit ? Edge{v, Weight{i}, vx("r0")} : Edge{v, Weight{0}, vx("dl", {i, 1})};
    }
    return make_step_counter("random_sc?seed=" + std::to_string(seed) + "&horizon=" + std::to_string(horizon),
                             Player::One, std::move(t));
}

} // namespace qg

namespace qg {

Strategy random_step_counter(const Arena& arena, std::uint64_t seed, std::int64_t horizon, std::size_t max_entries)
{
    if (horizon < 1)
        throw DomainError("random step counter: horizon must be positive");
    std::mt19937_64 rng{seed};
    StepCounterTable t;
    t.horizon = horizon;
    std::set<VertexId> level{arena.root()};
    for (std::int64_t step = 0; step < horizon && !level.empty(); ++step) {
        std::set<VertexId> next;
        for (const auto& v : level) {
            auto x = arena.expand(v);
            if (x->owner == Player::One) {
                const auto& e = x->edges[rng() % x->edges.size()];
                t.moves[{v, step}] = e;
                if (t.moves.size() > max_entries)
                    throw DomainError("random step counter: more than " + std::to_string(max_entries) + " entries");
            }
            for (const auto& e : x->edges)
                next.insert(e.to);
        }
        level = std::move(next);
    }
    return make_step_counter("random_sc_" + std::to_string(seed), Player::One, std::move(t));
}

} // namespace qg
