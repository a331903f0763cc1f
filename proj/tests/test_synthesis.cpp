#include <doctest.h>

#include "helpers.hpp"
#include "qg/engine.hpp"
#include "qg/error.hpp"
#include "qg/synthesis.hpp"

using namespace qg;

namespace {

SynthReport bit_sc1bit(const ZooEntry& z, std::size_t bubbles)
{
    return sc1bit_synthesize(z.arena, z.arena.root(), bubbles, z.strategy("opposite"), z.safe(),
                             [&z](const VertexId& v, const Weight& r) { return z.in_winning_prime(v, r); });
}

// Every level is reproduced by the final strategy, and the schedule grows.
void check_schedule(const Arena& arena, const VertexId& v0, const SynthReport& report,
                    const std::function<OpenSub(std::int64_t)>& open_set)
{
    REQUIRE(report.strategy);
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
        const auto& l = report.levels[i];
        CHECK(l.certified);
        CHECK(l.recheck <= l.k);
        CHECK(l.open_set == open_set(l.m).str());
        auto again = koenig_bound(arena, v0, *report.strategy, open_set(l.m), l.k);
        CHECK(again.status == KoenigResult::Status::Bound);
        CHECK(again.level == l.recheck);
        if (i > 0)
            CHECK(l.k >= report.levels[i - 1].k + 1);
    }
}

} // namespace

TEST_CASE("sc_from_strategy copies a memoryless strategy")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto a = qgtest::random_arena(seed, 6);
        Arena arena{a};
        auto sigma = first_edge_strategy(Player::One);
        auto sc = sc_from_strategy(arena, arena.root(), sigma, OpenSub::tp_sup(2), 12);
        CHECK(sc.step_counter_based());
        auto tree = explore_consistent(arena, arena.root(), sc, 11);
        for (const auto& level : tree.levels)
            for (const auto& h : level)
                if (arena.owner(h.to()) == Player::One && !arena.sink(h.to()))
                    CHECK(decide(sc, arena, h) == decide(sigma, arena, h));
        CHECK_FALSE(domination_gap(arena, arena.root(), sc, sigma, OpenSub::tp_sup(2), 11));
    }
}

TEST_CASE("sc_from_strategy follows the least history")
{
    // v0 (P2) reaches a with total 0 or -1; a (P1) goes to x or y; both return to v0.
    ExplicitArena a{"least"};
    const VertexId v0{"v0"}, av{"a"}, x{"x"}, y{"y"};
    a.add_vertex(v0, Player::Two);
    a.add_vertex(av, Player::One);
    a.add_vertex(x, Player::Two);
    a.add_vertex(y, Player::Two);
    a.add_edge(Edge{v0, Weight{0}, av});
    a.add_edge(Edge{v0, Weight{-1}, av});
    a.add_edge(Edge{av, Weight{0}, x});
    a.add_edge(Edge{av, Weight{1}, y});
    a.add_edge(Edge{x, Weight{0}, v0});
    a.add_edge(Edge{y, Weight{0}, v0});
    a.set_start(v0);
    Arena arena{a};
    // Remembers the last weight out of v0 and climbs only after a loss.
    FiniteMemoryTable t;
    t.states = 2;
    t.moves[{av, 0}] = Edge{av, Weight{0}, x};
    t.moves[{av, 1}] = Edge{av, Weight{1}, y};
    t.edge_updates[{0, Edge{v0, Weight{-1}, av}}] = 1;
    t.edge_updates[{1, Edge{v0, Weight{0}, av}}] = 0;
    auto sigma = make_finite_memory("remember", Player::One, t);
    auto sc = sc_from_strategy(arena, v0, sigma, OpenSub::tp_sup(3), 10);

    // At step 1 the least history is the loss, so the copy climbs whatever happened.
    for (auto w : {0, -1}) {
        History h{v0};
        h.push(Edge{v0, Weight{w}, av});
        CHECK(decide(sc, arena, h).to == y);
    }
    CHECK_FALSE(domination_gap(arena, v0, sc, sigma, OpenSub::tp_sup(3), 10));
}

TEST_CASE("bit arena: the step-counter copy of opposite is dominated")
{
    auto z = make_zoo("bitarena");
    auto opposite = z.strategy("opposite");
    for (std::int64_t m = 1; m <= 2; ++m) {
        auto sc = sc_from_strategy(z.arena, z.arena.root(), opposite, OpenSub::tp_sup(m), 24);
        CHECK_FALSE(domination_gap(z.arena, z.arena.root(), sc, opposite, OpenSub::tp_sup(m), 24));
    }
    // first_edge holds everywhere and is never below an opposite history when Player 2 spikes
    auto gap = domination_gap(z.arena, z.arena.root(), first_edge_strategy(Player::One), opposite,
                              OpenSub::tp_sup(2), 24);
    CHECK(gap.has_value());
}

TEST_CASE("bubbles on a zero self-loop")
{
    ExplicitArena a{"self"};
    a.add_vertex(VertexId{"v"}, Player::One);
    a.add_edge(Edge{VertexId{"v"}, Weight{0}, VertexId{"v"}});
    a.set_start(VertexId{"v"});
    Arena arena{a};
    auto d = decompose(Objective::parse("tp:limsup:>=:0"));
    auto report = bubble_synthesize(arena, arena.root(), d, 3, first_edge_strategy(Player::One),
                                    [](const VertexId&) { return true; });
    CHECK(report.certified());
    CHECK(report.complete);
    CHECK(report.region_ok);
    REQUIRE(report.levels.size() == 3);
    check_schedule(arena, arena.root(), report, [&d](std::int64_t m) { return d.at(static_cast<std::size_t>(m - 1)); });
    CHECK_FALSE(report.str().empty());
}

TEST_CASE("bubbles on A2 with the adaptive oracle")
{
    auto z = make_zoo("a2");
    auto d = decompose(Objective::parse("mp:limsup:>=:0"));
    auto report = bubble_synthesize(z.arena, z.arena.root(), d, 3, z.strategy("adaptive"), z.winning,
                                    SynthCaps{.max_depth = 200});
    CHECK(report.certified());
    REQUIRE(report.levels.size() == 3);
    check_schedule(z.arena, z.arena.root(), report, [&d](std::int64_t m) { return d.at(static_cast<std::size_t>(m - 1)); });
}

TEST_CASE("bubbles report unsupported objectives")
{
    ExplicitArena a{"self"};
    a.add_vertex(VertexId{"v"}, Player::One);
    a.add_edge(Edge{VertexId{"v"}, Weight{0}, VertexId{"v"}});
    a.set_start(VertexId{"v"});
    Arena arena{a};
    CHECK_THROWS_AS((void)bubble_synthesize(arena, arena.root(), decompose(Objective::parse("tp:limsup:>:0")), 2,
                                            first_edge_strategy(Player::One), [](const VertexId&) { return true; }),
                    DomainError);
}

TEST_CASE("step counter plus one bit on the bit arena")
{
    auto z = make_zoo("bitarena");
    auto report = bit_sc1bit(z, 3);
    CHECK(report.certified());
    CHECK(report.region_ok);
    REQUIRE(report.strategy);
    CHECK(report.strategy->kind() == StrategyKind::StepCounterPlusK);
    check_schedule(z.arena, z.arena.root(), report, [](std::int64_t m) { return OpenSub::tp_sup(m); });
    // indices skipped by the schedule are covered through nesting
    for (std::int64_t m = 1; m < report.levels.back().m; ++m) {
        auto kb = koenig_bound(z.arena, z.arena.root(), *report.strategy, OpenSub::tp_sup(m), report.levels.back().k);
        CHECK(kb.status == KoenigResult::Status::Bound);
    }

    // against all-zero play the bit has to flip so that Player 1 spikes
    auto rec = play(z.arena, z.arena.root(), *report.strategy, z.strategy("allzero"), report.levels.back().k);
    std::set<Memory> bits(rec.mem1.begin(), rec.mem1.end());
    CHECK(bits.size() >= 2);
    CHECK(already_satisfies(OpenSub::tp_sup(3), rec.history().colours()));

    // every consistent history up to the last level stays in W'
    auto tree = explore_consistent(z.arena, z.arena.root(), *report.strategy, report.region_depth);
    REQUIRE_FALSE(tree.partial);
    for (const auto& level : tree.levels)
        for (const auto& h : level)
            if (h.to().name() == "v" && h.to().param(0) >= 1)
                CHECK(z.in_winning_prime(h.to(), h.total()));
}
