#include <doctest.h>

#include <functional>
#include <set>

#include "helpers.hpp"
#include "qg/adversaries.hpp"
#include "qg/engine.hpp"
#include "qg/error.hpp"

using namespace qg;

namespace {

// Player 1 can make the running total reach 0 within each of the next
// `rounds` rounds of the bit arena. A round ends on arrival at a v vertex.
bool p1_hits_every_round(const Arena& a, const VertexId& v, const Weight& tp, bool hit, int rounds)
{
    auto x = a.expand(v);
    auto next = [&](const Edge& e) {
        const Weight t = tp + e.weight;
        const bool h = hit || t.sign() >= 0;
        if (e.to.name() != "v")
            return p1_hits_every_round(a, e.to, t, h, rounds);
        return h && (rounds == 1 || p1_hits_every_round(a, e.to, t, false, rounds - 1));
    };
    if (x->owner == Player::One)
        return std::any_of(x->edges.begin(), x->edges.end(), next);
    return std::all_of(x->edges.begin(), x->edges.end(), next);
}

// Player 2 can keep the running total below 0 for `steps` steps.
bool p2_keeps_negative(const Arena& a, const VertexId& v, const Weight& tp, int steps)
{
    if (tp.sign() >= 0)
        return false;
    if (steps == 0)
        return true;
    auto x = a.expand(v);
    auto next = [&](const Edge& e) { return p2_keeps_negative(a, e.to, tp + e.weight, steps - 1); };
    if (x->owner == Player::Two)
        return std::any_of(x->edges.begin(), x->edges.end(), next);
    return std::all_of(x->edges.begin(), x->edges.end(), next);
}

} // namespace

TEST_CASE("zoo catalogue")
{
    auto list = zoo_list();
    std::set<std::string> names;
    for (const auto& info : list) {
        names.insert(info.name);
        CHECK_FALSE(info.provenance.empty());
        auto z = make_zoo(info.name);
        CHECK(z.name == info.name);
        CHECK_FALSE(z.strategies.empty());
        auto again = zoo_from_uri(z.uri());
        CHECK(again.uri() == z.uri());
        CHECK(again.arena.root() == z.arena.root());
    }
    for (const char* n : {"a1", "a1prime", "a2", "a3", "a4", "a4guarded", "bitarena", "buchia", "buchib", "nonuniform"})
        CHECK(names.contains(n));
    CHECK_THROWS_AS((void)make_zoo("nope"), DomainError);
    CHECK_THROWS_AS((void)make_zoo("a1", {{"B", 0}}), DomainError);
    CHECK_THROWS_AS((void)make_zoo("a4", {{"B", 3}}), DomainError);
    CHECK_THROWS_AS((void)zoo_from_uri("zoo:bitarena?rounds=-1"), DomainError);
    CHECK(zoo_from_uri("zoo:a1prime?B=7").params.at("B") == 7);
    CHECK(is_zoo_uri("zoo:a4"));
    CHECK_FALSE(is_zoo_uri("a4.arena"));
    CHECK_THROWS((void)make_zoo("a4").strategy("sigma_x"));
}

TEST_CASE("A1: matching plus one wins every round")
{
    auto z = make_zoo("a1", {{"B", 6}});
    auto p1 = z.strategy("match_plus_one");
    for (std::int64_t j = 1; j <= 6; ++j) {
        auto p2 = plan_strategy({{"kind", "a1_rounds"}, {"picks", {j}}}, &z);
        auto rec = play(z.arena, z.arena.root(), p1, p2, 10);
        CHECK(rec.end == PlayRecord::End::Sink);
        CHECK(rec.final_tp() == Weight{1});
    }
}

TEST_CASE("A2: every descent of Player 2 is answered within depth 30")
{
    auto z = make_zoo("a2");
    auto p1 = z.strategy("adaptive");
    auto tree = explore_consistent(z.arena, z.arena.root(), p1, 30);
    REQUIRE_FALSE(tree.partial);
    std::size_t rounds = 0;
    for (const auto& level : tree.levels)
        for (const auto& h : level)
            if (h.to().name() == "a" && h.to().param(1) == 0 && h.to().param(0) >= 1) {
                CHECK(h.total() >= Weight{h.to().param(0)});
                ++rounds;
            }
    CHECK(rounds > 50);
}

TEST_CASE("A3: entry constraints and delay twice then exit")
{
    auto z = make_zoo("a3");
    auto enc = encodes_step_count(z.arena, z.arena.root(), 60);
    REQUIRE(enc.encoded());
    for (std::int64_t i = 0; i <= 15; ++i) {
        CHECK(enc.steps.at(VertexId{"t", {i}}) == static_cast<std::size_t>(3 * i + 1));
        auto entry = plan_strategy({{"kind", "a3_entry"}, {"entry", i}}, &z);
        auto to_t = play(z.arena, z.arena.root(), first_edge_strategy(Player::One), entry, 3 * i + 1);
        REQUIRE(to_t.last() == VertexId{"t", {i}});
        CHECK(to_t.final_tp() >= Weight{-i - 1});
        auto rec = play(z.arena, z.arena.root(), z.strategy("delay_twice_exit"), entry, 400);
        REQUIRE(rec.end == PlayRecord::End::Sink);
        CHECK(rec.final_tp() >= Weight{1});
    }
}

TEST_CASE("A4: gadget paths t_i to t_{i+j} have length 3j and payoff -j+1")
{
    auto z = make_zoo("a4");
    for (std::int64_t i = 0; i <= 10; ++i)
        for (std::int64_t j = 1; j <= 10; ++j) {
            // every path: t_i -> g[i,1], climb to g[i,j], drop, descend
            History h{VertexId{"t", {i}}};
            std::function<void(History)> walk = [&](History cur) {
                if (cur.to() == VertexId{"t", {i + j}}) {
                    CHECK(cur.size() == static_cast<std::size_t>(3 * j));
                    CHECK(cur.total() == Weight{-j + 1});
                    return;
                }
                if (cur.size() > static_cast<std::size_t>(3 * j) || cur.to().name() == "r0" ||
                    (cur.to().name() == "t" && cur.size() > 0))
                    return;
                for (const auto& e : z.arena.expand(cur.to())->edges)
                    if (!(cur.to().name() == "g" && e.to.name() == "g" && e.to.param(1) > j))
                        walk(cur.extended(e));
            };
            walk(h);
        }
}

TEST_CASE("A4 guarded: an extra +1 edge in front")
{
    auto z = make_zoo("a4guarded");
    CHECK(z.arena.root() == VertexId{"s", {-1}});
    auto x = z.arena.expand(z.arena.root());
    REQUIRE(x->edges.size() == 1);
    CHECK(x->edges.front().weight == Weight{1});
    CHECK(x->edges.front().to == VertexId{"s", {0}});
}

TEST_CASE("bit arena: W' predicate at the boundary")
{
    auto z = make_zoo("bitarena");
    for (std::int64_t i = 1; i <= 10; ++i) {
        CHECK(z.in_winning_prime(VertexId{"v", {i}}, Weight{-i}));
        CHECK_FALSE(z.in_winning_prime(VertexId{"v", {i}}, Weight{-i - 1}));
        CHECK(z.in_winning_prime(VertexId{"v", {i}}, Weight{-i} + Weight{1, 2}));
    }
}

TEST_CASE("bit arena: W' predicate matches bounded game search")
{
    auto z = make_zoo("bitarena");
    for (std::int64_t i = 1; i <= 5; ++i)
        for (std::int64_t r = -i - 3; r <= -i + 3; ++r) {
            const VertexId v{"v", {i}};
            const bool in = z.in_winning_prime(v, Weight{r});
            CAPTURE(i);
            CAPTURE(r);
            if (in)
                CHECK(p1_hits_every_round(z.arena, v, Weight{r}, false, 5));
            else
                CHECK(p2_keeps_negative(z.arena, v, Weight{r}, 20));
        }
}

TEST_CASE("bit arena unit form: same round structure, unit weights")
{
    auto z = zoo_from_uri("zoo:bitarena?unit=1");
    auto rec = play(z.arena, z.arena.root(), z.strategy("opposite"), z.strategy("allzero"), 200);
    for (std::size_t n = 0; n < rec.edges.size(); ++n) {
        const auto& w = rec.edges[n].weight;
        CHECK((w == Weight{-1} || w == Weight{0} || w == Weight{1}));
        if (rec.edges[n].to.name() == "v")
            CHECK(rec.tp[n] == Weight{-rec.edges[n].to.param(0)});
    }
}

TEST_CASE("Buchi examples: scripted strategies see every colour")
{
    auto a = make_zoo("buchia", {{"k", 4}});
    auto rec = play(a.arena, a.arena.root(), a.strategy("round_robin"), first_edge_strategy(Player::Two), 200);
    std::set<Weight> tail;
    for (std::size_t n = 100; n < rec.edges.size(); ++n)
        tail.insert(rec.edges[n].weight);
    for (std::int64_t c = 0; c < 4; ++c)
        CHECK(tail.contains(Weight{c}));

    auto b = make_zoo("buchib", {{"B", 5}});
    auto alternating = b.strategy("alternating");
    for (std::int64_t l = 1; l <= 5; ++l) {
        auto p2 = plan_strategy({{"kind", "buchib_lengths"}, {"lengths", {l}}}, &b);
        auto r = play(b.arena, b.arena.root(), alternating, p2, 100);
        std::set<Weight> seen;
        for (std::size_t n = 50; n < r.edges.size(); ++n)
            seen.insert(r.edges[n].weight);
        CHECK(seen.size() == 2);
    }
}

TEST_CASE("non-uniform arena: each start is won separately")
{
    auto z = make_zoo("nonuniform");
    CHECK(z.arena.starts().size() == 5);
    auto adaptive = z.strategy("adaptive");
    for (const auto& s : z.arena.starts()) {
        auto rec = play(z.arena, s, adaptive, first_edge_strategy(Player::Two), 100);
        REQUIRE(rec.end == PlayRecord::End::Sink);
        CHECK(rec.final_tp() >= Weight{0});
    }
    // t_j is reached at step j+1 from every start
    for (const auto& s : z.arena.starts()) {
        auto enc = encodes_step_count(z.arena, s, 10);
        REQUIRE(enc.encoded());
        CHECK(enc.steps.at(VertexId{"t", {3}}) == 4);
    }
}
