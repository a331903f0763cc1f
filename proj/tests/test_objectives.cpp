#include <doctest.h>

#include "helpers.hpp"
#include "qg/engine.hpp"
#include "qg/error.hpp"

using namespace qg;

namespace {

std::vector<Weight> word(std::initializer_list<std::int64_t> xs)
{
    std::vector<Weight> out;
    for (auto x : xs)
        out.emplace_back(x);
    return out;
}

Lasso lasso(std::initializer_list<std::int64_t> prefix, std::initializer_list<std::int64_t> cycle)
{
    return Lasso{word(prefix), word(cycle)};
}

} // namespace

TEST_CASE("payoffs")
{
    CHECK(payoff(PayoffKind::TP, word({1, -1, 1})) == Weight{1});
    CHECK(payoff(PayoffKind::MP, word({1, -1, 1, 1})) == Weight{1, 2});
    CHECK(payoff(PayoffKind::TP, {}) == Weight{0});
    CHECK_THROWS_AS((void)payoff(PayoffKind::MP, {}), DomainError);
}

TEST_CASE("TP of every A4 entry is -2(k+1)")
{
    auto z = make_zoo("a4");
    for (std::int64_t k = 0; k <= 8; ++k) {
        auto p2 = qgtest::a4_p2(k, [](std::int64_t) { return 1; });
        auto rec = play(z.arena, z.arena.root(), first_edge_strategy(Player::One), p2, 3 * (k + 1));
        REQUIRE(rec.last() == VertexId{"t", {k}});
        CHECK(payoff(PayoffKind::TP, rec.history().colours()) == Weight{-2 * (k + 1)});
    }
}

TEST_CASE("objective syntax")
{
    auto o = Objective::parse("tp:limsup:>=:0");
    CHECK(o.kind == PayoffKind::TP);
    CHECK(o.mode == Mode::Limsup);
    CHECK(o.relation == Relation::GreaterEq);
    CHECK(o.threshold == Extended{Weight{0}});
    CHECK(Objective::parse("mp:liminf:>:1/2").threshold == Extended{Weight{1, 2}});
    CHECK(Objective::parse("tp:limsup:>=:+inf").threshold == Extended::pos_inf());
    CHECK(Objective::parse("buchi-all:3").colours == 3);
    for (const char* text : {"tp:limsup:>=:0", "mp:liminf:>:-1/3", "tp:liminf:>=:-inf", "buchi-all:2"})
        CHECK(Objective::parse(Objective::parse(text).str()).str() == Objective::parse(text).str());
    CHECK_THROWS(Objective::parse("mp:limsup:>=:+inf"));
    CHECK_THROWS(Objective::parse("tp:sometimes:>=:0"));
    CHECK_THROWS(Objective::parse("tp:limsup:=:0"));
    CHECK_THROWS(Objective::parse("buchi-all:0"));
}

TEST_CASE("already_satisfies")
{
    CHECK(already_satisfies(OpenSub::tp_sup(1), word({0})));
    CHECK_FALSE(already_satisfies(OpenSub::tp_sup(2), word({-1})));
    CHECK_FALSE(already_satisfies(OpenSub::tp_sup(2), word({0}))); // j must be >= m
    CHECK(already_satisfies(OpenSub::tp_sup(2), word({-1, 1})));
    CHECK_FALSE(already_satisfies(OpenSub::buchi_colour(7, 3), word({7, 0, 0})));
    CHECK(already_satisfies(OpenSub::buchi_colour(7, 3), word({0, 0, 7})));
    CHECK(already_satisfies(OpenSub::mp_sup(2, 1), word({-1, 1})));
    CHECK(already_satisfies(OpenSub::mp_sup(2, 1), word({-1, 0})));
    CHECK_FALSE(already_satisfies(OpenSub::mp_sup(2, 1), word({-1, -1})));
    CHECK(already_satisfies(OpenSub::mp_sup(3, 1), word({-1, 0, 1, -1})));
    CHECK_FALSE(already_satisfies(OpenSub::tp_inf(2, 1), word({1, 0})));
    CHECK(already_satisfies(OpenSub::tp_inf(2, 1), word({1, 1, -5})));
    CHECK_FALSE(already_satisfies(OpenSub::tp_inf(2, 3), word({1, 1, -5})));
}

TEST_CASE("prefix_compare examples")
{
    auto o = OpenSub::tp_sup(2);
    CHECK(prefix_compare(o, word({-1, 0}), word({0, 0})) == Order::LE);
    CHECK(prefix_compare(o, word({0, 0}), word({-1, 0})) == Order::GE);
    CHECK(prefix_compare(o, word({-3, 1}), word({-3, 1})) == Order::Both);
    CHECK(prefix_compare(o, word({-3, 0}), word({-2, -1})) == Order::Both);
    CHECK(prefix_compare(o, word({-3, 0}), word({-1, -1})) == Order::LE);
    CHECK_THROWS_AS((void)prefix_compare(o, word({0}), word({0, 0})), DomainError);

    auto b = OpenSub::buchi_colour(1, 1);
    CHECK(prefix_compare(b, word({0, 0}), word({0, 0})) == Order::Both);
    CHECK(prefix_compare(b, word({0, 2}), word({2, 0})) == Order::Both);
    CHECK(prefix_compare(b, word({0, 0}), word({1, 0})) == Order::LE);
    CHECK(prefix_compare(b, word({0, 1}), word({0, 0})) == Order::GE);
    CHECK(prefix_compare(OpenSub::mp_sup(1, 1), word({-1, -1}), word({-3, 0})) == Order::GE);
}

TEST_CASE("lasso examples")
{
    auto sup0 = Objective::parse("tp:limsup:>=:0");
    CHECK(eval_on_lasso(sup0, lasso({}, {0})));
    CHECK_FALSE(eval_on_lasso(sup0, lasso({-1}, {0})));
    CHECK(eval_on_lasso(Objective::parse("tp:limsup:>=:+inf"), lasso({}, {1})));
    CHECK_FALSE(eval_on_lasso(Objective::parse("mp:liminf:>:0"), lasso({5}, {1, -1})));
    CHECK(eval_on_lasso(Objective::parse("mp:liminf:>=:0"), lasso({5}, {1, -1})));

    CHECK(lasso_limit(PayoffKind::TP, Mode::Limsup, lasso({-2}, {3, -1, -2})) == Extended{Weight{1}});
    CHECK(lasso_limit(PayoffKind::TP, Mode::Liminf, lasso({-2}, {3, -1, -2})) == Extended{Weight{-2}});
    CHECK(lasso_limit(PayoffKind::TP, Mode::Limsup, lasso({10}, {-1})) == Extended::neg_inf());
    CHECK(lasso_limit(PayoffKind::MP, Mode::Liminf, lasso({10}, {1, 2})) == Extended{Weight{3, 2}});
    CHECK_THROWS_AS((void)lasso_limit(PayoffKind::TP, Mode::Limsup, lasso({1}, {})), DomainError);

    auto buchi = Objective::parse("buchi-all:3");
    CHECK(eval_on_lasso(buchi, lasso({}, {0, 1, 2})));
    CHECK_FALSE(eval_on_lasso(buchi, lasso({2}, {0, 1})));
}

TEST_CASE("lasso evaluation matches unrolled simulation on samples")
{
    std::mt19937_64 rng{99};
    const char* variants[] = {"tp:limsup:>=:0", "tp:liminf:>:1", "mp:limsup:>:1/2", "mp:liminf:>=:-1/3"};
    for (const char* v : variants) {
        auto o = Objective::parse(v);
        for (int n = 0; n < 30; ++n) {
            auto l = qgtest::random_lasso(rng);
            CHECK_MESSAGE(eval_on_lasso(o, l) == qgtest::simulate_lasso(o, l, 2000), v);
        }
    }
}

TEST_CASE("decomposition")
{
    auto d = decompose(Objective::parse("tp:limsup:>=:0"));
    REQUIRE(d.supported());
    auto first = d.first(3);
    CHECK(first[0] == OpenSub::tp_sup(1));
    CHECK(first[1] == OpenSub::tp_sup(2));
    CHECK(first[2] == OpenSub::tp_sup(3));

    auto mp = decompose(Objective::parse("mp:limsup:>=:0"));
    REQUIRE(mp.supported());
    CHECK(mp.at(0) == OpenSub::mp_sup(1, 1));
    CHECK(mp.at(1) == OpenSub::mp_sup(1, 2));
    CHECK(mp.at(2) == OpenSub::mp_sup(2, 1));
    CHECK(mp.at(3) == OpenSub::mp_sup(1, 3));
    CHECK(mp.at(5) == OpenSub::mp_sup(3, 1));

    auto inf = decompose(Objective::parse("tp:limsup:>=:+inf"));
    REQUIRE(inf.supported());
    CHECK(inf.at(2) == OpenSub::tp_inf(2, 1));

    auto buchi = decompose(Objective::parse("buchi-all:2"));
    REQUIRE(buchi.supported());
    CHECK(buchi.at(0) == OpenSub::buchi_colour(0, 1));
    CHECK(buchi.at(1) == OpenSub::buchi_colour(1, 1));
    CHECK(buchi.at(2) == OpenSub::buchi_colour(0, 2));

    auto liminf = decompose(Objective::parse("mp:liminf:>:0"));
    CHECK_FALSE(liminf.supported());
    CHECK(liminf.reason() == "Sigma02, memoryless per prior work; no decomposition needed");
    auto strict = decompose(Objective::parse("tp:limsup:>:0"));
    CHECK_FALSE(strict.supported());
    CHECK(strict.reason() == "Sigma03 over Q");
    CHECK_THROWS_AS((void)strict.at(0), DomainError);
    CHECK_FALSE(decompose(Objective::parse("tp:liminf:>=:0")).supported());
}

TEST_CASE("threshold normalization")
{
    auto mp = normalize_threshold(Objective::parse("mp:limsup:>=:1/2"), true);
    CHECK(mp.per_edge == Weight{1, 2});
    CHECK(mp.objective.threshold == Extended{Weight{0}});
    CHECK_FALSE(mp.lead.has_value());

    auto tp = normalize_threshold(Objective::parse("tp:limsup:>=:3"), true);
    REQUIRE(tp.lead.has_value());
    CHECK(*tp.lead == Weight{-3});

    auto strict = normalize_threshold(Objective::parse("tp:limsup:>:0"), true);
    CHECK(strict.objective.relation == Relation::GreaterEq);
    CHECK(*strict.lead == Weight{-1});
    CHECK(decompose(strict.objective).supported());

    auto half = normalize_threshold(Objective::parse("tp:limsup:>:1/2"), true);
    CHECK(*half.lead == Weight{-1});

    // Shifted arena: MP of each edge drops by r.
    ExplicitArena a{"loop"};
    a.add_vertex(VertexId{"v"}, Player::One);
    a.add_edge(Edge{VertexId{"v"}, Weight{1}, VertexId{"v"}});
    a.set_start(VertexId{"v"});
    auto shifted = apply_shift(Arena{a}, mp);
    CHECK(shifted.expand(shifted.root())->edges.front().weight == Weight{1, 2});
}

TEST_CASE("TPsupGE0 word from the bit arena reaches 0 once per round")
{
    auto z = make_zoo("bitarena");
    auto rec = play(z.arena, z.arena.root(), z.strategy("opposite"), z.strategy("allzero"), 40);
    auto colours = rec.history().colours();
    for (std::int64_t m = 1; m <= 4; ++m)
        CHECK(already_satisfies(OpenSub::tp_sup(m), colours));
}
