#include <doctest.h>

#include "helpers.hpp"
#include "qg/adversaries.hpp"
#include "qg/error.hpp"
#include "qg/synthesis.hpp"
#include "qg/verify.hpp"

using namespace qg;

namespace {

P1Input from_text(const std::string& text)
{
    return P1Input{parse_strategy(text), text};
}

P1Input from_zoo(const ZooEntry& z, const std::string& ref)
{
    return P1Input{z.strategy(ref), ref};
}

void require_checked(const AdversaryResult& r)
{
    REQUIRE(r.certificate);
    auto check = check_certificate(*r.certificate);
    CHECK_MESSAGE(check.ok, check.str());
    // survives serialization
    auto again = check_certificate(Certificate::parse(r.certificate->dump()));
    CHECK(again.ok == check.ok);
}

// Step counter on A3 that exits at t_i (reached at step 3i+1) and never anywhere else.
std::string a3_exit_at(std::int64_t i)
{
    return "strategy exit" + std::to_string(i) + " kind=sc horizon=" + std::to_string(3 * i + 2) + "\nmove t[" +
           std::to_string(i) + "] step=" + std::to_string(3 * i + 1) + " -> r0 weight=" + std::to_string(i) + "\n";
}

} // namespace

TEST_CASE("A1': outbidding a constant answer")
{
    auto z = make_zoo("a1prime");
    auto r = defeat_fm_match(z, from_text("strategy three kind=memoryless\nmove t -> s weight=3\n"));
    CHECK(r.status == AdversaryResult::Status::Defeated);
    CHECK(r.plan == nlohmann::json{{"kind", "a1_rounds"}, {"picks", {4}}});
    REQUIRE(r.certificate);
    CHECK(r.certificate->variant == Certificate::Variant::RoundDecrease);
    CHECK(r.certificate->claim.at("decrease") == 1);
    require_checked(r);
}

TEST_CASE("A1': a two-state alternator answering 1 and 5")
{
    auto z = make_zoo("a1prime");
    const std::string alt = "strategy alt kind=fm states=2\n"
                            "move t state=0 -> s weight=1\nmove t state=1 -> s weight=5\n"
                            "memupd state=0 edge=t->s weight=1 -> 1\nmemupd state=1 edge=t->s weight=5 -> 0\n";
    auto r = defeat_fm_match(z, from_text(alt));
    CHECK(r.status == AdversaryResult::Status::Defeated);
    REQUIRE(r.certificate);
    CHECK(r.certificate->claim.at("largest_answer") == 5);
    CHECK(r.plan.at("picks") == nlohmann::json{6});
    require_checked(r);
}

TEST_CASE("A1': the truncation binds when answers reach B-1")
{
    auto z = make_zoo("a1prime", {{"B", 6}});
    auto r = defeat_fm_match(z, from_text("strategy top kind=memoryless\nmove t -> s weight=5\n"));
    CHECK(r.status == AdversaryResult::Status::Partial);
    CHECK(r.note == "truncation binds: the strategy answers up to 5 and bids stop at 6");
    CHECK_THROWS_AS((void)defeat_fm_match(make_zoo("a3"), from_text("strategy x kind=memoryless\n")), DomainError);
}

TEST_CASE("A2: adaptive-looking finite memory loses a unit per round")
{
    auto z = make_zoo("a2");
    auto r = defeat_fm_match(z, from_text("strategy short kind=memoryless\nmove b[0,0] -> b[0,1] weight=-1\n"), 6);
    CHECK(r.status == AdversaryResult::Status::Defeated);
    require_checked(r);
}

TEST_CASE("A3: step counter exiting at t_3")
{
    auto z = make_zoo("a3");
    auto r = defeat_sc_on_a3(z, from_text(a3_exit_at(3)), 40);
    CHECK(r.status == AdversaryResult::Status::Defeated);
    REQUIRE(r.certificate);
    CHECK(r.certificate->variant == Certificate::Variant::EarlyExitNegative);
    CHECK(r.plan.at("entry") == 3);
    REQUIRE(r.play);
    CHECK(r.play->final_tp() == Weight{-1});
    require_checked(r);
}

TEST_CASE("A3: step counter that never exits")
{
    auto z = make_zoo("a3");
    auto r = defeat_sc_on_a3(z, from_text("strategy stay kind=sc horizon=1\n"), 60);
    CHECK(r.status == AdversaryResult::Status::Defeated);
    REQUIRE(r.certificate);
    CHECK(r.certificate->variant == Certificate::Variant::Stagnation);
    REQUIRE(r.play);
    for (std::size_t n = 0; n < r.play->tp.size(); ++n)
        CHECK(r.play->tp[n] <= Weight{-1});
    require_checked(r);

    CHECK_THROWS_AS((void)defeat_sc_on_a3(z, from_zoo(z, "delay_twice_exit"), 60), DomainError);
    CHECK(defeat_sc_on_a3(z, from_text(a3_exit_at(1)), 1).status == AdversaryResult::Status::Inconclusive);
}

TEST_CASE("A3: random step-counter tables")
{
    auto z = make_zoo("a3");
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto s = random_a3_table(seed, 60);
        auto r = defeat_sc_on_a3(z, P1Input{s, serialize_strategy(s)}, 80);
        CHECK(r.status == AdversaryResult::Status::Defeated);
        require_checked(r);
    }
}

TEST_CASE("A4: always_delay diverges")
{
    auto z = make_zoo("a4");
    auto r = ramsey_adversary(z, from_zoo(z, "always_delay"), 200);
    CHECK(r.status == AdversaryResult::Status::Defeated);
    REQUIRE(r.certificate);
    CHECK(r.certificate->variant == Certificate::Variant::Divergence);
    require_checked(r);
}

TEST_CASE("A4: delay twice then exit")
{
    auto z = make_zoo("a4");
    auto s = z.strategy("delay_twice_exit");
    auto r = ramsey_adversary(z, P1Input{s, "delay_twice_exit"}, 200);
    CHECK(r.status == AdversaryResult::Status::Defeated);
    REQUIRE(r.ramsey);
    const auto l0 = r.ramsey->entry;
    CHECK(l0 >= 3);
    REQUIRE(r.play);
    CHECK(r.play->final_tp() == Weight{-l0 + 1});
    REQUIRE(r.certificate);
    CHECK(r.certificate->variant == Certificate::Variant::EarlyExitNegative);
    require_checked(r);

    // every pair of the clique carries the same label
    const auto& c = r.ramsey->clique;
    CHECK(c.size() == static_cast<std::size_t>(memory_states(s)) + 2);
    for (std::size_t a = 0; a < c.size(); ++a)
        for (std::size_t b = a + 1; b < c.size(); ++b)
            CHECK(ramsey_label(z.arena, s, c[a], c[b] - c[a]) == r.ramsey->label);
}

TEST_CASE("A4: random finite-memory strategies")
{
    auto z = make_zoo("a4");
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        auto s = random_a4_strategy(seed, 1 + static_cast<std::int64_t>(seed % 3));
        auto r = ramsey_adversary(z, P1Input{s, serialize_strategy(s)}, 2000);
        CAPTURE(seed);
        CHECK(r.status == AdversaryResult::Status::Defeated);
        require_checked(r);
        if (r.certificate && r.certificate->variant == Certificate::Variant::Divergence) {
            // the claimed memory cycle is visible in the play
            REQUIRE(r.play);
            auto starts = r.certificate->claim.at("round_starts").get<std::vector<std::size_t>>();
            const auto c0 = r.certificate->claim.at("cycle_start").get<std::size_t>();
            const auto p = r.certificate->claim.at("period").get<std::size_t>();
            auto mem_at = [&](std::size_t pos) { return pos == 0 ? s.initial() : r.play->mem1[pos - 1]; };
            for (std::size_t k = c0; k + p < starts.size(); ++k)
                CHECK(mem_at(starts[k]) == mem_at(starts[k + p]));
        }
    }
    CHECK_THROWS_AS((void)ramsey_adversary(z, from_zoo(z, "adaptive"), 100), DomainError);
    CHECK_THROWS_AS((void)ramsey_adversary(make_zoo("a3"), from_zoo(z, "always_delay"), 100), DomainError);
}

TEST_CASE("A4: the Ramsey search reports a window that is too small")
{
    auto z = make_zoo("a4");
    auto r = ramsey_adversary(z, from_zoo(z, "delay_twice_exit"), 6);
    CHECK(r.status == AdversaryResult::Status::Inconclusive);
    CHECK(r.note.find("window 6") != std::string::npos);
}

TEST_CASE("guarded A4 uses the strict objective")
{
    auto z = make_zoo("a4guarded");
    auto r = ramsey_adversary(z, from_zoo(z, "delay_twice_exit"), 200);
    CHECK(r.status == AdversaryResult::Status::Defeated);
    REQUIRE(r.certificate);
    CHECK(r.certificate->objective == "tp:liminf:>:0");
    require_checked(r);
}

TEST_CASE("Buchi B: step counters")
{
    auto z = make_zoo("buchib", {{"B", 4}});
    std::string even = "strategy even kind=sc horizon=200\n";
    for (int step = 0; step < 200; ++step)
        even += "move v step=" + std::to_string(step) + (step % 2 == 0 ? " -> u weight=0\n" : " -> v weight=1\n");
    auto r = defeat_sc_buchi(z, from_text(even), 200);
    CHECK(r.status == AdversaryResult::Status::Defeated);
    REQUIRE(r.certificate);
    CHECK(r.certificate->variant == Certificate::Variant::ColourStarvation);
    require_checked(r);

    auto loop = defeat_sc_buchi(z, from_text("strategy loop kind=sc horizon=1\nmove v step=0 -> v weight=1\n"), 100);
    CHECK(loop.status == AdversaryResult::Status::Defeated);
    require_checked(loop);

    CHECK_THROWS_AS((void)defeat_sc_buchi(z, from_zoo(z, "alternating"), 100), DomainError);
}

TEST_CASE("bit arena: step counters")
{
    auto z = make_zoo("bitarena");
    auto hold = defeat_sc_bitarena(z, from_text("strategy hold kind=sc horizon=1\n"), 81);
    CHECK(hold.status == AdversaryResult::Status::Defeated);
    CHECK(hold.certificate->variant == Certificate::Variant::Stagnation);
    require_checked(hold);

    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto s = random_step_counter(z.arena, seed, 81);
        auto r = defeat_sc_bitarena(z, P1Input{s, serialize_strategy(s)}, 81);
        CAPTURE(seed);
        CHECK(r.status == AdversaryResult::Status::Defeated);
        require_checked(r);
    }

    // A step counter with one extra bit is not beaten this way.
    auto report = sc1bit_synthesize(z.arena, z.arena.root(), 3, z.strategy("opposite"), z.safe(),
                                    [&z](const VertexId& v, const Weight& r) { return z.in_winning_prime(v, r); });
    REQUIRE(report.strategy);
    auto r = defeat_sc_bitarena(z, P1Input{*report.strategy, serialize_strategy(*report.strategy)}, 41);
    CHECK(r.status != AdversaryResult::Status::Defeated);
}

TEST_CASE("defeat dispatch")
{
    auto a3 = make_zoo("a3");
    DefeatOptions opts;
    CHECK(defeat(a3, from_text(a3_exit_at(2)), opts).status == AdversaryResult::Status::Defeated);
    CHECK_THROWS_AS((void)defeat(make_zoo("buchia"), from_text("strategy x kind=sc horizon=1\n"), opts), DomainError);
    CHECK_THROWS_AS((void)plan_strategy({{"kind", "nope"}}, nullptr), ParseError);
    CHECK_THROWS_AS((void)plan_strategy({{"kind", "a4_route"}, {"entry", 2}, {"route", {1}}, {"gap", 2}}, nullptr),
                    ParseError);
}
