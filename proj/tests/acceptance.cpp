// Acceptance run: one PASS/FAIL line per criterion. Usage: acceptance <path to qg>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "helpers.hpp"
#include "qg/adversaries.hpp"
#include "qg/engine.hpp"
#include "qg/solver.hpp"
#include "qg/synthesis.hpp"
#include "qg/verify.hpp"

using namespace qg;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why)
    {
        if (pass)
            detail = why;
        pass = false;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool checked(const AdversaryResult& r, Outcome& out, const std::string& who)
{
    if (r.status != AdversaryResult::Status::Defeated || !r.certificate) {
        out.fail(who + ": " + to_string(r.status) + " " + r.note);
        return false;
    }
    auto c = check_certificate(Certificate::parse(r.certificate->dump()));
    if (!c.ok) {
        out.fail(who + ": certificate rejected: " + c.str());
        return false;
    }
    return true;
}

// 1. every path s_0 -> t_k, k <= 12, has length 3(k+1)
Outcome path_lengths()
{
    Outcome out;
    auto z = make_zoo("a4");
    const std::int64_t K = 12;
    std::size_t paths = 0;
    std::function<void(const VertexId&, std::size_t)> walk = [&](const VertexId& v, std::size_t len) {
        if (v.name() == "t") {
            ++paths;
            const auto k = v.param(0);
            if (len != static_cast<std::size_t>(3 * (k + 1)))
                out.fail("path to " + v.str() + " has length " + std::to_string(len));
        }
        for (const auto& e : z.arena.expand(v)->edges) {
            const auto& w = e.to;
            const auto& n = w.name();
            if (n == "r0" || ((n == "s" || n == "e" || n == "t") && w.param(0) > K) ||
                ((n == "g" || n == "d") && w.param(0) + w.param(1) > K))
                continue;
            walk(w, len + 1);
        }
    };
    walk(z.arena.root(), 0);
    out.detail = std::to_string(paths) + " paths enumerated";
    return out;
}

// 2. sigma_k from t_i collects exactly i+k+1
Outcome payoff_formula()
{
    Outcome out;
    auto z = make_zoo("a4");
    std::mt19937_64 rng{2024};
    for (int n = 0; n < 200; ++n) {
        const std::int64_t i = static_cast<std::int64_t>(rng() % 11);
        const std::int64_t k = static_cast<std::int64_t>(rng() % 7);
        std::vector<std::int64_t> climbs(64);
        for (auto& c : climbs)
            c = 1 + static_cast<std::int64_t>(rng() % 5);
        auto p2 = qgtest::a4_p2(0, [climbs](std::int64_t idx) { return climbs[static_cast<std::size_t>(idx)]; });
        auto rec = play(z.arena, VertexId{"t", {i}}, z.strategy("sigma_" + std::to_string(k)), p2, 2000);
        if (rec.end != PlayRecord::End::Sink || rec.final_tp() != Weight{i + k + 1})
            out.fail("i=" + std::to_string(i) + " k=" + std::to_string(k) + " got " + rec.final_tp().str());
    }
    out.detail = "200 samples";
    return out;
}

// 3. the adaptive strategy ends every exiting play at TP 0
Outcome adaptive_wins()
{
    Outcome out;
    auto z = make_zoo("a4");
    auto adaptive = z.strategy("adaptive");
    std::size_t plays = 0;
    for (std::int64_t k = 0; k <= 6; ++k) {
        const std::size_t gadgets = static_cast<std::size_t>(k) + 1;
        std::vector<std::int64_t> js(gadgets, 1);
        while (true) {
            std::vector<std::int64_t> route;
            std::int64_t at = k;
            for (auto j : js)
                route.push_back(at += j);
            nlohmann::json plan{{"kind", "a4_route"}, {"entry", k}, {"route", route}, {"gap", 1}};
            auto rec = play(z.arena, z.arena.root(), adaptive, plan_strategy(plan, &z), 1000);
            ++plays;
            if (rec.end != PlayRecord::End::Sink || rec.final_tp() != Weight{0})
                out.fail("entry " + std::to_string(k) + " ends with TP " + rec.final_tp().str());
            std::size_t c = 0;
            while (c < js.size() && js[c] == 4)
                js[c++] = 1;
            if (c == js.size())
                break;
            ++js[c];
        }
    }
    // Player 2 never dropping out of a gadget: TP climbs forever.
    auto stay = qgtest::a4_p2(2, [](std::int64_t) { return std::int64_t{1} << 40; });
    auto rec = play(z.arena, z.arena.root(), adaptive, stay, 300);
    for (std::size_t n = 1; n < rec.edges.size(); ++n)
        if (rec.edges[n].from.name() == "g" && rec.tp[n] <= rec.tp[n - 1])
            out.fail("TP does not grow inside a gadget at step " + std::to_string(n + 1));
    // Player 2 never entering: TP stays 0.
    auto never = qgtest::a4_p2(std::int64_t{1} << 40, [](std::int64_t) { return 1; });
    auto idle = play(z.arena, z.arena.root(), adaptive, never, 300);
    for (const auto& t : idle.tp)
        if (t != Weight{0})
            out.fail("TP leaves 0 while Player 2 idles");
    out.detail = std::to_string(plays) + " exiting plays";
    return out;
}

// 4. the Ramsey adversary beats delay_twice_exit and 50 random finite-memory strategies
Outcome ramsey()
{
    Outcome out;
    auto t0 = Clock::now();
    auto z = make_zoo("a4");
    std::size_t exits = 0, cycles = 0;
    auto count = [&](const AdversaryResult& r) {
        if (r.certificate->variant == Certificate::Variant::EarlyExitNegative)
            ++exits;
        else
            ++cycles;
    };
    auto r = ramsey_adversary(z, P1Input{z.strategy("delay_twice_exit"), "delay_twice_exit"}, 2000);
    if (checked(r, out, "delay_twice_exit"))
        count(r);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto s = random_a4_strategy(seed, 1 + static_cast<std::int64_t>(seed % 3));
        auto res = ramsey_adversary(z, P1Input{s, serialize_strategy(s)}, 2000);
        if (checked(res, out, s.name()))
            count(res);
    }
    const double secs = seconds_since(t0);
    if (secs > 60)
        out.fail("took " + std::to_string(secs) + " s");
    if (out.pass)
        out.detail = std::to_string(exits) + " early exits, " + std::to_string(cycles) + " divergences";
    return out;
}

// 5. A3: delay twice then exit wins; step counters lose
Outcome a3_claims()
{
    Outcome out;
    auto z = make_zoo("a3");
    auto dte = z.strategy("delay_twice_exit");
    for (std::int64_t i = 0; i <= 15; ++i) {
        auto rec = play(z.arena, z.arena.root(), dte, plan_strategy({{"kind", "a3_entry"}, {"entry", i}}, &z), 500);
        if (rec.end != PlayRecord::End::Sink || rec.final_tp() < Weight{1})
            out.fail("entry " + std::to_string(i) + " ends with TP " + rec.final_tp().str());
    }
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto s = random_a3_table(seed, 120);
        checked(defeat_sc_on_a3(z, P1Input{s, serialize_strategy(s)}, 200), out, s.name());
    }
    out.detail = "16 entries, 50 tables";
    return out;
}

// 6. every history of the step-counter copy is dominated by an opposite history
Outcome domination()
{
    Outcome out;
    auto z = make_zoo("bitarena");
    auto opposite = z.strategy("opposite");
    const std::size_t depth = 24;
    auto theirs = explore_consistent(z.arena, z.arena.root(), opposite, depth);
    std::size_t checked_histories = 0;
    for (std::int64_t m = 1; m <= 3; ++m) {
        const auto o = OpenSub::tp_sup(m);
        auto sc = sc_from_strategy(z.arena, z.arena.root(), opposite, o, depth);
        auto ours = explore_consistent(z.arena, z.arena.root(), sc, depth);
        if (ours.partial || theirs.partial) {
            out.fail("exploration hit the node cap");
            break;
        }
        for (std::size_t s = 0; s <= depth; ++s)
            for (const auto& h : ours.levels[s]) {
                ++checked_histories;
                bool found = false;
                for (const auto& g : theirs.levels[s])
                    if (g.to() == h.to()) {
                        const auto ord = prefix_compare(o, g.colours(), h.colours());
                        found = found || ord == Order::LE || ord == Order::Both;
                    }
                if (!found)
                    out.fail("m=" + std::to_string(m) + ": no dominated copy of a history of length " +
                             std::to_string(s));
            }
    }
    out.detail = std::to_string(checked_histories) + " histories";
    return out;
}

// 7. bubble synthesis on random arenas
Outcome bubbles()
{
    Outcome out;
    auto t0 = Clock::now();
    std::size_t done = 0;
    std::uint64_t seed = 7000;
    auto d = decompose(Objective::parse("mp:limsup:>=:0"));
    while (done < 100 && seed < 9000) {
        auto a = qgtest::random_arena(seed++, 6);
        auto mp = solve_values(a, PayoffKind::MP);
        auto brute = brute_force_values(a, PayoffKind::MP);
        std::set<VertexId> W;
        for (const auto& [v, node] : a.nodes()) {
            if (mp.at(v) != brute.at(v)) {
                out.fail(a.name() + ": solver and brute force disagree at " + v.str());
                break;
            }
            if (brute.at(v) >= Extended{Weight{0}})
                W.insert(v);
        }
        if (W.empty())
            continue;
        ++done;
        Arena arena{a};
        const VertexId v0 = *W.begin();
        auto report = bubble_synthesize(arena, v0, d, 4, *mp.witness, [&W](const VertexId& v) { return W.contains(v); });
        if (!report.certified() || !report.region_ok || !report.strategy) {
            out.fail(a.name() + ": " + report.str());
            continue;
        }
        for (const auto& l : report.levels) {
            auto kb = koenig_bound(arena, v0, *report.strategy, d.at(static_cast<std::size_t>(l.m - 1)), l.k);
            if (kb.status != KoenigResult::Status::Bound || kb.level > l.k)
                out.fail(a.name() + ": level " + std::to_string(l.m) + " does not re-certify");
        }
        auto tree = explore_consistent(arena, v0, *report.strategy, report.levels.back().k);
        for (const auto& level : tree.levels)
            for (const auto& h : level)
                if (!W.contains(h.to()))
                    out.fail(a.name() + ": history leaves W at " + h.to().str());
    }
    const double secs = seconds_since(t0);
    if (done < 100)
        out.fail("only " + std::to_string(done) + " arenas with a non-empty winning region");
    if (secs > 120)
        out.fail("took " + std::to_string(secs) + " s");
    if (out.pass)
        out.detail = std::to_string(done) + " arenas";
    return out;
}

// 8. SC+1-bit synthesis certifies; every pure step-counter table over 5 rounds loses
Outcome one_bit()
{
    Outcome out;
    auto z = make_zoo("bitarena");
    auto report = sc1bit_synthesize(z.arena, z.arena.root(), 3, z.strategy("opposite"), z.safe(),
                                    [&z](const VertexId& v, const Weight& r) { return z.in_winning_prime(v, r); });
    if (!report.certified() || !report.region_ok || report.levels.size() != 3)
        out.fail("synthesis: " + report.str());
    if (!z.in_winning_prime(VertexId{"v", {3}}, Weight{-3}) || z.in_winning_prime(VertexId{"v", {3}}, Weight{-4}))
        out.fail("W' boundary");
    const std::int64_t rounds = 5;
    for (std::uint64_t bits = 0; bits < (1U << rounds); ++bits) {
        StepCounterTable t;
        t.horizon = 4 * rounds + 1;
        for (std::int64_t i = 1; i <= rounds; ++i) {
            const VertexId u{"u", {i}};
            const bool spike = (bits >> (i - 1)) & 1U;
            t.moves[{u, 4 * i - 1}] = spike ? Edge{u, Weight{i}, VertexId{"spike_u", {i}}}
                                            : Edge{u, Weight{0}, VertexId{"hold_u", {i}}};
        }
        auto s = make_step_counter("table" + std::to_string(bits), Player::One, t);
        checked(defeat_sc_bitarena(z, P1Input{s, serialize_strategy(s)}, 4 * rounds + 1), out, s.name());
    }
    if (out.pass)
        out.detail = "levels k=" + std::to_string(report.levels[0].k) + "," + std::to_string(report.levels[1].k) +
                     "," + std::to_string(report.levels[2].k) + "; 32 tables defeated";
    return out;
}

// 9. lasso evaluation against a long simulation
Outcome lassos()
{
    Outcome out;
    const char* variants[] = {"tp:limsup:>=:0",  "tp:limsup:>:1",   "tp:liminf:>=:-1",   "tp:limsup:>=:+inf",
                              "mp:limsup:>=:0", "mp:limsup:>:1/2", "mp:liminf:>=:-1/3", "mp:liminf:>:0"};
    std::mt19937_64 rng{9};
    for (const char* v : variants) {
        auto o = Objective::parse(v);
        for (int n = 0; n < 200; ++n) {
            auto l = qgtest::random_lasso(rng);
            if (eval_on_lasso(o, l) != qgtest::simulate_lasso(o, l, 10000))
                out.fail(std::string{v} + " disagrees on sample " + std::to_string(n));
        }
    }
    out.detail = "1600 lassos";
    return out;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in{p, std::ios::binary};
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// 10. property suites and CLI determinism
Outcome properties(const std::string& qg)
{
    Outcome out;
    std::mt19937_64 rng{10};
    const OpenSub fams[] = {OpenSub::tp_sup(2), OpenSub::mp_sup(2, 1), OpenSub::tp_inf(1, 2),
                            OpenSub::buchi_colour(1, 2)};
    auto le = [](Order o) { return o == Order::LE || o == Order::Both; };
    for (const auto& o : fams)
        for (int n = 0; n < 1000; ++n) {
            const std::size_t len = 1 + rng() % 7;
            auto a = qgtest::random_word(rng, len), b = qgtest::random_word(rng, len), c = qgtest::random_word(rng, len);
            auto u = qgtest::random_word(rng, 1 + rng() % 4);
            const auto ab = prefix_compare(o, a, b);
            if (!le(ab) && !le(prefix_compare(o, b, a)))
                out.fail(o.str() + ": not total");
            if (le(ab) && le(prefix_compare(o, b, c)) && !le(prefix_compare(o, a, c)))
                out.fail(o.str() + ": not transitive");
            auto au = a, bu = b;
            au.insert(au.end(), u.begin(), u.end());
            bu.insert(bu.end(), u.begin(), u.end());
            if (le(ab) && !le(prefix_compare(o, au, bu)))
                out.fail(o.str() + ": not a congruence");
            if (already_satisfies(o, a) && !already_satisfies(o, au))
                out.fail(o.str() + ": not monotone");
        }
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto a = qgtest::random_arena(seed + 5000, 5);
        for (auto f : {PayoffKind::MP, PayoffKind::TP}) {
            auto x = solve_values(a, f);
            auto y = brute_force_values(a, f);
            for (const auto& [v, node] : a.nodes())
                if (x.at(v) != y.at(v))
                    out.fail(a.name() + ": solve_values differs from brute force");
        }
    }

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("qg_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::vector<std::string> commands = {
        "validate --arena zoo:bitarena --depth 30",
        "simulate --arena zoo:bitarena --p1 opposite --p2 allzero --horizon 80",
        "defeat --arena zoo:a4 --strategy 'random_fm?seed=4&K=3' --window 2000",
        "defeat --arena zoo:a3 --strategy 'random_sc?seed=2&horizon=60'",
        "synthesize --arena zoo:bitarena --m-max 3",
        "zoo export 'zoo:bitarena?rounds=2'",
        "zoo list",
        "bench --samples 2",
    };
    for (std::size_t i = 0; i < commands.size(); ++i) {
        std::string outputs[2];
        for (int run = 0; run < 2; ++run) {
            const auto file = dir / ("out" + std::to_string(i) + "_" + std::to_string(run));
            const std::string cmd = "'" + qg + "' " + commands[i] + " --seed 11 --out '" + file.string() + "' >/dev/null 2>&1";
            if (std::system(cmd.c_str()) != 0) {
                out.fail("command failed: " + commands[i]);
                break;
            }
            outputs[run] = slurp(file);
        }
        if (outputs[0].empty() || outputs[0] != outputs[1])
            out.fail("not deterministic: " + commands[i]);
    }
    fs::remove_all(dir);
    if (out.pass)
        out.detail = "4x1000 word pairs, 100 arenas, " + std::to_string(commands.size()) + " CLI commands";
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    if (argc < 2) {
        std::cerr << "usage: acceptance <path to qg>\n";
        return 2;
    }
    const std::string qg = argv[1];
    std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"A4 path lengths", path_lengths},
        {"A4 payoff formula", payoff_formula},
        {"A4 adaptive strategy", adaptive_wins},
        {"Ramsey adversary", ramsey},
        {"A3 claims", a3_claims},
        {"step-counter domination", domination},
        {"bubble synthesis", bubbles},
        {"step counter plus one bit", one_bit},
        {"lasso oracle", lassos},
        {"properties and CLI determinism", [&qg] { return properties(qg); }},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string{"exception: "} + e.what());
        }
        const double secs = seconds_since(t0);
        if (i == 0 && secs > 10)
            o.fail("took " + std::to_string(secs) + " s");
        std::printf("criterion %zu %s: %s (%s) [%.2f s]\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
