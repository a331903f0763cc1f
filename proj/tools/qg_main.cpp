#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qg/adversaries.hpp"
#include "qg/arena_io.hpp"
#include "qg/certificate.hpp"
#include "qg/engine.hpp"
#include "qg/error.hpp"
#include "qg/solver.hpp"
#include "qg/synthesis.hpp"
#include "qg/verify.hpp"
#include "qg/zoo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qg;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_refuted = 1;
constexpr int exit_inconclusive = 2;
constexpr int exit_error = 3;

struct Config {
    std::string arena;
    std::string p1;
    std::string p2;
    std::string strategy;
    std::string objective;
    std::string start;
    std::string out;
    std::string mode;
    std::string file;
    std::string zoo_name;
    std::size_t horizon = 0;
    std::size_t depth = 400;
    std::size_t window = 2000;
    std::size_t m_max = 4;
    std::size_t rounds = 20;
    std::size_t samples = 3;
    std::size_t max_vertices = 100000;
    unsigned jobs = 1;
    std::uint64_t seed = 0;
};

std::string read_file(const std::string& path)
{
    std::ifstream in{path, std::ios::binary};
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const std::string& path, const std::string& text)
{
    const fs::path target{path};
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        out.flush();
        if (!out)
            throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

void emit(const Config& cfg, const std::string& text)
{
    if (cfg.out.empty())
        std::cout << text;
    else
        write_atomic(cfg.out, text);
}

struct Loaded {
    std::optional<ZooEntry> zoo;
    Arena arena;
};

Loaded load(const std::string& source)
{
    if (source.empty())
        throw std::runtime_error("--arena is required");
    if (is_zoo_uri(source)) {
        auto z = zoo_from_uri(source);
        Arena a = z.arena;
        return {std::move(z), std::move(a)};
    }
    return {std::nullopt, Arena{parse_arena(read_file(source))}};
}

// A zoo strategy name, or a strategy file. The ref keeps the file contents so
// certificates stay self-contained.
P1Input load_strategy(const std::string& spec, const std::optional<ZooEntry>& zoo)
{
    if (spec.empty())
        throw std::runtime_error("a strategy is required");
    if (zoo && zoo->has_strategy(spec))
        return {zoo->strategy(spec), spec};
    if (fs::exists(spec)) {
        auto text = read_file(spec);
        return {parse_strategy(text), text};
    }
    throw std::runtime_error("'" + spec + "' is neither a zoo strategy nor a file");
}

Strategy load_p2(const std::string& spec, const std::optional<ZooEntry>& zoo)
{
    if (spec.empty())
        return first_edge_strategy(Player::Two);
    if (spec.rfind("plan:", 0) == 0)
        return plan_strategy(json::parse(spec.substr(5)), zoo ? &*zoo : nullptr);
    if (zoo && zoo->has_strategy(spec))
        return zoo->strategy(spec);
    if (fs::exists(spec)) {
        auto text = read_file(spec);
        if (text.find_first_not_of(" \t\r\n") != std::string::npos && text[text.find_first_not_of(" \t\r\n")] == '{')
            return plan_strategy(json::parse(text), zoo ? &*zoo : nullptr);
        return parse_strategy(text);
    }
    throw std::runtime_error("'" + spec + "' is neither a zoo strategy, a plan nor a file");
}

int cmd_validate(const Config& cfg)
{
    auto [zoo, arena] = load(cfg.arena);
    ValidationReport report = arena.as_explicit() ? validate(*arena.as_explicit()) : validate(arena, cfg.depth);
    std::ostringstream out;
    out << "explored " << report.explored << " vertices" << (report.frontier_open ? " (depth limit reached)" : "")
        << "\n";
    for (const auto& v : report.violations)
        out << "violation at " << v.vertex.str() << ": " << v.message << "\n";
    out << (report.ok() ? "ok" : "invalid") << "\n";
    emit(cfg, out.str());
    return report.ok() ? exit_ok : exit_refuted;
}

int cmd_simulate(const Config& cfg)
{
    auto [zoo, arena] = load(cfg.arena);
    auto p1 = load_strategy(cfg.p1, zoo);
    auto p2 = load_p2(cfg.p2, zoo);
    const VertexId start = cfg.start.empty() ? arena.root() : VertexId::parse(cfg.start);
    auto rec = play(arena, start, p1.strategy, p2, cfg.horizon);
    emit(cfg, rec.csv());
    return exit_ok;
}

int status_code(AdversaryResult::Status s)
{
    switch (s) {
    case AdversaryResult::Status::Defeated:
        return exit_ok;
    case AdversaryResult::Status::Failed:
        return exit_refuted;
    default:
        return exit_inconclusive;
    }
}

int cmd_defeat(const Config& cfg)
{
    auto [zoo, arena] = load(cfg.arena);
    if (!zoo)
        throw std::runtime_error("defeat works on zoo arenas");
    auto p1 = load_strategy(cfg.strategy.empty() ? cfg.p1 : cfg.strategy, zoo);
    DefeatOptions opts{cfg.window, cfg.horizon, cfg.rounds};
    auto result = defeat(*zoo, p1, opts);
    std::cerr << "status: " << to_string(result.status);
    if (!result.note.empty())
        std::cerr << " (" << result.note << ")";
    std::cerr << "\n";
    if (!result.certificate) {
        emit(cfg, json{{"status", to_string(result.status)}, {"note", result.note}}.dump(2) + "\n");
        return status_code(result.status);
    }
    auto check = check_certificate(*result.certificate);
    std::cerr << "self-check: " << check.str() << "\n";
    emit(cfg, result.certificate->dump());
    if (!check.ok)
        return exit_refuted;
    return status_code(result.status);
}

int cmd_verify(const Config& cfg)
{
    auto cert = Certificate::parse(read_file(cfg.file));
    auto result = check_certificate(cert);
    std::cout << result.str() << "\n";
    return result.ok ? exit_ok : exit_refuted;
}

int report_exit(const SynthReport& r)
{
    if (!r.region_ok && r.region_violation)
        return exit_refuted;
    return r.certified() ? exit_ok : exit_inconclusive;
}

void emit_synthesis(const Config& cfg, const std::string& arena_ref, const VertexId& start, const SynthReport& r,
                    const std::function<OpenSub(std::size_t)>& open_set)
{
    std::cerr << r.str() << "\n";
    if (!r.strategy)
        return;
    Certificate c;
    c.variant = Certificate::Variant::LevelSatisfaction;
    c.arena = arena_ref;
    c.start = start.str();
    c.p1 = serialize_strategy(*r.strategy);
    c.objective = cfg.objective;
    json levels = json::array();
    for (std::size_t i = 0; i < r.levels.size() && r.levels[i].certified; ++i)
        levels.push_back({{"open_set", open_sub_json(open_set(i))}, {"k", r.levels[i].k}});
    c.claim = {{"levels", levels}};
    c.notes = {{"report", r.str()}};
    emit(cfg, c.dump());
}

int cmd_synthesize(Config cfg)
{
    auto [zoo, arena] = load(cfg.arena);
    const VertexId start = cfg.start.empty() ? arena.root() : VertexId::parse(cfg.start);
    SynthCaps caps{cfg.depth, default_node_cap()};
    std::string mode = cfg.mode;
    if (mode.empty())
        mode = zoo && zoo->safe ? "sc1bit" : "bubble";
    const std::string arena_ref = zoo ? zoo->uri() : serialize_arena(*arena.as_explicit());
    if (mode == "sc1bit") {
        if (!zoo || !zoo->safe)
            throw std::runtime_error("sc1bit synthesis needs a zoo arena with a safe strategy");
        if (cfg.objective.empty())
            cfg.objective = "tp:limsup:>=:0";
        auto oracle = load_strategy(cfg.p1.empty() ? zoo->strategies.front() : cfg.p1, zoo);
        const ZooEntry& z = *zoo;
        auto report = sc1bit_synthesize(arena, start, cfg.m_max, oracle.strategy, z.safe(),
                                        [&z](const VertexId& v, const Weight& r) { return z.in_winning_prime(v, r); },
                                        caps);
        emit_synthesis(cfg, arena_ref, start, report,
                       [&report](std::size_t i) { return OpenSub::tp_sup(report.levels[i].m); });
        return report_exit(report);
    }
    if (mode != "bubble")
        throw std::runtime_error("unknown synthesis mode '" + mode + "'");
    if (cfg.objective.empty())
        cfg.objective = "mp:limsup:>=:0";
    const auto objective = Objective::parse(cfg.objective);
    const auto decomposition = decompose(objective);
    if (!decomposition.supported())
        throw DomainError(decomposition.reason());
    SynthReport report;
    if (zoo) {
        if (!zoo->winning)
            throw std::runtime_error("zoo:" + zoo->name + " has no winning region");
        auto oracle = load_strategy(cfg.p1.empty() ? zoo->strategies.front() : cfg.p1, zoo);
        report = bubble_synthesize(arena, start, decomposition, cfg.m_max, oracle.strategy, zoo->winning, caps);
    } else {
        if (objective.family != Objective::Family::Quantitative || objective.kind != PayoffKind::MP ||
            objective.relation != Relation::GreaterEq || objective.threshold != Extended{Weight{0}})
            throw DomainError("explicit arenas support bubble synthesis for mp:limsup:>=:0 and mp:liminf:>=:0");
        const auto& ex = *arena.as_explicit();
        auto values = solve_values(ex, PayoffKind::MP);
        auto winning = [values](const VertexId& v) { return values.at(v) >= Extended{Weight{0}}; };
        if (!winning(start))
            throw DomainError("start vertex " + start.str() + " is not winning (value " + values.at(start).str() + ")");
        report = bubble_synthesize(arena, start, decomposition, cfg.m_max, *values.witness, winning, caps);
    }
    emit_synthesis(cfg, arena_ref, start, report, [&decomposition](std::size_t i) { return decomposition.at(i); });
    return report_exit(report);
}

int cmd_zoo_list(const Config& cfg)
{
    std::ostringstream out;
    for (const auto& z : zoo_list())
        out << z.name << "\t" << z.params << "\t" << z.provenance << "\n";
    emit(cfg, out.str());
    return exit_ok;
}

int cmd_zoo_export(const Config& cfg)
{
    std::string uri = cfg.zoo_name;
    if (!is_zoo_uri(uri))
        uri = "zoo:" + uri;
    auto z = zoo_from_uri(uri);
    emit(cfg, serialize_arena(materialize(z.arena, cfg.max_vertices)));
    return exit_ok;
}

// One row per (arena, strategy class, sample): does the class suffice there?
int cmd_bench(const Config& cfg)
{
    std::ostringstream out;
    out << "arena,class,strategy,outcome,detail\n";
    auto row = [&](const std::string& arena, const std::string& cls, const std::string& strategy,
                   const std::string& outcome, std::string detail) {
        std::replace(detail.begin(), detail.end(), ',', ';');
        std::replace(detail.begin(), detail.end(), '\n', ' ');
        out << arena << "," << cls << "," << strategy << "," << outcome << "," << detail << "\n";
    };
    auto defeat_row = [&](const ZooEntry& z, const std::string& cls, const P1Input& p1, const DefeatOptions& opts) {
        auto r = defeat(z, p1, opts);
        std::string outcome = to_string(r.status);
        std::string detail = r.note;
        if (r.certificate) {
            auto check = check_certificate(*r.certificate);
            detail = to_string(r.certificate->variant) + (check.ok ? " accepted" : " rejected");
        }
        row(z.uri(), cls, p1.strategy.name(), outcome, detail);
    };
    std::mt19937_64 rng{cfg.seed};
    const DefeatOptions opts{cfg.window, cfg.horizon, cfg.rounds};

    auto a1 = make_zoo("a1prime");
    const auto B = a1.params.at("B");
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const auto answer = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(B + 1)) + 1;
        MemorylessTable t;
        t.class_moves["t"] = ClassMove{"s", Weight{answer}};
        auto s = make_memoryless("answer_" + std::to_string(answer), Player::One, std::move(t));
        defeat_row(a1, "memoryless", P1Input{s, serialize_strategy(s)}, opts);
    }

    auto a3 = make_zoo("a3");
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const auto ref = "random_sc?seed=" + std::to_string(rng() % 100000) + "&horizon=120";
        defeat_row(a3, "step-counter", P1Input{a3.strategy(ref), ref}, DefeatOptions{cfg.window, 120, cfg.rounds});
    }
    {
        auto s = a3.strategy("delay_twice_exit");
        Weight worst{1'000'000};
        for (std::int64_t entry = 0; entry <= 15; ++entry) {
            auto rec = play(a3.arena, a3.arena.root(), s,
                            plan_strategy(json{{"kind", "a3_entry"}, {"entry", entry}}, &a3), 400);
            worst = std::min(worst, rec.final_tp());
        }
        row(a3.uri(), "finite-memory", s.name(), worst >= Weight{1} ? "wins" : "loses",
            "least final TP over entries <= 15 is " + worst.str());
    }

    auto a4 = make_zoo("a4");
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const auto K = static_cast<std::int64_t>(rng() % 3) + 1;
        const auto ref = "random_fm?seed=" + std::to_string(rng() % 100000) + "&K=" + std::to_string(K);
        defeat_row(a4, "finite-memory", P1Input{a4.strategy(ref), ref}, opts);
    }

    auto bb = make_zoo("buchib", {{"B", 16}});
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        auto s = random_step_counter(bb.arena, rng(), 200);
        defeat_row(bb, "step-counter", P1Input{s, serialize_strategy(s)}, DefeatOptions{cfg.window, 200, cfg.rounds});
    }

    auto bit = make_zoo("bitarena");
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        auto s = random_step_counter(bit.arena, rng(), 81);
        defeat_row(bit, "step-counter", P1Input{s, serialize_strategy(s)}, DefeatOptions{cfg.window, 81, cfg.rounds});
    }
    {
        auto report = sc1bit_synthesize(bit.arena, bit.arena.root(), 3, bit.strategy("opposite"), bit.safe(),
                                        [&bit](const VertexId& v, const Weight& r) { return bit.in_winning_prime(v, r); },
                                        SynthCaps{cfg.depth, default_node_cap()});
        row(bit.uri(), "step-counter+1bit", "sc1bit", report.certified() ? "certified" : "uncertified",
            std::to_string(report.levels.size()) + " bubbles; region " + (report.region_ok ? "kept" : "left"));
    }
    emit(cfg, out.str());
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"qg: quantitative games on graphs"};
    app.require_subcommand(1);
    Config cfg;

    auto arena_opt = [&](CLI::App* c) { c->add_option("--arena", cfg.arena, "arena file or zoo URI")->required(); };
    auto out_opt = [&](CLI::App* c) { c->add_option("--out", cfg.out, "output file (written atomically)"); };
    auto common = [&](CLI::App* c) {
        c->add_option("--jobs", cfg.jobs, "worker count (work currently runs sequentially)")
            ->check(CLI::PositiveNumber);
        c->add_option("--seed", cfg.seed, "random seed");
    };

    auto* validate_cmd = app.add_subcommand("validate", "check an arena for blocking or dangling vertices");
    arena_opt(validate_cmd);
    validate_cmd->add_option("--depth", cfg.depth, "exploration depth for lazy arenas")->check(CLI::PositiveNumber);
    out_opt(validate_cmd);
    common(validate_cmd);

    auto* simulate_cmd = app.add_subcommand("simulate", "play two strategies and print the CSV trace");
    arena_opt(simulate_cmd);
    simulate_cmd->add_option("--p1", cfg.p1, "Player 1 strategy (zoo name or file)")->required();
    simulate_cmd->add_option("--p2", cfg.p2, "Player 2 strategy (zoo name, file, or plan:{json})");
    simulate_cmd->add_option("--horizon", cfg.horizon, "number of steps")->required();
    simulate_cmd->add_option("--start", cfg.start, "start vertex (default: the arena's start)");
    out_opt(simulate_cmd);
    common(simulate_cmd);

    auto* defeat_cmd = app.add_subcommand("defeat", "build a Player 2 plan and a certificate against a strategy");
    arena_opt(defeat_cmd);
    defeat_cmd->add_option("--strategy,--p1", cfg.strategy, "Player 1 strategy (zoo name or file)")->required();
    defeat_cmd->add_option("--window", cfg.window, "largest index searched for a clique")->check(CLI::PositiveNumber);
    defeat_cmd->add_option("--horizon", cfg.horizon, "play length (0: pick per arena)");
    defeat_cmd->add_option("--rounds", cfg.rounds, "rounds for the outbidding adversaries")->check(CLI::PositiveNumber);
    out_opt(defeat_cmd);
    common(defeat_cmd);

    auto* synth_cmd = app.add_subcommand("synthesize", "fix a step-counter (or step-counter plus one bit) strategy");
    arena_opt(synth_cmd);
    synth_cmd->add_option("--objective", cfg.objective, "objective, e.g. mp:limsup:>=:0");
    synth_cmd->add_option("--p1,--strategy", cfg.p1, "winning strategy to imitate (zoo name or file)");
    synth_cmd->add_option("--mode", cfg.mode, "bubble or sc1bit (default: by arena)");
    synth_cmd->add_option("--m-max", cfg.m_max, "open sets (bubbles) to certify")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--depth", cfg.depth, "deepest level explored")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--start", cfg.start, "start vertex");
    out_opt(synth_cmd);
    common(synth_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "re-check a certificate file");
    verify_cmd->add_option("certificate", cfg.file, "certificate file")->required()->check(CLI::ExistingFile);
    common(verify_cmd);

    auto* zoo_cmd = app.add_subcommand("zoo", "list or export zoo arenas");
    zoo_cmd->require_subcommand(1);
    auto* zoo_list_cmd = zoo_cmd->add_subcommand("list", "list zoo entries");
    common(zoo_list_cmd);
    out_opt(zoo_list_cmd);
    auto* zoo_export_cmd = zoo_cmd->add_subcommand("export", "serialize a (finite) zoo arena");
    zoo_export_cmd->add_option("name", cfg.zoo_name, "entry name or URI")->required();
    zoo_export_cmd->add_option("--max-vertices", cfg.max_vertices, "refuse arenas larger than this");
    out_opt(zoo_export_cmd);
    common(zoo_export_cmd);

    auto* bench_cmd = app.add_subcommand("bench", "tournament of strategy classes against zoo arenas (CSV)");
    bench_cmd->add_option("--samples", cfg.samples, "sampled strategies per class")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--window", cfg.window, "Ramsey window")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--depth", cfg.depth, "synthesis depth")->check(CLI::PositiveNumber);
    out_opt(bench_cmd);
    common(bench_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_error;
    }

    try {
        if (*validate_cmd)
            return cmd_validate(cfg);
        if (*simulate_cmd)
            return cmd_simulate(cfg);
        if (*defeat_cmd)
            return cmd_defeat(cfg);
        if (*synth_cmd)
            return cmd_synthesize(cfg);
        if (*verify_cmd)
            return cmd_verify(cfg);
        if (*zoo_list_cmd)
            return cmd_zoo_list(cfg);
        if (*zoo_export_cmd)
            return cmd_zoo_export(cfg);
        if (*bench_cmd)
            return cmd_bench(cfg);
    } catch (const ParseError& e) {
        std::cerr << "qg: parse error: " << e.what() << "\n";
        return exit_error;
    } catch (const std::exception& e) {
        std::cerr << "qg: " << e.what() << "\n";
        return exit_error;
    }
    return exit_error;
}
