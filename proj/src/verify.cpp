#include "qg/verify.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "qg/adversaries.hpp"
#include "qg/arena_io.hpp"
#include "qg/engine.hpp"
#include "qg/error.hpp"

namespace qg {

namespace {

using nlohmann::json;

class Checker {
public:
    explicit Checker(std::vector<std::string>& out) : out_{out} {}

    bool expect(bool cond, const std::string& what)
    {
        if (!cond)
            out_.push_back(what);
        return cond;
    }

    [[nodiscard]] bool clean() const { return out_.empty(); }

private:
    std::vector<std::string>& out_;
};

const json& field(const json& claim, const char* key)
{
    if (!claim.contains(key))
        throw ParseError(std::string{"claim lacks '"} + key + "'");
    return claim.at(key);
}

std::int64_t int_field(const json& claim, const char* key)
{
    const auto& v = field(claim, key);
    if (!v.is_number_integer())
        throw ParseError(std::string{"claim field '"} + key + "' must be an integer");
    return v.get<std::int64_t>();
}

std::size_t index_field(const json& claim, const char* key)
{
    const auto v = int_field(claim, key);
    if (v < 0)
        throw ParseError(std::string{"claim field '"} + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
}

Weight tp_at(const PlayRecord& r, std::size_t pos) { return pos == 0 ? Weight{0} : r.tp[pos - 1]; }

const VertexId& vertex_at(const PlayRecord& r, std::size_t pos) { return pos == 0 ? r.origin : r.edges[pos - 1].to; }

std::vector<std::size_t> positions(const PlayRecord& r, const std::function<bool(const VertexId&)>& pred)
{
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p <= r.edges.size(); ++p)
        if (pred(vertex_at(r, p)))
            out.push_back(p);
    return out;
}

// Round starts from the claim's round_vertex / round_param / round_param_min.
std::vector<std::size_t> round_starts(const PlayRecord& r, const json& claim)
{
    const auto name = field(claim, "round_vertex").get<std::string>();
    std::optional<std::pair<std::size_t, std::int64_t>> eq, min;
    if (claim.contains("round_param")) {
        auto p = claim["round_param"].get<std::vector<std::int64_t>>();
        if (p.size() != 2 || p[0] < 0)
            throw ParseError("round_param must be [index, value]");
        eq = {static_cast<std::size_t>(p[0]), p[1]};
    }
    if (claim.contains("round_param_min")) {
        auto p = claim["round_param_min"].get<std::vector<std::int64_t>>();
        if (p.size() != 2 || p[0] < 0)
            throw ParseError("round_param_min must be [index, value]");
        min = {static_cast<std::size_t>(p[0]), p[1]};
    }
    return positions(r, [&](const VertexId& v) {
        if (v.name() != name)
            return false;
        if (eq && (v.params().size() <= eq->first || v.param(eq->first) != eq->second))
            return false;
        if (min && (v.params().size() <= min->first || v.param(min->first) < min->second))
            return false;
        return true;
    });
}

void check_recorded_starts(Checker& ck, const json& claim, const std::vector<std::size_t>& starts)
{
    if (claim.contains("round_starts"))
        ck.expect(claim["round_starts"].get<std::vector<std::size_t>>() == starts,
                  "claimed round starts differ from the replayed ones");
}

void check_sink_payoff(Checker& ck, const PlayRecord& r, const json& claim)
{
    const Weight claimed = json_weight(field(claim, "final_tp"));
    ck.expect(r.end == PlayRecord::End::Sink, "play does not reach a sink within the horizon");
    ck.expect(r.final_tp() == claimed, "final TP is " + r.final_tp().str() + ", claimed " + claimed.str());
}

void check_early_exit(Checker& ck, const PlayRecord& r, const json& claim, const json& plan)
{
    check_sink_payoff(ck, r, claim);
    const auto threshold = json_weight(field(claim, "threshold"));
    ck.expect(r.final_tp() < threshold, "final TP " + r.final_tp().str() + " is not below " + threshold.str());
    if (!claim.contains("entry"))
        return;
    const auto entry = int_field(claim, "entry");
    const auto offset = int_field(claim, "offset");
    std::int64_t delays = 0;
    for (const auto& e : r.edges)
        delays += e.from.name() == "t" && e.to.name() == "g" ? 1 : 0;
    ck.expect(int_field(claim, "delays") == delays,
              "play delays " + std::to_string(delays) + " times, claim says " + field(claim, "delays").dump());
    ck.expect(r.final_tp() == Weight{-entry + delays + offset},
              "final TP " + r.final_tp().str() + " does not match -entry + delays + offset");
    if (plan.is_object() && plan.contains("entry"))
        ck.expect(plan["entry"] == entry, "claim entry differs from the plan");
}

void check_stagnation(Checker& ck, const PlayRecord& r, const json& claim, std::uint64_t horizon)
{
    const auto from = index_field(claim, "from_step");
    const Weight bound = json_weight(field(claim, "bound"));
    const bool sink = r.end == PlayRecord::End::Sink;
    ck.expect(sink || r.edges.size() == horizon, "play is shorter than the horizon");
    if (!ck.expect(from <= r.edges.size(), "from_step lies beyond the play"))
        return;
    for (std::size_t p = from; p <= r.edges.size(); ++p)
        if (!ck.expect(tp_at(r, p) <= bound,
                       "TP " + tp_at(r, p).str() + " at step " + std::to_string(p) + " exceeds " + bound.str()))
            return;
}

void check_starvation(Checker& ck, const PlayRecord& r, const json& claim, std::uint64_t horizon)
{
    const Weight colour{int_field(claim, "colour")};
    const auto from = index_field(claim, "from_edge");
    ck.expect(r.end == PlayRecord::End::Horizon && r.edges.size() == horizon, "play is shorter than the horizon");
    ck.expect(from < r.edges.size(), "from_edge lies beyond the play");
    for (std::size_t i = from; i < r.edges.size(); ++i)
        if (!ck.expect(r.edges[i].weight != colour,
                       "colour " + colour.str() + " occurs at edge " + std::to_string(i)))
            return;
}

void check_round_decrease(Checker& ck, const PlayRecord& r, const json& claim)
{
    const auto starts = round_starts(r, claim);
    check_recorded_starts(ck, claim, starts);
    if (!ck.expect(starts.size() >= 2, "fewer than two rounds in the play"))
        return;
    const Weight decrease{int_field(claim, "decrease")};
    const bool partial = claim.value("partial", false);
    ck.expect(partial || decrease >= Weight{1}, "decrease below 1 in a complete certificate");
    for (std::size_t k = 0; k + 1 < starts.size(); ++k) {
        const auto drop = tp_at(r, starts[k]) - tp_at(r, starts[k + 1]);
        if (!ck.expect(drop >= decrease, "round " + std::to_string(k) + " loses " + drop.str() + ", claimed " +
                                             decrease.str()))
            return;
    }
    if (claim.contains("mp_bound")) {
        const Weight bound = json_weight(claim["mp_bound"]);
        for (auto p : starts)
            if (p > 0 &&
                !ck.expect(tp_at(r, p) / Weight{static_cast<std::int64_t>(p)} <= bound,
                           "mean payoff above " + bound.str() + " at round start " + std::to_string(p)))
                return;
    }
    if (claim.contains("peak_bound")) {
        const Weight bound = json_weight(claim["peak_bound"]);
        const auto from = index_field(claim, "from_round");
        if (!ck.expect(from < starts.size(), "from_round lies beyond the play"))
            return;
        for (std::size_t p = starts[from]; p <= r.edges.size(); ++p)
            if (!ck.expect(tp_at(r, p) <= bound,
                           "TP " + tp_at(r, p).str() + " at step " + std::to_string(p) + " exceeds the peak bound"))
                return;
    }
}

void check_divergence(Checker& ck, const PlayRecord& r, const json& claim, const ResolvedContext& ctx,
                      std::uint64_t horizon, std::string& scope)
{
    ck.expect(r.end == PlayRecord::End::Horizon && r.edges.size() == horizon,
              "play stops before the horizon (a sink means Player 1 exited)");
    const auto starts = round_starts(r, claim);
    check_recorded_starts(ck, claim, starts);
    const auto c = index_field(claim, "cycle_start");
    const auto p = index_field(claim, "period");
    if (!ck.expect(p >= 1 && c + 2 * p < starts.size(), "the play does not cover the cycle twice"))
        return;
    const Strategy& s = *ctx.p1;
    auto memory_at = [&](std::size_t pos) { return pos == 0 ? s.initial() : r.mem1[pos - 1]; };
    for (std::size_t k = c; k + p < starts.size(); ++k)
        if (!ck.expect(memory_at(starts[k]) == memory_at(starts[k + p]),
                       "memory at round " + std::to_string(k) + " does not repeat after " + std::to_string(p)))
            return;
    // A fixed memory state after each round is only half of the story: the rounds
    // themselves must be copies of each other, up to the index shift.
    const auto len = starts[c + 1] - starts[c];
    for (std::size_t k = c; k + 1 < starts.size(); ++k)
        if (!ck.expect(starts[k + 1] - starts[k] == len, "round " + std::to_string(k) + " has a different length"))
            return;
    const Weight decrease{int_field(claim, "decrease")};
    const Weight elevation{int_field(claim, "elevation")};
    ck.expect(decrease >= Weight{1}, "decrease must be at least 1");
    for (std::size_t k = c; k + 1 < starts.size(); ++k) {
        const auto base = tp_at(r, starts[k]);
        const auto drop = base - tp_at(r, starts[k + 1]);
        if (!ck.expect(drop >= decrease, "round " + std::to_string(k) + " loses " + drop.str() + ", claimed " +
                                             decrease.str()))
            return;
        for (auto q = starts[k]; q <= starts[k + 1]; ++q)
            if (!ck.expect(tp_at(r, q) - base <= elevation,
                           "round " + std::to_string(k) + " climbs above the elevation bound"))
                return;
    }
    if (claim.contains("clique") && ctx.zoo) {
        const auto& clique = claim["clique"];
        const auto indices = clique.at("indices").get<std::vector<std::int64_t>>();
        const auto label = RamseyLabel::from_json(clique.at("label"));
        const auto K = memory_states(s);
        ck.expect(indices.size() == static_cast<std::size_t>(K) + 2, "clique size is not K+2");
        for (std::size_t a = 0; a < indices.size(); ++a)
            for (std::size_t b = a + 1; b < indices.size(); ++b)
                if (!ck.expect(ramsey_label(ctx.zoo->arena, s, indices[a], indices[b] - indices[a]) == label,
                               "label of pair (" + std::to_string(indices[a]) + "," + std::to_string(indices[b]) +
                                   ") differs from the claimed one"))
                    return;
        if (gap_uniform(s) && ck.expect(label.exits.size() == static_cast<std::size_t>(K), "label has the wrong size"))
            for (std::size_t k = c; k < c + p; ++k) {
                const auto m = memory_at(starts[k]);
                const auto state = m.empty() ? 0 : m[0];
                ck.expect(!label.exits[static_cast<std::size_t>(state)],
                          "the label lets memory state " + std::to_string(state) + " exit inside the cycle");
            }
    }
    if (!gap_uniform(s))
        scope = "strategy reads vertex parameters; the round cycle is checked up to the horizon only";
}

void check_koenig(Checker& ck, const ResolvedContext& ctx, const json& claim)
{
    const auto o = open_sub_from_json(field(claim, "open_set"));
    const auto level = index_field(claim, "level");
    auto kb = koenig_bound(*ctx.arena, ctx.start, *ctx.p1, o, level);
    if (!ck.expect(kb.status == KoenigResult::Status::Bound,
                   o.str() + " is not satisfied by every consistent history at level " + std::to_string(level)))
        return;
    ck.expect(kb.level == level,
              o.str() + " already holds at level " + std::to_string(kb.level) + ", claimed " + std::to_string(level));
}

void check_levels(Checker& ck, const ResolvedContext& ctx, const json& claim)
{
    const auto& levels = field(claim, "levels");
    if (!ck.expect(levels.is_array() && !levels.empty(), "no levels listed"))
        return;
    std::size_t prev = 0;
    for (const auto& l : levels) {
        const auto o = open_sub_from_json(field(l, "open_set"));
        const auto k = index_field(l, "k");
        ck.expect(k >= prev, "levels are not scheduled in order");
        prev = k;
        auto kb = koenig_bound(*ctx.arena, ctx.start, *ctx.p1, o, k);
        ck.expect(kb.status == KoenigResult::Status::Bound && kb.level <= k,
                  o.str() + " is not certified by level " + std::to_string(k));
    }
}

} // namespace

std::string CheckResult::str() const
{
    std::ostringstream out;
    out << (ok ? "accepted" : "rejected");
    for (const auto& d : diagnostics)
        out << "\n  " << d;
    if (!scope.empty())
        out << "\n  scope: " << scope;
    return out.str();
}

json open_sub_json(const OpenSub& o)
{
    switch (o.family()) {
    case OpenSub::Family::MPsupGE0:
        return {{"family", "MPsupGE0"}, {"m", o.m()}, {"i", o.step_index()}};
    case OpenSub::Family::TPinf:
        return {{"family", "TPinf"}, {"m", o.m()}, {"i", o.step_index()}};
    case OpenSub::Family::TPsupGE0:
        return {{"family", "TPsupGE0"}, {"m", o.m()}};
    case OpenSub::Family::BuchiColour:
        return {{"family", "BuchiColour"}, {"colour", o.colour()}, {"i", o.step_index()}};
    }
    return {};
}

OpenSub open_sub_from_json(const json& j)
{
    const auto family = j.at("family").get<std::string>();
    if (family == "MPsupGE0")
        return OpenSub::mp_sup(int_field(j, "m"), int_field(j, "i"));
    if (family == "TPinf")
        return OpenSub::tp_inf(int_field(j, "m"), int_field(j, "i"));
    if (family == "TPsupGE0")
        return OpenSub::tp_sup(int_field(j, "m"));
    if (family == "BuchiColour")
        return OpenSub::buchi_colour(int_field(j, "colour"), int_field(j, "i"));
    throw ParseError("unknown open set family '" + family + "'");
}

ResolvedContext resolve_context(const Certificate& c)
{
    ResolvedContext ctx;
    if (is_zoo_uri(c.arena)) {
        ctx.zoo = zoo_from_uri(c.arena);
        ctx.arena = ctx.zoo->arena;
    } else {
        ctx.arena = Arena{parse_arena(c.arena)};
    }
    ctx.start = c.start.empty() ? ctx.arena->root() : VertexId::parse(c.start);
    if (ctx.zoo && ctx.zoo->has_strategy(c.p1))
        ctx.p1 = ctx.zoo->strategy(c.p1);
    else
        ctx.p1 = parse_strategy(c.p1);
    if (ctx.p1->player() != Player::One)
        throw DomainError("p1 strategy " + ctx.p1->name() + " belongs to Player 2");
    ctx.p2 = c.p2.is_null() ? first_edge_strategy(Player::Two) : plan_strategy(c.p2, ctx.zoo ? &*ctx.zoo : nullptr);
    return ctx;
}

CheckResult check_certificate(const Certificate& c)
{
    try {
        return check_certificate(c, resolve_context(c));
    } catch (const std::exception& e) {
        return CheckResult{false, {std::string{"cannot resolve context: "} + e.what()}, {}};
    }
}

CheckResult check_certificate(const Certificate& c, const ResolvedContext& ctx)
{
    CheckResult result;
    Checker ck{result.diagnostics};
    try {
        if (!c.claim.is_object())
            throw ParseError("claim must be an object");
        using V = Certificate::Variant;
        if (c.variant == V::KoenigBound) {
            check_koenig(ck, ctx, c.claim);
        } else if (c.variant == V::LevelSatisfaction) {
            check_levels(ck, ctx, c.claim);
        } else {
            if (c.horizon > max_check_horizon)
                throw DomainError("horizon " + std::to_string(c.horizon) + " exceeds the checker limit");
            auto rec = play(*ctx.arena, ctx.start, *ctx.p1, *ctx.p2, static_cast<std::size_t>(c.horizon));
            switch (c.variant) {
            case V::SinkPayoff:
                check_sink_payoff(ck, rec, c.claim);
                break;
            case V::EarlyExitNegative:
                check_early_exit(ck, rec, c.claim, c.p2);
                break;
            case V::Stagnation:
                check_stagnation(ck, rec, c.claim, c.horizon);
                break;
            case V::ColourStarvation:
                check_starvation(ck, rec, c.claim, c.horizon);
                break;
            case V::RoundDecrease:
                check_round_decrease(ck, rec, c.claim);
                break;
            case V::Divergence:
                check_divergence(ck, rec, c.claim, ctx, c.horizon, result.scope);
                break;
            default:
                break;
            }
        }
    } catch (const std::exception& e) {
        result.diagnostics.push_back(std::string{"malformed certificate: "} + e.what());
        return result;
    }
    result.ok = ck.clean();
    if (result.ok) {
        const bool tree = c.variant == Certificate::Variant::KoenigBound ||
                          c.variant == Certificate::Variant::LevelSatisfaction;
        result.diagnostics.push_back(to_string(c.variant) + (tree ? " re-derived by exhaustive exploration"
                                                                  : " re-derived from a replay of " +
                                                                        std::to_string(c.horizon) + " steps"));
    }
    return result;
}

} // namespace qg
