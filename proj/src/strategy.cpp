#include "qg/strategy.hpp"

#include <algorithm>
#include <sstream>

#include "qg/error.hpp"

namespace qg {

std::string memory_str(const Memory& m)
{
    std::string out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i > 0)
            out += ':';
        out += std::to_string(m[i]);
    }
    return out.empty() ? "-" : out;
}

std::string to_string(StrategyKind k)
{
    switch (k) {
    case StrategyKind::Memoryless:
        return "memoryless";
    case StrategyKind::FiniteMemory:
        return "fm";
    case StrategyKind::StepCounter:
        return "sc";
    case StrategyKind::StepCounterPlusK:
        return "sc+k";
    case StrategyKind::Scripted:
        return "scripted";
    case StrategyKind::Composite:
        return "composite";
    }
    return "?";
}

Strategy::Strategy(std::string name, Player player, std::shared_ptr<const StrategyImpl> impl)
    : name_{std::move(name)}, player_{player}, impl_{std::move(impl)}
{
}

Edge Strategy::choose(const Memory& m, const VertexId& v, std::span<const Edge> out) const
{
    Edge e = impl_->choose(m, v, out);
    if (e.from != v || std::find(out.begin(), out.end(), e) == out.end())
        throw DomainError("strategy " + name_ + " chose " + e.str() + ", which does not leave " + v.str());
    return e;
}

bool Strategy::step_counter_based() const
{
    switch (kind()) {
    case StrategyKind::StepCounter:
    case StrategyKind::StepCounterPlusK:
        return true;
    case StrategyKind::Scripted:
        return as<Scripted>()->step_counter_based();
    default:
        return false;
    }
}

Strategy Strategy::renamed(std::string name) const { return Strategy{std::move(name), player_, impl_}; }

// ---- matching helpers -------------------------------------------------------

std::optional<Edge> ClassMove::pick(std::span<const Edge> out) const
{
    for (const auto& e : out)
        if (e.to.name() == target && (!weight || e.weight == *weight))
            return e;
    return std::nullopt;
}

bool EdgePattern::matches(const Edge& e) const
{
    if (weight && e.weight != *weight)
        return false;
    if (by_name)
        return e.from.name() == from_name && e.to.name() == to_name;
    return e.from == from && e.to == to;
}

std::string EdgePattern::str() const
{
    std::string out = by_name ? "@" + from_name + "->@" + to_name : from.str() + "->" + to.str();
    if (weight)
        out += " weight=" + weight->str();
    return out;
}

EdgePattern EdgePattern::exact(const Edge& e)
{
    EdgePattern p;
    p.from = e.from;
    p.to = e.to;
    p.weight = e.weight;
    return p;
}

EdgePattern EdgePattern::names(std::string from, std::string to, std::optional<Weight> w)
{
    EdgePattern p;
    p.by_name = true;
    p.from_name = std::move(from);
    p.to_name = std::move(to);
    p.weight = std::move(w);
    return p;
}

namespace {

Edge fall_back(Fallback fb, const VertexId& v, std::span<const Edge> out, const std::string& why)
{
    if (fb == Fallback::FirstEdge && !out.empty())
        return out.front();
    throw DomainError("no move at " + v.str() + ": " + why);
}

} // namespace

// ---- tables -----------------------------------------------------------------

Edge MemorylessTable::choose(const Memory&, const VertexId& v, std::span<const Edge> out) const
{
    if (auto it = moves.find(v); it != moves.end())
        return it->second;
    if (auto it = class_moves.find(v.name()); it != class_moves.end())
        if (auto e = it->second.pick(out))
            return *e;
    return fall_back(fallback, v, out, "vertex missing from the table");
}

Memory FiniteMemoryTable::update(const Memory& m, const Edge& e) const
{
    auto state = m.at(0);
    if (auto it = edge_updates.find({state, e}); it != edge_updates.end())
        return {it->second};
    for (const auto& [from, pattern, next] : pattern_updates)
        if (from == state && pattern.matches(e))
            return {next};
    return m;
}

Edge FiniteMemoryTable::choose(const Memory& m, const VertexId& v, std::span<const Edge> out) const
{
    auto state = m.at(0);
    if (auto it = moves.find({v, state}); it != moves.end())
        return it->second;
    if (auto it = class_moves.find({v.name(), state}); it != class_moves.end())
        if (auto e = it->second.pick(out))
            return *e;
    return fall_back(fallback, v, out, "state " + std::to_string(state) + " missing from the table");
}

Edge StepCounterTable::choose(const Memory& m, const VertexId& v, std::span<const Edge> out) const
{
    auto step = m.at(0);
    if (step >= horizon) {
        if (fallback == Fallback::Error)
            throw HorizonExceeded(static_cast<std::size_t>(step),
                                  "horizon exceeded: step " + std::to_string(step) + " at " + v.str());
        return out.front();
    }
    if (auto it = moves.find({v, step}); it != moves.end())
        return it->second;
    return fall_back(fallback, v, out, "no entry for step " + std::to_string(step));
}

Memory StepCounterPlusK::update(const Memory& m, const Edge& e) const
{
    auto step = m.at(0);
    auto mode = m.at(1);
    if (resets.contains(step))
        return {step + 1, initial_mode};
    if (auto it = edge_updates.find({step, mode, e}); it != edge_updates.end())
        return {step + 1, it->second};
    if (auto it = pattern_updates.find({step, mode}); it != pattern_updates.end())
        for (const auto& [pattern, next] : it->second)
            if (pattern.matches(e))
                return {step + 1, next};
    return {step + 1, mode};
}

Edge StepCounterPlusK::choose(const Memory& m, const VertexId& v, std::span<const Edge> out) const
{
    auto step = m.at(0);
    auto mode = m.at(1);
    if (step >= horizon) {
        if (fallback == Fallback::Error)
            throw HorizonExceeded(static_cast<std::size_t>(step),
                                  "horizon exceeded: step " + std::to_string(step) + " at " + v.str());
        return out.front();
    }
    if (auto it = moves.find({v, step, mode}); it != moves.end())
        return it->second;
    return fall_back(fallback, v, out, "no entry for step " + std::to_string(step) + " mode " + std::to_string(mode));
}

// ---- composite --------------------------------------------------------------

Composite::Composite(Strategy first, std::int64_t switch_step, Strategy then)
    : first_{std::move(first)}, switch_{switch_step}, then_{std::move(then)}
{
    if (first_.player() != then_.player())
        throw DomainError("composite strategy mixes players");
}

Memory Composite::initial() const
{
    Memory a = first_.initial();
    Memory b = then_.initial();
    Memory m{0, static_cast<std::int64_t>(a.size())};
    m.insert(m.end(), a.begin(), a.end());
    m.insert(m.end(), b.begin(), b.end());
    return m;
}

Memory Composite::update(const Memory& m, const Edge& e) const
{
    auto n1 = m.at(1);
    Memory a(m.begin() + 2, m.begin() + 2 + n1);
    Memory b(m.begin() + 2 + n1, m.end());
    a = first_.update(a, e);
    b = then_.update(b, e);
    Memory out{m[0] + 1, static_cast<std::int64_t>(a.size())};
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

Edge Composite::choose(const Memory& m, const VertexId& v, std::span<const Edge> out) const
{
    auto n1 = m.at(1);
    if (m[0] < switch_)
        return first_.choose(Memory(m.begin() + 2, m.begin() + 2 + n1), v, out);
    return then_.choose(Memory(m.begin() + 2 + n1, m.end()), v, out);
}

// ---- constructors -----------------------------------------------------------

Strategy make_memoryless(std::string name, Player player, MemorylessTable table)
{
    return Strategy{std::move(name), player, std::make_shared<MemorylessTable>(std::move(table))};
}

Strategy make_finite_memory(std::string name, Player player, FiniteMemoryTable table)
{
    if (table.states < 1 || table.initial_state < 0 || table.initial_state >= table.states)
        throw DomainError("finite-memory strategy needs 0 <= initial < states");
    return Strategy{std::move(name), player, std::make_shared<FiniteMemoryTable>(std::move(table))};
}

Strategy make_step_counter(std::string name, Player player, StepCounterTable table)
{
    return Strategy{std::move(name), player, std::make_shared<StepCounterTable>(std::move(table))};
}

Strategy make_step_counter_plus(std::string name, Player player, StepCounterPlusK table)
{
    if (table.modes < 1)
        throw DomainError("SC+K strategy needs K >= 1");
    return Strategy{std::move(name), player, std::make_shared<StepCounterPlusK>(std::move(table))};
}

Strategy make_scripted(std::string name, Player player, Memory init, Scripted::Update update, Scripted::Choose choose,
                       bool step_counter_based)
{
    return Strategy{std::move(name), player,
                    std::make_shared<Scripted>(std::move(init), std::move(update), std::move(choose),
                                               step_counter_based)};
}

Strategy make_composite(Strategy first, std::int64_t switch_step, Strategy then)
{
    auto name = first.name() + "+" + then.name();
    auto player = first.player();
    return Strategy{std::move(name), player,
                    std::make_shared<Composite>(std::move(first), switch_step, std::move(then))};
}

Strategy first_edge_strategy(Player player)
{
    MemorylessTable t;
    return make_memoryless("first-edge", player, std::move(t));
}

// ---- decisions --------------------------------------------------------------

Memory memory_after(const Strategy& s, const History& h)
{
    Memory m = s.initial();
    for (const auto& e : h.edges())
        m = s.update(m, e);
    return m;
}

Edge decide(const Strategy& s, const Arena& arena, const History& h)
{
    auto x = arena.expand(h.to());
    if (x->owner != s.player())
        throw DomainError("strategy " + s.name() + " asked to move at " + h.to().str() + ", owned by the other player");
    return s.choose(memory_after(s, h), h.to(), x->edges);
}

bool consistent(const Strategy& s, const Arena& arena, const History& h)
{
    Memory m = s.initial();
    VertexId cur = h.origin();
    for (const auto& e : h.edges()) {
        if (e.from != cur)
            return false;
        auto x = arena.expand(cur);
        if (x->owner == s.player() && s.choose(m, cur, x->edges) != e)
            return false;
        m = s.update(m, e);
        cur = e.to;
    }
    return true;
}

// ---- collapse ---------------------------------------------------------------

Strategy collapse_sc_fm(const Strategy& s, const Arena& arena, const std::map<VertexId, std::size_t>& n_map)
{
    std::int64_t modes = 1;
    std::int64_t init = 0;
    bool plus = false;
    if (const auto* t = s.as<StepCounterPlusK>()) {
        modes = t->modes;
        init = t->initial_mode;
        plus = true;
    } else if (s.kind() != StrategyKind::StepCounter &&
               !(s.kind() == StrategyKind::Scripted && s.step_counter_based() && s.initial().size() == 1)) {
        throw DomainError("collapse needs a step-counter strategy, got " + to_string(s.kind()));
    }
    auto memory = [&](std::size_t step, std::int64_t mode) {
        Memory m{static_cast<std::int64_t>(step)};
        if (plus)
            m.push_back(mode);
        return m;
    };

    FiniteMemoryTable fm;
    fm.states = modes;
    fm.initial_state = init;
    fm.fallback = Fallback::Error;
    for (const auto& [v, step] : n_map) {
        auto x = arena.expand(v);
        bool sink = is_sink(v, *x);
        for (std::int64_t mode = 0; mode < modes; ++mode) {
            if (x->owner == s.player())
                fm.moves[{v, mode}] = sink ? x->edges.front() : s.choose(memory(step, mode), v, x->edges);
            if (sink || !plus)
                continue;
            for (const auto& e : x->edges) {
                auto next = s.update(memory(step, mode), e).at(1);
                if (next != mode)
                    fm.edge_updates[{mode, e}] = next;
            }
        }
    }
    if (modes == 1) {
        MemorylessTable ml;
        ml.fallback = Fallback::Error;
        for (auto& [key, e] : fm.moves)
            ml.moves.emplace(key.first, e);
        return make_memoryless(s.name() + "-collapsed", s.player(), std::move(ml));
    }
    return make_finite_memory(s.name() + "-collapsed", s.player(), std::move(fm));
}

// ---- strategy files ---------------------------------------------------------

namespace {

struct Line {
    std::vector<std::string> words;
    std::map<std::string, std::string> attrs;
    std::vector<std::string> after_arrow; // words after "->"
    std::map<std::string, std::string> after_attrs;
};

Line tokenize(const std::string& text)
{
    Line line;
    std::istringstream in{text};
    std::string tok;
    bool arrow = false;
    while (in >> tok) {
        if (tok == "->") {
            arrow = true;
            continue;
        }
        auto eq = tok.find('=');
        auto& attrs = arrow ? line.after_attrs : line.attrs;
        auto& words = arrow ? line.after_arrow : line.words;
        const bool header_name = !arrow && words.size() == 1 && words[0] == "strategy";
        if (eq != std::string::npos && eq > 0 && !header_name)
            attrs[tok.substr(0, eq)] = tok.substr(eq + 1);
        else
            words.push_back(tok);
    }
    return line;
}

std::int64_t to_int(const std::string& text, std::size_t lineno)
{
    try {
        std::size_t used = 0;
        auto v = std::stoll(text, &used);
        if (used == text.size())
            return v;
    } catch (const std::exception&) {
    }
    throw ParseError(lineno, "expected an integer, got '" + text + "'");
}

bool is_class(const std::string& word) { return !word.empty() && word[0] == '@'; }

EdgePattern parse_pattern(const std::string& spec, const std::map<std::string, std::string>& attrs, std::size_t lineno)
{
    auto arrow = spec.find("->");
    if (arrow == std::string::npos)
        throw ParseError(lineno, "edge must be written <from>-><to>");
    std::string a = spec.substr(0, arrow);
    std::string b = spec.substr(arrow + 2);
    std::optional<Weight> w;
    if (auto it = attrs.find("weight"); it != attrs.end())
        w = Weight::parse(it->second);
    if (is_class(a) != is_class(b))
        throw ParseError(lineno, "edge pattern mixes vertex names and vertex ids");
    if (is_class(a))
        return EdgePattern::names(a.substr(1), b.substr(1), w);
    EdgePattern p;
    p.from = VertexId::parse(a);
    p.to = VertexId::parse(b);
    p.weight = w;
    return p;
}

std::string header_player(Player p) { return p == Player::Two ? " player=2" : ""; }

std::string fallback_str(Fallback f) { return f == Fallback::Error ? "error" : "first"; }

std::string move_target(const Edge& e) { return e.to.str() + " weight=" + e.weight.str(); }

std::string class_target(const ClassMove& c)
{
    return "@" + c.target + (c.weight ? " weight=" + c.weight->str() : "");
}

} // namespace

Strategy parse_strategy(std::string_view text)
{
    std::istringstream in{std::string{text}};
    std::string raw;
    std::size_t lineno = 0;
    std::optional<std::string> name;
    std::string kind;
    Player player = Player::One;
    Fallback fallback = Fallback::FirstEdge;
    std::int64_t states = 1;
    std::int64_t initial = 0;
    std::int64_t horizon = 0;

    MemorylessTable ml;
    FiniteMemoryTable fm;
    StepCounterTable sc;
    StepCounterPlusK sck;

    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        Line line = tokenize(raw);
        if (line.words.empty())
            continue;
        const auto& head = line.words[0];
        auto attr = [&](const std::string& key) -> std::optional<std::string> {
            if (auto it = line.attrs.find(key); it != line.attrs.end())
                return it->second;
            return std::nullopt;
        };
        if (head == "strategy") {
            if (name)
                throw ParseError(lineno, "second strategy header");
            if (line.words.size() != 2)
                throw ParseError(lineno, "strategy header needs a name");
            name = line.words[1];
            kind = attr("kind").value_or("");
            if (kind != "memoryless" && kind != "fm" && kind != "sc" && kind != "sc+k")
                throw ParseError(lineno, "unknown strategy kind '" + kind + "'");
            if (auto f = attr("fallback")) {
                if (*f == "first")
                    fallback = Fallback::FirstEdge;
                else if (*f == "error")
                    fallback = Fallback::Error;
                else
                    throw ParseError(lineno, "unknown fallback '" + *f + "'");
            }
            if (auto p = attr("player"))
                player = to_int(*p, lineno) == 2 ? Player::Two : Player::One;
            if (auto k = attr("states"))
                states = to_int(*k, lineno);
            if (auto k = attr("initial"))
                initial = to_int(*k, lineno);
            if (auto k = attr("horizon"))
                horizon = to_int(*k, lineno);
            continue;
        }
        if (!name)
            throw ParseError(lineno, "missing strategy header");
        if (head == "move") {
            if (line.words.size() != 2 || line.after_arrow.size() != 1)
                throw ParseError(lineno, "move lines look like: move <vertex> [state=m] [step=s] -> <to> weight=<w>");
            const auto& src = line.words[1];
            const auto& dst = line.after_arrow[0];
            std::optional<Weight> w;
            if (auto it = line.after_attrs.find("weight"); it != line.after_attrs.end())
                w = Weight::parse(it->second);
            std::int64_t state = attr("state") ? to_int(*attr("state"), lineno) : 0;
            std::int64_t step = attr("step") ? to_int(*attr("step"), lineno) : 0;
            if (is_class(src) != is_class(dst))
                throw ParseError(lineno, "move mixes vertex names and vertex ids");
            if (is_class(src)) {
                ClassMove c{dst.substr(1), w};
                if (kind == "memoryless")
                    ml.class_moves[src.substr(1)] = c;
                else if (kind == "fm")
                    fm.class_moves[{src.substr(1), state}] = c;
                else
                    throw ParseError(lineno, "name-based moves are only supported for memoryless and fm strategies");
                continue;
            }
            if (!w)
                throw ParseError(lineno, "move needs weight=<w>");
            Edge e{VertexId::parse(src), *w, VertexId::parse(dst)};
            if (kind == "memoryless")
                ml.moves[e.from] = e;
            else if (kind == "fm")
                fm.moves[{e.from, state}] = e;
            else if (kind == "sc")
                sc.moves[{e.from, step}] = e;
            else
                sck.moves[{e.from, step, state}] = e;
            continue;
        }
        if (head == "memupd" || head == "bitupd") {
            if (head == "memupd" ? kind != "fm" : kind != "sc+k")
                throw ParseError(lineno, head + " does not belong to kind=" + kind);
            auto edge = attr("edge");
            if (!edge || line.after_arrow.size() != 1)
                throw ParseError(lineno, head + " lines look like: " + head + " state=<m> edge=<from>-><to> -> <m'>");
            EdgePattern p = parse_pattern(*edge, line.attrs, lineno);
            std::int64_t state = to_int(attr("state").value_or("0"), lineno);
            std::int64_t next = to_int(line.after_arrow[0], lineno);
            if (head == "memupd") {
                if (!p.by_name && p.weight)
                    fm.edge_updates[{state, Edge{p.from, *p.weight, p.to}}] = next;
                else
                    fm.pattern_updates.emplace_back(state, p, next);
            } else {
                std::int64_t step = to_int(attr("step").value_or("0"), lineno);
                if (!p.by_name && p.weight)
                    sck.edge_updates[{step, state, Edge{p.from, *p.weight, p.to}}] = next;
                else
                    sck.pattern_updates[{step, state}].emplace_back(p, next);
            }
            continue;
        }
        if (head == "reset" && kind == "sc+k") {
            auto step = attr("step");
            if (!step)
                throw ParseError(lineno, "reset lines look like: reset step=<s>");
            sck.resets.insert(to_int(*step, lineno));
            continue;
        }
        throw ParseError(lineno, "unknown line '" + head + "'");
    }
    if (!name)
        throw ParseError("missing strategy header");
    if (kind == "memoryless") {
        ml.fallback = fallback;
        return make_memoryless(*name, player, std::move(ml));
    }
    if (kind == "fm") {
        fm.states = states;
        fm.initial_state = initial;
        fm.fallback = fallback;
        return make_finite_memory(*name, player, std::move(fm));
    }
    if (kind == "sc") {
        sc.horizon = horizon;
        sc.fallback = fallback;
        return make_step_counter(*name, player, std::move(sc));
    }
    sck.modes = states;
    sck.initial_mode = initial;
    sck.horizon = horizon;
    sck.fallback = fallback;
    return make_step_counter_plus(*name, player, std::move(sck));
}

std::string serialize_strategy(const Strategy& s)
{
    std::ostringstream out;
    auto pl = header_player(s.player());
    if (const auto* t = s.as<MemorylessTable>()) {
        out << "strategy " << s.name() << " kind=memoryless fallback=" << fallback_str(t->fallback) << pl << "\n";
        for (const auto& [v, e] : t->moves)
            out << "move " << v.str() << " -> " << move_target(e) << "\n";
        for (const auto& [n, c] : t->class_moves)
            out << "move @" << n << " -> " << class_target(c) << "\n";
        return out.str();
    }
    if (const auto* t = s.as<FiniteMemoryTable>()) {
        out << "strategy " << s.name() << " kind=fm states=" << t->states << " initial=" << t->initial_state
            << " fallback=" << fallback_str(t->fallback) << pl << "\n";
        for (const auto& [key, e] : t->moves)
            out << "move " << key.first.str() << " state=" << key.second << " -> " << move_target(e) << "\n";
        for (const auto& [key, c] : t->class_moves)
            out << "move @" << key.first << " state=" << key.second << " -> " << class_target(c) << "\n";
        for (const auto& [key, next] : t->edge_updates)
            out << "memupd state=" << key.first << " edge=" << key.second.from.str() << "->" << key.second.to.str()
                << " weight=" << key.second.weight.str() << " -> " << next << "\n";
        for (const auto& [state, p, next] : t->pattern_updates)
            out << "memupd state=" << state << " edge=" << p.str() << " -> " << next << "\n";
        return out.str();
    }
    if (const auto* t = s.as<StepCounterTable>()) {
        out << "strategy " << s.name() << " kind=sc horizon=" << t->horizon << " fallback=" << fallback_str(t->fallback)
            << pl << "\n";
        for (const auto& [key, e] : t->moves)
            out << "move " << key.first.str() << " step=" << key.second << " -> " << move_target(e) << "\n";
        return out.str();
    }
    if (const auto* t = s.as<StepCounterPlusK>()) {
        out << "strategy " << s.name() << " kind=sc+k states=" << t->modes << " initial=" << t->initial_mode
            << " horizon=" << t->horizon << " fallback=" << fallback_str(t->fallback) << pl << "\n";
        for (const auto& [key, e] : t->moves)
            out << "move " << std::get<0>(key).str() << " step=" << std::get<1>(key) << " state=" << std::get<2>(key)
                << " -> " << move_target(e) << "\n";
        for (const auto& [key, next] : t->edge_updates) {
            const auto& [step, mode, e] = key;
            out << "bitupd state=" << mode << " step=" << step << " edge=" << e.from.str() << "->" << e.to.str()
                << " weight=" << e.weight.str() << " -> " << next << "\n";
        }
        for (const auto& [key, rules] : t->pattern_updates)
            for (const auto& [p, next] : rules)
                out << "bitupd state=" << key.second << " step=" << key.first << " edge=" << p.str() << " -> " << next
                    << "\n";
        for (auto step : t->resets)
            out << "reset step=" << step << "\n";
        return out.str();
    }
    throw DomainError("strategy " + s.name() + " of kind " + to_string(s.kind()) + " has no file form");
}

} // namespace qg
