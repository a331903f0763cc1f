#include "qg/arena.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <deque>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "qg/error.hpp"

namespace qg {

// ---- VertexId -------------------------------------------------------------

VertexId::VertexId(std::string name, Params params) : name_{std::move(name)}, params_{std::move(params)}
{
    if (!valid_name(name_))
        throw DomainError("invalid vertex name '" + name_ + "'");
}

VertexId::VertexId(std::string name, std::initializer_list<std::int64_t> params)
    : VertexId(std::move(name), Params(params.begin(), params.end()))
{
}

bool VertexId::valid_name(std::string_view name)
{
    if (name.empty())
        return false;
    auto c0 = static_cast<unsigned char>(name[0]);
    if (!std::isalpha(c0) && c0 != '_')
        return false;
    return std::all_of(name.begin(), name.end(), [](char ch) {
        auto c = static_cast<unsigned char>(ch);
        return std::isalnum(c) || c == '_' || c == '~';
    });
}

VertexId VertexId::parse(std::string_view text)
{
    auto open = text.find('[');
    std::string name{text.substr(0, open)};
    if (!valid_name(name))
        throw ParseError("invalid vertex id '" + std::string{text} + "'");
    Params params;
    if (open != std::string_view::npos) {
        if (text.back() != ']')
            throw ParseError("invalid vertex id '" + std::string{text} + "'");
        std::string_view body = text.substr(open + 1, text.size() - open - 2);
        if (body.empty())
            throw ParseError("empty parameter list in '" + std::string{text} + "'");
        std::size_t pos = 0;
        while (pos <= body.size()) {
            auto comma = body.find(',', pos);
            std::string part{body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)};
            std::size_t used = 0;
            std::int64_t value = 0;
            try {
                value = std::stoll(part, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (part.empty() || used != part.size())
                throw ParseError("invalid vertex parameter '" + part + "'");
            params.push_back(value);
            if (comma == std::string_view::npos)
                break;
            pos = comma + 1;
        }
    }
    return VertexId{std::move(name), std::move(params)};
}

std::string VertexId::str() const
{
    if (params_.empty())
        return name_;
    std::string out = name_ + "[";
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (i > 0)
            out += ',';
        out += std::to_string(params_[i]);
    }
    return out + "]";
}

std::size_t VertexId::hash() const
{
    std::size_t h = std::hash<std::string>{}(name_);
    for (auto p : params_)
        h = h * 1000003u ^ std::hash<std::int64_t>{}(p);
    return h;
}

std::strong_ordering operator<=>(const VertexId& a, const VertexId& b)
{
    if (auto c = a.name_ <=> b.name_; c != 0)
        return c;
    return std::lexicographical_compare_three_way(a.params_.begin(), a.params_.end(), b.params_.begin(),
                                                  b.params_.end());
}

// ---- Edge / History ---------------------------------------------------------

std::string Edge::str() const { return from.str() + "-(" + weight.str() + ")->" + to.str(); }

std::strong_ordering operator<=>(const Edge& a, const Edge& b)
{
    if (auto c = a.from <=> b.from; c != 0)
        return c;
    if (auto c = a.to <=> b.to; c != 0)
        return c;
    return a.weight <=> b.weight;
}

bool is_sink(const VertexId& v, const Expansion& x)
{
    return x.edges.size() == 1 && x.edges[0].to == v && x.edges[0].weight.sign() == 0;
}

History::History(VertexId origin, std::vector<Edge> edges) : origin_{std::move(origin)}
{
    edges_.reserve(edges.size());
    for (auto& e : edges)
        push(e);
}

void History::push(const Edge& e)
{
    if (e.from != to())
        throw DomainError("edge " + e.str() + " does not continue a history ending at " + to().str());
    edges_.push_back(e);
}

History History::extended(const Edge& e) const
{
    History h = *this;
    h.push(e);
    return h;
}

std::vector<Weight> History::colours() const
{
    std::vector<Weight> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_)
        out.push_back(e.weight);
    return out;
}

Weight History::total() const
{
    Weight t;
    for (const auto& e : edges_)
        t += e.weight;
    return t;
}

History History::prefix(std::size_t n) const
{
    History h{origin_};
    h.edges_.assign(edges_.begin(), edges_.begin() + static_cast<std::ptrdiff_t>(std::min(n, edges_.size())));
    return h;
}

std::string History::str() const
{
    std::string out = origin_.str();
    for (const auto& e : edges_)
        out += " -(" + e.weight.str() + ")-> " + e.to.str();
    return out;
}

std::strong_ordering operator<=>(const History& a, const History& b)
{
    return std::lexicographical_compare_three_way(a.edges_.begin(), a.edges_.end(), b.edges_.begin(),
                                                  b.edges_.end());
}

// ---- ExplicitArena ----------------------------------------------------------

std::size_t& ExplicitArena::vertex_cap()
{
    static std::size_t cap = 1'000'000;
    return cap;
}

void ExplicitArena::add_vertex(const VertexId& v, Player owner)
{
    auto [it, inserted] = nodes_.try_emplace(v);
    if (inserted && nodes_.size() > vertex_cap()) {
        nodes_.erase(it);
        throw DomainError("explicit arena exceeds the vertex cap of " + std::to_string(vertex_cap()));
    }
    it->second.owner = owner;
}

void ExplicitArena::add_edge(Edge e)
{
    auto it = nodes_.find(e.from);
    if (it == nodes_.end())
        throw DomainError("edge from undeclared vertex " + e.from.str());
    auto& list = it->second.edges;
    auto pos = std::lower_bound(list.begin(), list.end(), e);
    if (pos != list.end() && *pos == e)
        return;
    list.insert(pos, std::move(e));
}

const ExplicitArena::Node& ExplicitArena::node(const VertexId& v) const
{
    auto it = nodes_.find(v);
    if (it == nodes_.end())
        throw DomainError("unknown vertex " + v.str());
    return it->second;
}

std::size_t ExplicitArena::edge_count() const
{
    std::size_t n = 0;
    for (const auto& [v, node] : nodes_)
        n += node.edges.size();
    return n;
}

std::vector<Edge> ExplicitArena::all_edges() const
{
    std::vector<Edge> out;
    for (const auto& [v, node] : nodes_)
        out.insert(out.end(), node.edges.begin(), node.edges.end());
    return out;
}

// ---- Arena ------------------------------------------------------------------

struct Arena::Impl {
    std::string name;
    std::vector<VertexId> starts;
    Expander expander;
    std::optional<std::size_t> bound;
    std::shared_ptr<const ExplicitArena> explicit_arena;
    std::unordered_map<VertexId, std::shared_ptr<const Expansion>> fixed;

    mutable std::shared_mutex mutex;
    mutable std::unordered_map<VertexId, std::shared_ptr<const Expansion>> cache;
    mutable std::atomic<bool> cache_enabled{true};
};

Arena::Arena(std::string name, std::vector<VertexId> starts, Expander expand, std::optional<std::size_t> bound)
    : impl_{std::make_shared<Impl>()}
{
    if (starts.empty())
        throw DomainError("arena '" + name + "' has no start vertex");
    impl_->name = std::move(name);
    impl_->starts = std::move(starts);
    impl_->expander = std::move(expand);
    impl_->bound = bound;
}

Arena::Arena(ExplicitArena arena) : impl_{std::make_shared<Impl>()}
{
    if (!arena.start())
        throw DomainError("arena '" + arena.name() + "' has no start vertex");
    impl_->name = arena.name();
    impl_->starts = {*arena.start()};
    auto shared = std::make_shared<const ExplicitArena>(std::move(arena));
    impl_->explicit_arena = shared;
    for (const auto& [v, node] : shared->nodes())
        impl_->fixed.emplace(v, std::make_shared<const Expansion>(Expansion{node.owner, node.edges}));
    impl_->expander = [shared](const VertexId& v) {
        const auto& node = shared->node(v);
        return Expansion{node.owner, node.edges};
    };
    impl_->cache_enabled = false;
}

const std::string& Arena::name() const { return impl_->name; }
const VertexId& Arena::root() const { return impl_->starts.front(); }
const std::vector<VertexId>& Arena::starts() const { return impl_->starts; }
std::optional<std::size_t> Arena::branching_bound() const { return impl_->bound; }
const ExplicitArena* Arena::as_explicit() const { return impl_->explicit_arena.get(); }

void Arena::set_cache_enabled(bool on) const
{
    if (impl_->explicit_arena)
        return;
    impl_->cache_enabled = on;
    if (!on) {
        std::unique_lock lock{impl_->mutex};
        impl_->cache.clear();
    }
}

Expansion Arena::expand_fresh(const VertexId& v) const
{
    Expansion x = impl_->expander(v);
    std::sort(x.edges.begin(), x.edges.end());
    return x;
}

std::shared_ptr<const Expansion> Arena::expand(const VertexId& v) const
{
    if (impl_->explicit_arena) {
        auto it = impl_->fixed.find(v);
        if (it == impl_->fixed.end())
            throw DomainError("unknown vertex " + v.str());
        return it->second;
    }
    if (!impl_->cache_enabled)
        return std::make_shared<const Expansion>(expand_fresh(v));
    {
        std::shared_lock lock{impl_->mutex};
        if (auto it = impl_->cache.find(v); it != impl_->cache.end())
            return it->second;
    }
    auto x = std::make_shared<const Expansion>(expand_fresh(v));
    std::unique_lock lock{impl_->mutex};
    auto [it, inserted] = impl_->cache.emplace(v, x);
    return it->second;
}

// ---- validation -------------------------------------------------------------

ValidationReport validate(const ExplicitArena& arena)
{
    ValidationReport report;
    report.explored = arena.vertex_count();
    if (!arena.start())
        report.violations.push_back({Violation::Kind::MissingStart, {}, "no start vertex"});
    else if (!arena.contains(*arena.start()))
        report.violations.push_back(
            {Violation::Kind::Dangling, *arena.start(), "start vertex " + arena.start()->str() + " is not declared"});
    for (const auto& [v, node] : arena.nodes()) {
        if (node.edges.empty())
            report.violations.push_back({Violation::Kind::Blocking, v, "blocking vertex " + v.str()});
        for (const auto& e : node.edges) {
            if (e.from != v)
                report.violations.push_back({Violation::Kind::WrongSource, v, "edge " + e.str() + " filed under " + v.str()});
            if (!arena.contains(e.to))
                report.violations.push_back(
                    {Violation::Kind::Dangling, e.to, "dangling vertex " + e.to.str() + " (edge " + e.str() + ")"});
        }
    }
    return report;
}

ValidationReport validate(const Arena& arena, std::size_t depth)
{
    if (const auto* ex = arena.as_explicit())
        return validate(*ex);
    ValidationReport report;
    std::unordered_set<VertexId> seen;
    std::vector<VertexId> level = arena.starts();
    for (const auto& s : level)
        seen.insert(s);
    for (std::size_t d = 0; !level.empty(); ++d) {
        std::vector<VertexId> next;
        for (const auto& v : level) {
            ++report.explored;
            Expansion a;
            Expansion b;
            try {
                a = arena.expand_fresh(v);
                b = arena.expand_fresh(v);
            } catch (const std::exception& ex) {
                report.violations.push_back({Violation::Kind::Dangling, v, "expansion of " + v.str() + " failed: " + ex.what()});
                continue;
            }
            if (!(a == b))
                report.violations.push_back(
                    {Violation::Kind::Nondeterministic, v, "expansion of " + v.str() + " is not deterministic"});
            if (a.edges.empty())
                report.violations.push_back({Violation::Kind::Blocking, v, "blocking vertex " + v.str()});
            if (arena.branching_bound() && a.edges.size() > *arena.branching_bound())
                report.violations.push_back({Violation::Kind::BranchingBound, v,
                                             v.str() + " has " + std::to_string(a.edges.size()) +
                                                 " edges, above the declared bound"});
            for (const auto& e : a.edges) {
                if (e.from != v)
                    report.violations.push_back(
                        {Violation::Kind::WrongSource, v, "edge " + e.str() + " returned for " + v.str()});
                if (d < depth && seen.insert(e.to).second)
                    next.push_back(e.to);
            }
        }
        if (d == depth) {
            report.frontier_open = true;
            break;
        }
        level = std::move(next);
    }
    return report;
}

// ---- memory structures and products ----------------------------------------

MemoryStructure MemoryStructure::mealy(std::int64_t states, std::int64_t initial, MealyUpdate update)
{
    if (states < 1 || initial < 0 || initial >= states)
        throw DomainError("Mealy memory needs 0 <= initial < states");
    MemoryStructure m;
    m.kind_ = Kind::Mealy;
    m.states_ = states;
    m.initial_ = initial;
    m.mealy_ = std::move(update);
    return m;
}

MemoryStructure MemoryStructure::step_counter()
{
    MemoryStructure m;
    m.kind_ = Kind::StepCounter;
    return m;
}

MemoryStructure MemoryStructure::step_counter_times(std::int64_t states, std::int64_t initial, StepUpdate update)
{
    if (states < 1 || initial < 0 || initial >= states)
        throw DomainError("step counter x K memory needs 0 <= initial < states");
    MemoryStructure m;
    m.kind_ = Kind::StepCounterTimesK;
    m.states_ = states;
    m.initial_ = initial;
    m.step_ = std::move(update);
    return m;
}

VertexId::Params MemoryStructure::initial_state() const
{
    switch (kind_) {
    case Kind::Mealy:
        return {initial_};
    case Kind::StepCounter:
        return {0};
    case Kind::StepCounterTimesK:
        return {0, initial_};
    }
    return {};
}

VertexId::Params MemoryStructure::update(const VertexId::Params& state, const Edge& e) const
{
    switch (kind_) {
    case Kind::Mealy: {
        auto next = mealy_(state.at(0), e);
        if (next < 0 || next >= states_)
            throw DomainError("Mealy update left the state space on " + e.str());
        return {next};
    }
    case Kind::StepCounter:
        return {state.at(0) + 1};
    case Kind::StepCounterTimesK: {
        auto next = step_(state.at(0), state.at(1), e);
        if (next < 0 || next >= states_)
            throw DomainError("step counter x K update left the state space on " + e.str());
        return {state.at(0) + 1, next};
    }
    }
    return state;
}

VertexId product_vertex(const VertexId& v, const VertexId::Params& state)
{
    VertexId::Params params = v.params();
    params.insert(params.end(), state.begin(), state.end());
    return VertexId{v.name() + "~", std::move(params)};
}

std::pair<VertexId, VertexId::Params> split_product_vertex(const VertexId& v, std::size_t state_size)
{
    const auto& name = v.name();
    if (name.empty() || name.back() != '~' || v.params().size() < state_size)
        throw DomainError(v.str() + " is not a product vertex");
    const auto& params = v.params();
    auto cut = params.end() - static_cast<std::ptrdiff_t>(state_size);
    VertexId base{name.substr(0, name.size() - 1), VertexId::Params(params.begin(), cut)};
    return {base, VertexId::Params(cut, params.end())};
}

Arena product(const Arena& arena, const MemoryStructure& memory)
{
    if (const auto* ex = arena.as_explicit(); ex && memory.kind() == MemoryStructure::Kind::Mealy)
        return Arena{product(*ex, memory)};
    std::size_t state_size = memory.initial_state().size();
    std::vector<VertexId> starts;
    for (const auto& s : arena.starts())
        starts.push_back(product_vertex(s, memory.initial_state()));
    auto expand = [arena, memory, state_size](const VertexId& pv) {
        auto [v, state] = split_product_vertex(pv, state_size);
        auto base = arena.expand(v);
        Expansion x{base->owner, {}};
        x.edges.reserve(base->edges.size());
        for (const auto& e : base->edges)
            x.edges.push_back(Edge{pv, e.weight, product_vertex(e.to, memory.update(state, e))});
        return x;
    };
    return Arena{arena.name() + "~", std::move(starts), std::move(expand), arena.branching_bound()};
}

ExplicitArena product(const ExplicitArena& arena, const MemoryStructure& memory)
{
    if (memory.kind() != MemoryStructure::Kind::Mealy)
        throw DomainError("an explicit product needs a finite Mealy memory; use the generator form");
    ExplicitArena out{arena.name() + "~"};
    for (const auto& [v, node] : arena.nodes())
        for (std::int64_t m = 0; m < memory.states(); ++m)
            out.add_vertex(product_vertex(v, {m}), node.owner);
    for (const auto& [v, node] : arena.nodes())
        for (std::int64_t m = 0; m < memory.states(); ++m)
            for (const auto& e : node.edges)
                out.add_edge(Edge{product_vertex(v, {m}), e.weight, product_vertex(e.to, memory.update({m}, e))});
    if (arena.start())
        out.set_start(product_vertex(*arena.start(), memory.initial_state()));
    return out;
}

// ---- step encoding ----------------------------------------------------------

StepEncoding encodes_step_count(const Arena& arena, const VertexId& v0, std::size_t depth)
{
    StepEncoding result;
    std::map<std::pair<VertexId, std::size_t>, Edge> parent;
    std::set<VertexId> sinks;

    auto rebuild = [&](const VertexId& v, std::size_t level) {
        std::vector<Edge> rev;
        VertexId cur = v;
        for (std::size_t l = level; l > 0; --l) {
            const Edge& e = parent.at({cur, l});
            rev.push_back(e);
            cur = e.from;
        }
        std::reverse(rev.begin(), rev.end());
        return History{v0, std::move(rev)};
    };

    result.steps[v0] = 0;
    std::vector<VertexId> level{v0};
    for (std::size_t l = 0; l < depth && !level.empty(); ++l) {
        std::vector<VertexId> next;
        for (const auto& v : level) {
            auto x = arena.expand(v);
            if (is_sink(v, *x)) {
                sinks.insert(v);
                continue;
            }
            for (const auto& e : x->edges) {
                auto it = result.steps.find(e.to);
                if (it != result.steps.end()) {
                    if (it->second == l + 1 || sinks.contains(e.to) || arena.sink(e.to))
                        continue;
                    parent.emplace(std::pair{e.to, l + 1}, e);
                    result.counterexample = std::pair{rebuild(e.to, it->second), rebuild(e.to, l + 1)};
                    result.sinks.assign(sinks.begin(), sinks.end());
                    return result;
                }
                result.steps.emplace(e.to, l + 1);
                parent.emplace(std::pair{e.to, l + 1}, e);
                next.push_back(e.to);
            }
        }
        level = std::move(next);
    }
    for (const auto& v : level)
        if (!arena.sink(v))
            result.frontier_open = true;
        else
            sinks.insert(v);
    result.sinks.assign(sinks.begin(), sinks.end());
    return result;
}

// ---- misc -------------------------------------------------------------------

std::vector<VertexId> reachable(const Arena& arena, const VertexId& v0, std::size_t depth)
{
    std::vector<VertexId> order{v0};
    std::unordered_set<VertexId> seen{v0};
    std::size_t begin = 0;
    for (std::size_t d = 0; d < depth; ++d) {
        std::size_t end = order.size();
        if (begin == end)
            break;
        for (std::size_t i = begin; i < end; ++i) {
            auto x = arena.expand(order[i]);
            for (const auto& e : x->edges)
                if (seen.insert(e.to).second)
                    order.push_back(e.to);
        }
        begin = end;
    }
    return order;
}

std::string to_dot(const Arena& arena, std::size_t depth)
{
    auto vertices = reachable(arena, arena.root(), depth);
    std::unordered_set<VertexId> inside(vertices.begin(), vertices.end());
    std::ostringstream out;
    out << "digraph \"" << arena.name() << "\" {\n";
    for (const auto& v : vertices) {
        auto owner = arena.owner(v) == Player::One ? 1 : 2;
        out << "  \"" << v.str() << "\" [label=\"" << v.str() << "|" << owner << "\""
            << (owner == 1 ? ", shape=box" : ", shape=diamond") << "];\n";
    }
    for (const auto& v : vertices)
        for (const auto& e : arena.expand(v)->edges)
            if (inside.contains(e.to))
                out << "  \"" << e.from.str() << "\" -> \"" << e.to.str() << "\" [label=\"" << e.weight.str()
                    << "\"];\n";
    out << "}\n";
    return out.str();
}

} // namespace qg
