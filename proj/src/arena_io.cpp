#include "qg/arena_io.hpp"

#include <deque>
#include <sstream>
#include <unordered_set>

#include "qg/error.hpp"

namespace qg {

namespace {

std::vector<std::string> words_of(const std::string& line)
{
    std::istringstream in{line};
    std::vector<std::string> out;
    std::string w;
    while (in >> w)
        out.push_back(w);
    return out;
}

std::string value_of(const std::string& word, const std::string& key, std::size_t lineno)
{
    if (word.rfind(key + "=", 0) != 0)
        throw ParseError(lineno, "expected " + key + "=..., got '" + word + "'");
    return word.substr(key.size() + 1);
}

VertexId vertex_at(const std::string& word, std::size_t lineno)
{
    try {
        return VertexId::parse(word);
    } catch (const ParseError& e) {
        throw ParseError(lineno, e.what());
    }
}

} // namespace

ExplicitArena parse_arena(std::string_view text)
{
    ExplicitArena arena;
    bool named = false;
    std::vector<std::pair<Edge, std::size_t>> edges;
    std::istringstream in{std::string{text}};
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        auto w = words_of(raw);
        if (w.empty())
            continue;
        if (w[0] == "arena") {
            if (w.size() != 2)
                throw ParseError(lineno, "arena line needs exactly one name");
            if (named)
                throw ParseError(lineno, "duplicate arena line");
            arena.set_name(w[1]);
            named = true;
        } else if (w[0] == "vertex") {
            if (w.size() != 3)
                throw ParseError(lineno, "vertex lines look like: vertex <id> owner=<1|2>");
            auto v = vertex_at(w[1], lineno);
            auto owner = value_of(w[2], "owner", lineno);
            if (owner != "1" && owner != "2")
                throw ParseError(lineno, "owner must be 1 or 2");
            if (arena.contains(v))
                throw ParseError(lineno, "vertex " + v.str() + " declared twice");
            arena.add_vertex(v, owner == "1" ? Player::One : Player::Two);
        } else if (w[0] == "edge") {
            if (w.size() != 4)
                throw ParseError(lineno, "edge lines look like: edge <from> <to> weight=<w>");
            Weight weight;
            try {
                weight = Weight::parse(value_of(w[3], "weight", lineno));
            } catch (const ParseError& e) {
                throw ParseError(lineno, e.what());
            }
            edges.push_back({Edge{vertex_at(w[1], lineno), weight, vertex_at(w[2], lineno)}, lineno});
        } else if (w[0] == "start") {
            if (w.size() != 2)
                throw ParseError(lineno, "start line needs exactly one vertex");
            if (arena.start())
                throw ParseError(lineno, "duplicate start line");
            arena.set_start(vertex_at(w[1], lineno));
        } else {
            throw ParseError(lineno, "unknown directive '" + w[0] + "'");
        }
    }
    for (auto& [e, line] : edges) {
        if (!arena.contains(e.from))
            throw ParseError(line, "dangling vertex " + e.from.str());
        if (!arena.contains(e.to))
            throw ParseError(line, "dangling vertex " + e.to.str());
        arena.add_edge(e);
    }
    if (!arena.start())
        throw ParseError("no start vertex");
    if (!arena.contains(*arena.start()))
        throw ParseError("start vertex " + arena.start()->str() + " is not declared");
    for (const auto& [v, node] : arena.nodes())
        if (node.edges.empty())
            throw ParseError("blocking vertex " + v.str());
    if (!named)
        arena.set_name("arena");
    return arena;
}

std::string serialize_arena(const ExplicitArena& arena)
{
    std::ostringstream out;
    out << "arena " << (arena.name().empty() ? "arena" : arena.name()) << "\n";
    for (const auto& [v, node] : arena.nodes())
        out << "vertex " << v.str() << " owner=" << (node.owner == Player::One ? 1 : 2) << "\n";
    for (const auto& [v, node] : arena.nodes())
        for (const auto& e : node.edges)
            out << "edge " << e.from.str() << " " << e.to.str() << " weight=" << e.weight.str() << "\n";
    if (arena.start())
        out << "start " << arena.start()->str() << "\n";
    return out.str();
}

ExplicitArena materialize(const Arena& arena, std::size_t max_vertices)
{
    if (const auto* ex = arena.as_explicit())
        return *ex;
    ExplicitArena out{arena.name()};
    std::unordered_set<VertexId> seen;
    std::deque<VertexId> queue;
    for (const auto& s : arena.starts())
        if (seen.insert(s).second)
            queue.push_back(s);
    std::vector<Edge> edges;
    while (!queue.empty()) {
        VertexId v = queue.front();
        queue.pop_front();
        auto x = arena.expand(v);
        out.add_vertex(v, x->owner);
        for (const auto& e : x->edges) {
            edges.push_back(e);
            if (seen.insert(e.to).second) {
                if (seen.size() > max_vertices)
                    throw DomainError("arena " + arena.name() + " has more than " + std::to_string(max_vertices) +
                                      " reachable vertices");
                queue.push_back(e.to);
            }
        }
    }
    for (auto& e : edges)
        out.add_edge(std::move(e));
    out.set_start(arena.root());
    return out;
}

} // namespace qg
