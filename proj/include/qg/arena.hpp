#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "qg/weight.hpp"

namespace qg {

enum class Player : std::uint8_t { One = 1, Two = 2 };

inline Player opponent(Player p) { return p == Player::One ? Player::Two : Player::One; }

// A vertex is a name plus integer parameters, written `name` or `name[1,-2]`.
// The name doubles as the vertex "class" for name-uniform strategies.
class VertexId {
public:
    using Params = boost::container::small_vector<std::int64_t, 4>;

    VertexId() = default;
    explicit VertexId(std::string name, Params params = {});
    VertexId(std::string name, std::initializer_list<std::int64_t> params);

    static VertexId parse(std::string_view text);
    static bool valid_name(std::string_view name);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const Params& params() const { return params_; }
    [[nodiscard]] std::int64_t param(std::size_t i) const { return params_.at(i); }
    [[nodiscard]] std::string str() const;
    [[nodiscard]] std::size_t hash() const;

    friend bool operator==(const VertexId&, const VertexId&) = default;
    friend std::strong_ordering operator<=>(const VertexId& a, const VertexId& b);

private:
    std::string name_;
    Params params_;
};

struct Edge {
    VertexId from;
    Weight weight;
    VertexId to;

    [[nodiscard]] std::string str() const;

    friend bool operator==(const Edge&, const Edge&) = default;
    // (from, to, weight): within one adjacency list this is the canonical edge order.
    friend std::strong_ordering operator<=>(const Edge& a, const Edge& b);
};

struct Expansion {
    Player owner = Player::One;
    std::vector<Edge> edges;

    friend bool operator==(const Expansion&, const Expansion&) = default;
};

// The r0 pattern: the only edge is a weight-0 self-loop.
bool is_sink(const VertexId& v, const Expansion& x);

class History {
public:
    History() = default;
    explicit History(VertexId origin) : origin_{std::move(origin)} {}
    History(VertexId origin, std::vector<Edge> edges);

    [[nodiscard]] const VertexId& origin() const { return origin_; }
    [[nodiscard]] const VertexId& to() const { return edges_.empty() ? origin_ : edges_.back().to; }
    [[nodiscard]] std::size_t size() const { return edges_.size(); }
    [[nodiscard]] bool empty() const { return edges_.empty(); }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] std::vector<Weight> colours() const;
    [[nodiscard]] Weight total() const;
    [[nodiscard]] History prefix(std::size_t n) const;
    [[nodiscard]] std::string str() const;

    void push(const Edge& e);
    [[nodiscard]] History extended(const Edge& e) const;

    friend bool operator==(const History&, const History&) = default;
    // Lexicographic over the edge sequence; only meaningful for equal origins.
    friend std::strong_ordering operator<=>(const History& a, const History& b);

private:
    VertexId origin_;
    std::vector<Edge> edges_;
};

class ExplicitArena {
public:
    struct Node {
        Player owner = Player::One;
        std::vector<Edge> edges;
        friend bool operator==(const Node&, const Node&) = default;
    };

    ExplicitArena() = default;
    explicit ExplicitArena(std::string name) : name_{std::move(name)} {}

    static std::size_t& vertex_cap();

    void add_vertex(const VertexId& v, Player owner);
    // Endpoints are not required to exist yet; validate() reports dangling ones.
    void add_edge(Edge e);
    void set_start(VertexId v) { start_ = std::move(v); }
    void set_name(std::string name) { name_ = std::move(name); }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const std::optional<VertexId>& start() const { return start_; }
    [[nodiscard]] bool contains(const VertexId& v) const { return nodes_.contains(v); }
    [[nodiscard]] const Node& node(const VertexId& v) const;
    [[nodiscard]] const std::map<VertexId, Node>& nodes() const { return nodes_; }
    [[nodiscard]] std::size_t vertex_count() const { return nodes_.size(); }
    [[nodiscard]] std::size_t edge_count() const;
    [[nodiscard]] std::vector<Edge> all_edges() const;

    friend bool operator==(const ExplicitArena&, const ExplicitArena&) = default;

private:
    std::string name_;
    std::map<VertexId, Node> nodes_;
    std::optional<VertexId> start_;
};

// A possibly infinite arena, given by a root and an expansion function.
// Copies share the memo cache.
class Arena {
public:
    using Expander = std::function<Expansion(const VertexId&)>;

    Arena(std::string name, std::vector<VertexId> starts, Expander expand,
          std::optional<std::size_t> branching_bound = std::nullopt);
    explicit Arena(ExplicitArena arena);

    [[nodiscard]] const std::string& name() const;
    [[nodiscard]] const VertexId& root() const;
    [[nodiscard]] const std::vector<VertexId>& starts() const;
    [[nodiscard]] std::optional<std::size_t> branching_bound() const;
    [[nodiscard]] const ExplicitArena* as_explicit() const;

    [[nodiscard]] std::shared_ptr<const Expansion> expand(const VertexId& v) const;
    // Bypasses the cache; used by the determinism probe.
    [[nodiscard]] Expansion expand_fresh(const VertexId& v) const;
    [[nodiscard]] Player owner(const VertexId& v) const { return expand(v)->owner; }
    [[nodiscard]] bool sink(const VertexId& v) const { return is_sink(v, *expand(v)); }

    void set_cache_enabled(bool on) const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

struct Violation {
    enum class Kind { Blocking, Dangling, WrongSource, Nondeterministic, BranchingBound, MissingStart };
    Kind kind;
    VertexId vertex;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::size_t explored = 0;
    bool frontier_open = false; // exploration stopped at the depth limit

    [[nodiscard]] bool ok() const { return violations.empty(); }
};

ValidationReport validate(const ExplicitArena& arena);
ValidationReport validate(const Arena& arena, std::size_t depth);

// Memory structures used to build product arenas.
class MemoryStructure {
public:
    enum class Kind { Mealy, StepCounter, StepCounterTimesK };
    using MealyUpdate = std::function<std::int64_t(std::int64_t, const Edge&)>;
    using StepUpdate = std::function<std::int64_t(std::int64_t step, std::int64_t mode, const Edge&)>;

    static MemoryStructure mealy(std::int64_t states, std::int64_t initial, MealyUpdate update);
    static MemoryStructure step_counter();
    static MemoryStructure step_counter_times(std::int64_t states, std::int64_t initial, StepUpdate update);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] std::int64_t states() const { return states_; }
    [[nodiscard]] std::int64_t initial() const { return initial_; }
    [[nodiscard]] VertexId::Params initial_state() const;
    [[nodiscard]] VertexId::Params update(const VertexId::Params& state, const Edge& e) const;

private:
    Kind kind_ = Kind::StepCounter;
    std::int64_t states_ = 1;
    std::int64_t initial_ = 0;
    MealyUpdate mealy_;
    StepUpdate step_;
};

// Product vertex ids carry the memory state as trailing parameters and a '~'
// suffix on the name.
VertexId product_vertex(const VertexId& v, const VertexId::Params& state);
std::pair<VertexId, VertexId::Params> split_product_vertex(const VertexId& v, std::size_t state_size);

Arena product(const Arena& arena, const MemoryStructure& memory);
ExplicitArena product(const ExplicitArena& arena, const MemoryStructure& memory);

struct StepEncoding {
    std::map<VertexId, std::size_t> steps;
    std::optional<std::pair<History, History>> counterexample;
    std::vector<VertexId> sinks; // exempted: their self-loop revisits them at every later step
    bool frontier_open = false;  // vertices first seen at `depth` were not expanded

    [[nodiscard]] bool encoded() const { return !counterexample.has_value(); }
};

StepEncoding encodes_step_count(const Arena& arena, const VertexId& v0, std::size_t depth);

std::string to_dot(const Arena& arena, std::size_t depth);

// Breadth-first set of vertices reachable within `depth` steps, in discovery order.
std::vector<VertexId> reachable(const Arena& arena, const VertexId& v0, std::size_t depth);

} // namespace qg

template <>
struct std::hash<qg::VertexId> {
    std::size_t operator()(const qg::VertexId& v) const noexcept { return v.hash(); }
};
