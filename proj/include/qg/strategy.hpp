#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "qg/arena.hpp"

namespace qg {

// Memory state of a strategy after a history. Step counters keep the step in
// slot 0; finite memory keeps its state; scripted strategies use whatever they like.
using Memory = boost::container::small_vector<std::int64_t, 4>;

std::string memory_str(const Memory& m);

enum class StrategyKind { Memoryless, FiniteMemory, StepCounter, StepCounterPlusK, Scripted, Composite };
enum class Fallback { FirstEdge, Error };

std::string to_string(StrategyKind k);

class StrategyImpl {
public:
    virtual ~StrategyImpl() = default;
    [[nodiscard]] virtual StrategyKind kind() const = 0;
    [[nodiscard]] virtual Memory initial() const = 0;
    [[nodiscard]] virtual Memory update(const Memory& m, const Edge& e) const = 0;
    [[nodiscard]] virtual Edge choose(const Memory& m, const VertexId& v, std::span<const Edge> out) const = 0;
};

class Strategy {
public:
    Strategy(std::string name, Player player, std::shared_ptr<const StrategyImpl> impl);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] Player player() const { return player_; }
    [[nodiscard]] StrategyKind kind() const { return impl_->kind(); }
    [[nodiscard]] Memory initial() const { return impl_->initial(); }
    [[nodiscard]] Memory update(const Memory& m, const Edge& e) const { return impl_->update(m, e); }
    [[nodiscard]] Edge choose(const Memory& m, const VertexId& v, std::span<const Edge> out) const;
    // True for step-counter tables, SC+K tables and scripted strategies declared as such.
    [[nodiscard]] bool step_counter_based() const;

    template <class T>
    [[nodiscard]] const T* as() const
    {
        return dynamic_cast<const T*>(impl_.get());
    }

    [[nodiscard]] Strategy renamed(std::string name) const;

private:
    std::string name_;
    Player player_;
    std::shared_ptr<const StrategyImpl> impl_;
};

// Picks an edge by target name: the first edge whose target carries this name
// (and this weight, when given). Used for strategies that only look at vertex names.
struct ClassMove {
    std::string target;
    std::optional<Weight> weight;

    [[nodiscard]] std::optional<Edge> pick(std::span<const Edge> out) const;
    friend bool operator==(const ClassMove&, const ClassMove&) = default;
};

// A rule matching edges either exactly (vertex ids) or by vertex names.
struct EdgePattern {
    bool by_name = false;
    std::string from_name, to_name;
    VertexId from, to;
    std::optional<Weight> weight;

    [[nodiscard]] bool matches(const Edge& e) const;
    [[nodiscard]] std::string str() const;
    static EdgePattern exact(const Edge& e);
    static EdgePattern names(std::string from, std::string to, std::optional<Weight> w = std::nullopt);
};

class MemorylessTable final : public StrategyImpl {
public:
    Fallback fallback = Fallback::FirstEdge;
    std::map<VertexId, Edge> moves;
    std::map<std::string, ClassMove> class_moves;

    [[nodiscard]] StrategyKind kind() const override { return StrategyKind::Memoryless; }
    [[nodiscard]] Memory initial() const override { return {}; }
    [[nodiscard]] Memory update(const Memory& m, const Edge&) const override { return m; }
    [[nodiscard]] Edge choose(const Memory& m, const VertexId& v, std::span<const Edge> out) const override;
};

class FiniteMemoryTable final : public StrategyImpl {
public:
    std::int64_t states = 1;
    std::int64_t initial_state = 0;
    Fallback fallback = Fallback::FirstEdge;
    std::map<std::pair<VertexId, std::int64_t>, Edge> moves;
    std::map<std::pair<std::string, std::int64_t>, ClassMove> class_moves;
    // Exact edges first, then patterns in order; no match keeps the state.
    std::map<std::pair<std::int64_t, Edge>, std::int64_t> edge_updates;
    std::vector<std::tuple<std::int64_t, EdgePattern, std::int64_t>> pattern_updates;

    [[nodiscard]] StrategyKind kind() const override { return StrategyKind::FiniteMemory; }
    [[nodiscard]] Memory initial() const override { return {initial_state}; }
    [[nodiscard]] Memory update(const Memory& m, const Edge& e) const override;
    [[nodiscard]] Edge choose(const Memory& m, const VertexId& v, std::span<const Edge> out) const override;
    [[nodiscard]] bool name_uniform() const { return moves.empty(); }
};

class StepCounterTable final : public StrategyImpl {
public:
    std::int64_t horizon = 0;
    Fallback fallback = Fallback::FirstEdge;
    std::map<std::pair<VertexId, std::int64_t>, Edge> moves;

    [[nodiscard]] StrategyKind kind() const override { return StrategyKind::StepCounter; }
    [[nodiscard]] Memory initial() const override { return {0}; }
    [[nodiscard]] Memory update(const Memory& m, const Edge&) const override { return {m[0] + 1}; }
    [[nodiscard]] Edge choose(const Memory& m, const VertexId& v, std::span<const Edge> out) const override;
};

class StepCounterPlusK final : public StrategyImpl {
public:
    std::int64_t modes = 2;
    std::int64_t initial_mode = 0;
    std::int64_t horizon = 0;
    Fallback fallback = Fallback::FirstEdge;
    std::map<std::tuple<VertexId, std::int64_t, std::int64_t>, Edge> moves;
    // (step, mode, edge) -> next mode; unmatched keeps the mode.
    std::map<std::tuple<std::int64_t, std::int64_t, Edge>, std::int64_t> edge_updates;
    std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::pair<EdgePattern, std::int64_t>>> pattern_updates;
    // Steps after which the mode returns to initial_mode, whatever the edge.
    std::set<std::int64_t> resets;

    [[nodiscard]] StrategyKind kind() const override { return StrategyKind::StepCounterPlusK; }
    [[nodiscard]] Memory initial() const override { return {0, initial_mode}; }
    [[nodiscard]] Memory update(const Memory& m, const Edge& e) const override;
    [[nodiscard]] Edge choose(const Memory& m, const VertexId& v, std::span<const Edge> out) const override;
};

class Scripted final : public StrategyImpl {
public:
    using Update = std::function<Memory(const Memory&, const Edge&)>;
    using Choose = std::function<Edge(const Memory&, const VertexId&, std::span<const Edge>)>;

    Scripted(Memory init, Update update, Choose choose, bool step_counter_based = false)
        : init_{std::move(init)}, update_{std::move(update)}, choose_{std::move(choose)},
          step_counter_{step_counter_based}
    {
    }

    [[nodiscard]] StrategyKind kind() const override { return StrategyKind::Scripted; }
    [[nodiscard]] Memory initial() const override { return init_; }
    [[nodiscard]] Memory update(const Memory& m, const Edge& e) const override { return update_(m, e); }
    [[nodiscard]] Edge choose(const Memory& m, const VertexId& v, std::span<const Edge> out) const override
    {
        return choose_(m, v, out);
    }
    [[nodiscard]] bool step_counter_based() const { return step_counter_; }

private:
    Memory init_;
    Update update_;
    Choose choose_;
    bool step_counter_;
};

// Plays `first` for the first `switch_step` steps and `then` afterwards. Both
// memories follow the whole history, so `then` must cope with any prefix.
// Layout: [step, |m1|, m1..., m2...].
class Composite final : public StrategyImpl {
public:
    Composite(Strategy first, std::int64_t switch_step, Strategy then);

    [[nodiscard]] StrategyKind kind() const override { return StrategyKind::Composite; }
    [[nodiscard]] Memory initial() const override;
    [[nodiscard]] Memory update(const Memory& m, const Edge& e) const override;
    [[nodiscard]] Edge choose(const Memory& m, const VertexId& v, std::span<const Edge> out) const override;

    [[nodiscard]] const Strategy& first() const { return first_; }
    [[nodiscard]] const Strategy& then() const { return then_; }
    [[nodiscard]] std::int64_t switch_step() const { return switch_; }

private:
    Strategy first_;
    std::int64_t switch_;
    Strategy then_;
};

Strategy make_memoryless(std::string name, Player player, MemorylessTable table);
Strategy make_finite_memory(std::string name, Player player, FiniteMemoryTable table);
Strategy make_step_counter(std::string name, Player player, StepCounterTable table);
Strategy make_step_counter_plus(std::string name, Player player, StepCounterPlusK table);
Strategy make_scripted(std::string name, Player player, Memory init, Scripted::Update update, Scripted::Choose choose,
                       bool step_counter_based = false);
Strategy make_composite(Strategy first, std::int64_t switch_step, Strategy then);
// Always takes the first edge in the canonical order.
Strategy first_edge_strategy(Player player);

Memory memory_after(const Strategy& s, const History& h);
Edge decide(const Strategy& s, const Arena& arena, const History& h);
bool consistent(const Strategy& s, const Arena& arena, const History& h);

// Replaces the step counter by the step-encoding map: f(v, m) = old(v, n_v, m),
// δ(m, e) = δ'((n_from(e), m), e). K = 1 yields a memoryless strategy.
Strategy collapse_sc_fm(const Strategy& s, const Arena& arena, const std::map<VertexId, std::size_t>& n_map);

// Strategy files.
Strategy parse_strategy(std::string_view text);
std::string serialize_strategy(const Strategy& s);

} // namespace qg
