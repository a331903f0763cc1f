#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qg/arena.hpp"
#include "qg/weight.hpp"

namespace qg {

enum class PayoffKind { TP, MP };
enum class Mode { Limsup, Liminf };
enum class Relation { Greater, GreaterEq };

// A value in Q extended with -inf and +inf.
class Extended {
public:
    enum class Kind { NegInf, Finite, PosInf };

    Extended() = default;
    Extended(Weight w) : value_{std::move(w)} {} // NOLINT(google-explicit-constructor)
    static Extended pos_inf() { return Extended{Kind::PosInf}; }
    static Extended neg_inf() { return Extended{Kind::NegInf}; }
    static Extended parse(std::string_view text);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] bool finite() const { return kind_ == Kind::Finite; }
    [[nodiscard]] const Weight& value() const;
    [[nodiscard]] std::string str() const;

    friend bool operator==(const Extended&, const Extended&) = default;
    friend std::strong_ordering operator<=>(const Extended& a, const Extended& b);

private:
    explicit Extended(Kind k) : kind_{k} {}
    Kind kind_ = Kind::Finite;
    Weight value_;
};

Weight payoff(PayoffKind kind, std::span<const Weight> word);

struct Objective {
    enum class Family { Quantitative, BuchiAll };

    Family family = Family::Quantitative;
    PayoffKind kind = PayoffKind::TP;
    Mode mode = Mode::Limsup;
    Relation relation = Relation::GreaterEq;
    Extended threshold;
    std::int64_t colours = 0; // BuchiAll: colour codes 0..colours-1

    // `tp:limsup:>=:0`, `mp:liminf:>:1/2`, `tp:limsup:>=:+inf`, `buchi-all:3`
    static Objective parse(std::string_view text);
    static Objective buchi_all(std::int64_t colours);
    [[nodiscard]] std::string str() const;
    // Borel level and which memory suffices, as far as it is known.
    [[nodiscard]] std::string classification() const;
};

class OpenSub {
public:
    enum class Family { MPsupGE0, TPinf, TPsupGE0, BuchiColour };

    static OpenSub mp_sup(std::int64_t m, std::int64_t i);
    static OpenSub tp_inf(std::int64_t m, std::int64_t i);
    static OpenSub tp_sup(std::int64_t m);
    static OpenSub buchi_colour(std::int64_t colour, std::int64_t i);

    [[nodiscard]] Family family() const { return family_; }
    [[nodiscard]] std::int64_t m() const { return m_; }
    [[nodiscard]] std::int64_t colour() const { return colour_; }
    [[nodiscard]] std::size_t step_index() const { return static_cast<std::size_t>(index_); }
    // Whether position j (1-based) with running total `tp` and colour `c` meets the bound,
    // ignoring the step index.
    [[nodiscard]] bool meets(std::size_t j, const Weight& tp, const Weight& c) const;
    // Quantitative families fire exactly when this reaches 0; it is additive along
    // a repeated cycle. None for Buchi.
    [[nodiscard]] std::optional<Weight> potential(std::size_t j, const Weight& tp) const;
    [[nodiscard]] bool uses_score() const { return family_ != Family::BuchiColour; }
    [[nodiscard]] std::string str() const;

    friend bool operator==(const OpenSub&, const OpenSub&) = default;

private:
    Family family_ = Family::TPsupGE0;
    std::int64_t m_ = 1;
    std::int64_t index_ = 1;
    std::int64_t colour_ = 0;
};

// Everything the comparator looks at for an equal-length prefix.
struct PrefixState {
    std::size_t length = 0;
    Weight tp;
    bool satisfied = false;

    void push(const OpenSub& o, const Weight& c);
    friend bool operator==(const PrefixState&, const PrefixState&) = default;
};

PrefixState prefix_state(const OpenSub& o, std::span<const Weight> word);

bool already_satisfies(const OpenSub& o, std::span<const Weight> word);

enum class Order { LE, GE, Both };

std::string to_string(Order o);

Order prefix_compare(const OpenSub& o, std::span<const Weight> w1, std::span<const Weight> w2);
Order prefix_compare(const OpenSub& o, const PrefixState& a, const PrefixState& b);

struct Lasso {
    std::vector<Weight> prefix;
    std::vector<Weight> cycle;
};

Extended lasso_limit(PayoffKind kind, Mode mode, const Lasso& lasso);
bool eval_on_lasso(const Objective& objective, const Lasso& lasso);

class Decomposition {
public:
    static Decomposition unsupported(std::string reason);
    static Decomposition of(Objective objective);

    [[nodiscard]] bool supported() const { return supported_; }
    [[nodiscard]] const std::string& reason() const { return reason_; }
    // Infinite families; index 0 is the first member.
    [[nodiscard]] OpenSub at(std::size_t index) const;
    [[nodiscard]] std::vector<OpenSub> first(std::size_t n) const;

private:
    bool supported_ = false;
    std::string reason_;
    Objective objective_;
};

Decomposition decompose(const Objective& objective);

// Moving a general threshold to 0: MP subtracts r from every weight, TP prepends
// a single edge of weight -r. Over integer weights TP > r becomes TP >= r+1 first.
struct ThresholdShift {
    Objective objective;        // the normalized objective, threshold 0 (or +-inf untouched)
    Weight per_edge;            // subtracted from each weight (MP)
    std::optional<Weight> lead; // weight of the prepended edge (TP)
};

ThresholdShift normalize_threshold(const Objective& objective, bool integer_weights);
Arena apply_shift(const Arena& arena, const ThresholdShift& shift);

} // namespace qg
