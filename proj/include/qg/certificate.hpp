#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qg/weight.hpp"

namespace qg {

// Finite evidence for a claim about an infinite play (or about every play of a
// strategy up to some depth). A certificate names everything needed to replay:
// the arena, the start vertex, Player 1's strategy, Player 2's plan and the
// horizon. Checkers recompute all quantities from that replay.
struct Certificate {
    enum class Variant {
        SinkPayoff,        // play reaches a zero loop with the given TP
        EarlyExitNegative, // play reaches a zero loop with TP below the threshold
        KoenigBound,       // every consistent history satisfies O_m by the given level
        LevelSatisfaction, // list of (m, k_m) pairs
        Divergence,        // memory cycle over rounds, each round loses at least `decrease`
        Stagnation,        // TP stays at or below a bound from some step up to the horizon
        ColourStarvation,  // a colour never occurs after some step up to the horizon
        RoundDecrease,     // TP at round starts drops by at least `decrease` per round
    };

    Variant variant = Variant::SinkPayoff;

    // Context.
    std::string arena;                 // zoo URI or inline arena text
    std::string start;                 // vertex id
    std::string p1;                    // zoo strategy ref or inline strategy text
    nlohmann::json p2 = nullptr;       // plan, see adversaries.hpp; null when not needed
    std::string objective;             // objective text, when the claim is about one
    std::uint64_t horizon = 0;

    // Variant payload; field names are documented with each checker.
    nlohmann::json claim = nlohmann::json::object();
    // Free-form producer notes; never read by the checkers.
    nlohmann::json notes = nlohmann::json::object();

    [[nodiscard]] nlohmann::json to_json() const;
    static Certificate from_json(const nlohmann::json& j);
    [[nodiscard]] std::string dump() const; // pretty, stable key order
    static Certificate parse(std::string_view text);
};

inline constexpr const char* certificate_schema = "qg-certificate/1";

std::string to_string(Certificate::Variant v);
Certificate::Variant variant_from_string(std::string_view s);

// Exact rationals travel as strings.
nlohmann::json weight_json(const Weight& w);
Weight json_weight(const nlohmann::json& j);

} // namespace qg
