#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qg/certificate.hpp"
#include "qg/engine.hpp"
#include "qg/strategy.hpp"
#include "qg/zoo.hpp"

namespace qg {

// A Player 1 strategy plus the text that names it in a certificate: a zoo
// strategy reference or the strategy file contents.
struct P1Input {
    Strategy strategy;
    std::string ref;
};

// Player 2 plans, as stored in certificates:
//   {"kind":"a4_route","entry":l0,"route":[l1,...],"gap":d}   enter t_l0, then drop into each route index in
//                                                              turn, continuing with steps of d
//   {"kind":"a3_entry","entry":i}
//   {"kind":"a1_rounds","picks":[p,...]}      round r plays -picks[r] (last one repeats)
//   {"kind":"a2_climbs","climbs":[j,...]}     round r climbs j steps before dropping (last one repeats)
//   {"kind":"buchib_lengths","lengths":[l,...]}
//   {"kind":"named","name":"allspike"}        a zoo strategy of the arena
//   {"kind":"table","text":"strategy ..."}    a strategy file
//   {"kind":"first_edge"}
Strategy plan_strategy(const nlohmann::json& plan, const ZooEntry* zoo);

// Exit decision per memory state at t_i, and the memory map along the gadget
// path t_i -> t_{i+j}.
struct RamseyLabel {
    std::vector<bool> exits;
    std::vector<std::int64_t> next;

    friend bool operator==(const RamseyLabel&, const RamseyLabel&) = default;
    [[nodiscard]] nlohmann::json to_json() const;
    static RamseyLabel from_json(const nlohmann::json& j);
};

// Number of memory states of a memoryless or finite-memory strategy; throws otherwise.
std::int64_t memory_states(const Strategy& s);

RamseyLabel ramsey_label(const Arena& a4, const Strategy& s, std::int64_t i, std::int64_t j);

// True when labels only depend on the gap j (name-uniform tables without
// weight-specific or vertex-specific rules).
bool gap_uniform(const Strategy& s);

struct AdversaryPlan {
    std::int64_t entry = 0;
    std::vector<std::int64_t> route;
    std::int64_t gap = 2;
    std::vector<std::int64_t> clique;
    RamseyLabel label;
    std::size_t window = 0;
    bool uniform = false;

    [[nodiscard]] nlohmann::json to_json() const; // the Player 2 plan
};

struct AdversaryResult {
    enum class Status { Defeated, Partial, Inconclusive, Failed };

    Status status = Status::Inconclusive;
    std::optional<Certificate> certificate;
    nlohmann::json plan;
    std::optional<AdversaryPlan> ramsey;
    std::optional<PlayRecord> play;
    std::string note;
};

std::string to_string(AdversaryResult::Status s);

// Picks an index clique of size K+2 in [K, window] whose pairs share one label.
std::optional<AdversaryPlan> find_ramsey_plan(const Arena& a4, const Strategy& s, std::size_t window);

AdversaryResult ramsey_adversary(const ZooEntry& a4, const P1Input& p1, std::size_t window, std::size_t horizon = 0);

// A1' and A2: outbid the largest answer the strategy can give.
AdversaryResult defeat_fm_match(const ZooEntry& arena, const P1Input& p1, std::size_t rounds = 20);

AdversaryResult defeat_sc_on_a3(const ZooEntry& a3, const P1Input& p1, std::size_t horizon);

AdversaryResult defeat_sc_buchi(const ZooEntry& buchib, const P1Input& p1, std::size_t horizon);

// Unbounded bit arena: all-hold against tables that never spike, all-spike otherwise.
AdversaryResult defeat_sc_bitarena(const ZooEntry& bitarena, const P1Input& p1, std::size_t horizon);

struct DefeatOptions {
    std::size_t window = 2000;
    std::size_t horizon = 0; // 0: pick per arena
    std::size_t rounds = 20;
};

// Dispatches on the zoo entry.
AdversaryResult defeat(const ZooEntry& arena, const P1Input& p1, const DefeatOptions& options);

} // namespace qg
