#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qg/certificate.hpp"
#include "qg/objectives.hpp"
#include "qg/strategy.hpp"
#include "qg/zoo.hpp"

namespace qg {

// Everything a certificate refers to, rebuilt from its context block.
struct ResolvedContext {
    std::optional<ZooEntry> zoo;
    std::optional<Arena> arena;
    VertexId start;
    std::optional<Strategy> p1;
    std::optional<Strategy> p2;
};

ResolvedContext resolve_context(const Certificate& c);

struct CheckResult {
    bool ok = false;
    std::vector<std::string> diagnostics; // failures, or a summary line when accepted
    std::string scope;                    // what the acceptance does not cover, if anything

    [[nodiscard]] std::string str() const;
};

// Replays the certificate's play and recomputes every claimed quantity.
// Malformed certificates are rejected with a reason instead of throwing.
CheckResult check_certificate(const Certificate& c);
CheckResult check_certificate(const Certificate& c, const ResolvedContext& context);

// Open sets as they appear in KoenigBound and LevelSatisfaction claims:
// {"family":"TPsupGE0","m":3} or {"family":"MPsupGE0","m":1,"i":2}.
nlohmann::json open_sub_json(const OpenSub& o);
OpenSub open_sub_from_json(const nlohmann::json& j);

// Upper bound on the horizon a certificate may ask the checker to replay.
inline constexpr std::uint64_t max_check_horizon = 5'000'000;

} // namespace qg
