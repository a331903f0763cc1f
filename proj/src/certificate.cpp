#include "qg/certificate.hpp"

#include <array>
#include <utility>

#include "qg/error.hpp"

namespace qg {

namespace {

constexpr std::array<std::pair<Certificate::Variant, const char*>, 8> variant_names{{
    {Certificate::Variant::SinkPayoff, "SinkPayoff"},
    {Certificate::Variant::EarlyExitNegative, "EarlyExitNegative"},
    {Certificate::Variant::KoenigBound, "KoenigBound"},
    {Certificate::Variant::LevelSatisfaction, "LevelSatisfaction"},
    {Certificate::Variant::Divergence, "Divergence"},
    {Certificate::Variant::Stagnation, "Stagnation"},
    {Certificate::Variant::ColourStarvation, "ColourStarvation"},
    {Certificate::Variant::RoundDecrease, "RoundDecrease"},
}};

template <class T>
T required(const nlohmann::json& j, const char* key)
{
    if (!j.contains(key))
        throw ParseError(std::string{"certificate: missing field '"} + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ParseError(std::string{"certificate: field '"} + key + "' has the wrong type");
    }
}

} // namespace

std::string to_string(Certificate::Variant v)
{
    for (const auto& [variant, name] : variant_names)
        if (variant == v)
            return name;
    return "?";
}

Certificate::Variant variant_from_string(std::string_view s)
{
    for (const auto& [variant, name] : variant_names)
        if (s == name)
            return variant;
    throw ParseError("certificate: unknown variant '" + std::string{s} + "'");
}

nlohmann::json weight_json(const Weight& w) { return w.str(); }

Weight json_weight(const nlohmann::json& j)
{
    if (j.is_number_integer())
        return Weight{j.get<std::int64_t>()};
    if (!j.is_string())
        throw ParseError("certificate: expected a rational, got " + j.dump());
    return Weight::parse(j.get<std::string>());
}

nlohmann::json Certificate::to_json() const
{
    nlohmann::json j;
    j["schema"] = certificate_schema;
    j["variant"] = to_string(variant);
    j["context"] = {{"arena", arena}, {"start", start}, {"p1", p1}, {"p2", p2}, {"horizon", horizon}};
    if (!objective.empty())
        j["context"]["objective"] = objective;
    j["claim"] = claim;
    if (!notes.empty())
        j["notes"] = notes;
    return j;
}

Certificate Certificate::from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw ParseError("certificate: expected a JSON object");
    if (required<std::string>(j, "schema") != certificate_schema)
        throw ParseError("certificate: unsupported schema '" + j["schema"].get<std::string>() + "'");
    Certificate c;
    c.variant = variant_from_string(required<std::string>(j, "variant"));
    const auto& ctx = j.contains("context") ? j["context"] : throw ParseError("certificate: missing field 'context'");
    c.arena = required<std::string>(ctx, "arena");
    c.start = required<std::string>(ctx, "start");
    c.p1 = ctx.contains("p1") ? ctx["p1"].get<std::string>() : std::string{};
    c.p2 = ctx.contains("p2") ? ctx["p2"] : nlohmann::json{};
    c.horizon = required<std::uint64_t>(ctx, "horizon");
    if (ctx.contains("objective"))
        c.objective = required<std::string>(ctx, "objective");
    c.claim = j.contains("claim") ? j["claim"] : nlohmann::json::object();
    if (!c.claim.is_object())
        throw ParseError("certificate: 'claim' must be an object");
    if (j.contains("notes"))
        c.notes = j["notes"];
    return c;
}

std::string Certificate::dump() const { return to_json().dump(2) + "\n"; }

Certificate Certificate::parse(std::string_view text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string{"certificate: "} + e.what());
    }
    return from_json(j);
}

} // namespace qg
