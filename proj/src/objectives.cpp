#include "qg/objectives.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "qg/error.hpp"

namespace qg {

// ---- Extended ---------------------------------------------------------------

Extended Extended::parse(std::string_view text)
{
    if (text == "+inf" || text == "inf")
        return pos_inf();
    if (text == "-inf")
        return neg_inf();
    return Extended{Weight::parse(text)};
}

const Weight& Extended::value() const
{
    if (kind_ != Kind::Finite)
        throw DomainError("infinite value has no rational part");
    return value_;
}

std::string Extended::str() const
{
    switch (kind_) {
    case Kind::NegInf:
        return "-inf";
    case Kind::PosInf:
        return "+inf";
    case Kind::Finite:
        break;
    }
    return value_.str();
}

std::strong_ordering operator<=>(const Extended& a, const Extended& b)
{
    if (a.kind_ != b.kind_)
        return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
    if (a.kind_ != Extended::Kind::Finite)
        return std::strong_ordering::equal;
    return a.value_ <=> b.value_;
}

// ---- payoffs ----------------------------------------------------------------

Weight payoff(PayoffKind kind, std::span<const Weight> word)
{
    Weight total;
    for (const auto& c : word)
        total += c;
    if (kind == PayoffKind::TP)
        return total;
    if (word.empty())
        throw DomainError("mean payoff of the empty word");
    return total / Weight{static_cast<std::int64_t>(word.size())};
}

// ---- Objective --------------------------------------------------------------

namespace {

std::vector<std::string> split(std::string_view text, char sep)
{
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        auto next = text.find(sep, pos);
        parts.emplace_back(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos)
            return parts;
        pos = next + 1;
    }
}

} // namespace

Objective Objective::buchi_all(std::int64_t colours)
{
    if (colours < 1)
        throw DomainError("buchi-all needs at least one colour");
    Objective o;
    o.family = Family::BuchiAll;
    o.colours = colours;
    return o;
}

Objective Objective::parse(std::string_view text)
{
    auto parts = split(text, ':');
    if (parts.size() == 2 && parts[0] == "buchi-all") {
        try {
            return buchi_all(std::stoll(parts[1]));
        } catch (const std::invalid_argument&) {
            throw ParseError("bad colour count in objective '" + std::string{text} + "'");
        }
    }
    if (parts.size() != 4)
        throw ParseError("objective must look like tp:limsup:>=:0, got '" + std::string{text} + "'");
    Objective o;
    if (parts[0] == "tp")
        o.kind = PayoffKind::TP;
    else if (parts[0] == "mp")
        o.kind = PayoffKind::MP;
    else
        throw ParseError("unknown payoff '" + parts[0] + "'");
    if (parts[1] == "limsup")
        o.mode = Mode::Limsup;
    else if (parts[1] == "liminf")
        o.mode = Mode::Liminf;
    else
        throw ParseError("unknown limit '" + parts[1] + "'");
    if (parts[2] == ">")
        o.relation = Relation::Greater;
    else if (parts[2] == ">=")
        o.relation = Relation::GreaterEq;
    else
        throw ParseError("unknown relation '" + parts[2] + "'");
    o.threshold = Extended::parse(parts[3]);
    if (o.kind == PayoffKind::MP && !o.threshold.finite())
        throw ParseError("mean-payoff thresholds must be finite");
    return o;
}

std::string Objective::str() const
{
    if (family == Family::BuchiAll)
        return "buchi-all:" + std::to_string(colours);
    std::string out = kind == PayoffKind::TP ? "tp" : "mp";
    out += mode == Mode::Limsup ? ":limsup" : ":liminf";
    out += relation == Relation::Greater ? ":>:" : ":>=:";
    return out + threshold.str();
}

std::string Objective::classification() const
{
    if (family == Family::BuchiAll)
        return "Pi02; step counter suffices over finitely branching arenas, finite memory does not";
    bool sup = mode == Mode::Limsup;
    bool strict = relation == Relation::Greater;
    auto thr = threshold.kind();
    if (kind == PayoffKind::MP) {
        if (sup && !strict)
            return "Pi02; step counter suffices, finite memory does not";
        if (!sup && strict)
            return "Sigma02, memoryless per prior work; no decomposition needed";
        if (sup && strict)
            return "Sigma03; neither step counter nor finite memory known to suffice";
        return "Pi03; neither step counter nor finite memory known to suffice";
    }
    if (thr == Extended::Kind::PosInf) {
        if (sup && !strict)
            return "Pi02; step counter suffices, finite memory does not";
        if (!sup && !strict)
            return "Sigma03; step counter with finite memory does not suffice";
        return "empty objective";
    }
    if (thr == Extended::Kind::NegInf) {
        if (!strict)
            return "trivial objective (every word)";
        if (!sup)
            return "Sigma02, memoryless per prior work; no decomposition needed";
        return "Sigma03; step counter with finite memory does not suffice";
    }
    if (sup && !strict)
        return "Pi02; step counter with one extra bit suffices, step counter alone and finite memory do not";
    if (sup && strict)
        return "Sigma03 over Q (over Z equal to limsup >= threshold+1)";
    return "Sigma02; step counter with finite memory does not suffice";
}

// ---- OpenSub ----------------------------------------------------------------

OpenSub OpenSub::mp_sup(std::int64_t m, std::int64_t i)
{
    if (m < 1 || i < 1)
        throw DomainError("MPsupGE0 needs m, i >= 1");
    OpenSub o;
    o.family_ = Family::MPsupGE0;
    o.m_ = m;
    o.index_ = i;
    return o;
}

OpenSub OpenSub::tp_inf(std::int64_t m, std::int64_t i)
{
    if (m < 1 || i < 1)
        throw DomainError("TPinf needs m, i >= 1");
    OpenSub o;
    o.family_ = Family::TPinf;
    o.m_ = m;
    o.index_ = i;
    return o;
}

OpenSub OpenSub::tp_sup(std::int64_t m)
{
    if (m < 1)
        throw DomainError("TPsupGE0 needs m >= 1");
    OpenSub o;
    o.family_ = Family::TPsupGE0;
    o.m_ = m;
    o.index_ = m;
    return o;
}

OpenSub OpenSub::buchi_colour(std::int64_t colour, std::int64_t i)
{
    if (i < 1)
        throw DomainError("BuchiColour needs i >= 1");
    OpenSub o;
    o.family_ = Family::BuchiColour;
    o.colour_ = colour;
    o.index_ = i;
    return o;
}

bool OpenSub::meets(std::size_t j, const Weight& tp, const Weight& c) const
{
    switch (family_) {
    case Family::MPsupGE0:
        return (Weight{m_} * tp + Weight{static_cast<std::int64_t>(j)}).sign() >= 0;
    case Family::TPinf:
        return tp >= Weight{m_};
    case Family::TPsupGE0:
        return (Weight{m_} * tp + Weight{1}).sign() >= 0;
    case Family::BuchiColour:
        return c == Weight{colour_};
    }
    return false;
}

std::optional<Weight> OpenSub::potential(std::size_t j, const Weight& tp) const
{
    switch (family_) {
    case Family::MPsupGE0:
        return Weight{m_} * tp + Weight{static_cast<std::int64_t>(j)};
    case Family::TPinf:
        return tp - Weight{m_};
    case Family::TPsupGE0:
        return Weight{m_} * tp + Weight{1};
    case Family::BuchiColour:
        break;
    }
    return std::nullopt;
}

std::string OpenSub::str() const
{
    switch (family_) {
    case Family::MPsupGE0:
        return "MPsupGE0(" + std::to_string(m_) + "," + std::to_string(index_) + ")";
    case Family::TPinf:
        return "TPinf(" + std::to_string(m_) + "," + std::to_string(index_) + ")";
    case Family::TPsupGE0:
        return "TPsupGE0(" + std::to_string(m_) + ")";
    case Family::BuchiColour:
        return "BuchiColour(" + std::to_string(colour_) + "," + std::to_string(index_) + ")";
    }
    return "?";
}

void PrefixState::push(const OpenSub& o, const Weight& c)
{
    ++length;
    tp += c;
    if (!satisfied && length >= o.step_index() && o.meets(length, tp, c))
        satisfied = true;
}

PrefixState prefix_state(const OpenSub& o, std::span<const Weight> word)
{
    PrefixState s;
    for (const auto& c : word)
        s.push(o, c);
    return s;
}

bool already_satisfies(const OpenSub& o, std::span<const Weight> word) { return prefix_state(o, word).satisfied; }

std::string to_string(Order o)
{
    switch (o) {
    case Order::LE:
        return "LE";
    case Order::GE:
        return "GE";
    case Order::Both:
        break;
    }
    return "BOTH";
}

Order prefix_compare(const OpenSub& o, const PrefixState& a, const PrefixState& b)
{
    if (a.length != b.length)
        throw DomainError("prefix comparison needs equal lengths (" + std::to_string(a.length) + " vs " +
                          std::to_string(b.length) + ")");
    auto below = [&](const PrefixState& x, const PrefixState& y) {
        if (y.satisfied)
            return true;
        if (x.satisfied)
            return false;
        return !o.uses_score() || x.tp <= y.tp;
    };
    bool le = below(a, b);
    bool ge = below(b, a);
    if (le && ge)
        return Order::Both;
    return le ? Order::LE : Order::GE;
}

Order prefix_compare(const OpenSub& o, std::span<const Weight> w1, std::span<const Weight> w2)
{
    if (w1.size() != w2.size())
        throw DomainError("prefix comparison needs equal lengths (" + std::to_string(w1.size()) + " vs " +
                          std::to_string(w2.size()) + ")");
    return prefix_compare(o, prefix_state(o, w1), prefix_state(o, w2));
}

// ---- lassos -----------------------------------------------------------------

Extended lasso_limit(PayoffKind kind, Mode mode, const Lasso& lasso)
{
    if (lasso.cycle.empty())
        throw DomainError("lasso with an empty cycle");
    if (kind == PayoffKind::MP)
        return payoff(PayoffKind::MP, lasso.cycle);
    Weight period = payoff(PayoffKind::TP, lasso.cycle);
    if (period.sign() > 0)
        return Extended::pos_inf();
    if (period.sign() < 0)
        return Extended::neg_inf();
    Weight base = payoff(PayoffKind::TP, lasso.prefix);
    Weight running;
    Weight hi = lasso.cycle.front();
    Weight lo = lasso.cycle.front();
    for (const auto& c : lasso.cycle) {
        running += c;
        hi = std::max(hi, running);
        lo = std::min(lo, running);
    }
    return base + (mode == Mode::Limsup ? hi : lo);
}

bool eval_on_lasso(const Objective& objective, const Lasso& lasso)
{
    if (objective.family == Objective::Family::BuchiAll) {
        if (lasso.cycle.empty())
            throw DomainError("lasso with an empty cycle");
        std::set<Weight> seen(lasso.cycle.begin(), lasso.cycle.end());
        for (std::int64_t c = 0; c < objective.colours; ++c)
            if (!seen.contains(Weight{c}))
                return false;
        return true;
    }
    Extended value = lasso_limit(objective.kind, objective.mode, lasso);
    if (objective.relation == Relation::Greater)
        return value > objective.threshold;
    return value >= objective.threshold;
}

// ---- decomposition ----------------------------------------------------------

Decomposition Decomposition::unsupported(std::string reason)
{
    Decomposition d;
    d.reason_ = std::move(reason);
    return d;
}

Decomposition Decomposition::of(Objective objective)
{
    Decomposition d;
    d.supported_ = true;
    d.objective_ = std::move(objective);
    return d;
}

namespace {

// Diagonal order over pairs (m, i) >= (1, 1): by m+i, then by m.
std::pair<std::int64_t, std::int64_t> diagonal(std::size_t index)
{
    std::int64_t diag = 2;
    auto remaining = static_cast<std::int64_t>(index);
    while (remaining >= diag - 1) {
        remaining -= diag - 1;
        ++diag;
    }
    std::int64_t m = remaining + 1;
    return {m, diag - m};
}

} // namespace

OpenSub Decomposition::at(std::size_t index) const
{
    if (!supported_)
        throw DomainError("objective has no open decomposition: " + reason_);
    const auto& o = objective_;
    if (o.family == Objective::Family::BuchiAll) {
        auto k = static_cast<std::size_t>(o.colours);
        return OpenSub::buchi_colour(static_cast<std::int64_t>(index % k), static_cast<std::int64_t>(index / k + 1));
    }
    if (o.kind == PayoffKind::TP && o.threshold.finite())
        return OpenSub::tp_sup(static_cast<std::int64_t>(index) + 1);
    auto [m, i] = diagonal(index);
    return o.kind == PayoffKind::MP ? OpenSub::mp_sup(m, i) : OpenSub::tp_inf(m, i);
}

std::vector<OpenSub> Decomposition::first(std::size_t n) const
{
    std::vector<OpenSub> out;
    for (std::size_t k = 0; k < n; ++k)
        out.push_back(at(k));
    return out;
}

Decomposition decompose(const Objective& o)
{
    if (o.family == Objective::Family::BuchiAll)
        return Decomposition::of(o);
    bool sup_ge = o.mode == Mode::Limsup && o.relation == Relation::GreaterEq;
    Extended zero{Weight{0}};
    if (sup_ge && o.kind == PayoffKind::MP && o.threshold == zero)
        return Decomposition::of(o);
    if (sup_ge && o.kind == PayoffKind::TP && (o.threshold == zero || o.threshold == Extended::pos_inf()))
        return Decomposition::of(o);
    if (o.mode == Mode::Limsup && o.relation == Relation::Greater && o.kind == PayoffKind::TP && o.threshold.finite())
        return Decomposition::unsupported("Sigma03 over Q");
    if (sup_ge && o.threshold.finite())
        return Decomposition::unsupported("shift the threshold to 0 first; " + o.classification());
    return Decomposition::unsupported(o.classification());
}

// ---- threshold shift --------------------------------------------------------

ThresholdShift normalize_threshold(const Objective& objective, bool integer_weights)
{
    ThresholdShift s{objective, Weight{0}, std::nullopt};
    if (objective.family != Objective::Family::Quantitative || !objective.threshold.finite())
        return s;
    Weight r = objective.threshold.value();
    if (objective.kind == PayoffKind::MP) {
        s.per_edge = r;
        s.objective.threshold = Weight{0};
        return s;
    }
    if (objective.relation == Relation::Greater && integer_weights) {
        // Totals are integers, so TP > r iff TP >= floor(r) + 1.
        mpz_class fl;
        mpz_fdiv_q(fl.get_mpz_t(), r.to_mpq().get_num_mpz_t(), r.to_mpq().get_den_mpz_t());
        r = Weight{mpq_class{fl + 1}};
        s.objective.relation = Relation::GreaterEq;
    }
    s.lead = -r;
    s.objective.threshold = Weight{0};
    return s;
}

Arena apply_shift(const Arena& arena, const ThresholdShift& shift)
{
    if (shift.per_edge.sign() != 0) {
        Weight delta = shift.per_edge;
        auto expand = [arena, delta](const VertexId& v) {
            Expansion x = *arena.expand(v);
            for (auto& e : x.edges)
                e.weight -= delta;
            return x;
        };
        return Arena{arena.name() + "-shifted", arena.starts(), expand, arena.branching_bound()};
    }
    if (shift.lead) {
        VertexId lead{"lead_"};
        Weight w = *shift.lead;
        VertexId root = arena.root();
        auto expand = [arena, lead, w, root](const VertexId& v) {
            if (v == lead)
                return Expansion{Player::One, {Edge{lead, w, root}}};
            return *arena.expand(v);
        };
        return Arena{arena.name() + "-shifted", {lead}, expand, arena.branching_bound()};
    }
    return arena;
}

} // namespace qg
