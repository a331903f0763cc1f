#include "qg/weight.hpp"

#include <limits>
#include <numeric>
#include <ostream>

#include "qg/error.hpp"

namespace qg {

namespace {

constexpr __int128 kMax = std::numeric_limits<std::int64_t>::max();
constexpr __int128 kMin = -kMax; // keep negation safe

__int128 gcd128(__int128 a, __int128 b)
{
    if (a < 0)
        a = -a;
    if (b < 0)
        b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool fits(__int128 v) { return v >= kMin && v <= kMax; }

mpz_class to_mpz(__int128 v)
{
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    mpz_class hi{static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64))};
    mpz_class lo{static_cast<unsigned long>(static_cast<std::uint64_t>(u))};
    mpz_class r = (hi << 64) + lo;
    return neg ? mpz_class{-r} : r;
}

} // namespace

Weight::Weight(std::int64_t num, std::int64_t den)
{
    if (den == 0)
        throw DomainError("weight with zero denominator");
    assign_small(num, den);
}

Weight::Weight(const mpq_class& q) { assign(q); }

Weight::Weight(const Weight& other) : num_{other.num_}, den_{other.den_}
{
    if (other.big_)
        big_ = std::make_unique<mpq_class>(*other.big_);
}

Weight& Weight::operator=(const Weight& other)
{
    if (this != &other) {
        num_ = other.num_;
        den_ = other.den_;
        big_ = other.big_ ? std::make_unique<mpq_class>(*other.big_) : nullptr;
    }
    return *this;
}

void Weight::assign_small(__int128 num, __int128 den)
{
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num == 0)
        den = 1;
    if (fits(num) && fits(den)) {
        num_ = static_cast<std::int64_t>(num);
        den_ = static_cast<std::int64_t>(den);
        big_.reset();
        return;
    }
    mpq_class q{to_mpz(num), to_mpz(den)};
    q.canonicalize();
    big_ = std::make_unique<mpq_class>(std::move(q));
}

void Weight::assign(const mpq_class& q_in)
{
    mpq_class q = q_in;
    q.canonicalize();
    const mpz_class& n = q.get_num();
    const mpz_class& d = q.get_den();
    if (n.fits_slong_p() && d.fits_slong_p() && n.get_si() != std::numeric_limits<long>::min()) {
        num_ = n.get_si();
        den_ = d.get_si();
        big_.reset();
        return;
    }
    big_ = std::make_unique<mpq_class>(std::move(q));
}

mpq_class Weight::to_mpq() const
{
    if (big_)
        return *big_;
    return mpq_class{mpz_class{static_cast<long>(num_)}, mpz_class{static_cast<long>(den_)}};
}

Weight Weight::parse(std::string_view text)
{
    std::string s{text};
    if (s.empty())
        throw ParseError("empty rational");
    auto slash = s.find('/');
    auto valid_int = [](const std::string& part, bool allow_sign) {
        std::size_t i = 0;
        if (allow_sign && !part.empty() && (part[0] == '-' || part[0] == '+'))
            i = 1;
        if (i >= part.size())
            return false;
        for (; i < part.size(); ++i)
            if (part[i] < '0' || part[i] > '9')
                return false;
        return true;
    };
    std::string num = s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!valid_int(num, true) || !valid_int(den, false))
        throw ParseError("malformed rational '" + s + "'");
    if (num[0] == '+')
        num.erase(0, 1);
    mpz_class n{num};
    mpz_class d{den};
    if (d == 0)
        throw ParseError("zero denominator in '" + s + "'");
    return Weight{mpq_class{n, d}};
}

std::string Weight::str() const
{
    if (big_)
        return big_->get_str();
    if (den_ == 1)
        return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

int Weight::sign() const
{
    if (big_)
        return sgn(*big_);
    return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0);
}

bool Weight::is_integer() const { return big_ ? big_->get_den() == 1 : den_ == 1; }

std::size_t Weight::hash() const
{
    if (big_)
        return std::hash<std::string>{}(big_->get_str());
    return std::hash<std::int64_t>{}(num_) * 31 + std::hash<std::int64_t>{}(den_);
}

Weight Weight::operator-() const
{
    if (big_)
        return Weight{mpq_class{-*big_}};
    Weight r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

Weight& Weight::operator+=(const Weight& rhs)
{
    if (!big_ && !rhs.big_) {
        if (den_ == 1 && rhs.den_ == 1) {
            __int128 s = static_cast<__int128>(num_) + rhs.num_;
            if (fits(s)) {
                num_ = static_cast<std::int64_t>(s);
                return *this;
            }
        }
        assign_small(static_cast<__int128>(num_) * rhs.den_ + static_cast<__int128>(rhs.num_) * den_,
                     static_cast<__int128>(den_) * rhs.den_);
        return *this;
    }
    assign(to_mpq() + rhs.to_mpq());
    return *this;
}

Weight& Weight::operator-=(const Weight& rhs) { return *this += -rhs; }

Weight& Weight::operator*=(const Weight& rhs)
{
    if (!big_ && !rhs.big_) {
        assign_small(static_cast<__int128>(num_) * rhs.num_, static_cast<__int128>(den_) * rhs.den_);
        return *this;
    }
    assign(to_mpq() * rhs.to_mpq());
    return *this;
}

Weight& Weight::operator/=(const Weight& rhs)
{
    if (rhs.sign() == 0)
        throw DomainError("division by zero weight");
    if (!big_ && !rhs.big_) {
        assign_small(static_cast<__int128>(num_) * rhs.den_, static_cast<__int128>(den_) * rhs.num_);
        return *this;
    }
    assign(to_mpq() / rhs.to_mpq());
    return *this;
}

bool operator==(const Weight& a, const Weight& b)
{
    if (!a.big_ && !b.big_)
        return a.num_ == b.num_ && a.den_ == b.den_;
    return a.to_mpq() == b.to_mpq();
}

std::strong_ordering operator<=>(const Weight& a, const Weight& b)
{
    if (!a.big_ && !b.big_) {
        __int128 l = static_cast<__int128>(a.num_) * b.den_;
        __int128 r = static_cast<__int128>(b.num_) * a.den_;
        return l <=> r;
    }
    int c = cmp(a.to_mpq(), b.to_mpq());
    return c <=> 0;
}

std::ostream& operator<<(std::ostream& os, const Weight& w) { return os << w.str(); }

} // namespace qg
