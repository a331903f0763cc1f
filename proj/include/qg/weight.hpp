#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace qg {

// Exact rational number. Values whose reduced numerator and denominator fit
// in 64 bits are kept inline; anything larger spills to a GMP rational.
class Weight {
public:
    Weight() = default;
    Weight(std::int64_t value) : num_{value} {} // NOLINT(google-explicit-constructor)
    Weight(std::int64_t num, std::int64_t den);
    explicit Weight(const mpq_class& q);

    Weight(const Weight& other);
    Weight& operator=(const Weight& other);
    Weight(Weight&&) noexcept = default;
    Weight& operator=(Weight&&) noexcept = default;
    ~Weight() = default;

    // Accepts "p" or "p/q" with an optional leading minus.
    static Weight parse(std::string_view text);

    [[nodiscard]] std::string str() const;
    [[nodiscard]] mpq_class to_mpq() const;

    [[nodiscard]] int sign() const;
    [[nodiscard]] bool is_integer() const;
    [[nodiscard]] bool is_small() const { return !big_; }
    // Only meaningful when is_small().
    [[nodiscard]] std::int64_t small_num() const { return num_; }
    [[nodiscard]] std::int64_t small_den() const { return den_; }
    [[nodiscard]] std::size_t hash() const;

    Weight operator-() const;
    Weight& operator+=(const Weight& rhs);
    Weight& operator-=(const Weight& rhs);
    Weight& operator*=(const Weight& rhs);
    Weight& operator/=(const Weight& rhs);

    friend Weight operator+(Weight lhs, const Weight& rhs) { return lhs += rhs; }
    friend Weight operator-(Weight lhs, const Weight& rhs) { return lhs -= rhs; }
    friend Weight operator*(Weight lhs, const Weight& rhs) { return lhs *= rhs; }
    friend Weight operator/(Weight lhs, const Weight& rhs) { return lhs /= rhs; }

    friend bool operator==(const Weight& a, const Weight& b);
    friend std::strong_ordering operator<=>(const Weight& a, const Weight& b);

private:
    void assign(const mpq_class& q);
    void assign_small(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    std::unique_ptr<mpq_class> big_;
};

std::ostream& operator<<(std::ostream& os, const Weight& w);

} // namespace qg

template <>
struct std::hash<qg::Weight> {
    std::size_t operator()(const qg::Weight& w) const noexcept { return w.hash(); }
};
