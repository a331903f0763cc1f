#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qg {

// Precondition violated by the caller (wrong strategy kind, unequal word lengths, ...).
class DomainError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_{line} {}
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}

    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_ = 0;
};

// A step-counter table was asked for a move past its horizon with fallback=error.
class HorizonExceeded : public std::runtime_error {
public:
    HorizonExceeded(std::size_t step, const std::string& what)
        : std::runtime_error(what), step_{step} {}

    [[nodiscard]] std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

} // namespace qg
