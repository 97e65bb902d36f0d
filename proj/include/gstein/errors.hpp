#pragma once

#include <stdexcept>
#include <string>

namespace gstein {

// Model or argument violates a documented invariant (bad measure, bad config).
class InvalidModel : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// sigma_under^2 <= 0: the G-normal family needs a strictly positive lower variance.
class DegenerateVariance : public std::domain_error {
public:
    explicit DegenerateVariance(const std::string& what)
        : std::domain_error("degenerate variance: " + what) {}
};

class NotCentered : public std::domain_error {
public:
    explicit NotCentered(const std::string& what)
        : std::domain_error("uncertainty set is not centered: " + what) {}
};

// Explicit scheme would lose monotonicity (sigma_bar^2 dt / dx^2 > 1/2).
class UnstableGrid : public std::domain_error {
public:
    explicit UnstableGrid(const std::string& what)
        : std::domain_error("unstable grid: " + what) {}
};

class OutOfDomain : public std::out_of_range {
public:
    explicit OutOfDomain(const std::string& what)
        : std::out_of_range("query outside the solution box: " + what) {}
};

class NoStableExponent : public std::runtime_error {
public:
    explicit NoStableExponent(const std::string& what)
        : std::runtime_error("no stable exponent: " + what) {}
};

class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what)
        : std::runtime_error("budget exceeded: " + what) {}
};

class MixedBeta : public std::domain_error {
public:
    explicit MixedBeta(const std::string& what)
        : std::domain_error("components do not share a variance ratio: " + what) {}
};

}  // namespace gstein
