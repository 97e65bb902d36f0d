#pragma once

#include <functional>
#include <optional>
#include <string>

namespace gstein {

using RealFn = std::function<double(double)>;

/**
 * A real test function phi together with whatever regularity data is known
 * about it.
 *
 * Derivatives are optional. When absent, derivative() and
 * secondDerivative() fall back to central differences with step
 * h = 1e-5 (1 + |x|) for the first derivative and a Richardson-extrapolated
 * second difference for the second one.
 *
 * holderOfSecond, when set, maps alpha to an upper bound of [phi'']_alpha.
 */
struct TestFunction {
    std::string name;
    RealFn value;
    std::optional<double> lipschitz;
    RealFn d1;
    RealFn d2;
    RealFn holderOfSecond;

    double operator()(double x) const { return value(x); }

    bool hasAnalyticDerivatives() const { return static_cast<bool>(d1) && static_cast<bool>(d2); }

    double derivative(double x) const;
    double secondDerivative(double x) const;
};

// Numeric fallbacks, exposed so tests can compare them against analytic forms.
double centralFirstDifference(const RealFn& f, double x);
double richardsonSecondDifference(const RealFn& f, double x);

}  // namespace gstein
