#pragma once

#include <vector>

#include "gstein/test_function.hpp"

namespace gstein::fn {

TestFunction constant(double c);
TestFunction affine(double slope, double intercept);
// q/2 x^2 + l x + c
TestFunction quadratic(double q, double l = 0.0, double c = 0.0);
TestFunction cube();
// amplitude * cos(k x)
TestFunction cosine(double k = 1.0, double amplitude = 1.0);
// sin(k x + phase) / k, unit Lipschitz
TestFunction sineWave(double k, double phase);
// max(x, 0)
TestFunction relu();
TestFunction absolute();

// Smooth version of clamp(x - (center - width/2), 0, width): rises with slope
// <= 1 across [center - width/2, center + width/2]. Bounded and unit Lipschitz.
TestFunction smoothedRamp(double center, double width, double smoothing);

// Smooth tent of height halfWidth peaking at center. Unit Lipschitz.
TestFunction smoothedHat(double center, double halfWidth, double smoothing);

struct SineTerm {
    double amplitude;
    double frequency;
    double phase;
};

// q/2 x^2 + l x + sum_k A_k sin(b_k x + c_k), with an exact bound of
// [phi'']_alpha attached.
TestFunction trigQuadratic(double q, double l, std::vector<SineTerm> terms);

// sup_{d > 0} |sin u - sin v| / |u - v|^alpha, attained for d = u - v in (0, pi].
double sineHolderConstant(double alpha);

// The fixed 24-member inner approximation of the unit Lipschitz ball:
// 12 shifted ramps, 6 scaled sines, 6 hats.
std::vector<TestFunction> lipschitzFamily();

}  // namespace gstein::fn
