#include "gstein/functions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace gstein::fn {
namespace {

double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double sigmoidPrime(double z) {
    const double s = sigmoid(z);
    return s * (1.0 - s);
}

std::string label(const char* base, std::initializer_list<double> args) {
    std::ostringstream os;
    os << base << '(';
    bool first = true;
    for (double a : args) {
        if (!first) os << ',';
        os << a;
        first = false;
    }
    os << ')';
    return os.str();
}

// Smoothed clamp(x - lo, 0, hi - lo).
struct SoftClamp {
    double lo, hi, eps;
    double value(double x) const { return eps * (softplus((x - lo) / eps) - softplus((x - hi) / eps)); }
    double d1(double x) const { return sigmoid((x - lo) / eps) - sigmoid((x - hi) / eps); }
    double d2(double x) const { return (sigmoidPrime((x - lo) / eps) - sigmoidPrime((x - hi) / eps)) / eps; }
};

}  // namespace

TestFunction constant(double c) {
    TestFunction f;
    f.name = label("const", {c});
    f.value = [c](double) { return c; };
    f.lipschitz = 0.0;
    f.d1 = [](double) { return 0.0; };
    f.d2 = [](double) { return 0.0; };
    f.holderOfSecond = [](double) { return 0.0; };
    return f;
}

TestFunction affine(double slope, double intercept) {
    TestFunction f;
    f.name = label("affine", {slope, intercept});
    f.value = [slope, intercept](double x) { return slope * x + intercept; };
    f.lipschitz = std::abs(slope);
    f.d1 = [slope](double) { return slope; };
    f.d2 = [](double) { return 0.0; };
    f.holderOfSecond = [](double) { return 0.0; };
    return f;
}

TestFunction quadratic(double q, double l, double c) {
    TestFunction f;
    f.name = label("quadratic", {q, l, c});
    f.value = [q, l, c](double x) { return 0.5 * q * x * x + l * x + c; };
    f.d1 = [q, l](double x) { return q * x + l; };
    f.d2 = [q](double) { return q; };
    f.holderOfSecond = [](double) { return 0.0; };
    return f;
}

TestFunction cube() {
    TestFunction f;
    f.name = "cube";
    f.value = [](double x) { return x * x * x; };
    f.d1 = [](double x) { return 3.0 * x * x; };
    f.d2 = [](double x) { return 6.0 * x; };
    return f;
}

TestFunction cosine(double k, double amplitude) {
    TestFunction f;
    f.name = label("cos", {k, amplitude});
    f.value = [k, amplitude](double x) { return amplitude * std::cos(k * x); };
    f.lipschitz = std::abs(amplitude * k);
    f.d1 = [k, amplitude](double x) { return -amplitude * k * std::sin(k * x); };
    f.d2 = [k, amplitude](double x) { return -amplitude * k * k * std::cos(k * x); };
    f.holderOfSecond = [k, amplitude](double alpha) {
        return std::abs(amplitude) * std::pow(std::abs(k), 2.0 + alpha) * sineHolderConstant(alpha);
    };
    return f;
}

TestFunction sineWave(double k, double phase) {
    TestFunction f;
    f.name = label("sine", {k, phase});
    f.value = [k, phase](double x) { return std::sin(k * x + phase) / k; };
    f.lipschitz = 1.0;
    f.d1 = [k, phase](double x) { return std::cos(k * x + phase); };
    f.d2 = [k, phase](double x) { return -k * std::sin(k * x + phase); };
    f.holderOfSecond = [k](double alpha) { return std::pow(k, 1.0 + alpha) * sineHolderConstant(alpha); };
    return f;
}

TestFunction relu() {
    TestFunction f;
    f.name = "relu";
    f.value = [](double x) { return x > 0.0 ? x : 0.0; };
    f.lipschitz = 1.0;
    return f;
}

TestFunction absolute() {
    TestFunction f;
    f.name = "abs";
    f.value = [](double x) { return std::abs(x); };
    f.lipschitz = 1.0;
    return f;
}

TestFunction smoothedRamp(double center, double width, double smoothing) {
    const SoftClamp clamp{center - 0.5 * width, center + 0.5 * width, smoothing};
    TestFunction f;
    f.name = label("ramp", {center, width, smoothing});
    f.value = [clamp](double x) { return clamp.value(x); };
    f.lipschitz = 1.0;
    f.d1 = [clamp](double x) { return clamp.d1(x); };
    f.d2 = [clamp](double x) { return clamp.d2(x); };
    return f;
}

TestFunction smoothedHat(double center, double halfWidth, double smoothing) {
    const SoftClamp up{center - halfWidth, center, smoothing};
    const SoftClamp down{center, center + halfWidth, smoothing};
    TestFunction f;
    f.name = label("hat", {center, halfWidth, smoothing});
    f.value = [up, down](double x) { return up.value(x) - down.value(x); };
    f.lipschitz = 1.0;
    f.d1 = [up, down](double x) { return up.d1(x) - down.d1(x); };
    f.d2 = [up, down](double x) { return up.d2(x) - down.d2(x); };
    return f;
}

TestFunction trigQuadratic(double q, double l, std::vector<SineTerm> terms) {
    TestFunction f;
    std::ostringstream os;
    os << "trigquad(" << q << ',' << l;
    for (const auto& t : terms) os << ';' << t.amplitude << ',' << t.frequency << ',' << t.phase;
    os << ')';
    f.name = os.str();
    f.value = [q, l, terms](double x) {
        double v = 0.5 * q * x * x + l * x;
        for (const auto& t : terms) v += t.amplitude * std::sin(t.frequency * x + t.phase);
        return v;
    };
    f.d1 = [q, l, terms](double x) {
        double v = q * x + l;
        for (const auto& t : terms) v += t.amplitude * t.frequency * std::cos(t.frequency * x + t.phase);
        return v;
    };
    f.d2 = [q, terms](double x) {
        double v = q;
        for (const auto& t : terms) v -= t.amplitude * t.frequency * t.frequency * std::sin(t.frequency * x + t.phase);
        return v;
    };
    f.holderOfSecond = [terms](double alpha) {
        const double h = sineHolderConstant(alpha);
        double s = 0.0;
        for (const auto& t : terms) s += std::abs(t.amplitude) * std::pow(std::abs(t.frequency), 2.0 + alpha) * h;
        return s;
    };
    return f;
}

double sineHolderConstant(double alpha) {
    if (alpha >= 1.0) return 1.0;
    // 2 sin(d/2) / d^alpha is maximal where d cos(d/2) = 2 alpha sin(d/2).
    auto g = [alpha](double d) { return d * std::cos(0.5 * d) - 2.0 * alpha * std::sin(0.5 * d); };
    double lo = 0.0;
    double hi = std::numbers::pi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double d = 0.5 * (lo + hi);
    return 2.0 * std::sin(0.5 * d) / std::pow(d, alpha);
}

std::vector<TestFunction> lipschitzFamily() {
    std::vector<TestFunction> family;
    family.reserve(24);
    for (int j = 0; j < 12; ++j) {
        const double center = -3.0 + 6.0 * j / 11.0;
        family.push_back(smoothedRamp(center, 2.0, 0.2));
    }
    const double freqs[6] = {0.25, 0.5, 1.0, 1.5, 2.0, 3.0};
    for (int j = 0; j < 6; ++j) {
        family.push_back(sineWave(freqs[j], 0.3 * j));
    }
    const double hats[6] = {-2.5, -1.5, -0.5, 0.5, 1.5, 2.5};
    for (double c : hats) {
        family.push_back(smoothedHat(c, 1.0, 0.2));
    }
    return family;
}

}  // namespace gstein::fn
