#include "gstein/catalog.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>

#include "gstein/errors.hpp"
#include "gstein/functions.hpp"

namespace gstein::catalog {

UncertaintySet model(std::string_view name) {
    using M = DiscreteMeasure;
    if (name == "point") return UncertaintySet({M::pointMass(0.0)});
    if (name == "rademacher") return UncertaintySet({M::rademacher(1.0)});
    if (name == "two-scale") return UncertaintySet({M::rademacher(0.5), M::rademacher(1.0)});
    if (name == "wide") return UncertaintySet({M::rademacher(1.0), M::rademacher(2.0)});
    if (name == "skewed") return UncertaintySet({M({{-1.0, 2.0 / 3.0}, {2.0, 1.0 / 3.0}}), M::rademacher(1.0)});
    if (name == "three-point") {
        return UncertaintySet({M({{-2.0, 0.25}, {0.0, 0.5}, {2.0, 0.25}}), M::rademacher(1.0)});
    }
    throw InvalidModel("unknown model '" + std::string(name) + "'");
}

std::vector<std::string> modelNames() { return {"point", "rademacher", "two-scale", "wide", "skewed", "three-point"}; }

namespace {

std::vector<double> params(const std::vector<std::string>& parts, std::string_view spec) {
    std::vector<double> out;
    for (std::size_t i = 1; i < parts.size(); ++i) {
        errno = 0;
        char* end = nullptr;
        const double v = std::strtod(parts[i].c_str(), &end);
        if (parts[i].empty() || end != parts[i].c_str() + parts[i].size() || errno == ERANGE || !std::isfinite(v)) {
            throw InvalidModel("bad parameter '" + parts[i] + "' in function '" + std::string(spec) + "'");
        }
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

TestFunction function(std::string_view spec) {
    const auto parts = split(spec, ':');
    const std::string& name = parts[0];
    const auto p = params(parts, spec);
    auto arity = [&](std::size_t lo, std::size_t hi) {
        if (p.size() < lo || p.size() > hi) {
            throw InvalidModel("function '" + std::string(spec) + "' has the wrong number of parameters");
        }
    };
    if (name == "const") {
        arity(1, 1);
        return fn::constant(p[0]);
    }
    if (name == "affine") {
        arity(2, 2);
        return fn::affine(p[0], p[1]);
    }
    if (name == "quad") {
        arity(1, 1);
        return fn::quadratic(p[0]);
    }
    if (name == "cube") {
        arity(0, 0);
        return fn::cube();
    }
    if (name == "cos") {
        arity(0, 2);
        return fn::cosine(p.size() > 0 ? p[0] : 1.0, p.size() > 1 ? p[1] : 1.0);
    }
    if (name == "sine") {
        arity(2, 2);
        return fn::sineWave(p[0], p[1]);
    }
    if (name == "relu") {
        arity(0, 0);
        return fn::relu();
    }
    if (name == "abs") {
        arity(0, 0);
        return fn::absolute();
    }
    if (name == "ramp") {
        if (p.empty()) return fn::smoothedRamp(0.0, 2.0, 0.2);
        arity(3, 3);
        return fn::smoothedRamp(p[0], p[1], p[2]);
    }
    if (name == "hat") {
        if (p.empty()) return fn::smoothedHat(0.5, 1.0, 0.2);
        arity(3, 3);
        return fn::smoothedHat(p[0], p[1], p[2]);
    }
    throw InvalidModel("unknown function '" + std::string(spec) + "'");
}

std::vector<TestFunction> family(std::string_view spec) {
    if (spec == "lipschitz24" || spec == "ramps" || spec == "sines" || spec == "hats") {
        const auto all = fn::lipschitzFamily();
        if (spec == "lipschitz24") return all;
        const std::string prefix = spec == "ramps" ? "ramp" : spec == "sines" ? "sine" : "hat";
        std::vector<TestFunction> out;
        for (const auto& f : all) {
            if (f.name.rfind(prefix, 0) == 0) out.push_back(f);
        }
        return out;
    }
    std::vector<TestFunction> out;
    for (const auto& item : split(spec, ',')) out.push_back(function(item));
    return out;
}

std::string fileSafe(std::string_view name) {
    std::string out(name);
    for (char& c : out) {
        const auto u = static_cast<unsigned char>(c);
        if (!(std::isalnum(u) || c == '.' || c == '_' || c == '-')) c = '_';
    }
    return out;
}

}  // namespace gstein::catalog
