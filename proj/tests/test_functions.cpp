#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gstein/catalog.hpp"
#include "gstein/errors.hpp"
#include "gstein/functions.hpp"

using namespace gstein;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<TestFunction> withDerivatives() {
    return {fn::constant(1.5),          fn::affine(-2.0, 0.5),          fn::quadratic(1.5, -0.5, 2.0),
            fn::cube(),                 fn::cosine(1.3, 0.7),           fn::sineWave(2.0, 0.4),
            fn::smoothedRamp(0.3, 2.0, 0.2), fn::smoothedHat(-0.5, 1.0, 0.2),
            fn::trigQuadratic(0.8, -0.3, {{0.5, 1.7, 0.2}, {-0.9, 0.6, 2.0}})};
}

}  // namespace

TEST_CASE("analytic derivatives agree with differences", "[functions]") {
    for (const auto& f : withDerivatives()) {
        REQUIRE(f.hasAnalyticDerivatives());
        for (double x = -4.0; x <= 4.0; x += 0.173) {
            INFO(f.name << " at " << x);
            CHECK_THAT(centralFirstDifference(f.value, x), WithinAbs(f.d1(x), 1e-7 * (1 + std::abs(f.d1(x)))));
            CHECK_THAT(richardsonSecondDifference(f.value, x), WithinAbs(f.d2(x), 1e-4 * (1 + std::abs(f.d2(x)))));
        }
    }
}

TEST_CASE("difference fallbacks are used without analytic derivatives", "[functions]") {
    TestFunction f;
    f.name = "exp";
    f.value = [](double x) { return std::exp(0.5 * x); };
    CHECK_FALSE(f.hasAnalyticDerivatives());
    CHECK_THAT(f.derivative(1.0), WithinRel(0.5 * std::exp(0.5), 1e-8));
    CHECK_THAT(f.secondDerivative(1.0), WithinRel(0.25 * std::exp(0.5), 1e-5));
}

TEST_CASE("kinked functions", "[functions]") {
    const auto r = fn::relu();
    const auto a = fn::absolute();
    CHECK(r(-2.0) == 0.0);
    CHECK(r(3.0) == 3.0);
    CHECK(a(-2.5) == 2.5);
    REQUIRE(r.lipschitz);
    REQUIRE(a.lipschitz);
    CHECK(*r.lipschitz == 1.0);
    CHECK(*a.lipschitz == 1.0);
}

TEST_CASE("declared Lipschitz constants hold on sampled pairs", "[functions][property]") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> x(-10.0, 10.0);
    std::uniform_real_distribution<double> gap(-0.5, 0.5);
    auto all = fn::lipschitzFamily();
    for (auto& f : withDerivatives()) all.push_back(f);
    for (const auto& f : all) {
        if (!f.lipschitz) continue;
        INFO(f.name);
        for (int k = 0; k < 2000; ++k) {
            const double u = x(rng);
            const double v = k % 2 ? x(rng) : u + gap(rng);
            CHECK(std::abs(f(u) - f(v)) <= *f.lipschitz * std::abs(u - v) + 1e-13);
        }
    }
}

TEST_CASE("the Lipschitz family has 24 unit-Lipschitz members", "[functions]") {
    const auto family = fn::lipschitzFamily();
    REQUIRE(family.size() == 24);
    int ramps = 0, sines = 0, hats = 0;
    for (const auto& f : family) {
        REQUIRE(f.lipschitz);
        CHECK(*f.lipschitz <= 1.0);
        ramps += f.name.rfind("ramp", 0) == 0;
        sines += f.name.rfind("sine", 0) == 0;
        hats += f.name.rfind("hat", 0) == 0;
    }
    CHECK(ramps == 12);
    CHECK(sines == 6);
    CHECK(hats == 6);
}

TEST_CASE("sine Hoelder constant", "[functions]") {
    CHECK_THAT(fn::sineHolderConstant(1.0), WithinAbs(1.0, 1e-12));
    for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double c = fn::sineHolderConstant(alpha);
        double sampled = 0.0;
        for (double d = 1e-3; d <= 2 * M_PI; d += 1e-3) {
            // the worst pair is symmetric about pi/2
            sampled = std::max(sampled, 2.0 * std::sin(0.5 * d) / std::pow(d, alpha));
        }
        CHECK(sampled <= c + 1e-12);
        CHECK(sampled >= c - 1e-5);
    }
}

TEST_CASE("attached second-derivative Hoelder bounds dominate sampled quotients", "[functions][property]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> x(-5.0, 5.0);
    std::uniform_real_distribution<double> gap(-2.0, 2.0);
    for (const auto& f : withDerivatives()) {
        if (!f.holderOfSecond) continue;
        for (double alpha : {0.1, 0.5, 0.95}) {
            const double bound = f.holderOfSecond(alpha);
            INFO(f.name << " alpha " << alpha);
            for (int k = 0; k < 500; ++k) {
                const double u = x(rng), v = u + gap(rng);
                if (u == v) continue;
                CHECK(std::abs(f.d2(u) - f.d2(v)) <= bound * std::pow(std::abs(u - v), alpha) + 1e-12);
            }
        }
    }
}

TEST_CASE("catalog models", "[catalog]") {
    for (const auto& name : catalog::modelNames()) CHECK_NOTHROW(catalog::model(name));
    CHECK(catalog::model("two-scale").size() == 2);
    CHECK(catalog::model("point")[0] == DiscreteMeasure::pointMass(0.0));
    CHECK_THROWS_AS(catalog::model("nope"), InvalidModel);
}

TEST_CASE("catalog function specs", "[catalog]") {
    CHECK(catalog::function("cos")(0.0) == 1.0);
    CHECK(catalog::function("cos:2:0.5")(0.0) == 0.5);
    CHECK(catalog::function("affine:2:1")(3.0) == 7.0);
    CHECK(catalog::function("const:4")(-9.0) == 4.0);
    CHECK(catalog::function("quad:2")(3.0) == 9.0);
    CHECK(catalog::function("ramp").name == fn::smoothedRamp(0.0, 2.0, 0.2).name);
    CHECK(catalog::function("hat").name == fn::smoothedHat(0.5, 1.0, 0.2).name);
    CHECK_THROWS_AS(catalog::function("cos:1:2:3:4"), InvalidModel);
    CHECK_THROWS_AS(catalog::function("wiggle"), InvalidModel);
    CHECK_THROWS_AS(catalog::function("affine:x:1"), InvalidModel);
}

TEST_CASE("catalog families", "[catalog]") {
    CHECK(catalog::family("lipschitz24").size() == 24);
    CHECK(catalog::family("ramps").size() == 12);
    CHECK(catalog::family("sines").size() == 6);
    CHECK(catalog::family("hats").size() == 6);
    CHECK(catalog::family("cos,relu,ramp:1:2:0.2").size() == 3);
    CHECK(catalog::fileSafe("ramp(0,2,0.2)") == "ramp_0_2_0.2_");
}
