// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance <work-dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gstein/catalog.hpp"
#include "gstein/cli.hpp"
#include "gstein/clt.hpp"
#include "gstein/config.hpp"
#include "gstein/errors.hpp"
#include "gstein/functions.hpp"
#include "gstein/gheat.hpp"
#include "gstein/measures.hpp"
#include "gstein/stein.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace gstein;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> readSummary(const fs::path& dir) {
    std::map<std::string, std::string> m;
    std::istringstream in(slurp(dir / "run.summary"));
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) m[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return m;
}

std::vector<std::vector<std::string>> readCsv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream s(line);
        std::string c;
        while (std::getline(s, c, ',')) cells.push_back(c);
        rows.push_back(std::move(cells));
    }
    return rows;
}

int cli(const std::vector<std::string>& args, std::string& errText) {
    std::ostringstream out, err;
    const int code = runCli(args, out, err);
    errText = err.str();
    return code;
}

SpaceTimeGrid box8(double dx, const GCoeff& c) {
    SpaceTimeGrid g;
    g.xMin = -8.0;
    g.xMax = 8.0;
    g.nx = static_cast<std::size_t>(std::llround(16.0 / dx)) + 1;
    g.T = 1.0;
    g.dt = 0.4 * dx * dx / c.sigmaBarSq();
    g.maxStoredLayers = 2;
    return g;
}

Outcome axioms() {
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> coef(-2.0, 2.0), lam(0.0, 5.0), al(0.0, 1.0);
    int bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto theta = oracle::randomSet(rng, 4, 5, 3.0, trial % 2 == 0);
        const double a = coef(rng), b = coef(rng), c = coef(rng), d = coef(rng), k = coef(rng), l = lam(rng);
        const double alpha = al(rng);
        const auto phi = [=](double x) { return a * std::sin(b * x) + c * x; };
        const auto psi = [=](double x) { return d * x * x - a * std::abs(x); };
        const double np = sublinearExpect(theta, phi), nq = sublinearExpect(theta, psi);
        const double top = sublinearExpect(theta, [&](double x) { return std::max(phi(x), psi(x)); });
        bool ok = np <= top + 1e-12 && nq <= top + 1e-12;
        ok = ok && std::abs(sublinearExpect(theta, [k](double) { return k; }) - k) <= 1e-12;
        ok = ok && std::abs(sublinearExpect(theta, [&](double x) { return l * phi(x); }) - l * np) <= 1e-12 * (1 + l);
        ok = ok && sublinearExpect(theta, [&](double x) { return phi(x) + psi(x); }) <= np + nq + 1e-12;
        ok = ok && absMoment(theta, 2.0) * absMoment(theta, alpha) <= absMoment(theta, 2.0 + alpha) + 1e-12;
        bad += ok ? 0 : 1;
    }
    return {bad == 0, std::to_string(1000 - bad) + "/1000 cases"};
}

Outcome linearOracle() {
    const GCoeff c(1.0, 1.0);
    const auto phi = fn::cosine();
    const double exact = std::exp(-0.5);
    const double e1 = std::abs(gNormalExpect(c, phi, box8(0.01, c)) - exact);
    const double e2 = std::abs(gNormalExpect(c, phi, box8(0.005, c)) - exact);
    const double ratio = e1 / e2;
    return {e1 <= 5e-3 && ratio >= 3.0, "error " + fmt(e1) + ", halved dx error " + fmt(e2) + ", ratio " + fmt(ratio)};
}

Outcome convexOracle() {
    const GCoeff c(1.0, 0.5);
    const auto phi = fn::relu();
    const double target = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    // the sigma_bar heat oracle, checked by quadrature
    const double heat = oracle::heatSolution(phi.value, 0.0, 1.0, 1.0);
    const double e1 = std::abs(gNormalExpect(c, phi, box8(0.01, c)) - target);
    const double e2 = std::abs(gNormalExpect(c, phi, box8(0.005, c)) - target);
    const bool ok = std::abs(heat - target) <= 1e-10 && e1 <= 5e-3 && e2 <= e1;
    return {ok, "error " + fmt(e1) + ", refined " + fmt(e2) + ", quadrature oracle off by " + fmt(std::abs(heat - target))};
}

Outcome steinIdentitySuite() {
    int passed = 0, total = 0;
    double worst = 0.0;
    for (const char* model : {"two-scale", "wide", "skewed"}) {
        const auto theta = catalog::model(model);
        const GCoeff coeff = GCoeff::fromVariances(varianceBounds(theta));
        for (const char* f : {"ramp", "cos", "hat", "sine:0.5:0.3"}) {
            const auto phi = catalog::function(f);
            SteinSettings s;
            s.throwOnUnresolved = false;
            const auto base = steinIdentity(theta, coeff, phi, s);
            const auto fine = steinIdentity(theta, coeff, phi, s.refined());
            const double floor = 1e-12 * (1.0 + std::abs(base.lhs));
            const bool ok = base.resolved() && fine.resolved() &&
                            fine.errorSup() <= 0.5 * base.errorSup() + floor &&
                            fine.errorInf() <= 0.5 * base.errorInf() + floor;
            worst = std::max(worst, std::max(base.errorSup(), base.errorInf()) / base.budget);
            passed += ok ? 1 : 0;
            ++total;
            if (!ok) {
                std::cout << "  identity " << model << ' ' << phi.name << " err " << fmt(base.errorSup()) << '/'
                          << fmt(base.errorInf()) << " budget " << fmt(base.budget) << " refined "
                          << fmt(fine.errorSup()) << '/' << fmt(fine.errorInf()) << '\n';
            }
        }
    }
    return {passed == total, std::to_string(passed) + "/" + std::to_string(total) +
                                 " within budget and halved, largest error/budget " + fmt(worst)};
}

Outcome steinBoundSuite() {
    std::mt19937_64 rng(5005);
    std::uniform_real_distribution<double> q(-2.0, 2.0), l(-1.0, 1.0), amp(-1.0, 1.0), freq(0.2, 2.0),
        phase(0.0, 2.0 * std::numbers::pi), al(0.05, 1.0);
    std::uniform_int_distribution<int> terms(1, 3);
    int ok = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto theta = oracle::randomSet(rng, 3, 4, 3.0, true);
        const double qq = q(rng), ll = l(rng);
        std::vector<fn::SineTerm> t(static_cast<std::size_t>(terms(rng)));
        for (auto& term : t) term = {amp(rng), freq(rng), phase(rng)};
        const auto phi = fn::trigQuadratic(qq, ll, std::move(t));
        const auto r = steinBound(theta, phi, al(rng));
        ok += (r.lhs <= r.rhs + 1e-9 && r.intermediate <= r.intermediateBound + 1e-9) ? 1 : 0;
    }
    return {ok == 500, std::to_string(ok) + "/500 cases"};
}

Outcome dpEquivalence() {
    std::vector<UncertaintySet> suite;
    for (const auto& name : catalog::modelNames()) {
        auto m = catalog::model(name);
        bool small = m.size() <= 2;
        for (const auto& mu : m) small = small && mu.size() <= 3;
        if (small) suite.push_back(std::move(m));
    }
    const std::vector<TestFunction> fs{fn::cosine(), fn::relu(), catalog::function("ramp"), catalog::function("hat"),
                                       fn::sineWave(1.3, 0.2)};
    const OracleLimits limits{std::size_t{1} << 24, 1'000'000};
    int compared = 0, bad = 0, singletons = 0;
    double worst = 0.0;
    for (std::size_t n = 1; n <= 3; ++n) {
        std::size_t tuples = 1;
        for (std::size_t i = 0; i < n; ++i) tuples *= suite.size();
        for (std::size_t code = 0; code < tuples; ++code) {
            std::vector<UncertaintySet> comps;
            for (std::size_t i = 0, c = code; i < n; ++i, c /= suite.size()) comps.push_back(suite[c % suite.size()]);
            const double scale = std::sqrt(static_cast<double>(n));
            for (const auto& phi : fs) {
                const auto dp = dpSumExpectDetailed(comps, phi, scale);
                const double brute = bruteForcePolicyOracle(comps, phi, scale, limits);
                const double diff = std::abs(dp.value - brute);
                worst = std::max(worst, diff);
                bad += (dp.lattice && diff <= 1e-12) ? 0 : 1;
                ++compared;
            }
        }
    }
    // singleton sets: every measure of the suite on its own, against direct convolution
    for (const auto& theta : suite) {
        for (const auto& mu : theta) {
            for (int n = 1; n <= 3; ++n) {
                const std::vector<UncertaintySet> comps(static_cast<std::size_t>(n), UncertaintySet({mu}));
                for (const auto& phi : fs) {
                    const double diff = std::abs(dpSumExpect(comps, phi, std::sqrt(n)) -
                                                 oracle::convolutionExpect(mu, n, phi.value, std::sqrt(n)));
                    worst = std::max(worst, diff);
                    bad += diff <= 1e-12 ? 0 : 1;
                    ++singletons;
                }
            }
        }
    }
    return {bad == 0, std::to_string(compared) + " policy comparisons, " + std::to_string(singletons) +
                          " convolution comparisons, " + std::to_string(bad) + " mismatches, largest gap " +
                          fmt(worst)};
}

Outcome rateRun(const fs::path& dir, int threads) {
    std::string err;
    const int code = cli({"clt", "rate", "--out", dir.string(), "--threads", std::to_string(threads)}, err);
    if (code != kExitOk && code != kExitChecksFailed) return {false, "exit " + std::to_string(code) + ": " + err};
    auto s = readSummary(dir);
    const bool ok = code == kExitOk && s["bound_pass"] == "true" && s["slope_pass"] == "true";
    return {ok, "alpha " + fmt(std::stod(s["alpha"])) + ", slope " + s["slope"] + " <= " +
                    fmt(std::stod(s["slope_limit"])) + ", every n within bound: " + s["bound_pass"] +
                    (s["regularity_reestimated"] == "true" ? " (regularity re-estimated)" : "")};
}

Outcome traces(const fs::path& rateDir) {
    auto s = readSummary(rateDir);
    if (s.count("alpha") == 0) return {false, "rate run missing"};
    RegularityEstimate reg;
    reg.alpha = std::stod(s["alpha"]);
    reg.cAlpha = std::stod(s["c_alpha"]);
    reg.CAlpha = std::stod(s["C_alpha"]);
    const auto theta = catalog::model("two-scale");
    const GCoeff coeff = GCoeff::fromVariances(varianceBounds(theta));
    int ok = 0, total = 0;
    double worstRatio = 0.0;
    for (std::size_t n : {4u, 16u}) {
        for (const auto& phi : fn::lipschitzFamily()) {
            const auto t = interpolationTrace(IidSpec(theta, n), coeff, phi, reg);
            ok += (t.telescopes() && t.stepsWithinBound()) ? 1 : 0;
            ++total;
            for (const auto& st : t.steps) {
                if (st.stepBound > 0.0) worstRatio = std::max(worstRatio, st.increment / (st.stepBound + t.budget));
            }
        }
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) +
                             " traces telescope and stay within the per-step bound, largest increment/bound " +
                             fmt(worstRatio)};
}

Outcome nonIid(const fs::path& dir) {
    std::string err;
    const int code = cli({"clt", "noniid", "--out", dir.string()}, err);
    if (code != kExitOk && code != kExitChecksFailed) return {false, "exit " + std::to_string(code) + ": " + err};
    auto s = readSummary(dir);
    const auto rows = readCsv(dir / "noniid.csv");
    const bool bound = code == kExitOk && s["bound_pass"] == "true" && s["beta"] == "2";

    // identical components against the i.i.d. pipeline
    const UncertaintySet theta({DiscreteMeasure::rademacher(2.0 / 3.0), DiscreteMeasure::rademacher(4.0 / 3.0)});
    const auto family = fn::lipschitzFamily();
    RegularityEstimate reg;
    reg.alpha = 0.5;
    reg.cAlpha = 1.0;
    reg.CAlpha = RegularityEstimate::bigC(0.5, 1.0);
    const NonIidSpec same(std::vector<UncertaintySet>(8, theta));
    const auto ni = nonIidExperiment(same, family, reg);
    const std::vector<std::size_t> ns{8};
    const auto iid = rateExperiment(theta, ns, family, reg, GCoeff::normalized(2.0));
    const double gap = std::abs(ni.rows[0].error - iid.rows[0].error);
    std::string detail = "n=8 profile 1.2^i: ";
    if (rows.size() == 2 && rows[1].size() >= 3) {
        detail += "error " + fmt(std::stod(rows[1][1])) + " <= bound " + fmt(std::stod(rows[1][2]));
    }
    detail += ", identical components differ from i.i.d. by " + fmt(gap);
    return {bound && gap <= 1e-9, detail};
}

Outcome regularity(const fs::path& dir) {
    std::string err;
    const int code = cli({"reg", "estimate", "--out", dir.string()}, err);
    if (code != kExitOk) return {false, "exit " + std::to_string(code) + ": " + err};
    auto s = readSummary(dir);
    const double alpha = std::stod(s["alpha"]);
    const auto rows = readCsv(dir / "regularity.csv");
    const auto& head = rows.at(0);
    // the two M columns just before relative_change are the two finest levels
    const auto rc = static_cast<std::size_t>(std::find(head.begin(), head.end(), "relative_change") - head.begin());
    if (rc < 3 || rc >= head.size()) return {false, "unexpected regularity.csv header"};
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (std::abs(std::stod(rows[i][0]) - alpha) > 1e-12) continue;
        const double coarse = std::stod(rows[i][rc - 2]);
        const double fine = std::stod(rows[i][rc - 1]);
        const double change = std::abs(fine - coarse) / fine;
        return {change <= 0.10, "alpha " + fmt(alpha) + ", M " + fmt(coarse) + " -> " + fmt(fine) + ", change " +
                                    fmt(change)};
    }
    return {false, "selected alpha missing from regularity.csv"};
}

Outcome classical() {
    const auto probe = parseRealList("-3:3:61");
    double worst = 0.0;
    for (const auto& phi : {fn::cosine(), catalog::function("ramp")}) {
        worst = std::max(worst, classicalSteinResidual(GCoeff(1.0, 1.0), phi, probe).maxResidual);
    }
    return {worst <= 1e-3, "max residual " + fmt(worst) + " on 61 points of [-3, 3]"};
}

Outcome determinism(const fs::path& one, const fs::path& eight) {
    const Outcome rerun = rateRun(eight, 8);
    if (!fs::exists(eight / "run.summary")) return {false, "threads 8 run failed: " + rerun.detail};
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(one)) {
        if (e.path().extension() == ".csv") names.push_back(e.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    std::size_t others = 0;
    for (const auto& e : fs::directory_iterator(eight)) others += e.path().extension() == ".csv" ? 1 : 0;
    int differ = 0;
    for (const auto& n : names) differ += slurp(one / n) == slurp(eight / n) ? 0 : 1;
    const bool ok = !names.empty() && others == names.size() && differ == 0;
    return {ok, std::to_string(names.size()) + " CSVs compared, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "gstein_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    struct Criterion {
        int id;
        const char* name;
        double limit;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "axiom suite", 10, axioms},
        {2, "linear PDE oracle", 60, linearOracle},
        {3, "convex datum oracle", 60, convexOracle},
        {4, "Stein identity suite", 600, steinIdentitySuite},
        {5, "Stein bound suite", 60, steinBoundSuite},
        {6, "DP oracle equivalence", 60, dpEquivalence},
        {7, "rate bound", 1800, [&] { return rateRun(work / "rate_threads1", 1); }},
        {8, "telescoping traces", 300, [&] { return traces(work / "rate_threads1"); }},
        {9, "non-i.i.d. bound", 600, [&] { return nonIid(work / "noniid"); }},
        {10, "regularity scaling", 600, [&] { return regularity(work / "regularity"); }},
        {11, "classical reduction", 300, classical},
        {12, "determinism", 1800, [&] { return determinism(work / "rate_threads1", work / "rate_threads8"); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && secs <= c.limit;
        failures += pass ? 0 : 1;
        std::cout << "criterion " << c.id << ' ' << (pass ? "PASS" : "FAIL") << "  " << c.name << ": " << o.detail
                  << " [" << fmt(secs) << " s, limit " << fmt(c.limit) << " s]" << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
    return failures == 0 ? 0 : 1;
}
