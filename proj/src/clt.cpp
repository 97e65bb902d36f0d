#include "gstein/clt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "gstein/errors.hpp"

namespace gstein {

IidSpec::IidSpec(UncertaintySet theta_, std::size_t n_) : theta(std::move(theta_)), n(n_) {
    if (n == 0) {
        throw InvalidModel("i.i.d. spec needs n >= 1");
    }
    if (!centeredCheck(theta)) {
        throw NotCentered("N[x] or N[-x] is nonzero");
    }
    varianceBounds(theta);
}

NonIidSpec::NonIidSpec(std::vector<UncertaintySet> comps) : components(std::move(comps)) {
    if (components.empty()) {
        throw InvalidModel("non-i.i.d. spec needs at least one component");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (!centeredCheck(components[i])) {
            throw NotCentered("component " + std::to_string(i + 1));
        }
        const GCoeff c = GCoeff::fromVariances(varianceBounds(components[i]));
        if (i == 0) {
            beta = c.beta();
        } else if (std::abs(c.beta() - beta) > 1e-9 * beta) {
            std::ostringstream os;
            os.precision(12);
            os << "component 1 has beta = " << beta << ", component " << i + 1 << " has beta = " << c.beta();
            throw MixedBeta(os.str());
        }
        sigmas.push_back(c.sigma());
        total += c.sigma() * c.sigma();
    }
    sigma = std::sqrt(total);
    breakpoints.push_back(0.0);
    double acc = 0.0;
    for (double s : sigmas) {
        acc += s * s;
        breakpoints.push_back(acc / total);
    }
    breakpoints.back() = 1.0;
}

namespace {

__extension__ typedef __int128 i128;

struct Rational {
    long long num;
    long long den;
};

std::optional<Rational> toRational(double x, long long maxDen) {
    if (!std::isfinite(x)) return std::nullopt;
    if (x == 0.0) return Rational{0, 1};
    const bool negative = x < 0.0;
    const double target = std::abs(x);
    const double tol = 1e-13 * std::max(1.0, target);
    long long h1 = 1, h2 = 0, k1 = 0, k2 = 1;
    double frac = target;
    for (int it = 0; it < 64; ++it) {
        const double a = std::floor(frac);
        if (a > 9e15) return std::nullopt;
        const auto ai = static_cast<long long>(a);
        const i128 h = static_cast<i128>(ai) * h1 + h2;
        const i128 k = static_cast<i128>(ai) * k1 + k2;
        if (k > maxDen || h > (static_cast<i128>(1) << 62)) return std::nullopt;
        h2 = h1;
        k2 = k1;
        h1 = static_cast<long long>(h);
        k1 = static_cast<long long>(k);
        if (std::abs(target - static_cast<double>(h1) / static_cast<double>(k1)) <= tol) {
            return Rational{negative ? -h1 : h1, k1};
        }
        const double rem = frac - a;
        if (rem <= 0.0) break;
        frac = 1.0 / rem;
    }
    return std::nullopt;
}

}  // namespace

std::optional<LatticeModel> detectLattice(std::span<const UncertaintySet> components, long long maxDenominator,
                                          std::size_t maxPoints) {
    std::vector<Rational> rats;
    std::vector<double> positions;
    for (const auto& theta : components) {
        for (const auto& mu : theta) {
            for (const Atom& a : mu.atoms()) {
                const auto r = toRational(a.position, maxDenominator);
                if (!r) return std::nullopt;
                rats.push_back(*r);
                positions.push_back(a.position);
            }
        }
    }
    i128 lcm = 1;
    for (const auto& r : rats) {
        const long long g = std::gcd(static_cast<long long>(lcm % r.den), r.den);
        lcm *= r.den / g;
        if (lcm > static_cast<i128>(1'000'000'000'000'000LL)) return std::nullopt;
    }
    const auto L = static_cast<long long>(lcm);
    std::vector<long long> numer;
    long long g = 0;
    for (const auto& r : rats) {
        const i128 v = static_cast<i128>(r.num) * (L / r.den);
        if (v > static_cast<i128>(1) << 62 || v < -(static_cast<i128>(1) << 62)) return std::nullopt;
        numer.push_back(static_cast<long long>(v));
        g = std::gcd(g, std::llabs(numer.back()));
    }
    if (g == 0) g = L;  // every atom sits at 0
    const double step = static_cast<double>(g) / static_cast<double>(L);

    LatticeModel model;
    model.step = step;
    std::size_t idx = 0;
    long long width = 0;
    for (const auto& theta : components) {
        std::vector<kernels::LatticeMeasure> ms;
        long long lo = std::numeric_limits<long long>::max();
        long long hi = std::numeric_limits<long long>::min();
        for (const auto& mu : theta) {
            kernels::LatticeMeasure lm;
            for (const Atom& a : mu.atoms()) {
                const long long off = numer[idx] / g;
                if (std::abs(static_cast<double>(off) * step - positions[idx]) >
                    1e-12 * std::max(1.0, std::abs(positions[idx]))) {
                    return std::nullopt;
                }
                lm.offsets.push_back(static_cast<long>(off));
                lm.weights.push_back(a.weight);
                lo = std::min(lo, off);
                hi = std::max(hi, off);
                ++idx;
            }
            ms.push_back(std::move(lm));
        }
        width += hi - lo;
        if (static_cast<std::size_t>(width) + 1 > maxPoints) return std::nullopt;
        model.components.push_back(std::move(ms));
    }
    return model;
}

namespace {

DpResult latticeDp(const LatticeModel& model, const TestFunction& phi, double scale, Exec exec) {
    const std::size_t n = model.components.size();
    std::vector<long> lo(n + 1, 0);
    std::vector<long> hi(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        long mn = std::numeric_limits<long>::max();
        long mx = std::numeric_limits<long>::min();
        for (const auto& mu : model.components[i]) {
            mn = std::min(mn, *std::min_element(mu.offsets.begin(), mu.offsets.end()));
            mx = std::max(mx, *std::max_element(mu.offsets.begin(), mu.offsets.end()));
        }
        lo[i + 1] = lo[i] + mn;
        hi[i + 1] = hi[i] + mx;
    }
    std::vector<double> next(static_cast<std::size_t>(hi[n] - lo[n] + 1));
    std::vector<double> out;
    if (exec == Exec::Parallel) {
        kernels::omp::sample(phi.value, model.step, scale, lo[n], next);
    } else {
        kernels::serial::sample(phi.value, model.step, scale, lo[n], next);
    }
    for (std::size_t i = n; i >= 1; --i) {
        out.assign(static_cast<std::size_t>(hi[i - 1] - lo[i - 1] + 1), 0.0);
        if (exec == Exec::Parallel) {
            kernels::omp::latticeStep(next, lo[i], out, lo[i - 1], model.components[i - 1]);
        } else {
            kernels::serial::latticeStep(next, lo[i], out, lo[i - 1], model.components[i - 1]);
        }
        next.swap(out);
    }
    return {next[0], true, model.step, 0.0};
}

DpResult gridDp(std::span<const UncertaintySet> components, const TestFunction& phi, double scale,
                const DpOptions& options) {
    if (!phi.lipschitz) {
        throw BudgetExceeded("grid mode needs a Lipschitz constant to bound interpolation error");
    }
    if (!(options.gridStep > 0.0)) {
        throw InvalidModel("grid step must be positive");
    }
    const double h = options.gridStep;
    const double errBound = static_cast<double>(components.size()) * *phi.lipschitz * h / 2.0;
    if (errBound > options.interpBudget) {
        std::ostringstream os;
        os << "interpolation error bound " << errBound << " exceeds " << options.interpBudget;
        throw BudgetExceeded(os.str());
    }
    double reach = 0.0;
    for (const auto& theta : components) reach += theta.maxAbsPosition();
    const double L = reach / scale + 1.0;
    const auto half = static_cast<long>(std::ceil(L / h));
    const kernels::UniformGrid grid{-static_cast<double>(half) * h, h, static_cast<std::size_t>(2 * half + 1)};

    std::vector<double> next(grid.n);
    std::vector<double> out(grid.n);
    if (options.exec == Exec::Parallel) {
        kernels::omp::sample(phi.value, h, 1.0, -half, next);
    } else {
        kernels::serial::sample(phi.value, h, 1.0, -half, next);
    }
    for (std::size_t i = components.size(); i >= 1; --i) {
        std::vector<kernels::ShiftMeasure> ms;
        for (const auto& mu : components[i - 1]) {
            kernels::ShiftMeasure sm;
            for (const Atom& a : mu.atoms()) {
                sm.shifts.push_back(a.position / scale);
                sm.weights.push_back(a.weight);
            }
            ms.push_back(std::move(sm));
        }
        if (options.exec == Exec::Parallel) {
            kernels::omp::gridStep(next, grid, out, 0, grid.n, ms);
        } else {
            kernels::serial::gridStep(next, grid, out, 0, grid.n, ms);
        }
        next.swap(out);
    }
    return {next[static_cast<std::size_t>(half)], false, h * scale, errBound};
}

}  // namespace

DpResult dpSumExpectDetailed(std::span<const UncertaintySet> components, const TestFunction& phi, double scale,
                             const DpOptions& options) {
    if (components.empty()) {
        throw InvalidModel("sum expectation needs at least one component");
    }
    if (!(scale > 0.0)) {
        throw InvalidModel("scale must be positive");
    }
    if (options.mode != DpMode::Grid) {
        const auto model = detectLattice(components, options.maxDenominator, options.maxLatticePoints);
        if (model) return latticeDp(*model, phi, scale, options.exec);
        if (options.mode == DpMode::Lattice) {
            throw InvalidModel("atoms do not share a rational lattice within the size limits");
        }
    }
    return gridDp(components, phi, scale, options);
}

double dpSumExpect(std::span<const UncertaintySet> components, const TestFunction& phi, double scale,
                   const DpOptions& options) {
    return dpSumExpectDetailed(components, phi, scale, options).value;
}

namespace {

long long sumKey(double s) { return std::llround(s * 1e9); }

struct PolicyTree {
    std::span<const UncertaintySet> components;
    const TestFunction* phi;
    double scale;
    std::vector<std::map<long long, std::size_t>> index;  // per step: partial-sum key -> decision slot
    std::vector<std::size_t> choice;

    double eval(std::size_t i, double sum) const {
        if (i == components.size()) return (*phi)(sum / scale);
        const std::size_t slot = index[i].at(sumKey(sum));
        const DiscreteMeasure& mu = components[i][choice[slot]];
        double acc = 0.0;
        for (const Atom& a : mu.atoms()) acc += a.weight * eval(i + 1, sum + a.position);
        return acc;
    }
};

}  // namespace

double bruteForcePolicyOracle(std::span<const UncertaintySet> components, const TestFunction& phi, double scale,
                              const OracleLimits& limits) {
    if (components.empty()) {
        throw InvalidModel("oracle needs at least one component");
    }
    const std::size_t n = components.size();
    double paths = 1.0;
    for (const auto& theta : components) {
        std::size_t most = 0;
        for (const auto& mu : theta) most = std::max(most, mu.size());
        paths *= static_cast<double>(most);
    }
    if (paths > static_cast<double>(limits.maxPaths)) {
        throw BudgetExceeded("more than " + std::to_string(limits.maxPaths) + " atom paths");
    }

    PolicyTree tree{components, &phi, scale, std::vector<std::map<long long, std::size_t>>(n), {}};
    std::vector<std::size_t> radix;
    std::map<long long, double> level{{sumKey(0.0), 0.0}};
    double policies = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::map<long long, double> following;
        for (const auto& [key, sum] : level) {
            tree.index[i][key] = radix.size();
            radix.push_back(components[i].size());
            policies *= static_cast<double>(components[i].size());
            for (const auto& mu : components[i]) {
                for (const Atom& a : mu.atoms()) following.emplace(sumKey(sum + a.position), sum + a.position);
            }
        }
        level.swap(following);
    }
    if (policies > static_cast<double>(limits.maxPolicies)) {
        std::ostringstream os;
        os << policies << " policies exceed the limit of " << limits.maxPolicies;
        throw BudgetExceeded(os.str());
    }

    tree.choice.assign(radix.size(), 0);
    double best = -std::numeric_limits<double>::infinity();
    while (true) {
        best = std::max(best, tree.eval(0, 0.0));
        std::size_t d = 0;
        while (d < radix.size()) {
            if (++tree.choice[d] < radix[d]) break;
            tree.choice[d] = 0;
            ++d;
        }
        if (d == radix.size()) break;
    }
    return best;
}

GNormalValue gNormalWithEstimate(const GCoeff& coeff, const TestFunction& phi, const CltSettings& settings) {
    const SpaceTimeGrid fine = SpaceTimeGrid::symmetric(coeff, settings.pdeDx, 0.0, 1.0, settings.cfl);
    const SpaceTimeGrid coarse = SpaceTimeGrid::symmetric(coeff, 2.0 * settings.pdeDx, 0.0, 1.0, settings.cfl);
    const double uh = gNormalExpect(coeff, phi, fine);
    const double u2h = gNormalExpect(coeff, phi, coarse);
    return {uh, std::abs(uh - u2h)};
}

namespace {

void requireMatchingVariances(const UncertaintySet& theta, const GCoeff& coeff) {
    const VarianceBounds v = varianceBounds(theta);
    const double tol = 1e-12 * (1.0 + v.sigmaBarSq);
    if (std::abs(v.sigmaBarSq - coeff.sigmaBarSq()) > tol || std::abs(v.sigmaUnderSq - coeff.sigmaUnderSq()) > tol) {
        throw InvalidModel("G coefficients must equal the variance bounds of the uncertainty set");
    }
}

}  // namespace

CltErrorValue cltError(const IidSpec& spec, const TestFunction& phi, const GCoeff& coeff,
                       const CltSettings& settings) {
    requireMatchingVariances(spec.theta, coeff);
    const auto comps = spec.components();
    const DpResult dp = dpSumExpectDetailed(comps, phi, std::sqrt(static_cast<double>(spec.n)), settings.dp);
    const GNormalValue gn = gNormalWithEstimate(coeff, phi, settings);
    return {std::abs(dp.value - gn.value), dp.value, gn.value, gn.richardson + dp.interpErrorBound};
}

bool RateReport::allPass() const {
    return std::all_of(rows.begin(), rows.end(), [](const RateRow& r) { return r.pass; });
}

std::optional<double> logLogSlope(std::span<const RateRow> rows) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& r : rows) {
        if (r.error > 0.0 && r.n > 0) {
            xs.push_back(std::log(static_cast<double>(r.n)));
            ys.push_back(std::log(r.error));
        }
    }
    if (xs.size() < 2) return std::nullopt;
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

RateReport rateExperiment(const UncertaintySet& theta, std::span<const std::size_t> nList,
                          std::span<const TestFunction> family, const RegularityEstimate& reg, const GCoeff& coeff,
                          const CltSettings& settings) {
    if (family.empty()) {
        throw InvalidModel("rate experiment needs a nonempty test family");
    }
    requireMatchingVariances(theta, coeff);
    std::vector<GNormalValue> targets;
    targets.reserve(family.size());
    for (const auto& phi : family) targets.push_back(gNormalWithEstimate(coeff, phi, settings));

    RateReport report;
    report.regularity = reg;
    report.moment = absMoment(theta, 2.0 + reg.alpha);
    for (std::size_t n : nList) {
        const IidSpec spec(theta, n);
        const auto comps = spec.components();
        const double scale = std::sqrt(static_cast<double>(n));
        RateRow row{n, 0.0, 0.0, 0.0, false, ""};
        for (std::size_t f = 0; f < family.size(); ++f) {
            const DpResult dp = dpSumExpectDetailed(comps, family[f], scale, settings.dp);
            const double err = std::abs(dp.value - targets[f].value);
            row.budget = std::max(row.budget, targets[f].richardson + dp.interpErrorBound);
            if (f == 0 || err > row.error) {
                row.error = err;
                row.worst = family[f].name;
            }
        }
        row.bound = reg.CAlpha * report.moment / std::pow(static_cast<double>(n), 0.5 * reg.alpha);
        row.pass = row.error <= row.bound + row.budget;
        report.rows.push_back(row);
    }
    report.slope = logLogSlope(report.rows);
    return report;
}

RateReport nonIidExperiment(const NonIidSpec& spec, std::span<const TestFunction> family,
                            const RegularityEstimate& reg, const CltSettings& settings) {
    if (family.empty()) {
        throw InvalidModel("non-i.i.d. experiment needs a nonempty test family");
    }
    const GCoeff coeff = GCoeff::normalized(spec.beta);
    RateReport report;
    report.regularity = reg;
    const double a = reg.alpha;
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        const double si = spec.sigmas[i];
        const double term =
            absMoment(spec.components[i], 2.0 + a) / std::pow(si, 2.0 + a) * std::pow(si / spec.sigma, a);
        report.moment = std::max(report.moment, term);
    }
    RateRow row{spec.components.size(), 0.0, reg.CAlpha * report.moment, 0.0, false, ""};
    for (std::size_t f = 0; f < family.size(); ++f) {
        const GNormalValue gn = gNormalWithEstimate(coeff, family[f], settings);
        const DpResult dp = dpSumExpectDetailed(spec.components, family[f], spec.sigma, settings.dp);
        const double err = std::abs(dp.value - gn.value);
        row.budget = std::max(row.budget, gn.richardson + dp.interpErrorBound);
        if (f == 0 || err > row.error) {
            row.error = err;
            row.worst = family[f].name;
        }
    }
    row.pass = row.error <= row.bound + row.budget;
    report.rows.push_back(row);
    report.slope = logLogSlope(report.rows);
    return report;
}

bool Trace::telescopes() const {
    if (steps.empty()) return true;
    long double total = 0.0L;
    for (std::size_t i = 1; i < steps.size(); ++i) {
        total += std::abs(static_cast<long double>(steps[i].a) - static_cast<long double>(steps[i - 1].a));
    }
    const long double span = std::abs(static_cast<long double>(steps.back().a) - static_cast<long double>(steps.front().a));
    return span <= total;
}

bool Trace::stepsWithinBound() const {
    return std::all_of(steps.begin(), steps.end(),
                       [&](const TraceStep& s) { return s.increment <= s.stepBound + budget; });
}

namespace {

SolutionField traceField(const GCoeff& coeff, const TestFunction& phi, double dx, double reach, std::size_t n,
                         double cfl) {
    SpaceTimeGrid grid = SpaceTimeGrid::symmetric(coeff, dx, reach, 1.0, cfl);
    // Make 1 - i/n fall exactly on time steps.
    const std::size_t steps = (grid.steps() + n - 1) / n * n;
    grid.dt = 1.0 / static_cast<double>(steps);
    grid.maxStoredLayers = 1;
    for (std::size_t i = 0; i <= n; ++i) grid.keepTimes.push_back(1.0 - static_cast<double>(i) / static_cast<double>(n));
    return solveGHeat(coeff, phi, grid);
}

}  // namespace

Trace interpolationTrace(const IidSpec& spec, const GCoeff& coeff, const TestFunction& phi,
                         const RegularityEstimate& reg, const CltSettings& settings) {
    requireMatchingVariances(spec.theta, coeff);
    const std::size_t n = spec.n;
    const double nd = static_cast<double>(n);
    const double root = std::sqrt(nd);
    const double reach = root * spec.theta.maxAbsPosition();
    const SolutionField fine = traceField(coeff, phi, settings.pdeDx, reach, n, settings.cfl);
    const SolutionField coarse = traceField(coeff, phi, 2.0 * settings.pdeDx, reach, n, settings.cfl);

    // Richardson estimate of the field error over the reachable window, at every trace time.
    double fieldErr = 0.0;
    const auto& cg = coarse.grid();
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = 1.0 - static_cast<double>(i) / nd;
        for (std::size_t j = 0; j < cg.nx; ++j) {
            const double x = cg.node(j);
            if (std::abs(x) > reach + 1e-12) continue;
            fieldErr = std::max(fieldErr, std::abs(fine.value(x, t) - coarse.value(x, t)));
        }
    }

    const auto comps = spec.components();
    const double a = reg.alpha;
    const double p = 0.5 * (1.0 - a);
    const double moment = absMoment(spec.theta, 2.0 + a);
    const double lead = 2.0 * reg.cAlpha / std::pow(nd, 0.5 * a) * moment;

    Trace trace;
    double interp = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = 1.0 - static_cast<double>(i) / nd;
        double value = 0.0;
        if (i == 0) {
            value = fine.value(0.0, 1.0);
        } else {
            TestFunction psi;
            psi.name = "u(., " + std::to_string(t) + ")";
            psi.value = [&fine, t](double x) { return fine.value(x, t); };
            psi.lipschitz = phi.lipschitz;
            const DpResult dp =
                dpSumExpectDetailed(std::span<const UncertaintySet>(comps).first(i), psi, root, settings.dp);
            value = dp.value;
            interp = std::max(interp, dp.interpErrorBound);
        }
        TraceStep step{i, value, 0.0, 0.0};
        if (i > 0) {
            step.increment = std::abs(value - trace.steps.back().a);
            const double lo = 1.0 - static_cast<double>(i) / nd;
            const double hi = 1.0 - static_cast<double>(i - 1) / nd;
            step.stepBound = lead * (std::pow(hi, p) - std::pow(std::max(lo, 0.0), p)) / p;
        }
        trace.steps.push_back(step);
    }
    trace.endValue = dpSumExpect(comps, phi, root, settings.dp);
    trace.budget = 2.0 * fieldErr + 2.0 * interp;
    return trace;
}

}  // namespace gstein
