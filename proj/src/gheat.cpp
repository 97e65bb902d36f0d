#include "gstein/gheat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gstein/errors.hpp"

namespace gstein {

namespace {
constexpr double kZeroSeminorm = 1e-9;
}  // namespace

GCoeff::GCoeff(double sigmaBar, double sigmaUnder) : sigmaBar_(sigmaBar), sigmaUnder_(sigmaUnder) {
    if (!(sigmaUnder > 0.0)) {
        throw DegenerateVariance("sigma_under must be positive, got " + std::to_string(sigmaUnder));
    }
    if (!(sigmaBar >= sigmaUnder) || !std::isfinite(sigmaBar)) {
        throw InvalidModel("need sigma_bar >= sigma_under");
    }
}

GCoeff GCoeff::fromVariances(const VarianceBounds& v) {
    if (!(v.sigmaUnderSq > 0.0)) {
        throw DegenerateVariance("-N[-x^2] = " + std::to_string(v.sigmaUnderSq));
    }
    return GCoeff(std::sqrt(v.sigmaBarSq), std::sqrt(v.sigmaUnderSq));
}

GCoeff GCoeff::normalized(double beta) {
    if (!(beta >= 1.0)) {
        throw InvalidModel("variance ratio beta must be >= 1");
    }
    return GCoeff(2.0 * beta / (1.0 + beta), 2.0 / (1.0 + beta));
}

std::size_t SpaceTimeGrid::steps() const {
    const double raw = T / dt;
    auto n = static_cast<std::size_t>(std::ceil(raw - 1e-9 * raw));
    return std::max<std::size_t>(n, 1);
}

SpaceTimeGrid SpaceTimeGrid::symmetric(const GCoeff& coeff, double dx, double reach, double T, double cfl) {
    const double half = std::abs(reach) + 8.0 * coeff.sigmaBar() * std::sqrt(T);
    const auto cells = static_cast<std::size_t>(std::ceil(half / dx - 1e-9));
    SpaceTimeGrid g;
    g.nx = 2 * cells + 1;
    g.xMin = -static_cast<double>(cells) * dx;
    g.xMax = static_cast<double>(cells) * dx;
    g.T = T;
    g.dt = cfl * dx * dx / coeff.sigmaBarSq();
    return g;
}

void validateGrid(const SpaceTimeGrid& grid, const GCoeff& coeff) {
    if (grid.nx < 3) {
        throw InvalidModel("grid needs at least 3 nodes");
    }
    if (!(grid.xMin < 0.0 && 0.0 < grid.xMax)) {
        throw InvalidModel("grid must satisfy x_min < 0 < x_max");
    }
    if (!(grid.T > 0.0) || !(grid.dt > 0.0)) {
        throw InvalidModel("grid needs T > 0 and dt > 0");
    }
    const double ratio = coeff.sigmaBarSq() * grid.dt / (grid.dx() * grid.dx());
    if (ratio > 0.5 + 1e-12) {
        std::ostringstream os;
        os << "sigma_bar^2 dt / dx^2 = " << ratio << " exceeds 1/2";
        throw UnstableGrid(os.str());
    }
}

SolutionField::SolutionField(SpaceTimeGrid grid, GCoeff coeff, TestFunction datum, std::vector<double> times,
                             std::vector<double> data)
    : grid_(std::move(grid)),
      coeff_(coeff),
      datum_(std::move(datum)),
      times_(std::move(times)),
      data_(std::move(data)) {}

std::span<const double> SolutionField::layer(std::size_t k) const {
    return std::span<const double>(data_).subspan(k * grid_.nx, grid_.nx);
}

std::size_t SolutionField::nearestLayer(double t) const {
    const auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return 0;
    if (it == times_.end()) return times_.size() - 1;
    const auto hi = static_cast<std::size_t>(it - times_.begin());
    return (t - times_[hi - 1] <= times_[hi] - t) ? hi - 1 : hi;
}

double SolutionField::nodal(std::size_t k, std::size_t i, Quantity q) const {
    const auto u = layer(k);
    const std::size_t n = grid_.nx;
    const double h = grid_.dx();
    switch (q) {
        case Quantity::Value:
            return u[i];
        case Quantity::First:
            if (i == 0) return (u[1] - u[0]) / h;
            if (i == n - 1) return (u[n - 1] - u[n - 2]) / h;
            return (u[i + 1] - u[i - 1]) / (2.0 * h);
        case Quantity::Second:
            if (i == 0 || i == n - 1) return 0.0;
            return (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (h * h);
    }
    return 0.0;
}

double SolutionField::interpolate(double x, double t, Quantity q) const {
    const double slackX = 1e-12 * (1.0 + std::abs(grid_.xMax - grid_.xMin));
    const double slackT = 1e-12 * (1.0 + grid_.T);
    if (!(x >= grid_.xMin - slackX && x <= grid_.xMax + slackX && t >= -slackT && t <= grid_.T + slackT)) {
        std::ostringstream os;
        os << "(x, t) = (" << x << ", " << t << ") not in [" << grid_.xMin << ", " << grid_.xMax << "] x [0, "
           << grid_.T << "]";
        throw OutOfDomain(os.str());
    }
    x = std::clamp(x, grid_.xMin, grid_.xMax);
    t = std::clamp(t, 0.0, grid_.T);

    std::size_t k0 = 0;
    std::size_t k1 = 0;
    double wt = 0.0;
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.end()) {
        k0 = k1 = times_.size() - 1;
    } else {
        k1 = static_cast<std::size_t>(it - times_.begin());
        k0 = k1 - 1;
        wt = (t - times_[k0]) / (times_[k1] - times_[k0]);
    }

    double s = (x - grid_.xMin) / grid_.dx();
    // snap queries that are a node up to round-off onto it
    if (const double r = std::round(s); std::abs(s - r) < 1e-9) s = r;
    auto j = static_cast<std::size_t>(std::floor(s));
    j = std::min(j, grid_.nx - 2);
    const double wx = s - static_cast<double>(j);

    auto atLayer = [&](std::size_t k) {
        const double a = nodal(k, j, q);
        if (wx == 0.0) return a;
        return a + wx * (nodal(k, j + 1, q) - a);
    };
    const double v0 = atLayer(k0);
    if (wt == 0.0) return v0;
    return v0 + wt * (atLayer(k1) - v0);
}

double SolutionField::value(double x, double t) const { return interpolate(x, t, Quantity::Value); }
double SolutionField::dx1(double x, double t) const { return interpolate(x, t, Quantity::First); }
double SolutionField::dx2(double x, double t) const { return interpolate(x, t, Quantity::Second); }

SolutionField solveGHeat(const GCoeff& coeff, const TestFunction& phi, const SpaceTimeGrid& grid, Exec exec) {
    validateGrid(grid, coeff);
    if (!phi.lipschitz.has_value()) {
        throw InvalidModel("initial datum '" + phi.name + "' has no Lipschitz constant");
    }
    const std::size_t nt = grid.steps();
    const double dt = grid.stepSize();
    const std::size_t nx = grid.nx;

    const std::size_t stride =
        grid.storeStride > 0 ? grid.storeStride : std::max<std::size_t>(1, nt / std::max<std::size_t>(1, grid.maxStoredLayers));
    const std::size_t dense = grid.denseLayers;
    std::vector<char> keep(nt + 1, 0);
    for (std::size_t k = 0; k <= nt; ++k) {
        keep[k] = (k <= dense || k % stride == 0 || k == nt) ? 1 : 0;
    }
    for (double t : grid.keepTimes) {
        if (t < 0.0 || t > grid.T) continue;
        const auto k = static_cast<std::size_t>(std::llround(t / dt));
        keep[std::min(k, nt)] = 1;
    }
    std::size_t stored = 0;
    for (char c : keep) stored += c;

    std::vector<double> times;
    std::vector<double> data;
    times.reserve(stored);
    data.reserve(stored * nx);

    std::vector<double> prev(nx);
    std::vector<double> next(nx);
    for (std::size_t i = 0; i < nx; ++i) prev[i] = phi(grid.node(i));
    times.push_back(0.0);
    data.insert(data.end(), prev.begin(), prev.end());

    const kernels::HeatStencil stencil{coeff.sigmaBarSq(), coeff.sigmaUnderSq(), dt, 1.0 / (grid.dx() * grid.dx())};
    for (std::size_t k = 1; k <= nt; ++k) {
        if (exec == Exec::Parallel) {
            kernels::omp::gheatStep(prev, next, stencil);
        } else {
            kernels::serial::gheatStep(prev, next, stencil);
        }
        prev.swap(next);
        if (keep[k]) {
            times.push_back(k == nt ? grid.T : static_cast<double>(k) * dt);
            data.insert(data.end(), prev.begin(), prev.end());
        }
    }
    return SolutionField(grid, coeff, phi, std::move(times), std::move(data));
}

double gNormalExpect(const GCoeff& coeff, const TestFunction& phi, const SpaceTimeGrid& grid) {
    if (grid.T < 1.0 - 1e-12) {
        throw InvalidModel("G-normal expectation needs T >= 1");
    }
    SpaceTimeGrid g = grid;
    g.maxStoredLayers = 2;
    return evalField(solveGHeat(coeff, phi, g), 0.0, 1.0);
}

double evalField(const SolutionField& field, double x, double t) { return field.value(x, t); }

SampledFunction secondDeriv(const SolutionField& field, double t) {
    const auto k = field.nearestLayer(t);
    const auto u = field.layer(k);
    const auto& g = field.grid();
    const double h = g.dx();
    SampledFunction out;
    out.x0 = g.xMin + h;
    out.dx = h;
    out.t = field.times()[k];
    out.values.resize(g.nx - 2);
    for (std::size_t i = 1; i + 1 < g.nx; ++i) {
        out.values[i - 1] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (h * h);
    }
    return out;
}

SampledFunction restrictTo(const SampledFunction& f, double halfWidth) {
    SampledFunction out;
    out.dx = f.dx;
    out.t = f.t;
    bool first = true;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double x = f.x0 + static_cast<double>(i) * f.dx;
        if (std::abs(x) <= halfWidth + 1e-12) {
            if (first) {
                out.x0 = x;
                first = false;
            }
            out.values.push_back(f.values[i]);
        }
    }
    return out;
}

double holderSeminorm(const SampledFunction& samples, double alpha, double windowRadius, Exec exec) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw InvalidModel("Hoelder exponent must lie in (0, 1]");
    }
    if (samples.values.size() < 2) return 0.0;
    const auto window = static_cast<std::size_t>(std::floor(windowRadius / samples.dx + 1e-9));
    if (window == 0) {
        throw InvalidModel("window radius must be at least dx");
    }
    const std::size_t w = std::min(window, samples.values.size() - 1);
    return exec == Exec::Parallel ? kernels::omp::holderSeminorm(samples.values, samples.dx, alpha, w)
                                  : kernels::serial::holderSeminorm(samples.values, samples.dx, alpha, w);
}

std::vector<double> geometricGrid(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = hi;
        return out;
    }
    const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = lo * std::exp(ratio * static_cast<double>(i));
    out.back() = hi;
    return out;
}

RegularityEstimate estimateRegularity(const GCoeff& coeff, std::span<const TestFunction> suite,
                                      std::span<const double> alphaGrid, std::span<const double> tGrid,
                                      const RegularityOptions& options) {
    if (suite.empty() || alphaGrid.empty() || tGrid.empty()) {
        throw InvalidModel("regularity estimate needs a nonempty suite, alpha grid and t grid");
    }
    if (options.levels < 2) {
        throw InvalidModel("regularity estimate needs at least two grid levels");
    }
    for (const auto& phi : suite) {
        if (!phi.lipschitz || *phi.lipschitz > 1.0 + 1e-12) {
            throw InvalidModel("suite member '" + phi.name + "' is not unit Lipschitz");
        }
    }
    for (double t : tGrid) {
        if (!(t > 0.0 && t <= 1.0)) throw InvalidModel("t grid must lie in (0, 1]");
    }
    for (double a : alphaGrid) {
        if (!(a > 0.0 && a < 1.0)) throw InvalidModel("alpha candidates must lie in (0, 1)");
    }
    const double tMax = *std::max_element(tGrid.begin(), tGrid.end());

    RegularityEstimate est;
    const auto levels = static_cast<std::size_t>(options.levels);
    std::vector<std::vector<double>> M(alphaGrid.size(), std::vector<double>(levels, 0.0));
    for (std::size_t level = 0; level < levels; ++level) {
        const double dx = options.baseDx / std::pow(2.0, static_cast<double>(level));
        est.levelDx.push_back(dx);
        SpaceTimeGrid grid =
            SpaceTimeGrid::symmetric(coeff, dx, options.interiorHalfWidth + options.windowRadius, tMax, options.cfl);
        grid.keepTimes.assign(tGrid.begin(), tGrid.end());
        grid.maxStoredLayers = 1;
        for (const auto& phi : suite) {
            const SolutionField field = solveGHeat(coeff, phi, grid);
            for (double t : tGrid) {
                const SampledFunction d2 = restrictTo(secondDeriv(field, t), options.interiorHalfWidth);
                for (std::size_t a = 0; a < alphaGrid.size(); ++a) {
                    const double alpha = alphaGrid[a];
                    const double scaled =
                        std::pow(d2.t, 0.5 * (1.0 + alpha)) * holderSeminorm(d2, alpha, options.windowRadius);
                    M[a][level] = std::max(M[a][level], scaled);
                }
            }
        }
    }

    bool allBlowUp = true;
    int chosen = -1;
    for (std::size_t a = 0; a < alphaGrid.size(); ++a) {
        const double fine = M[a][levels - 1];
        const double coarse = M[a][levels - 2];
        // seminorms of data with vanishing second derivative are pure round-off
        const bool zero = fine <= kZeroSeminorm;
        const double change = zero ? 0.0 : std::abs(fine - coarse) / fine;
        const bool stable = change <= options.stabilityTol;
        if (zero || !(fine > 2.0 * coarse)) allBlowUp = false;
        est.candidates.push_back({alphaGrid[a], M[a], change, stable});
        if (stable && (chosen < 0 || alphaGrid[a] > alphaGrid[static_cast<std::size_t>(chosen)])) {
            chosen = static_cast<int>(a);
        }
    }
    if (chosen < 0) {
        throw NoStableExponent(allBlowUp ? "every candidate grows more than 2x under refinement"
                                         : "no candidate within the stability tolerance");
    }
    const auto& pick = est.candidates[static_cast<std::size_t>(chosen)];
    est.alpha = pick.alpha;
    est.cAlpha = pick.maxScaled.back() * (1.0 + options.safety);
    est.CAlpha = RegularityEstimate::bigC(est.alpha, est.cAlpha);
    return est;
}

}  // namespace gstein
