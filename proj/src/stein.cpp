#include "gstein/stein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gstein/errors.hpp"

namespace gstein {

TestFunction steinOperator(const GCoeff& coeff, const TestFunction& phi) {
    TestFunction out;
    out.name = "L_G " + phi.name;
    out.value = [coeff, phi](double x) { return coeff(phi.secondDerivative(x)) - 0.5 * x * phi.derivative(x); };
    return out;
}

Interpolant::Interpolant(const SolutionField& field, double s) : field_(&field), s_(s), root_(0.0) {
    if (!(s >= 0.0 && s < 1.0)) {
        throw InvalidModel("interpolant needs 0 <= s < 1, got s = " + std::to_string(s));
    }
    if (field.grid().T < 1.0 - 1e-12) {
        throw InvalidModel("interpolant needs a field solved up to T >= 1");
    }
    root_ = std::sqrt(1.0 - s);
}

double Interpolant::stein(double x) const {
    const double y = root_ * x;
    const double vxx = field_->dx2(y, s_);
    const double vx = field_->dx1(y, s_);
    return field_->coeff()((1.0 - s_) * vxx) - 0.5 * x * root_ * vx;
}

TestFunction interpolantPhiS(const SolutionField& field, double s) {
    const Interpolant phi(field, s);
    TestFunction out;
    out.name = "phi_s";
    out.value = [phi](double x) { return phi(x); };
    out.d1 = [phi](double x) { return phi.d1(x); };
    out.d2 = [phi](double x) { return phi.d2(x); };
    if (field.initialDatum().lipschitz) out.lipschitz = *field.initialDatum().lipschitz * std::sqrt(1.0 - s);
    return out;
}

std::vector<double> wCurve(const UncertaintySet& theta, const SolutionField& field, std::span<const double> sGrid) {
    std::vector<double> out;
    out.reserve(sGrid.size());
    for (double s : sGrid) {
        if (s >= 1.0) {
            out.push_back(field.value(0.0, 1.0));
        } else {
            const Interpolant phi(field, s);
            out.push_back(sublinearExpect(theta, phi));
        }
    }
    return out;
}

SteinIntegrand steinIntegrand(const UncertaintySet& theta, const SolutionField& field, double s, double tieTol) {
    const Interpolant phi(field, s);
    const auto idx = maximizerIndices(theta, phi, tieTol);
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i : idx) {
        const double e = measureExpect(theta[i], [&](double x) { return phi.stein(x); });
        hi = std::max(hi, e);
        lo = std::min(lo, e);
    }
    const double scale = 1.0 / (1.0 - s);
    return {hi * scale, lo * scale, idx.size()};
}

double SteinIdentityReport::errorSup() const { return std::abs(lhs - integralSup); }
double SteinIdentityReport::errorInf() const { return std::abs(lhs - integralInf); }

namespace {

std::string describe(const SteinIdentityReport& r) {
    std::ostringstream os;
    os.precision(6);
    os << "quadrature unresolved: lhs = " << r.lhs << ", sup integral = " << r.integralSup
       << ", inf integral = " << r.integralInf << ", budget = " << r.budget;
    return os.str();
}

// (1 - s)^{a/2} s^{-(1+a)/2}
double envelope(double s, double a) { return std::pow(1.0 - s, 0.5 * a) * std::pow(s, -0.5 * (1.0 + a)); }

std::vector<std::size_t> signature(const UncertaintySet& theta, const SolutionField& field, double s) {
    return maximizerIndices(theta, Interpolant(field, s), kSteinTieTolerance);
}

// w is a max of smooth curves, so its derivative jumps wherever the set of
// maximizers changes. Panels containing such a switch are split there so the
// midpoint rule keeps its order.
std::vector<QuadNode> splitNodes(const UncertaintySet& theta, const SolutionField& field, const QuadSpec& quad,
                                 bool withTails, std::size_t& switches) {
    std::vector<QuadNode> out;
    switches = 0;
    const int q = quad.pointsPerPanel;
    for (const Panel& panel : gradedPanels(quad)) {
        std::vector<double> probe{panel.lo};
        const double h = (panel.hi - panel.lo) / q;
        for (int k = 0; k < q; ++k) probe.push_back(panel.lo + (k + 0.5) * h);
        probe.push_back(panel.hi);

        std::vector<double> cuts{panel.lo};
        auto left = signature(theta, field, probe[0]);
        for (std::size_t k = 1; k < probe.size(); ++k) {
            auto right = signature(theta, field, probe[k]);
            if (right == left) continue;
            double a = probe[k - 1];
            double b = probe[k];
            for (int it = 0; it < 60 && b - a > 1e-15; ++it) {
                const double m = 0.5 * (a + b);
                if (signature(theta, field, m) == left) {
                    a = m;
                } else {
                    b = m;
                }
            }
            cuts.push_back(0.5 * (a + b));
            ++switches;
            left = std::move(right);
        }
        cuts.push_back(panel.hi);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            if (cuts[c + 1] > cuts[c]) appendMidpoints(out, cuts[c], cuts[c + 1], q);
        }
    }
    if (withTails) {
        std::vector<QuadNode> left;
        appendMidpoints(left, 0.0, quad.eps, q);
        out.insert(out.begin(), left.begin(), left.end());
        appendMidpoints(out, 1.0 - quad.eps, 1.0, q);
    }
    return out;
}

}  // namespace

QuadratureUnresolved::QuadratureUnresolved(SteinIdentityReport report)
    : std::runtime_error(describe(report)), report_(std::move(report)) {}

SolutionField steinField(const UncertaintySet& theta, const GCoeff& coeff, const TestFunction& phi,
                         const SteinSettings& settings) {
    SpaceTimeGrid grid = SpaceTimeGrid::symmetric(coeff, settings.dx, theta.maxAbsPosition(), 1.0, settings.cfl);
    grid.maxStoredLayers = settings.maxStoredLayers;
    grid.denseLayers = grid.steps() / std::max<std::size_t>(1, settings.maxStoredLayers);
    return solveGHeat(coeff, phi, grid);
}

SteinIdentityReport steinIdentity(const UncertaintySet& theta, const GCoeff& coeff, const TestFunction& phi,
                                  const SteinSettings& settings) {
    return steinIdentity(theta, steinField(theta, coeff, phi, settings), settings);
}

SteinIdentityReport steinIdentity(const UncertaintySet& theta, const SolutionField& field,
                                  const SteinSettings& settings) {
    const double a = settings.envelopeAlpha;
    if (!(a > 0.0 && a < 1.0)) {
        throw InvalidModel("tail envelope exponent must lie in (0, 1)");
    }
    SteinIdentityReport r;
    r.gNormal = field.value(0.0, 1.0);
    r.sublinear = sublinearExpect(theta, field.initialDatum());
    r.lhs = r.gNormal - r.sublinear;

    const auto nodes = splitNodes(theta, field, settings.quad, settings.integrateTails, r.switchPoints);
    r.sGrid.reserve(nodes.size());
    r.integrandSup.reserve(nodes.size());
    r.integrandInf.reserve(nodes.size());
    for (const auto& node : nodes) {
        const SteinIntegrand v = steinIntegrand(theta, field, node.s);
        r.sGrid.push_back(node.s);
        r.integrandSup.push_back(v.sup);
        r.integrandInf.push_back(v.inf);
        r.integralSup += node.weight * v.sup;
        r.integralInf += node.weight * v.inf;
        const double gap = v.sup - v.inf;
        r.discrepancySupInf = std::max(r.discrepancySupInf, gap);
        if (gap > 1e-9 * (1.0 + std::abs(v.sup))) ++r.discrepantNodes;
    }

    // Envelope constants fitted on the first and last graded panels.
    const double eps = settings.quad.eps;
    double cLeft = 0.0;
    double cRight = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double s = nodes[i].s;
        const double mag = std::max(std::abs(r.integrandSup[i]), std::abs(r.integrandInf[i]));
        if (s >= eps && s <= 2.0 * eps) cLeft = std::max(cLeft, mag / envelope(s, a));
        if (s <= 1.0 - eps && s >= 1.0 - 2.0 * eps) cRight = std::max(cRight, mag / envelope(s, a));
    }
    const double p = 0.5 * (1.0 - a);
    const double leftTail = cLeft * std::pow(eps, p) / p;
    const double rightTail =
        cRight * std::pow(1.0 - eps, -0.5 * (1.0 + a)) * std::pow(eps, 1.0 + 0.5 * a) / (1.0 + 0.5 * a);
    r.tailBound = leftTail + rightTail;
    r.budget = settings.relTol * (1.0 + std::abs(r.lhs)) + r.tailBound;

    if (settings.throwOnUnresolved && !r.resolved()) {
        throw QuadratureUnresolved(std::move(r));
    }
    return r;
}

OneSidedReport oneSidedDerivativeCheck(const UncertaintySet& theta, const SolutionField& field, double s, double h) {
    if (!(h > 0.0) || s < 10.0 * h || s + 11.0 * h > 1.0) {
        throw InvalidModel("one-sided check needs h > 0 and s at least 10 h away from 0 and 1");
    }
    const Interpolant at(field, s);
    const Interpolant ahead(field, s + h);
    const double numeric = (sublinearExpect(theta, ahead) - sublinearExpect(theta, at)) / h;
    const SteinIntegrand v = steinIntegrand(theta, field, s);
    return {numeric, v.sup, v.inf};
}

namespace {

double estimateHolderOfSecond(const TestFunction& phi, double alpha, double radius) {
    const double h = 1e-3;
    const auto n = static_cast<std::size_t>(std::ceil(2.0 * radius / h)) + 1;
    SampledFunction samples;
    samples.x0 = -radius;
    samples.dx = h;
    samples.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) samples.values[i] = phi.secondDerivative(-radius + static_cast<double>(i) * h);
    return holderSeminorm(samples, alpha, 2.0 * radius);
}

}  // namespace

SteinBoundReport steinBound(const UncertaintySet& theta, const TestFunction& phi, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw InvalidModel("alpha must lie in (0, 1]");
    }
    if (!centeredCheck(theta)) {
        throw NotCentered("N[x] or N[-x] is nonzero");
    }
    const GCoeff G = GCoeff::fromVariances(varianceBounds(theta));

    SteinBoundReport r;
    r.holder = phi.holderOfSecond ? phi.holderOfSecond(alpha)
                                  : estimateHolderOfSecond(phi, alpha, theta.maxAbsPosition() + 1.0);
    const double moment = absMoment(theta, 2.0 + alpha);
    r.rhs = 2.0 * r.holder * moment;
    r.intermediateBound = r.holder * moment;

    const double d20 = phi.secondDerivative(0.0);
    const double g0 = G(d20);
    bool first = true;
    for (std::size_t i : maximizerIndices(theta, phi)) {
        const DiscreteMeasure& mu = theta[i];
        const double lhs = std::abs(
            measureExpect(mu, [&](double x) { return 0.5 * x * phi.derivative(x) - G(phi.secondDerivative(x)); }));
        const double second = measureExpect(mu, [](double x) { return x * x; });
        const double inter = std::abs(0.5 * d20 * second - g0);
        r.intermediate = std::max(r.intermediate, inter);
        if (first || lhs > r.lhs) {
            r.lhs = lhs;
            r.maximizerUsed = mu;
            first = false;
        }
    }
    return r;
}

TaylorRemainders taylorRemainders(const TestFunction& phi, double x) {
    const double p0 = phi(0.0);
    const double d10 = phi.derivative(0.0);
    const double d20 = phi.secondDerivative(0.0);
    return {phi(x) - p0 - d10 * x - 0.5 * d20 * x * x, phi.derivative(x) - d10 - d20 * x,
            phi.secondDerivative(x) - d20};
}

bool taylorContractHolds(const TaylorRemainders& r, double holder, double alpha, double x, double tol) {
    const double ax = std::abs(x);
    return std::abs(r.r0) <= 0.5 * holder * std::pow(ax, 2.0 + alpha) + tol &&
           std::abs(r.r1) <= holder * std::pow(ax, 1.0 + alpha) + tol &&
           std::abs(r.r2) <= holder * std::pow(ax, alpha) + tol;
}

ClassicalResidualReport classicalSteinResidual(const GCoeff& coeff, const TestFunction& phi,
                                               std::span<const double> xProbe, const ClassicalSettings& settings) {
    if (!coeff.isLinear()) {
        throw InvalidModel("classical Stein residual needs sigma_bar == sigma_under");
    }
    double reach = 0.0;
    for (double x : xProbe) reach = std::max(reach, std::abs(x));
    SpaceTimeGrid grid = SpaceTimeGrid::symmetric(coeff, settings.dx, reach, 1.0, settings.cfl);
    grid.maxStoredLayers = settings.maxStoredLayers;
    grid.denseLayers = grid.steps() / std::max<std::size_t>(1, settings.maxStoredLayers);
    const SolutionField field = solveGHeat(coeff, phi, grid);

    // With r = sqrt(1 - s): g' = 2 int_0^1 v_x(r x, 1 - r^2) dr and
    // g'' = 2 int_0^1 r v_xx(r x, 1 - r^2) dr; both integrands are smooth in r.
    const auto nodes = gradedMidpointNodesFull(settings.quad);
    const double sigmaSq = coeff.sigmaBarSq();

    ClassicalResidualReport out;
    out.expectation = field.value(0.0, 1.0);
    for (double x : xProbe) {
        double g1 = 0.0;
        double g2 = 0.0;
        for (const auto& node : nodes) {
            const double rr = node.s;
            const double t = 1.0 - rr * rr;
            g1 += node.weight * 2.0 * field.dx1(rr * x, t);
            g2 += node.weight * 2.0 * rr * field.dx2(rr * x, t);
        }
        const double res = std::abs(0.5 * sigmaSq * g2 - 0.5 * x * g1 - (out.expectation - phi(x)));
        out.x.push_back(x);
        out.g1.push_back(g1);
        out.g2.push_back(g2);
        out.residual.push_back(res);
        out.maxResidual = std::max(out.maxResidual, res);
    }
    return out;
}

}  // namespace gstein
