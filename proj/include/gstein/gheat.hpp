#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gstein/kernels.hpp"
#include "gstein/measures.hpp"
#include "gstein/test_function.hpp"

namespace gstein {

enum class Exec { Serial, Parallel };

/// Variance bounds of a G-normal law: G(a) = (sigmaBar^2 a^+ - sigmaUnder^2 a^-) / 2.
class GCoeff {
public:
    GCoeff(double sigmaBar, double sigmaUnder);

    static GCoeff fromVariances(const VarianceBounds& v);
    /// The normalized coefficient with ratio beta and midpoint 1:
    /// sigmaUnder = 2 / (1 + beta), sigmaBar = 2 beta / (1 + beta).
    static GCoeff normalized(double beta);

    double sigmaBar() const { return sigmaBar_; }
    double sigmaUnder() const { return sigmaUnder_; }
    double sigmaBarSq() const { return sigmaBar_ * sigmaBar_; }
    double sigmaUnderSq() const { return sigmaUnder_ * sigmaUnder_; }
    double beta() const { return sigmaBar_ / sigmaUnder_; }
    double sigma() const { return 0.5 * (sigmaBar_ + sigmaUnder_); }
    bool isLinear() const { return sigmaBar_ == sigmaUnder_; }

    double operator()(double a) const { return kernels::gValue(sigmaBarSq(), sigmaUnderSq(), a); }

private:
    double sigmaBar_;
    double sigmaUnder_;
};

inline double gApply(const GCoeff& coeff, double a) { return coeff(a); }

/**
 * Space-time discretization of R x [0, T].
 *
 * The solver runs steps() explicit steps of size stepSize() = T / steps(),
 * which never exceeds the requested dt. Not every layer is kept: layers
 * 0..denseLayers, every storeStride-th layer, the final one, and the layer
 * nearest to each entry of keepTimes are stored. storeStride = 0 picks a
 * stride giving roughly maxStoredLayers layers.
 */
struct SpaceTimeGrid {
    double xMin = -8.0;
    double xMax = 8.0;
    std::size_t nx = 1601;
    double T = 1.0;
    double dt = 2e-5;
    std::size_t storeStride = 0;
    std::size_t denseLayers = 0;
    std::size_t maxStoredLayers = 1000;
    std::vector<double> keepTimes;

    double dx() const { return (xMax - xMin) / static_cast<double>(nx - 1); }
    std::size_t steps() const;
    double stepSize() const { return T / static_cast<double>(steps()); }
    double node(std::size_t i) const { return xMin + static_cast<double>(i) * dx(); }

    /// Symmetric grid with 0 on a node, half-width reach + 8 sigmaBar sqrt(T) rounded up
    /// to a whole number of cells, and dt = cfl dx^2 / sigmaBar^2.
    static SpaceTimeGrid symmetric(const GCoeff& coeff, double dx, double reach, double T, double cfl = 0.4);
};

/// Throws UnstableGrid if sigmaBar^2 dt / dx^2 > 1/2, InvalidModel for malformed boxes.
void validateGrid(const SpaceTimeGrid& grid, const GCoeff& coeff);

/// Node samples of a function of x: values[i] at x0 + i dx, taken at time t.
struct SampledFunction {
    double x0 = 0.0;
    double dx = 1.0;
    double t = 0.0;
    std::vector<double> values;
};

class SolutionField {
public:
    SolutionField(SpaceTimeGrid grid, GCoeff coeff, TestFunction datum, std::vector<double> times,
                  std::vector<double> data);

    const SpaceTimeGrid& grid() const { return grid_; }
    const GCoeff& coeff() const { return coeff_; }
    const TestFunction& initialDatum() const { return datum_; }

    std::size_t layerCount() const { return times_.size(); }
    std::span<const double> times() const { return times_; }
    std::span<const double> layer(std::size_t k) const;
    std::size_t nearestLayer(double t) const;

    /// Bilinear interpolation; exact at nodes. Throws OutOfDomain outside the box.
    double value(double x, double t) const;
    /// Central first / second differences at nodes, interpolated bilinearly.
    double dx1(double x, double t) const;
    double dx2(double x, double t) const;

private:
    enum class Quantity { Value, First, Second };
    double interpolate(double x, double t, Quantity q) const;
    double nodal(std::size_t layerIdx, std::size_t i, Quantity q) const;

    SpaceTimeGrid grid_;
    GCoeff coeff_;
    TestFunction datum_;
    std::vector<double> times_;
    std::vector<double> data_;
};

/// Explicit monotone scheme u^{k+1}_i = u^k_i + dt G(D^2 u^k_i), zero second difference at the two end nodes.
SolutionField solveGHeat(const GCoeff& coeff, const TestFunction& phi, const SpaceTimeGrid& grid,
                         Exec exec = Exec::Parallel);

/// N_G[phi] = u(0, 1).
double gNormalExpect(const GCoeff& coeff, const TestFunction& phi, const SpaceTimeGrid& grid);

double evalField(const SolutionField& field, double x, double t);

/// Second differences on interior nodes of the stored layer nearest to t.
SampledFunction secondDeriv(const SolutionField& field, double t);

/// Restrict samples to nodes with |x| <= halfWidth.
SampledFunction restrictTo(const SampledFunction& f, double halfWidth);

/// Discrete [f]_alpha over node pairs at distance <= windowRadius.
double holderSeminorm(const SampledFunction& samples, double alpha, double windowRadius,
                      Exec exec = Exec::Parallel);

struct RegularityOptions {
    double baseDx = 0.04;
    int levels = 3;  // baseDx, baseDx/2, ...
    double windowRadius = 1.0;
    double interiorHalfWidth = 5.0;
    double stabilityTol = 0.10;
    double safety = 0.10;
    double cfl = 0.4;

    RegularityOptions refined() const {
        RegularityOptions r = *this;
        r.baseDx *= 0.5;
        return r;
    }
};

struct RegularityCandidate {
    double alpha;
    std::vector<double> maxScaled;  // M(alpha) per grid level, coarse to fine
    double relativeChange;
    bool stable;
};

struct RegularityEstimate {
    double alpha = 0.0;
    double cAlpha = 0.0;
    double CAlpha = 0.0;
    std::vector<RegularityCandidate> candidates;
    std::vector<double> levelDx;

    static double bigC(double alpha, double cAlpha) { return 4.0 * cAlpha / (1.0 - alpha); }
};

/// M(alpha) = max over phi and t of t^{(1+alpha)/2} [D^2 u_phi(., t)]_alpha on each grid level;
/// picks the largest alpha whose M moves by at most stabilityTol between the two finest levels.
RegularityEstimate estimateRegularity(const GCoeff& coeff, std::span<const TestFunction> suite,
                                      std::span<const double> alphaGrid, std::span<const double> tGrid,
                                      const RegularityOptions& options = {});

/// Geometric sequence of count points from lo to hi.
std::vector<double> geometricGrid(double lo, double hi, std::size_t count);

}  // namespace gstein
