#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gstein/gheat.hpp"
#include "gstein/kernels.hpp"
#include "gstein/measures.hpp"
#include "gstein/test_function.hpp"

namespace gstein {

/// X_1, ..., X_n i.i.d. under a centered Theta with positive lower variance.
struct IidSpec {
    UncertaintySet theta;
    std::size_t n;

    IidSpec(UncertaintySet theta, std::size_t n);
    std::vector<UncertaintySet> components() const { return std::vector<UncertaintySet>(n, theta); }
};

/**
 * Independent, not identically distributed xi_1, ..., xi_n sharing one
 * variance ratio beta. sigma_i is the midpoint of component i's standard
 * deviation bounds, sigma^2 = sum sigma_i^2 and t_i = sum_{k<=i} sigma_k^2 / sigma^2.
 */
struct NonIidSpec {
    std::vector<UncertaintySet> components;
    std::vector<double> sigmas;
    std::vector<double> breakpoints;  // t_0 = 0, ..., t_n = 1
    double sigma = 0.0;
    double beta = 1.0;

    /// Validates centering and a common beta (within 1e-9, else MixedBeta).
    explicit NonIidSpec(std::vector<UncertaintySet> components);
};

/// Common lattice of all atom positions: position = offset * step.
struct LatticeModel {
    double step = 0.0;
    std::vector<std::vector<kernels::LatticeMeasure>> components;
};

/// Finds a common rational step for all atoms (continued fractions, denominators
/// up to maxDenominator). Empty if some atom is not rational at that scale or the
/// reachable lattice would exceed maxPoints.
std::optional<LatticeModel> detectLattice(std::span<const UncertaintySet> components, long long maxDenominator,
                                          std::size_t maxPoints);

enum class DpMode { Auto, Lattice, Grid };

struct DpOptions {
    DpMode mode = DpMode::Auto;
    double gridStep = 1e-3;
    double interpBudget = 1e-3;  // grid mode rejects larger interpolation error bounds
    long long maxDenominator = 1'000'000;  // convergents of quadratic irrationals then miss the 1e-13 match
    std::size_t maxLatticePoints = 50'000'000;
    Exec exec = Exec::Parallel;
};

struct DpResult {
    double value = 0.0;
    bool lattice = false;
    double step = 0.0;              // lattice step or grid spacing (in units of the sum)
    double interpErrorBound = 0.0;  // 0 in lattice mode
};

/// E[phi((xi_1 + ... + xi_n) / scale)] under sequential independence by the
/// backward recursion psi_{i-1}(x) = max_mu sum_k w_k psi_i(x + x_k / scale).
DpResult dpSumExpectDetailed(std::span<const UncertaintySet> components, const TestFunction& phi, double scale,
                             const DpOptions& options = {});

double dpSumExpect(std::span<const UncertaintySet> components, const TestFunction& phi, double scale,
                   const DpOptions& options = {});

struct OracleLimits {
    std::size_t maxPolicies = std::size_t{1} << 20;
    std::size_t maxPaths = 1'000'000;
};

/// Enumerates every adaptive policy (a measure for each reachable partial sum at
/// each step) and returns the best policy value. Throws BudgetExceeded past the limits.
double bruteForcePolicyOracle(std::span<const UncertaintySet> components, const TestFunction& phi, double scale,
                              const OracleLimits& limits = {});

struct CltSettings {
    double pdeDx = 0.01;
    double cfl = 0.4;
    DpOptions dp;
};

/// N_G[phi] on the grid for pdeDx, plus |u_h - u_2h| at (0, 1) as its error estimate.
struct GNormalValue {
    double value;
    double richardson;
};

GNormalValue gNormalWithEstimate(const GCoeff& coeff, const TestFunction& phi, const CltSettings& settings);

struct CltErrorValue {
    double error;
    double dpValue;
    double gNormal;
    double budget;  // Richardson PDE estimate + DP interpolation bound
};

/// |E[phi(W_n)] - N_G[phi]|; coeff must equal varianceBounds(spec.theta).
CltErrorValue cltError(const IidSpec& spec, const TestFunction& phi, const GCoeff& coeff,
                       const CltSettings& settings = {});

struct RateRow {
    std::size_t n;
    double error;
    double bound;
    double budget;
    bool pass;
    std::string worst;  // family member attaining the error
};

struct RateReport {
    std::vector<RateRow> rows;
    RegularityEstimate regularity;
    double moment = 0.0;  // the moment factor of the bound
    std::optional<double> slope;

    bool allPass() const;
};

/// Least-squares slope of log error against log n over rows with error > 0;
/// empty with fewer than two such rows.
std::optional<double> logLogSlope(std::span<const RateRow> rows);

RateReport rateExperiment(const UncertaintySet& theta, std::span<const std::size_t> nList,
                          std::span<const TestFunction> family, const RegularityEstimate& reg, const GCoeff& coeff,
                          const CltSettings& settings = {});

/// One row for n = components.size(); reg must be estimated for GCoeff::normalized(spec.beta).
RateReport nonIidExperiment(const NonIidSpec& spec, std::span<const TestFunction> family,
                            const RegularityEstimate& reg, const CltSettings& settings = {});

struct TraceStep {
    std::size_t i;
    double a;
    double increment;  // |A_i - A_{i-1}|, 0 for i = 0
    double stepBound;  // (2c / n^{alpha/2}) int s^{-(1+alpha)/2} ds N|X|^{2+alpha}, 0 for i = 0
};

struct Trace {
    std::vector<TraceStep> steps;
    double budget = 0.0;    // numerical slack for each per-step comparison
    double endValue = 0.0;  // E[phi(W_n)] by the DP on phi itself

    bool telescopes() const;     // |A_n - A_0| <= sum |A_i - A_{i-1}|
    bool stepsWithinBound() const;
};

/// A_i = E[u(W_i, 1 - i/n)] for i = 0..n with W_i the partial sums over sqrt(n).
Trace interpolationTrace(const IidSpec& spec, const GCoeff& coeff, const TestFunction& phi,
                         const RegularityEstimate& reg, const CltSettings& settings = {});

}  // namespace gstein
