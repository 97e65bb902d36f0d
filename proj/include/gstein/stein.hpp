#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gstein/gheat.hpp"
#include "gstein/measures.hpp"
#include "gstein/quadrature.hpp"
#include "gstein/test_function.hpp"

namespace gstein {

/// L_G phi (x) = G(phi''(x)) - (x/2) phi'(x).
TestFunction steinOperator(const GCoeff& coeff, const TestFunction& phi);

/**
 * phi_s(x) = v(sqrt(1 - s) x, s) for a solved field v.
 *
 * Derivatives are chain-ruled from the field's nodal differences:
 * phi_s' = sqrt(1 - s) v_x and phi_s'' = (1 - s) v_xx. The field is held by
 * pointer and must outlive the interpolant.
 */
class Interpolant {
public:
    Interpolant(const SolutionField& field, double s);

    double s() const { return s_; }
    double operator()(double x) const { return field_->value(root_ * x, s_); }
    double d1(double x) const { return root_ * field_->dx1(root_ * x, s_); }
    double d2(double x) const { return (1.0 - s_) * field_->dx2(root_ * x, s_); }

    // G(phi_s'') - (x/2) phi_s'
    double stein(double x) const;

private:
    const SolutionField* field_;
    double s_;
    double root_;
};

/// phi_s as a TestFunction (throws InvalidModel unless 0 <= s < 1).
TestFunction interpolantPhiS(const SolutionField& field, double s);

/// w(s) = N[phi_s] at each s (s = 1 evaluates v(0, 1)).
std::vector<double> wCurve(const UncertaintySet& theta, const SolutionField& field, std::span<const double> sGrid);

struct SteinIntegrand {
    double sup;  // (1 - s)^{-1} sup over Theta_s of E_mu[L_G phi_s]
    double inf;
    std::size_t maximizers;
};

inline constexpr double kSteinTieTolerance = 1e-10;

SteinIntegrand steinIntegrand(const UncertaintySet& theta, const SolutionField& field, double s,
                              double tieTol = kSteinTieTolerance);

struct SteinSettings {
    double dx = 0.02;
    double cfl = 0.4;
    QuadSpec quad;
    double relTol = 1e-2;             // budget = relTol (1 + |lhs|)
    double envelopeAlpha = 0.5;       // exponent of the tail envelope
    std::size_t maxStoredLayers = 2000;
    bool throwOnUnresolved = true;
    // Integrate [0, eps] and [1 - eps, 1] with q midpoints each instead of
    // dropping them; their envelope bound stays in the budget either way.
    bool integrateTails = true;

    SteinSettings refined() const {
        SteinSettings r = *this;
        r.dx *= 0.5;
        r.quad = quad.refined();
        return r;
    }
};

struct SteinIdentityReport {
    double lhs = 0.0;  // N_G[phi] - N[phi]
    double gNormal = 0.0;
    double sublinear = 0.0;
    double integralSup = 0.0;
    double integralInf = 0.0;
    std::vector<double> sGrid;
    std::vector<double> integrandSup;
    std::vector<double> integrandInf;
    double discrepancySupInf = 0.0;  // max over nodes of sup - inf
    std::size_t discrepantNodes = 0; // nodes where sup and inf differ beyond round-off
    std::size_t switchPoints = 0;    // maximizer switches located inside panels
    double tailBound = 0.0;          // envelope bound on the two excluded end intervals
    double budget = 0.0;

    double errorSup() const;
    double errorInf() const;
    bool resolved() const { return errorSup() <= budget && errorInf() <= budget; }
};

class QuadratureUnresolved : public std::runtime_error {
public:
    explicit QuadratureUnresolved(SteinIdentityReport report);
    const SteinIdentityReport& report() const { return report_; }

private:
    SteinIdentityReport report_;
};

/// Solves the G-heat equation for phi and compares N_G[phi] - N[phi] with the
/// sup- and inf-integrals of (1 - s)^{-1} E_mu[L_G phi_s] over the maximizers.
SteinIdentityReport steinIdentity(const UncertaintySet& theta, const GCoeff& coeff, const TestFunction& phi,
                                  const SteinSettings& settings = {});

/// Same, on an already solved field (T >= 1, dense enough in time near 0).
SteinIdentityReport steinIdentity(const UncertaintySet& theta, const SolutionField& field,
                                  const SteinSettings& settings = {});

/// The field steinIdentity solves internally.
SolutionField steinField(const UncertaintySet& theta, const GCoeff& coeff, const TestFunction& phi,
                         const SteinSettings& settings);

struct OneSidedReport {
    double numeric;      // (w(s + h) - w(s)) / h
    double formulaSup;   // (1 - s)^{-1} sup_{Theta_s} E_mu[L_G phi_s]
    double formulaInf;
};

OneSidedReport oneSidedDerivativeCheck(const UncertaintySet& theta, const SolutionField& field, double s, double h);

struct SteinBoundReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double intermediate = 0.0;       // |phi''(0) E_mu[x^2] / 2 - G(phi''(0))|
    double intermediateBound = 0.0;  // [phi'']_alpha N[|x|^{2+alpha}]
    double holder = 0.0;             // [phi'']_alpha used
    std::optional<DiscreteMeasure> maximizerUsed;
};

/// lhs = max over maximizers mu of |E_mu[(x/2) phi' - G(phi'')]| with G from
/// varianceBounds(theta); rhs = 2 [phi'']_alpha N[|x|^{2+alpha}].
/// [phi'']_alpha comes from phi.holderOfSecond, or is estimated on samples.
SteinBoundReport steinBound(const UncertaintySet& theta, const TestFunction& phi, double alpha);

struct TaylorRemainders {
    double r0;  // phi(x) - phi(0) - phi'(0) x - phi''(0) x^2 / 2
    double r1;  // phi'(x) - phi'(0) - phi''(0) x
    double r2;  // phi''(x) - phi''(0)
};

TaylorRemainders taylorRemainders(const TestFunction& phi, double x);

/// Checks |R| <= [phi'']_alpha |x|^{2+alpha} / 2, |R1| <= [phi'']_alpha |x|^{1+alpha},
/// |R2| <= [phi'']_alpha |x|^alpha, each with slack tol.
bool taylorContractHolds(const TaylorRemainders& r, double holder, double alpha, double x, double tol = 1e-12);

struct ClassicalSettings {
    double dx = 0.01;
    double cfl = 0.4;
    QuadSpec quad;
    std::size_t maxStoredLayers = 4000;
};

struct ClassicalResidualReport {
    std::vector<double> x;
    std::vector<double> g1;
    std::vector<double> g2;
    std::vector<double> residual;
    double expectation = 0.0;  // E[phi(Z)], Z ~ N(0, sigma^2)
    double maxResidual = 0.0;
};

/// Classical Stein equation E[phi(Z)] - phi(x) = sigma^2 g''(x) / 2 - x g'(x) / 2 with
/// g' = int_0^1 (1 - s)^{-1} phi_s' ds and g'' = int_0^1 (1 - s)^{-1} phi_s'' ds.
ClassicalResidualReport classicalSteinResidual(const GCoeff& coeff, const TestFunction& phi,
                                               std::span<const double> xProbe, const ClassicalSettings& settings = {});

}  // namespace gstein
