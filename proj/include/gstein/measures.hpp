#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gstein/test_function.hpp"

namespace gstein {

struct Atom {
    double position;
    double weight;
};

/**
 * Finitely supported probability measure on the real line.
 *
 * Atoms are kept sorted by ascending position; every expectation sums in that
 * order so results do not depend on how the measure was written down.
 * Construction throws InvalidModel unless weights are positive, sum to one
 * within 1e-12, and positions are pairwise distinct.
 */
class DiscreteMeasure {
public:
    explicit DiscreteMeasure(std::vector<Atom> atoms);

    static DiscreteMeasure pointMass(double x);
    // (delta_{-a} + delta_{a}) / 2
    static DiscreteMeasure rademacher(double a);

    std::span<const Atom> atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

    double maxAbsPosition() const;
    // Same weights, positions multiplied by factor > 0.
    DiscreteMeasure scaled(double factor) const;

    bool operator==(const DiscreteMeasure& other) const;

private:
    std::vector<Atom> atoms_;
};

// Nonempty finite set of measures; its upper expectation is a sublinear expectation.
class UncertaintySet {
public:
    explicit UncertaintySet(std::vector<DiscreteMeasure> measures);

    std::size_t size() const { return measures_.size(); }
    const DiscreteMeasure& operator[](std::size_t i) const { return measures_[i]; }
    auto begin() const { return measures_.begin(); }
    auto end() const { return measures_.end(); }
    std::span<const DiscreteMeasure> measures() const { return measures_; }

    double maxAbsPosition() const;
    UncertaintySet scaled(double factor) const;

private:
    std::vector<DiscreteMeasure> measures_;
};

template <class F>
double measureExpect(const DiscreteMeasure& mu, const F& phi) {
    double acc = 0.0;
    for (const Atom& a : mu.atoms()) {
        acc += a.weight * phi(a.position);
    }
    return acc;
}

template <class F>
double sublinearExpect(const UncertaintySet& theta, const F& phi) {
    double best = measureExpect(theta[0], phi);
    for (std::size_t i = 1; i < theta.size(); ++i) {
        best = std::max(best, measureExpect(theta[i], phi));
    }
    return best;
}

inline constexpr double kDefaultTieTolerance = 1e-12;

// Indices of measures within tol (1 + |N[phi]|) of the upper expectation. Never empty.
template <class F>
std::vector<std::size_t> maximizerIndices(const UncertaintySet& theta, const F& phi,
                                          double tol = kDefaultTieTolerance) {
    std::vector<double> values(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        values[i] = measureExpect(theta[i], phi);
    }
    const double best = *std::max_element(values.begin(), values.end());
    const double cut = best - tol * (1.0 + std::abs(best));
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= cut) out.push_back(i);
    }
    return out;
}

template <class F>
UncertaintySet maximizerSet(const UncertaintySet& theta, const F& phi, double tol = kDefaultTieTolerance) {
    std::vector<DiscreteMeasure> kept;
    for (std::size_t i : maximizerIndices(theta, phi, tol)) {
        kept.push_back(theta[i]);
    }
    return UncertaintySet(std::move(kept));
}

// N[x] and N[-x] both within 1e-12 of zero.
bool centeredCheck(const UncertaintySet& theta);

struct VarianceBounds {
    double sigmaUnderSq;
    double sigmaBarSq;
};

// (-N[-x^2], N[x^2]); throws DegenerateVariance when the lower one is not positive.
VarianceBounds varianceBounds(const UncertaintySet& theta);

// N[|x|^p], p > 0.
double absMoment(const UncertaintySet& theta, double p);

// psi(x) = max_mu sum_k w_k phi(x + x_k), the one-step independence recursion.
// Carries phi's Lipschitz constant over.
TestFunction stepExpect(const UncertaintySet& theta, const TestFunction& phi);

}  // namespace gstein
