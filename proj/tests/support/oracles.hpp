#pragma once

// Reference computations that share no code with the library under test.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "gstein/measures.hpp"

namespace oracle {

// E f(mean + sd Z), composite Simpson on mean +- 12 sd.
double gaussianExpect(const std::function<double(double)>& f, double mean, double sd, int intervals = 24000);

// u(x, t) of the linear heat equation u_t = sigma^2 u_xx / 2 with u(., 0) = f.
double heatSolution(const std::function<double(double)>& f, double x, double t, double sigma);

// E f((X_1 + ... + X_n) / scale) for i.i.d. X_i ~ mu, by enumerating every atom path.
double convolutionExpect(const gstein::DiscreteMeasure& mu, int n, const std::function<double(double)>& f,
                         double scale);

// Nested suprema max_mu1 E_mu1 max_mu2 E_mu2 ... f(sum / scale), recursing on real partial sums.
double nestedSup(std::span<const gstein::UncertaintySet> components, const std::function<double(double)>& f,
                 double scale);

// Random finite measure: atoms distinct in [-r, r], weights positive.
gstein::DiscreteMeasure randomMeasure(std::mt19937_64& rng, int minAtoms, int maxAtoms, double r, bool centered);

gstein::UncertaintySet randomSet(std::mt19937_64& rng, int maxMeasures, int maxAtoms, double r, bool centered);

}  // namespace oracle
