#include "oracles.hpp"

#include <cmath>
#include <numbers>

namespace oracle {

double gaussianExpect(const std::function<double(double)>& f, double mean, double sd, int intervals) {
    if (sd == 0.0) return f(mean);
    const double a = -12.0;
    const double h = 24.0 / intervals;
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    double acc = 0.0;
    for (int i = 0; i <= intervals; ++i) {
        const double z = a + i * h;
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * f(mean + sd * z) * norm * std::exp(-0.5 * z * z);
    }
    return acc * h / 3.0;
}

double heatSolution(const std::function<double(double)>& f, double x, double t, double sigma) {
    return gaussianExpect(f, x, sigma * std::sqrt(t));
}

namespace {

double paths(const gstein::DiscreteMeasure& mu, int left, double sum, double prob,
             const std::function<double(double)>& f, double scale) {
    if (left == 0) return prob * f(sum / scale);
    double acc = 0.0;
    for (const auto& a : mu.atoms()) acc += paths(mu, left - 1, sum + a.position, prob * a.weight, f, scale);
    return acc;
}

double nested(std::span<const gstein::UncertaintySet> comps, std::size_t i, double sum,
              const std::function<double(double)>& f, double scale) {
    if (i == comps.size()) return f(sum / scale);
    double best = -INFINITY;
    for (const auto& mu : comps[i]) {
        double acc = 0.0;
        for (const auto& a : mu.atoms()) acc += a.weight * nested(comps, i + 1, sum + a.position, f, scale);
        best = std::max(best, acc);
    }
    return best;
}

}  // namespace

double convolutionExpect(const gstein::DiscreteMeasure& mu, int n, const std::function<double(double)>& f,
                         double scale) {
    return paths(mu, n, 0.0, 1.0, f, scale);
}

double nestedSup(std::span<const gstein::UncertaintySet> components, const std::function<double(double)>& f,
                 double scale) {
    return nested(components, 0, 0.0, f, scale);
}

gstein::DiscreteMeasure randomMeasure(std::mt19937_64& rng, int minAtoms, int maxAtoms, double r, bool centered) {
    std::uniform_int_distribution<int> count(minAtoms, maxAtoms);
    std::uniform_real_distribution<double> pos(-r, r);
    std::uniform_real_distribution<double> wt(0.05, 1.0);
    const int k = count(rng);
    std::vector<gstein::Atom> atoms(static_cast<std::size_t>(k));
    double total = 0.0;
    for (auto& a : atoms) {
        a.position = pos(rng);
        a.weight = wt(rng);
        total += a.weight;
    }
    double mean = 0.0;
    for (auto& a : atoms) {
        a.weight /= total;
        mean += a.weight * a.position;
    }
    if (centered) {
        for (auto& a : atoms) a.position -= mean;
    }
    return gstein::DiscreteMeasure(std::move(atoms));
}

gstein::UncertaintySet randomSet(std::mt19937_64& rng, int maxMeasures, int maxAtoms, double r, bool centered) {
    std::uniform_int_distribution<int> count(1, maxMeasures);
    std::vector<gstein::DiscreteMeasure> ms;
    const int m = count(rng);
    for (int i = 0; i < m; ++i) ms.push_back(randomMeasure(rng, 2, maxAtoms, r, centered));
    return gstein::UncertaintySet(std::move(ms));
}

}  // namespace oracle
