#include "gstein/measures.hpp"

#include <memory>
#include <string>

#include "gstein/errors.hpp"

namespace gstein {

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) {
        throw InvalidModel("measure has no atoms");
    }
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& a, const Atom& b) { return a.position < b.position; });
    double total = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const Atom& a = atoms_[i];
        if (!std::isfinite(a.position) || !std::isfinite(a.weight)) {
            throw InvalidModel("measure has a non-finite atom");
        }
        if (!(a.weight > 0.0)) {
            throw InvalidModel("atom weight must be positive, got " + std::to_string(a.weight));
        }
        if (i > 0 && atoms_[i - 1].position == a.position) {
            throw InvalidModel("duplicate atom position " + std::to_string(a.position));
        }
        total += a.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw InvalidModel("weights sum to " + std::to_string(total) + ", expected 1");
    }
}

DiscreteMeasure DiscreteMeasure::pointMass(double x) {
    return DiscreteMeasure({{x, 1.0}});
}

DiscreteMeasure DiscreteMeasure::rademacher(double a) {
    if (!(a > 0.0)) {
        throw InvalidModel("two-point measure needs a > 0");
    }
    return DiscreteMeasure({{-a, 0.5}, {a, 0.5}});
}

double DiscreteMeasure::maxAbsPosition() const {
    return std::max(std::abs(atoms_.front().position), std::abs(atoms_.back().position));
}

DiscreteMeasure DiscreteMeasure::scaled(double factor) const {
    if (!(factor > 0.0)) {
        throw InvalidModel("scale factor must be positive");
    }
    std::vector<Atom> out(atoms_.begin(), atoms_.end());
    for (Atom& a : out) a.position *= factor;
    return DiscreteMeasure(std::move(out));
}

bool DiscreteMeasure::operator==(const DiscreteMeasure& other) const {
    if (atoms_.size() != other.atoms_.size()) return false;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (atoms_[i].position != other.atoms_[i].position || atoms_[i].weight != other.atoms_[i].weight) {
            return false;
        }
    }
    return true;
}

UncertaintySet::UncertaintySet(std::vector<DiscreteMeasure> measures) : measures_(std::move(measures)) {
    if (measures_.empty()) {
        throw InvalidModel("uncertainty set must contain at least one measure");
    }
}

double UncertaintySet::maxAbsPosition() const {
    double m = 0.0;
    for (const auto& mu : measures_) m = std::max(m, mu.maxAbsPosition());
    return m;
}

UncertaintySet UncertaintySet::scaled(double factor) const {
    std::vector<DiscreteMeasure> out;
    out.reserve(measures_.size());
    for (const auto& mu : measures_) out.push_back(mu.scaled(factor));
    return UncertaintySet(std::move(out));
}

bool centeredCheck(const UncertaintySet& theta) {
    const double up = sublinearExpect(theta, [](double x) { return x; });
    const double down = sublinearExpect(theta, [](double x) { return -x; });
    return std::abs(up) <= 1e-12 && std::abs(down) <= 1e-12;
}

VarianceBounds varianceBounds(const UncertaintySet& theta) {
    const double bar = sublinearExpect(theta, [](double x) { return x * x; });
    const double under = -sublinearExpect(theta, [](double x) { return -x * x; });
    if (!(under > 0.0)) {
        throw DegenerateVariance("-N[-x^2] = " + std::to_string(under));
    }
    return {under, bar};
}

double absMoment(const UncertaintySet& theta, double p) {
    if (!(p > 0.0)) {
        throw InvalidModel("moment order must be positive");
    }
    return sublinearExpect(theta, [p](double x) { return std::pow(std::abs(x), p); });
}

TestFunction stepExpect(const UncertaintySet& theta, const TestFunction& phi) {
    auto inner = std::make_shared<const TestFunction>(phi);
    auto set = std::make_shared<const UncertaintySet>(theta);
    TestFunction psi;
    psi.name = "step[" + phi.name + "]";
    psi.lipschitz = phi.lipschitz;
    psi.value = [inner, set](double x) {
        return sublinearExpect(*set, [&](double y) { return (*inner)(x + y); });
    };
    return psi;
}

}  // namespace gstein
