#include "gstein/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "gstein/errors.hpp"

namespace gstein {
namespace {

std::vector<double> breakpoints(const QuadSpec& spec) {
    if (!(spec.eps > 0.0 && spec.eps < 0.25) || spec.levels < 0 || spec.pointsPerPanel < 1) {
        throw InvalidModel("quadrature needs 0 < eps < 1/4, levels >= 0, points per panel >= 1");
    }
    std::vector<double> left;
    double b = spec.eps;
    left.push_back(b);
    for (int j = 0; j < spec.levels; ++j) {
        const double next = 2.0 * b;
        if (next >= 0.5) break;
        left.push_back(next);
        b = next;
    }
    const double lastWidth = left.size() > 1 ? left.back() - left[left.size() - 2] : left.back();
    const double midLo = left.back();
    const double midHi = 1.0 - left.back();
    const auto midPanels = static_cast<int>(std::max(1.0, std::ceil((midHi - midLo) / lastWidth - 1e-12)));

    std::vector<double> pts = left;
    for (int k = 1; k < midPanels; ++k) {
        pts.push_back(midLo + (midHi - midLo) * k / midPanels);
    }
    for (auto it = left.rbegin(); it != left.rend(); ++it) pts.push_back(1.0 - *it);
    return pts;
}

}  // namespace

void appendMidpoints(std::vector<QuadNode>& out, double lo, double hi, int q) {
    const double h = (hi - lo) / q;
    for (int k = 0; k < q; ++k) out.push_back({lo + (k + 0.5) * h, h});
}

std::vector<Panel> gradedPanels(const QuadSpec& spec) {
    const auto pts = breakpoints(spec);
    std::vector<Panel> out;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) out.push_back({pts[i], pts[i + 1]});
    return out;
}

std::vector<QuadNode> gradedMidpointNodes(const QuadSpec& spec) {
    std::vector<QuadNode> out;
    for (const Panel& p : gradedPanels(spec)) appendMidpoints(out, p.lo, p.hi, spec.pointsPerPanel);
    return out;
}

std::vector<QuadNode> gradedMidpointNodesFull(const QuadSpec& spec) {
    std::vector<QuadNode> out;
    out.push_back({0.5 * spec.eps, spec.eps});
    const auto inner = gradedMidpointNodes(spec);
    out.insert(out.end(), inner.begin(), inner.end());
    out.push_back({1.0 - 0.5 * spec.eps, spec.eps});
    return out;
}

}  // namespace gstein
