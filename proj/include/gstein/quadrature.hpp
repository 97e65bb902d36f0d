#pragma once

#include <vector>

namespace gstein {

/// Composite midpoint rule on [0, 1] with panels graded geometrically
/// (ratio 1/2) toward both ends. Breakpoints eps 2^j, j = 0..levels, mirror
/// at 1; the middle is covered by panels no wider than the last graded one.
/// Every panel holds pointsPerPanel equally spaced midpoints.
struct QuadSpec {
    double eps = 1e-4;
    int levels = 12;
    int pointsPerPanel = 8;

    /// eps / 2, one more level (so all old breakpoints survive), twice the points per panel.
    QuadSpec refined() const { return {eps * 0.5, levels + 1, pointsPerPanel * 2}; }
};

struct QuadNode {
    double s;
    double weight;
};

struct Panel {
    double lo;
    double hi;
};

/// Panels covering [eps, 1 - eps], ascending.
std::vector<Panel> gradedPanels(const QuadSpec& spec);

/// q equally weighted midpoints of [lo, hi].
void appendMidpoints(std::vector<QuadNode>& out, double lo, double hi, int q);

/// Nodes covering [eps, 1 - eps]; weights are plain panel lengths.
std::vector<QuadNode> gradedMidpointNodes(const QuadSpec& spec);

/// Nodes covering all of [0, 1]: the two end intervals [0, eps] and [1 - eps, 1]
/// are added as single-point panels.
std::vector<QuadNode> gradedMidpointNodesFull(const QuadSpec& spec);

}  // namespace gstein
