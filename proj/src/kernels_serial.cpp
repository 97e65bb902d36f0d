#include <algorithm>
#include <cmath>
#include <limits>

#include "gstein/kernels.hpp"

namespace gstein::kernels {

double interpolate(std::span<const double> values, const UniformGrid& grid, double x) {
    const double t = (x - grid.x0) / grid.h;
    if (t <= 0.0) return values.front();
    const auto last = static_cast<double>(grid.n - 1);
    if (t >= last) return values[grid.n - 1];
    const auto j = static_cast<std::size_t>(t);
    const double frac = t - static_cast<double>(j);
    if (frac == 0.0) return values[j];
    return values[j] + frac * (values[j + 1] - values[j]);
}

namespace serial {

void sample(const std::function<double(double)>& f, double h, double divisor, long j0, std::span<double> out) {
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = f(static_cast<double>(j0 + static_cast<long>(j)) * h / divisor);
    }
}

void gheatStep(std::span<const double> prev, std::span<double> next, const HeatStencil& s) {
    const std::size_t n = prev.size();
    next[0] = prev[0];
    next[n - 1] = prev[n - 1];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double d2 = (prev[i - 1] - 2.0 * prev[i] + prev[i + 1]) * s.invDx2;
        next[i] = prev[i] + s.dt * gValue(s.sigmaBarSq, s.sigmaUnderSq, d2);
    }
}

double holderSeminorm(std::span<const double> f, double dx, double alpha, std::size_t window) {
    std::vector<double> denom(window + 1);
    for (std::size_t d = 1; d <= window; ++d) denom[d] = std::pow(static_cast<double>(d) * dx, alpha);
    double best = 0.0;
    const std::size_t n = f.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t jmax = std::min(n - 1, i + window);
        for (std::size_t j = i + 1; j <= jmax; ++j) {
            best = std::max(best, std::abs(f[j] - f[i]) / denom[j - i]);
        }
    }
    return best;
}

void latticeStep(std::span<const double> next, long nextLo, std::span<double> out, long outLo,
                 std::span<const LatticeMeasure> measures) {
    for (std::size_t idx = 0; idx < out.size(); ++idx) {
        const long k = outLo + static_cast<long>(idx);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& mu : measures) {
            double acc = 0.0;
            for (std::size_t a = 0; a < mu.offsets.size(); ++a) {
                acc += mu.weights[a] * next[static_cast<std::size_t>(k + mu.offsets[a] - nextLo)];
            }
            best = std::max(best, acc);
        }
        out[idx] = best;
    }
}

void gridStep(std::span<const double> next, const UniformGrid& grid, std::span<double> out, std::size_t jlo,
              std::size_t jhi, std::span<const ShiftMeasure> measures) {
    for (std::size_t j = jlo; j < jhi; ++j) {
        const double x = grid.x0 + static_cast<double>(j) * grid.h;
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& mu : measures) {
            double acc = 0.0;
            for (std::size_t a = 0; a < mu.shifts.size(); ++a) {
                acc += mu.weights[a] * interpolate(next, grid, x + mu.shifts[a]);
            }
            best = std::max(best, acc);
        }
        out[j] = best;
    }
}

}  // namespace serial
}  // namespace gstein::kernels
