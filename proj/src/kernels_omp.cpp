#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "gstein/kernels.hpp"

namespace gstein::kernels {

void setThreadCount(int n) {
    if (n > 0) omp_set_num_threads(n);
}

int threadCount() { return omp_get_max_threads(); }

namespace omp {

namespace {
// Loops shorter than this run on the calling thread; a fork/join costs more.
constexpr std::ptrdiff_t kMinParallel = 512;
}  // namespace

void sample(const std::function<double(double)>& f, double h, double divisor, long j0, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if(n >= kMinParallel)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        out[j] = f(static_cast<double>(j0 + static_cast<long>(j)) * h / divisor);
    }
}

void gheatStep(std::span<const double> prev, std::span<double> next, const HeatStencil& s) {
    const auto n = static_cast<std::ptrdiff_t>(prev.size());
    next[0] = prev[0];
    next[n - 1] = prev[n - 1];
#pragma omp parallel for schedule(static) if(n >= kMinParallel)
    for (std::ptrdiff_t i = 1; i < n - 1; ++i) {
        const double d2 = (prev[i - 1] - 2.0 * prev[i] + prev[i + 1]) * s.invDx2;
        next[i] = prev[i] + s.dt * gValue(s.sigmaBarSq, s.sigmaUnderSq, d2);
    }
}

double holderSeminorm(std::span<const double> f, double dx, double alpha, std::size_t window) {
    std::vector<double> denom(window + 1);
    for (std::size_t d = 1; d <= window; ++d) denom[d] = std::pow(static_cast<double>(d) * dx, alpha);
    double best = 0.0;
    const auto n = static_cast<std::ptrdiff_t>(f.size());
    const auto w = static_cast<std::ptrdiff_t>(window);
#pragma omp parallel for schedule(static) if(n >= kMinParallel) reduction(max : best)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t jmax = std::min(n - 1, i + w);
        for (std::ptrdiff_t j = i + 1; j <= jmax; ++j) {
            best = std::max(best, std::abs(f[j] - f[i]) / denom[j - i]);
        }
    }
    return best;
}

void latticeStep(std::span<const double> next, long nextLo, std::span<double> out, long outLo,
                 std::span<const LatticeMeasure> measures) {
    const auto count = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if(count >= kMinParallel)
    for (std::ptrdiff_t idx = 0; idx < count; ++idx) {
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
    const auto lo = static_cast<std::ptrdiff_t>(jlo);
    const auto hi = static_cast<std::ptrdiff_t>(jhi);
#pragma omp parallel for schedule(static) if(hi - lo >= kMinParallel)
    for (std::ptrdiff_t j = lo; j < hi; ++j) {
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

}  // namespace omp
}  // namespace gstein::kernels
