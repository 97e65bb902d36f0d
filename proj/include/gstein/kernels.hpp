#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial
// reference and an OpenMP version. Each output element depends only on
// read-only input, so the two must agree bit for bit at any thread count.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gstein::kernels {

// G(a) = (sigmaBar^2 a^+ - sigmaUnder^2 a^-) / 2
inline double gValue(double sigmaBarSq, double sigmaUnderSq, double a) {
    return 0.5 * (sigmaBarSq * (a > 0.0 ? a : 0.0) - sigmaUnderSq * (a < 0.0 ? -a : 0.0));
}

struct HeatStencil {
    double sigmaBarSq;
    double sigmaUnderSq;
    double dt;
    double invDx2;
};

// A measure with atoms on an integer lattice (offsets in lattice steps).
struct LatticeMeasure {
    std::vector<long> offsets;
    std::vector<double> weights;
};

// A measure with real atom offsets for the interpolating grid recursion.
struct ShiftMeasure {
    std::vector<double> shifts;
    std::vector<double> weights;
};

struct UniformGrid {
    double x0;
    double h;
    std::size_t n;
};

namespace serial {

// out[j] = f((j0 + j) h / divisor)
void sample(const std::function<double(double)>& f, double h, double divisor, long j0, std::span<double> out);

// next[i] = prev[i] + dt G(second difference); end nodes copied unchanged.
void gheatStep(std::span<const double> prev, std::span<double> next, const HeatStencil& s);

// max over pairs 0 < j - i <= window of |f_j - f_i| / ((j - i) dx)^alpha
double holderSeminorm(std::span<const double> f, double dx, double alpha, std::size_t window);

// out[k - outLo] = max_mu sum_a w_a next[k + off_a - nextLo]
void latticeStep(std::span<const double> next, long nextLo, std::span<double> out, long outLo,
                 std::span<const LatticeMeasure> measures);

// out[j] = max_mu sum_a w_a interp(next, x_j + shift_a) for j in [jlo, jhi)
void gridStep(std::span<const double> next, const UniformGrid& grid, std::span<double> out, std::size_t jlo,
              std::size_t jhi, std::span<const ShiftMeasure> measures);

}  // namespace serial

namespace omp {

void sample(const std::function<double(double)>& f, double h, double divisor, long j0, std::span<double> out);
void gheatStep(std::span<const double> prev, std::span<double> next, const HeatStencil& s);
double holderSeminorm(std::span<const double> f, double dx, double alpha, std::size_t window);
void latticeStep(std::span<const double> next, long nextLo, std::span<double> out, long outLo,
                 std::span<const LatticeMeasure> measures);
void gridStep(std::span<const double> next, const UniformGrid& grid, std::span<double> out, std::size_t jlo,
              std::size_t jhi, std::span<const ShiftMeasure> measures);

}  // namespace omp

// Piecewise-linear interpolation on a uniform grid, clamped to its ends.
double interpolate(std::span<const double> values, const UniformGrid& grid, double x);

void setThreadCount(int n);
int threadCount();

}  // namespace gstein::kernels
