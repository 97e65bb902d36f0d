#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gstein/measures.hpp"
#include "gstein/test_function.hpp"

namespace gstein::catalog {

/// Named uncertainty sets:
///   point        {delta_0}
///   rademacher   {(delta_-1 + delta_1)/2}
///   two-scale    {(delta_-a + delta_a)/2 : a in {0.5, 1}}
///   wide         {(delta_-a + delta_a)/2 : a in {1, 2}}
///   skewed       {2/3 delta_-1 + 1/3 delta_2, (delta_-1 + delta_1)/2}
///   three-point  {delta_-2/4 + delta_0/2 + delta_2/4, (delta_-1 + delta_1)/2}
UncertaintySet model(std::string_view name);
std::vector<std::string> modelNames();

/// Function from a spec `name[:p1[:p2[:p3]]]`:
///   const:c  affine:a:b  quad:q  cube  cos[:k[:amp]]  sine:k:phase  relu  abs
///   ramp[:center:width:smoothing]  hat[:center:halfwidth:smoothing]
/// Defaults: ramp 0:2:0.2, hat 0.5:1:0.2.
TestFunction function(std::string_view spec);

/// lipschitz24, ramps, sines, hats, or a comma list of function specs.
std::vector<TestFunction> family(std::string_view spec);

/// name with every character outside [A-Za-z0-9._-] replaced by '_'.
std::string fileSafe(std::string_view name);

}  // namespace gstein::catalog
