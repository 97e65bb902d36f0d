#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gstein/measures.hpp"

namespace gstein::io {

// Text format: one measure per line written as `w1@x1 w2@x2 ...`; sets are
// separated by one or more blank lines; lines starting with '#' are ignored.
// Output uses 17 significant digits so a round trip is exact.
std::vector<UncertaintySet> parseUncertaintySets(std::string_view text);
std::string formatMeasure(const DiscreteMeasure& mu);
std::string formatUncertaintySets(const std::vector<UncertaintySet>& sets);

std::vector<UncertaintySet> readUncertaintySets(const std::filesystem::path& path);

}  // namespace gstein::io
