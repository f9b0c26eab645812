#pragma once

#include <string>

#include "psychocal/fit.hpp"

namespace psychocal::serialize {

// Fixed 9-decimal rendering used for every real in persisted artifacts,
// so identical fits produce byte-identical files.
std::string fixed9(double v);

// Parameter persistence: one JSON document with sorted keys —
// {"items":[{"a","b","d","item_id"}...], "meta":{...}, "students":[...]}.
void save_fit_result(const irt::FitResult& result, const irt::FitConfig& config,
                     const std::string& path);

irt::FitResult load_fit_result(const std::string& path);

}  // namespace psychocal::serialize
