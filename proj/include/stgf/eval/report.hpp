#pragma once

#include <string>
#include <vector>

#include "stgf/eval/evaluate.hpp"

namespace stgf::eval {

/// CSV with header method,views,instances,de_mean,de_std,relde_mean,
/// relde_std,runtime_ms; floats carry 6 significant digits.
void write_csv(const std::vector<MetricRow>& rows, const std::string& path);

/// Standalone SVG line chart of de_mean over view count with a +/- std band.
void write_sweep_plot(const std::vector<MetricRow>& rows, const std::string& path);

}  // namespace stgf::eval
